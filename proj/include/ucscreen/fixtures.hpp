#pragma once

// Small built-in systems used by the tests, the CLI and the Python bindings.

#include "ucscreen/netmodel.hpp"

#include <vector>

namespace ucscreen::fixtures {

// Three buses, two thermal units (bus 1: 10/MWh, bus 2: 20/MWh, both
// 20-150 MW), all load on bus 3. Lines n1-n2 (b=1, 30 MW), n1-n3 (b=2,
// 60 MW), n2-n3 (b=3, 90 MW).
PowerSystem three_bus();

// Scenario of the three-bus system with `d3` MW at bus 3.
Scenario three_bus_scenario(const PowerSystem& system, double d3);

// Bus-3 demand levels of the historical record set.
std::vector<double> three_bus_history_levels();

}  // namespace ucscreen::fixtures
