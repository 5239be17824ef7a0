#include "ucscreen/fixtures.hpp"

namespace ucscreen::fixtures {

PowerSystem three_bus() {
  std::vector<Bus> buses{{1, 0.0}, {2, 0.0}, {3, 100.0}};
  std::vector<Line> lines{{1, 1, 2, 1.0, 30.0}, {2, 1, 3, 2.0, 60.0}, {3, 2, 3, 3.0, 90.0}};
  std::vector<Generator> gens{{1, 1, 20.0, 150.0, 10.0, GeneratorKind::Thermal},
                              {2, 2, 20.0, 150.0, 20.0, GeneratorKind::Thermal}};
  return PowerSystem(std::move(buses), std::move(lines), std::move(gens));
}

Scenario three_bus_scenario(const PowerSystem& system, double d3) {
  return Scenario::with_demand(system, {0.0, 0.0, d3});
}

std::vector<double> three_bus_history_levels() { return {50.0, 70.0, 90.0, 110.0, 130.0, 150.0}; }

}  // namespace ucscreen::fixtures
