#pragma once

// Grid data model, PTDF construction and DC flow evaluation.
//
// Ids of buses, lines and generators are 1-based and contiguous; inside the
// library every container is indexed by (id - 1).

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace ucscreen {

enum class GeneratorKind { Thermal, Renewable };

const char* to_string(GeneratorKind kind);
GeneratorKind generator_kind_from_string(const std::string& s);

struct Bus {
  int id = 0;
  double nominal_demand = 0.0;  // MW
};

struct Line {
  int id = 0;
  int from_bus = 0;
  int to_bus = 0;
  double susceptance = 0.0;  // p.u.
  double capacity = 0.0;     // MW
};

struct Generator {
  int id = 0;
  int bus = 0;
  double p_min = 0.0;  // MW
  double p_max = 0.0;  // MW
  double cost = 0.0;   // currency/MWh
  GeneratorKind kind = GeneratorKind::Thermal;
};

// Immutable static grid. The constructor validates ids and parameter ranges
// and throws std::invalid_argument on any violation. Connectivity is checked
// where it matters, by build_ptdf.
class PowerSystem {
 public:
  PowerSystem(std::vector<Bus> buses, std::vector<Line> lines, std::vector<Generator> generators);

  const std::vector<Bus>& buses() const { return buses_; }
  const std::vector<Line>& lines() const { return lines_; }
  const std::vector<Generator>& generators() const { return generators_; }

  std::size_t num_buses() const { return buses_.size(); }
  std::size_t num_lines() const { return lines_.size(); }
  std::size_t num_generators() const { return generators_.size(); }

  bool connected() const;
  double max_cost() const;
  std::vector<double> nominal_demand() const;

  // Same grid with every line capacity multiplied by `factor`.
  PowerSystem with_scaled_capacities(double factor) const;

 private:
  std::vector<Bus> buses_;
  std::vector<Line> lines_;
  std::vector<Generator> generators_;
};

// One operating period: nodal demand and per-generator capacity factors.
struct Scenario {
  std::vector<double> demand;           // MW, one per bus
  std::vector<double> capacity_factor;  // one per generator, in [0, 1]

  // Scenario with the given demand and rho = 1 for every generator.
  static Scenario with_demand(const PowerSystem& system, std::vector<double> demand);
};

// Throws std::invalid_argument if the scenario does not fit the system.
void validate_scenario(const PowerSystem& system, const Scenario& scenario);

class PtdfMatrix {
 public:
  PtdfMatrix(std::size_t lines, std::size_t buses, int ref_bus, std::vector<double> entries);

  std::size_t num_lines() const { return lines_; }
  std::size_t num_buses() const { return buses_; }
  int ref_bus() const { return ref_bus_; }

  double operator()(std::size_t line, std::size_t bus) const { return entries_[line * buses_ + bus]; }
  std::span<const double> row(std::size_t line) const {
    return {entries_.data() + line * buses_, buses_};
  }

 private:
  std::size_t lines_;
  std::size_t buses_;
  int ref_bus_;
  std::vector<double> entries_;
};

// PTDF of every line w.r.t. injection at each bus withdrawn at `ref_bus` (1-based).
// Throws std::runtime_error("singular susceptance matrix") for disconnected grids.
PtdfMatrix build_ptdf(const PowerSystem& system, int ref_bus = 1);

// Line flows (positive from from_bus to to_bus) for a zero-sum injection vector.
// `zero_sum_tol` < 0 selects the default 1e-6 * max(1, total withdrawal).
std::vector<double> dc_flows(const PtdfMatrix& ptdf, std::span<const double> injections,
                             double zero_sum_tol = -1.0);

// Demand minus available renewable output at each bus.
std::vector<double> net_demand(const Scenario& scenario, const PowerSystem& system);

// True when every bus can reach every other bus through the lines.
bool is_connected(std::size_t num_buses, const std::vector<Line>& lines);

}  // namespace ucscreen
