#include "ucscreen/netmodel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ucscreen {

const char* to_string(GeneratorKind kind) {
  return kind == GeneratorKind::Thermal ? "thermal" : "renewable";
}

GeneratorKind generator_kind_from_string(const std::string& s) {
  if (s == "thermal") return GeneratorKind::Thermal;
  if (s == "renewable") return GeneratorKind::Renewable;
  throw std::invalid_argument("unknown generator kind '" + s + "'");
}

namespace {

void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

}  // namespace

PowerSystem::PowerSystem(std::vector<Bus> buses, std::vector<Line> lines, std::vector<Generator> generators)
    : buses_(std::move(buses)), lines_(std::move(lines)), generators_(std::move(generators)) {
  require(!buses_.empty(), "power system needs at least one bus");
  const int nb = static_cast<int>(buses_.size());
  for (std::size_t i = 0; i < buses_.size(); ++i) {
    const auto& b = buses_[i];
    require(b.id == static_cast<int>(i) + 1, "bus ids must be contiguous 1..N_B in order (bus " +
                                                 std::to_string(b.id) + ")");
    require(std::isfinite(b.nominal_demand) && b.nominal_demand >= 0.0,
            "bus " + std::to_string(b.id) + " has negative nominal demand");
  }
  for (std::size_t i = 0; i < lines_.size(); ++i) {
    const auto& l = lines_[i];
    const std::string tag = "line " + std::to_string(l.id);
    require(l.id == static_cast<int>(i) + 1, "line ids must be contiguous 1..N_L in order (" + tag + ")");
    require(l.from_bus >= 1 && l.from_bus <= nb && l.to_bus >= 1 && l.to_bus <= nb,
            tag + " references an unknown bus");
    require(l.from_bus != l.to_bus, tag + " connects a bus to itself");
    require(l.susceptance > 0.0, tag + " needs positive susceptance");
    require(l.capacity > 0.0, tag + " needs positive capacity");
  }
  for (std::size_t i = 0; i < generators_.size(); ++i) {
    const auto& g = generators_[i];
    const std::string tag = "generator " + std::to_string(g.id);
    require(g.id == static_cast<int>(i) + 1, "generator ids must be contiguous 1..N_G in order (" + tag + ")");
    require(g.bus >= 1 && g.bus <= nb, tag + " sits on an unknown bus");
    require(g.p_min >= 0.0 && g.p_min <= g.p_max, tag + " needs 0 <= p_min <= p_max");
    if (g.kind == GeneratorKind::Thermal) {
      require(g.cost > 0.0 && g.p_min > 0.0, tag + ": thermal units need cost > 0 and p_min > 0");
    } else {
      require(g.cost == 0.0 && g.p_min == 0.0, tag + ": renewable units need cost = 0 and p_min = 0");
    }
  }
}

bool PowerSystem::connected() const { return is_connected(buses_.size(), lines_); }

double PowerSystem::max_cost() const {
  double c = 0.0;
  for (const auto& g : generators_) c = std::max(c, g.cost);
  return c;
}

std::vector<double> PowerSystem::nominal_demand() const {
  std::vector<double> d;
  d.reserve(buses_.size());
  for (const auto& b : buses_) d.push_back(b.nominal_demand);
  return d;
}

PowerSystem PowerSystem::with_scaled_capacities(double factor) const {
  auto lines = lines_;
  for (auto& l : lines) l.capacity *= factor;
  return PowerSystem(buses_, std::move(lines), generators_);
}

Scenario Scenario::with_demand(const PowerSystem& system, std::vector<double> demand) {
  return Scenario{std::move(demand), std::vector<double>(system.num_generators(), 1.0)};
}

void validate_scenario(const PowerSystem& system, const Scenario& scenario) {
  require(scenario.demand.size() == system.num_buses(), "scenario demand length does not match bus count");
  require(scenario.capacity_factor.size() == system.num_generators(),
          "scenario capacity-factor length does not match generator count");
  for (double d : scenario.demand) require(std::isfinite(d) && d >= 0.0, "scenario demand must be >= 0");
  for (std::size_t g = 0; g < system.num_generators(); ++g) {
    const double rho = scenario.capacity_factor[g];
    require(rho >= 0.0 && rho <= 1.0, "capacity factor outside [0, 1]");
    if (system.generators()[g].kind == GeneratorKind::Thermal) {
      require(rho == 1.0, "thermal generators must have capacity factor 1");
    }
  }
}

PtdfMatrix::PtdfMatrix(std::size_t lines, std::size_t buses, int ref_bus, std::vector<double> entries)
    : lines_(lines), buses_(buses), ref_bus_(ref_bus), entries_(std::move(entries)) {
  if (entries_.size() != lines_ * buses_) throw std::invalid_argument("PTDF entry count mismatch");
}

bool is_connected(std::size_t num_buses, const std::vector<Line>& lines) {
  if (num_buses == 0) return true;
  std::vector<std::size_t> parent(num_buses);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  std::size_t components = num_buses;
  for (const auto& l : lines) {
    const auto a = find(static_cast<std::size_t>(l.from_bus - 1));
    const auto b = find(static_cast<std::size_t>(l.to_bus - 1));
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components == 1;
}

PtdfMatrix build_ptdf(const PowerSystem& system, int ref_bus) {
  const auto nb = system.num_buses();
  const auto nl = system.num_lines();
  if (ref_bus < 1 || static_cast<std::size_t>(ref_bus) > nb) {
    throw std::invalid_argument("reference bus " + std::to_string(ref_bus) + " does not exist");
  }
  if (!system.connected()) throw std::runtime_error("singular susceptance matrix");

  const auto ref = static_cast<std::size_t>(ref_bus - 1);
  // Reduced index: buses other than ref, in order.
  std::vector<long> reduced(nb, -1);
  long k = 0;
  for (std::size_t n = 0; n < nb; ++n) {
    if (n != ref) reduced[n] = k++;
  }

  std::vector<double> entries(nl * nb, 0.0);
  if (nb == 1) return PtdfMatrix(nl, nb, ref_bus, std::move(entries));

  Eigen::MatrixXd bred = Eigen::MatrixXd::Zero(k, k);
  for (const auto& l : system.lines()) {
    const long i = reduced[static_cast<std::size_t>(l.from_bus - 1)];
    const long j = reduced[static_cast<std::size_t>(l.to_bus - 1)];
    if (i >= 0) bred(i, i) += l.susceptance;
    if (j >= 0) bred(j, j) += l.susceptance;
    if (i >= 0 && j >= 0) {
      bred(i, j) -= l.susceptance;
      bred(j, i) -= l.susceptance;
    }
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(bred);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
      ldlt.vectorD().minCoeff() <= 1e-12 * std::max(1.0, ldlt.vectorD().maxCoeff())) {
    throw std::runtime_error("singular susceptance matrix");
  }
  // X = Bred^{-1}: angle sensitivity of every (non-ref) bus to injection at each bus.
  const Eigen::MatrixXd x = ldlt.solve(Eigen::MatrixXd::Identity(k, k));

  for (std::size_t l = 0; l < nl; ++l) {
    const auto& line = system.lines()[l];
    const long i = reduced[static_cast<std::size_t>(line.from_bus - 1)];
    const long j = reduced[static_cast<std::size_t>(line.to_bus - 1)];
    for (std::size_t n = 0; n < nb; ++n) {
      const long c = reduced[n];
      if (c < 0) continue;
      const double ti = i >= 0 ? x(i, c) : 0.0;
      const double tj = j >= 0 ? x(j, c) : 0.0;
      entries[l * nb + n] = line.susceptance * (ti - tj);
    }
  }
  return PtdfMatrix(nl, nb, ref_bus, std::move(entries));
}

std::vector<double> dc_flows(const PtdfMatrix& ptdf, std::span<const double> injections, double zero_sum_tol) {
  if (injections.size() != ptdf.num_buses()) {
    throw std::invalid_argument("injection vector length " + std::to_string(injections.size()) +
                                " does not match bus count " + std::to_string(ptdf.num_buses()));
  }
  double total = 0.0, withdrawn = 0.0;
  for (double q : injections) {
    total += q;
    if (q < 0) withdrawn -= q;
  }
  const double tol = zero_sum_tol >= 0.0 ? zero_sum_tol : 1e-6 * std::max(1.0, withdrawn);
  if (std::abs(total) > tol) {
    throw std::invalid_argument("injections do not sum to zero (imbalance " + std::to_string(total) + " MW)");
  }
  std::vector<double> flows(ptdf.num_lines(), 0.0);
  for (std::size_t l = 0; l < ptdf.num_lines(); ++l) {
    const auto row = ptdf.row(l);
    double f = 0.0;
    for (std::size_t n = 0; n < row.size(); ++n) f += row[n] * injections[n];
    flows[l] = f;
  }
  return flows;
}

std::vector<double> net_demand(const Scenario& scenario, const PowerSystem& system) {
  std::vector<double> out = scenario.demand;
  for (std::size_t g = 0; g < system.num_generators(); ++g) {
    const auto& gen = system.generators()[g];
    if (gen.kind != GeneratorKind::Renewable) continue;
    out[static_cast<std::size_t>(gen.bus - 1)] -= scenario.capacity_factor[g] * gen.p_max;
  }
  return out;
}

}  // namespace ucscreen
