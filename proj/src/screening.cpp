#include "ucscreen/screening.hpp"

#include "ucscreen/cputime.hpp"
#include "ucscreen/lp.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <numeric>
#include <optional>

namespace ucscreen {

namespace {

// A bound counts as "below capacity" only when strictly below, with this much
// relative margin for LP round-off; a bound sitting at capacity keeps the line.
constexpr double kStrictMargin = 1e-7;

bool strictly_inside(const FlowBounds& b, double capacity) {
  const double limit = capacity * (1.0 - kStrictMargin);
  return std::abs(b.min) < limit && std::abs(b.max) < limit;
}

}  // namespace

CongestionHistory::CongestionHistory(std::vector<HistoryRecord> records) {
  for (auto& r : records) add(std::move(r));
}

void CongestionHistory::add(HistoryRecord record) {
  if (!records_.empty() &&
      (record.net_demand.size() != num_buses() || record.status.size() != num_lines())) {
    throw std::invalid_argument("history records must share dimensions");
  }
  for (auto s : record.status) {
    if (s > 1) throw std::invalid_argument("history statuses must be 0 or 1");
  }
  records_.push_back(std::move(record));
}

ScreeningResult screen_perfect_information(const PowerSystem& system, const UCSolution& full_solution) {
  CpuStopwatch watch;
  if (full_solution.flows.size() != system.num_lines()) {
    throw std::invalid_argument("perfect-information screening needs flows on every line");
  }
  const auto keep = binding_lines(system, full_solution.flows);
  ScreeningResult r{"PI", complement_lines(system.num_lines(), keep), 0.0};
  r.t1_seconds = watch.cpu();
  return r;
}

ScreeningResult screen_naive(const CongestionHistory& history) {
  CpuStopwatch watch;
  if (history.empty()) throw std::invalid_argument("naive screening needs a nonempty history");
  ScreeningResult r{"NV", {}, 0.0};
  for (std::size_t l = 0; l < history.num_lines(); ++l) {
    const bool ever = std::any_of(history.records().begin(), history.records().end(),
                                  [l](const HistoryRecord& rec) { return rec.status[l] != 0; });
    if (!ever) r.removed_lines.push_back(static_cast<int>(l));
  }
  r.t1_seconds = watch.cpu();
  return r;
}

namespace {

// Dispatch region shared by the ZH and RO bound problems: p_g, q_n and
// optionally d_n as columns, nodal and system balance rows, and flow limits on
// the listed lines. Slack is fixed to zero by leaving it out.
struct FlowRegion {
  lp::Model model;
  std::vector<int> injection;
};

FlowRegion make_region(const PowerSystem& system, const PtdfMatrix& ptdf, std::span<const double> capacity_factor,
                       std::span<const double> demand_lo, std::span<const double> demand_hi,
                       const std::vector<int>& limited_lines) {
  FlowRegion reg;
  const auto nb = system.num_buses();
  const auto ng = system.num_generators();
  const bool variable_demand = !std::equal(demand_lo.begin(), demand_lo.end(), demand_hi.begin());
  std::vector<int> p(ng), d;
  for (std::size_t g = 0; g < ng; ++g) {
    p[g] = reg.model.add_column("p_" + std::to_string(g + 1), 0.0,
                                capacity_factor[g] * system.generators()[g].p_max, 0.0);
  }
  for (std::size_t n = 0; n < nb; ++n) {
    reg.injection.push_back(reg.model.add_column("q_" + std::to_string(n + 1), -lp::kInf, lp::kInf, 0.0));
  }
  if (variable_demand) {
    for (std::size_t n = 0; n < nb; ++n) {
      d.push_back(reg.model.add_column("d_" + std::to_string(n + 1), demand_lo[n], demand_hi[n], 0.0));
    }
  }
  for (std::size_t n = 0; n < nb; ++n) {
    std::vector<lp::Term> terms{{reg.injection[n], 1.0}};
    for (std::size_t g = 0; g < ng; ++g) {
      if (static_cast<std::size_t>(system.generators()[g].bus - 1) == n) terms.push_back({p[g], -1.0});
    }
    double rhs = 0.0;
    if (variable_demand) terms.push_back({d[n], 1.0});
    else rhs = -demand_lo[n];
    reg.model.add_row("node_" + std::to_string(n + 1), std::move(terms), rhs, rhs);
  }
  {
    std::vector<lp::Term> terms;
    for (int q : reg.injection) terms.push_back({q, 1.0});
    reg.model.add_row("balance", std::move(terms), 0.0, 0.0);
  }
  for (int l : limited_lines) {
    const auto row = ptdf.row(static_cast<std::size_t>(l));
    std::vector<lp::Term> terms;
    for (std::size_t n = 0; n < nb; ++n) {
      if (row[n] != 0.0) terms.push_back({reg.injection[n], row[n]});
    }
    const double cap = system.lines()[static_cast<std::size_t>(l)].capacity;
    reg.model.add_row("flow_" + std::to_string(l + 1), std::move(terms), -cap, cap);
  }
  return reg;
}

FlowBounds extreme_flows(FlowRegion& reg, const PtdfMatrix& ptdf, int line) {
  const auto row = ptdf.row(static_cast<std::size_t>(line));
  auto& cols = reg.model.columns();
  for (auto& c : cols) c.cost = 0.0;
  for (std::size_t n = 0; n < row.size(); ++n) cols[static_cast<std::size_t>(reg.injection[n])].cost = row[n];
  FlowBounds out;
  for (auto sense : {lp::Sense::Minimize, lp::Sense::Maximize}) {
    reg.model.sense = sense;
    const auto sol = lp::solve_lp(reg.model);
    if (sol.status == lp::Status::Infeasible) {
      throw std::runtime_error("flow-bound problem infeasible (insufficient capacity or empty demand box)");
    }
    if (sol.status != lp::Status::Optimal) {
      throw std::runtime_error(std::string("flow-bound problem failed: ") + lp::to_string(sol.status));
    }
    (sense == lp::Sense::Minimize ? out.min : out.max) = sol.objective;
  }
  return out;
}

void check_line(const PowerSystem& system, int line) {
  if (line < 0 || static_cast<std::size_t>(line) >= system.num_lines()) {
    throw std::out_of_range("line index out of range");
  }
}

}  // namespace

FlowBounds zhai_flow_bounds(const PowerSystem& system, const PtdfMatrix& ptdf, const Scenario& scenario, int line,
                            bool include_network) {
  validate_scenario(system, scenario);
  check_line(system, line);
  std::vector<int> others;
  if (include_network) {
    for (std::size_t l = 0; l < system.num_lines(); ++l) {
      if (static_cast<int>(l) != line) others.push_back(static_cast<int>(l));
    }
  }
  auto reg = make_region(system, ptdf, scenario.capacity_factor, scenario.demand, scenario.demand, others);
  return extreme_flows(reg, ptdf, line);
}

ScreeningResult screen_zhai(const PowerSystem& system, const PtdfMatrix& ptdf, const Scenario& scenario,
                            ZhaiVariant variant) {
  CpuStopwatch watch;
  validate_scenario(system, scenario);
  const bool network = variant == ZhaiVariant::WithNetwork;
  ScreeningResult r{network ? "ZH+" : "ZH", {}, 0.0};
  // Without the network the region is identical for every line; build it once.
  std::optional<FlowRegion> shared;
  if (!network) shared = make_region(system, ptdf, scenario.capacity_factor, scenario.demand, scenario.demand, {});
  for (std::size_t l = 0; l < system.num_lines(); ++l) {
    FlowBounds b;
    if (network) b = zhai_flow_bounds(system, ptdf, scenario, static_cast<int>(l), true);
    else b = extreme_flows(*shared, ptdf, static_cast<int>(l));
    if (strictly_inside(b, system.lines()[l].capacity)) r.removed_lines.push_back(static_cast<int>(l));
  }
  r.t1_seconds = watch.cpu();
  return r;
}

FlowBounds roald_flow_bounds(const PowerSystem& system, const PtdfMatrix& ptdf, std::span<const double> demand_lo,
                             std::span<const double> demand_hi, std::span<const double> capacity_factor, int line) {
  check_line(system, line);
  if (demand_lo.size() != system.num_buses() || demand_hi.size() != system.num_buses() ||
      capacity_factor.size() != system.num_generators()) {
    throw std::invalid_argument("demand box or capacity factors have wrong dimensions");
  }
  for (std::size_t n = 0; n < demand_lo.size(); ++n) {
    if (demand_lo[n] > demand_hi[n]) throw std::runtime_error("infeasible demand box (lo > hi)");
  }
  auto reg = make_region(system, ptdf, capacity_factor, demand_lo, demand_hi, all_lines(system.num_lines()));
  return extreme_flows(reg, ptdf, line);
}

namespace {

double percentile(std::vector<double> v, double pct) {
  std::sort(v.begin(), v.end());
  const double pos = pct / 100.0 * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

RoaldBox roald_box(const PowerSystem& system, std::span<const Scenario> training, int percentile_level) {
  if (training.empty()) throw std::invalid_argument("Roald screening needs a nonempty history");
  if (percentile_level <= 50 || percentile_level > 100) {
    throw std::invalid_argument("Roald percentile must lie in (50, 100]");
  }
  const double upper = percentile_level;
  const double lower = 100.0 - percentile_level;
  RoaldBox box;
  std::vector<double> column(training.size());
  for (std::size_t n = 0; n < system.num_buses(); ++n) {
    for (std::size_t t = 0; t < training.size(); ++t) column[t] = training[t].demand.at(n);
    box.demand_lo.push_back(percentile(column, lower));
    box.demand_hi.push_back(percentile(column, upper));
  }
  for (std::size_t g = 0; g < system.num_generators(); ++g) {
    for (std::size_t t = 0; t < training.size(); ++t) column[t] = training[t].capacity_factor.at(g);
    box.capacity_factor.push_back(percentile(column, upper));
  }
  return box;
}

ScreeningResult screen_roald(const PowerSystem& system, const PtdfMatrix& ptdf, std::span<const Scenario> training,
                             int percentile_level) {
  CpuStopwatch watch;
  const auto box = roald_box(system, training, percentile_level);
  ScreeningResult r{"RO" + std::to_string(percentile_level), {}, 0.0};
  auto reg = make_region(system, ptdf, box.capacity_factor, box.demand_lo, box.demand_hi,
                         all_lines(system.num_lines()));
  for (std::size_t l = 0; l < system.num_lines(); ++l) {
    const auto b = extreme_flows(reg, ptdf, static_cast<int>(l));
    if (strictly_inside(b, system.lines()[l].capacity)) r.removed_lines.push_back(static_cast<int>(l));
  }
  r.t1_seconds = watch.cpu();
  return r;
}

const char* to_string(KnnMetric metric) {
  return metric == KnnMetric::Projected ? "projected" : "elementwise";
}

KnnMetric knn_metric_from_string(const std::string& s) {
  if (s == "projected") return KnnMetric::Projected;
  if (s == "elementwise") return KnnMetric::Elementwise;
  throw std::invalid_argument("unknown KNN metric '" + s + "' (expected projected or elementwise)");
}

double knn_distance(std::span<const double> a, std::span<const double> b, std::span<const double> weights,
                    KnnMetric metric) {
  if (metric == KnnMetric::Projected) {
    double dot = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) dot += weights[n] * (a[n] - b[n]);
    return std::abs(dot);
  }
  double sq = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) {
    const double w = weights[n] * (a[n] - b[n]);
    sq += w * w;
  }
  return std::sqrt(sq);
}

std::vector<std::size_t> knn_neighbors(const CongestionHistory& history, std::span<const double> query, std::size_t k,
                                       std::span<const double> weights, KnnMetric metric) {
  if (k < 1 || k > history.size()) {
    throw std::out_of_range("K = " + std::to_string(k) + " outside [1, " + std::to_string(history.size()) + "]");
  }
  if (query.size() != history.num_buses() || weights.size() != history.num_buses()) {
    throw std::invalid_argument("query or weights length does not match the history");
  }
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(history.size());
  for (std::size_t t = 0; t < history.size(); ++t) {
    scored.emplace_back(knn_distance(history.records()[t].net_demand, query, weights, metric), t);
  }
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k), scored.end());
  std::vector<std::size_t> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back(scored[i].second);
  return out;
}

ScreeningResult screen_knn(const PtdfMatrix& ptdf, const CongestionHistory& history,
                           std::span<const double> query_net_demand, std::size_t k, KnnMetric metric) {
  CpuStopwatch watch;
  if (history.num_lines() != ptdf.num_lines()) throw std::invalid_argument("history line count does not match PTDF");
  ScreeningResult r{"DD" + std::to_string(k), {}, 0.0};
  for (std::size_t l = 0; l < ptdf.num_lines(); ++l) {
    const auto nbrs = knn_neighbors(history, query_net_demand, k, ptdf.row(l), metric);
    const bool calm = std::all_of(nbrs.begin(), nbrs.end(),
                                  [&](std::size_t t) { return history.records()[t].status[l] == 0; });
    if (calm) r.removed_lines.push_back(static_cast<int>(l));
  }
  r.t1_seconds = watch.cpu();
  return r;
}

const char* to_string(CgPolicy policy) {
  return policy == CgPolicy::MostViolated ? "most-violated" : "all-violated";
}

CgPolicy cg_policy_from_string(const std::string& s) {
  if (s == "most-violated") return CgPolicy::MostViolated;
  if (s == "all-violated") return CgPolicy::AllViolated;
  throw std::invalid_argument("unknown CG policy '" + s + "' (expected most-violated or all-violated)");
}

CgResult solve_with_constraint_generation(const PowerSystem& system, const PtdfMatrix& ptdf, const Scenario& scenario,
                                          std::span<const int> initial_removed, const CgOptions& options) {
  if (options.max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
  std::vector<int> removed(initial_removed.begin(), initial_removed.end());
  std::sort(removed.begin(), removed.end());
  removed.erase(std::unique(removed.begin(), removed.end()), removed.end());

  CgResult result;
  double cpu = 0.0;
  for (int it = 1; it <= options.max_iterations; ++it) {
    const auto inst = build_tcuc(system, ptdf, scenario, complement_lines(system.num_lines(), removed), options.uc);
    result.solution = solve_tcuc(inst);
    cpu += result.solution.cpu_seconds;
    result.iterations = it;
    result.final_removed = removed;
    if (!result.solution.optimal()) {
      throw ConstraintGenerationError("reduced TC-UC failed: " + result.solution.message, result);
    }
    const auto violated = violated_lines(system, result.solution.flows);
    if (violated.empty()) {
      result.solution.cpu_seconds = cpu;
      return result;
    }
    std::vector<int> candidates;
    std::set_intersection(removed.begin(), removed.end(), violated.begin(), violated.end(),
                          std::back_inserter(candidates));
    if (candidates.empty()) {
      throw ConstraintGenerationError("monitored line limits violated; no line left to add", result);
    }
    if (options.policy == CgPolicy::MostViolated) {
      auto excess = [&](int l) {
        const double cap = system.lines()[static_cast<std::size_t>(l)].capacity;
        return (std::abs(result.solution.flows[static_cast<std::size_t>(l)]) - cap) / cap;
      };
      // max_element keeps the first of equal maxima, i.e. the lowest index
      const int worst = *std::max_element(candidates.begin(), candidates.end(),
                                          [&](int a, int b) { return excess(a) < excess(b); });
      candidates = {worst};
    }
    std::vector<int> next;
    std::set_difference(removed.begin(), removed.end(), candidates.begin(), candidates.end(),
                        std::back_inserter(next));
    removed = std::move(next);
  }
  result.solution.cpu_seconds = cpu;
  throw ConstraintGenerationError(
      "constraint generation did not converge in " + std::to_string(options.max_iterations) + " iterations", result);
}

}  // namespace ucscreen
