#include "ucscreen/ucopt.hpp"

#include "ucscreen/cputime.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace ucscreen {

const char* to_string(UCStatus s) {
  switch (s) {
    case UCStatus::Optimal: return "optimal";
    case UCStatus::Infeasible: return "infeasible";
    case UCStatus::Failed: return "failed";
  }
  return "unknown";
}

double default_slack_penalty(const PowerSystem& system) {
  const double c = system.max_cost();
  return 1000.0 * (c > 0.0 ? c : 1.0);
}

double default_mip_gap(const PowerSystem& system) { return system.num_buses() <= 200 ? 0.0 : 0.01; }

double UCSolution::total_abs_slack() const {
  double s = 0.0;
  for (double e : slack) s += std::abs(e);
  return s;
}

std::vector<int> all_lines(std::size_t num_lines) {
  std::vector<int> out(num_lines);
  std::iota(out.begin(), out.end(), 0);
  return out;
}

std::vector<int> complement_lines(std::size_t num_lines, std::span<const int> removed) {
  std::vector<bool> gone(num_lines, false);
  for (int l : removed) {
    if (l < 0 || static_cast<std::size_t>(l) >= num_lines) throw std::out_of_range("line index out of range");
    gone[static_cast<std::size_t>(l)] = true;
  }
  std::vector<int> out;
  for (std::size_t l = 0; l < num_lines; ++l) {
    if (!gone[l]) out.push_back(static_cast<int>(l));
  }
  return out;
}

UCInstance::UCInstance(const PowerSystem& system, const PtdfMatrix& ptdf, Scenario scenario,
                       std::vector<int> monitored_lines, double slack_penalty, double mip_gap)
    : system_(&system), ptdf_(&ptdf), scenario_(std::move(scenario)), monitored_(std::move(monitored_lines)),
      penalty_(slack_penalty), gap_(mip_gap) {
  validate_scenario(system, scenario_);
  if (ptdf.num_buses() != system.num_buses() || ptdf.num_lines() != system.num_lines()) {
    throw std::invalid_argument("PTDF dimensions do not match the power system");
  }
  if (!(gap_ >= 0.0 && gap_ < 1.0)) throw std::invalid_argument("mip_gap must lie in [0, 1)");
  if (!(penalty_ > system.max_cost())) throw std::invalid_argument("slack penalty must exceed every generator cost");
  std::sort(monitored_.begin(), monitored_.end());
  monitored_.erase(std::unique(monitored_.begin(), monitored_.end()), monitored_.end());
  for (int l : monitored_) {
    if (l < 0 || static_cast<std::size_t>(l) >= system.num_lines()) {
      throw std::out_of_range("monitored line index out of range");
    }
  }

  const auto nb = system.num_buses();
  const auto ng = system.num_generators();
  const auto& gens = system.generators();

  for (std::size_t g = 0; g < ng; ++g) {
    const auto id = std::to_string(g + 1);
    cols_.commitment.push_back(model_.add_column("u_" + id, 0.0, 1.0, 0.0, true));
  }
  for (std::size_t g = 0; g < ng; ++g) {
    const auto id = std::to_string(g + 1);
    const double cap = scenario_.capacity_factor[g] * gens[g].p_max;
    cols_.dispatch.push_back(model_.add_column("p_" + id, 0.0, cap, gens[g].cost));
  }
  for (std::size_t n = 0; n < nb; ++n) {
    cols_.injection.push_back(model_.add_column("q_" + std::to_string(n + 1), -lp::kInf, lp::kInf, 0.0));
  }
  for (std::size_t n = 0; n < nb; ++n) {
    const auto id = std::to_string(n + 1);
    cols_.slack_pos.push_back(model_.add_column("epsp_" + id, 0.0, lp::kInf, penalty_));
    cols_.slack_neg.push_back(model_.add_column("epsm_" + id, 0.0, lp::kInf, penalty_));
  }

  // q_n + eps_n - sum_{g at n} p_g = -d_n
  for (std::size_t n = 0; n < nb; ++n) {
    std::vector<lp::Term> terms{{cols_.injection[n], 1.0}, {cols_.slack_pos[n], 1.0}, {cols_.slack_neg[n], -1.0}};
    for (std::size_t g = 0; g < ng; ++g) {
      if (static_cast<std::size_t>(gens[g].bus - 1) == n) terms.push_back({cols_.dispatch[g], -1.0});
    }
    model_.add_row("node_" + std::to_string(n + 1), std::move(terms), -scenario_.demand[n], -scenario_.demand[n]);
  }
  ++stats_.system_balance;
  stats_.nodal_balance = nb;
  {
    std::vector<lp::Term> terms;
    for (std::size_t n = 0; n < nb; ++n) terms.push_back({cols_.injection[n], 1.0});
    model_.add_row("balance", std::move(terms), 0.0, 0.0);
  }
  for (std::size_t g = 0; g < ng; ++g) {
    const auto id = std::to_string(g + 1);
    const double cap = scenario_.capacity_factor[g] * gens[g].p_max;
    model_.add_row("pmin_" + id, {{cols_.dispatch[g], 1.0}, {cols_.commitment[g], -gens[g].p_min}}, 0.0, lp::kInf);
    model_.add_row("pmax_" + id, {{cols_.dispatch[g], 1.0}, {cols_.commitment[g], -cap}}, -lp::kInf, 0.0);
  }
  stats_.generator_bounds = ng;
  stats_.binaries = ng;
  for (int l : monitored_) {
    const auto row = ptdf.row(static_cast<std::size_t>(l));
    std::vector<lp::Term> terms;
    for (std::size_t n = 0; n < nb; ++n) {
      if (row[n] != 0.0) terms.push_back({cols_.injection[n], row[n]});
    }
    const double cap = system.lines()[static_cast<std::size_t>(l)].capacity;
    model_.add_row("flow_" + std::to_string(l + 1), std::move(terms), -cap, cap);
  }
  stats_.flow_bounds = monitored_.size();
}

void UCInstance::fix_commitment(std::span<const std::uint8_t> commitment) {
  if (commitment.size() != cols_.commitment.size()) {
    throw std::invalid_argument("commitment length does not match generator count");
  }
  for (std::size_t g = 0; g < commitment.size(); ++g) {
    if (commitment[g] > 1) throw std::invalid_argument("commitment entries must be 0 or 1");
    auto& col = model_.columns()[static_cast<std::size_t>(cols_.commitment[g])];
    col.lo = col.hi = static_cast<double>(commitment[g]);
  }
}

std::string UCInstance::to_lp_text() const {
  std::ostringstream os;
  os << "\\ TC-UC instance: " << system_->num_buses() << " buses, " << system_->num_lines() << " lines ("
     << monitored_.size() << " monitored), " << system_->num_generators() << " generators\n"
     << "\\ slack penalty L = " << penalty_ << ", mip gap = " << gap_ << "\n";
  os << model_.to_lp_text();
  return os.str();
}

UCInstance build_tcuc(const PowerSystem& system, const PtdfMatrix& ptdf, const Scenario& scenario,
                      std::vector<int> monitored_lines, const UCOptions& options) {
  const double penalty = options.slack_penalty >= 0.0 ? options.slack_penalty : default_slack_penalty(system);
  const double gap = options.mip_gap >= 0.0 ? options.mip_gap : default_mip_gap(system);
  return UCInstance(system, ptdf, scenario, std::move(monitored_lines), penalty, gap);
}

namespace {

UCSolution extract(const UCInstance& inst, const lp::Solution& raw) {
  UCSolution out;
  out.nodes = raw.nodes;
  out.lp_iterations = raw.iterations;
  if (raw.status == lp::Status::Infeasible) {
    out.status = UCStatus::Infeasible;
    out.message = "model infeasible";
    return out;
  }
  if (raw.x.empty()) {
    out.status = UCStatus::Failed;
    out.message = std::string("solver stopped: ") + lp::to_string(raw.status);
    return out;
  }
  // A node-limit stop with an incumbent is reported as optimal-within-bound;
  // `bound` tells the truth about how close it is.
  out.status = UCStatus::Optimal;
  if (raw.status != lp::Status::Optimal) out.message = std::string("stopped early: ") + lp::to_string(raw.status);

  const auto& c = inst.columns();
  const auto& sys = inst.system();
  const auto nb = sys.num_buses();
  const auto ng = sys.num_generators();
  out.commitment.resize(ng);
  out.dispatch.resize(ng);
  for (std::size_t g = 0; g < ng; ++g) {
    out.commitment[g] = raw.x[static_cast<std::size_t>(c.commitment[g])] > 0.5 ? 1 : 0;
    out.dispatch[g] = std::max(0.0, raw.x[static_cast<std::size_t>(c.dispatch[g])]);
    out.cost += sys.generators()[g].cost * out.dispatch[g];
  }
  out.injections.resize(nb);
  out.slack.resize(nb);
  double demand = 0.0;
  for (std::size_t n = 0; n < nb; ++n) {
    out.injections[n] = raw.x[static_cast<std::size_t>(c.injection[n])];
    out.slack[n] = raw.x[static_cast<std::size_t>(c.slack_pos[n])] - raw.x[static_cast<std::size_t>(c.slack_neg[n])];
    demand += inst.scenario().demand[n];
  }
  out.objective = out.cost + inst.slack_penalty() * out.total_abs_slack();
  out.bound = std::min(raw.bound, out.objective);
  out.flows = dc_flows(inst.ptdf(), out.injections, 1e-6 * std::max(1.0, demand));
  return out;
}

}  // namespace

UCSolution solve_tcuc(const UCInstance& instance) {
  CpuStopwatch watch;
  lp::MipOptions opt;
  opt.gap = instance.mip_gap();
  UCSolution sol = extract(instance, lp::solve_mip(instance.model(), opt));
  sol.cpu_seconds = watch.cpu();
  return sol;
}

UCSolution fix_and_resolve(std::span<const std::uint8_t> commitment, const PowerSystem& system,
                           const PtdfMatrix& ptdf, const Scenario& scenario, const UCOptions& options) {
  UCInstance inst = build_tcuc(system, ptdf, scenario, all_lines(system.num_lines()), options);
  inst.fix_commitment(commitment);
  CpuStopwatch watch;
  UCSolution sol = extract(inst, lp::solve_lp(inst.model()));
  sol.cpu_seconds = watch.cpu();
  return sol;
}

UCSolution brute_force_solve(const PowerSystem& system, const PtdfMatrix& ptdf, const Scenario& scenario,
                             std::vector<int> monitored_lines, const UCOptions& options) {
  const auto ng = system.num_generators();
  if (ng > 15) throw std::invalid_argument("brute_force_solve supports at most 15 generators");
  CpuStopwatch watch;
  UCInstance inst = build_tcuc(system, ptdf, scenario, std::move(monitored_lines), options);
  UCSolution best;
  best.status = UCStatus::Infeasible;
  long lp_iterations = 0;
  std::vector<std::uint8_t> u(ng, 0);
  const std::size_t combos = std::size_t{1} << ng;
  // Counting with u[0] as the most significant bit walks commitments in
  // lexicographic order, so keeping the first of equal objectives breaks ties.
  for (std::size_t mask = 0; mask < combos; ++mask) {
    for (std::size_t g = 0; g < ng; ++g) u[g] = (mask >> (ng - 1 - g)) & 1U;
    inst.fix_commitment(u);
    UCSolution sol = extract(inst, lp::solve_lp(inst.model()));
    lp_iterations += sol.lp_iterations;
    if (!sol.optimal()) continue;
    if (!best.optimal() || sol.objective < best.objective - 1e-9 * (1.0 + std::abs(best.objective))) {
      best = std::move(sol);
    }
  }
  best.nodes = static_cast<long>(combos);
  best.lp_iterations = lp_iterations;
  best.bound = best.objective;
  best.cpu_seconds = watch.cpu();
  return best;
}

std::string check_solution(const UCInstance& instance, const UCSolution& sol) {
  const auto& sys = instance.system();
  const auto& sc = instance.scenario();
  const auto nb = sys.num_buses();
  const auto ng = sys.num_generators();
  if (!sol.optimal()) return "solution is not optimal";
  if (sol.commitment.size() != ng || sol.dispatch.size() != ng || sol.injections.size() != nb ||
      sol.slack.size() != nb || sol.flows.size() != sys.num_lines()) {
    return "solution vectors have wrong dimensions";
  }
  std::ostringstream err;
  double demand = 0.0;
  for (double d : sc.demand) demand += d;
  const double mw_tol = 1e-6 * std::max(1.0, demand);
  for (std::size_t g = 0; g < ng; ++g) {
    const auto& gen = sys.generators()[g];
    const double u = sol.commitment[g];
    const double lo = u * gen.p_min;
    const double hi = u * sc.capacity_factor[g] * gen.p_max;
    if (sol.dispatch[g] < lo - mw_tol || sol.dispatch[g] > hi + mw_tol) {
      err << "generator " << g + 1 << " dispatch " << sol.dispatch[g] << " outside [" << lo << ", " << hi << "]";
      return err.str();
    }
  }
  double total_q = 0.0;
  for (std::size_t n = 0; n < nb; ++n) {
    total_q += sol.injections[n];
    double gen_at = 0.0;
    for (std::size_t g = 0; g < ng; ++g) {
      if (static_cast<std::size_t>(sys.generators()[g].bus - 1) == n) gen_at += sol.dispatch[g];
    }
    const double lhs = sol.injections[n] + sol.slack[n];
    const double rhs = gen_at - sc.demand[n];
    if (std::abs(lhs - rhs) > mw_tol) {
      err << "nodal balance violated at bus " << n + 1 << " (" << lhs << " vs " << rhs << ")";
      return err.str();
    }
  }
  if (std::abs(total_q) > mw_tol) {
    err << "injections sum to " << total_q;
    return err.str();
  }
  for (int l : instance.monitored_lines()) {
    const double cap = sys.lines()[static_cast<std::size_t>(l)].capacity;
    if (std::abs(sol.flows[static_cast<std::size_t>(l)]) > cap * (1.0 + kFlowViolationTol)) {
      err << "monitored line " << l + 1 << " flow " << sol.flows[static_cast<std::size_t>(l)] << " exceeds " << cap;
      return err.str();
    }
  }
  return {};
}

std::vector<int> binding_lines(const PowerSystem& system, std::span<const double> flows, double rel_tol) {
  std::vector<int> out;
  for (std::size_t l = 0; l < system.num_lines(); ++l) {
    const double cap = system.lines()[l].capacity;
    if (std::abs(cap - std::abs(flows[l])) <= rel_tol * cap || std::abs(flows[l]) > cap) {
      out.push_back(static_cast<int>(l));
    }
  }
  return out;
}

std::vector<int> violated_lines(const PowerSystem& system, std::span<const double> flows, double rel_tol) {
  std::vector<int> out;
  for (std::size_t l = 0; l < system.num_lines(); ++l) {
    const double cap = system.lines()[l].capacity;
    if (std::abs(flows[l]) > cap * (1.0 + rel_tol)) out.push_back(static_cast<int>(l));
  }
  return out;
}

}  // namespace ucscreen
