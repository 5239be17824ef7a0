#include "ucscreen/harness.hpp"

#include "ucscreen/cputime.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>
#include <thread>

namespace ucscreen {

void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(std::max(1u, jobs), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

unsigned jobs_from_env() {
  const char* env = std::getenv("UCSCREEN_JOBS");
  if (!env || !*env) return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1) return 1;
  return static_cast<unsigned>(std::min(v, 256L));
}

HistoryBuild build_history(const PowerSystem& system, const PtdfMatrix& ptdf, std::span<const Scenario> scenarios,
                           const UCOptions& options, double congestion_tol, unsigned jobs) {
  if (scenarios.empty()) throw std::invalid_argument("history needs at least one scenario");
  if (!(congestion_tol >= 0.0 && congestion_tol <= 1.0))
    throw std::invalid_argument("congestion tolerance must lie in [0, 1]");

  std::vector<std::optional<HistoryRecord>> records(scenarios.size());
  std::vector<std::string> errors(scenarios.size());
  parallel_for(scenarios.size(), jobs, [&](std::size_t t) {
    try {
      const auto sol = solve_tcuc(build_tcuc(system, ptdf, scenarios[t], all_lines(system.num_lines()), options));
      if (!sol.optimal()) {
        errors[t] = sol.message.empty() ? to_string(sol.status) : sol.message;
        return;
      }
      HistoryRecord rec{net_demand(scenarios[t], system), std::vector<std::uint8_t>(system.num_lines(), 0)};
      for (std::size_t l = 0; l < system.num_lines(); ++l) {
        const double cap = system.lines()[l].capacity;
        if (std::abs(sol.flows[l]) >= cap * (1.0 - congestion_tol)) rec.status[l] = 1;
      }
      records[t] = std::move(rec);
    } catch (const std::exception& e) {
      errors[t] = e.what();
    }
  });

  HistoryBuild out;
  for (std::size_t t = 0; t < scenarios.size(); ++t) {
    if (records[t]) {
      out.history.add(std::move(*records[t]));
      out.periods.push_back(t);
    } else {
      out.failures.push_back({t, errors[t]});
    }
  }
  return out;
}

std::vector<Scenario> generate_scenarios(const PowerSystem& system, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw std::invalid_argument("scenario count must be at least 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Scenario> out;
  out.reserve(count);
  for (std::size_t t = 0; t < count; ++t) {
    Scenario sc;
    for (const auto& b : system.buses()) sc.demand.push_back(2.0 * b.nominal_demand * unit(rng));
    for (const auto& g : system.generators())
      sc.capacity_factor.push_back(g.kind == GeneratorKind::Thermal ? 1.0 : unit(rng));
    out.push_back(std::move(sc));
  }
  return out;
}

PowerSystem generate_system(const SyntheticGridSpec& spec, std::uint64_t seed) {
  if (spec.buses < 2) throw std::invalid_argument("synthetic grid needs at least two buses");
  const std::size_t max_lines = spec.buses * (spec.buses - 1) / 2;
  if (spec.lines < spec.buses - 1 || spec.lines > max_lines)
    throw std::invalid_argument("line count must lie between buses-1 and buses*(buses-1)/2");
  if (spec.thermal_units == 0) throw std::invalid_argument("synthetic grid needs a thermal unit");
  if (!(spec.tight_quantile_low >= 0.0 && spec.tight_quantile_low <= spec.tight_quantile_high &&
        spec.tight_quantile_high <= 1.0 && spec.loose_low > 0.0 && spec.loose_low <= spec.loose_high &&
        spec.tight_fraction >= 0.0 && spec.tight_fraction <= 1.0))
    throw std::invalid_argument("invalid capacity settings for the synthetic grid");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double a, double b) { return a + (b - a) * unit(rng); };
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };

  std::vector<Bus> buses;
  for (std::size_t n = 0; n < spec.buses; ++n)
    buses.push_back({static_cast<int>(n + 1), unit(rng) < 0.7 ? uniform(10.0, 60.0) : 0.0});

  std::set<std::pair<int, int>> used;
  std::vector<std::pair<int, int>> ends;
  auto connect = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    if (a == b || !used.insert(key).second) return false;
    ends.emplace_back(a, b);
    return true;
  };
  for (std::size_t n = 1; n < spec.buses; ++n) {
    // attach to one of the few most recent buses to get long, meshed paths
    const std::size_t back = 1 + pick(std::min<std::size_t>(n, 3));
    connect(static_cast<int>(n - back + 1), static_cast<int>(n + 1));
  }
  while (ends.size() < spec.lines) {
    connect(static_cast<int>(pick(spec.buses) + 1), static_cast<int>(pick(spec.buses) + 1));
  }

  double total_nominal = 0.0;
  for (const auto& b : buses) total_nominal += b.nominal_demand;

  std::vector<Generator> gens;
  std::vector<double> weights(spec.thermal_units);
  for (auto& w : weights) w = uniform(0.5, 1.5);
  const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
  const double fleet = spec.fleet_margin * std::max(total_nominal, 1.0);
  for (std::size_t g = 0; g < spec.thermal_units; ++g) {
    const double pmax = fleet * weights[g] / wsum;
    gens.push_back({static_cast<int>(gens.size() + 1), static_cast<int>(pick(spec.buses) + 1),
                    pmax * uniform(0.1, 0.3), pmax, uniform(10.0, 60.0), GeneratorKind::Thermal});
  }
  for (std::size_t g = 0; g < spec.renewable_units; ++g) {
    gens.push_back({static_cast<int>(gens.size() + 1), static_cast<int>(pick(spec.buses) + 1), 0.0,
                    uniform(0.05, 0.15) * std::max(total_nominal, 1.0), 0.0, GeneratorKind::Renewable});
  }

  std::vector<Line> lines;
  for (std::size_t l = 0; l < ends.size(); ++l)
    lines.push_back({static_cast<int>(l + 1), ends[l].first, ends[l].second, uniform(5.0, 20.0), 1.0});

  // Copper-plate merit-order flows over sampled demand draws.
  PowerSystem draft(buses, lines, gens);
  const auto ptdf = build_ptdf(draft);
  std::vector<std::size_t> order;
  for (std::size_t g = 0; g < gens.size(); ++g)
    if (gens[g].kind == GeneratorKind::Thermal) order.push_back(g);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return gens[a].cost < gens[b].cost; });
  const std::size_t samples = 200;
  std::vector<std::vector<double>> abs_flows(lines.size());
  for (std::size_t t = 0; t < samples; ++t) {
    std::vector<double> injection(spec.buses, 0.0);
    double remaining = 0.0;
    for (std::size_t n = 0; n < spec.buses; ++n) {
      const double d = 2.0 * buses[n].nominal_demand * unit(rng);
      injection[n] -= d;
      remaining += d;
    }
    for (const auto& g : gens) {
      if (g.kind != GeneratorKind::Renewable) continue;
      const double p = std::min(g.p_max * unit(rng), remaining);
      injection[static_cast<std::size_t>(g.bus - 1)] += p;
      remaining -= p;
    }
    for (auto g : order) {
      const double p = std::min(gens[g].p_max, remaining);
      injection[static_cast<std::size_t>(gens[g].bus - 1)] += p;
      remaining -= p;
    }
    const auto f = dc_flows(ptdf, injection, 1e-6 * (1.0 + total_nominal));
    for (std::size_t l = 0; l < lines.size(); ++l) abs_flows[l].push_back(std::abs(f[l]));
  }

  for (std::size_t l = 0; l < lines.size(); ++l) {
    auto& v = abs_flows[l];
    std::sort(v.begin(), v.end());
    // Bridges stay loose so no bus is cut off behind a tight radial line.
    std::vector<Line> without;
    for (std::size_t k = 0; k < lines.size(); ++k)
      if (k != l) without.push_back(lines[k]);
    const bool bridge = !is_connected(spec.buses, without);
    double cap;
    if (unit(rng) < spec.tight_fraction && !bridge) {
      const double q = uniform(spec.tight_quantile_low, spec.tight_quantile_high);
      cap = v[static_cast<std::size_t>(q * static_cast<double>(v.size() - 1))];
    } else {
      cap = v.back() * uniform(spec.loose_low, spec.loose_high);
    }
    lines[l].capacity = std::max(1.0, cap);
  }
  return PowerSystem(std::move(buses), std::move(lines), std::move(gens));
}

std::string MethodSpec::label() const {
  switch (kind) {
    case Kind::BN: return "BN";
    case Kind::SB: return "SB";
    case Kind::PI: return "PI";
    case Kind::NV: return "NV";
    case Kind::CG: return "CG";
    case Kind::ZH: return "ZH";
    case Kind::ZHPlus: return "ZH+";
    case Kind::RO: return "RO" + std::to_string(percentile);
    case Kind::DD: return "DD" + std::to_string(k);
    case Kind::DDCG: return "DD" + std::to_string(k) + "+CG";
  }
  return "?";
}

MethodSpec MethodSpec::parse(const std::string& label) {
  MethodSpec m;
  auto number = [&](const std::string& digits) -> long {
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; }))
      throw std::invalid_argument("bad method label '" + label + "'");
    return std::stol(digits);
  };
  if (label == "BN") m.kind = Kind::BN;
  else if (label == "SB") m.kind = Kind::SB;
  else if (label == "PI") m.kind = Kind::PI;
  else if (label == "NV") m.kind = Kind::NV;
  else if (label == "CG") m.kind = Kind::CG;
  else if (label == "ZH") m.kind = Kind::ZH;
  else if (label == "ZH+") m.kind = Kind::ZHPlus;
  else if (label.rfind("RO", 0) == 0) {
    m.kind = Kind::RO;
    m.percentile = static_cast<int>(number(label.substr(2)));
    if (m.percentile <= 50 || m.percentile > 100)
      throw std::invalid_argument("RO percentile must lie in (50, 100]: '" + label + "'");
  } else if (label.rfind("DD", 0) == 0) {
    std::string rest = label.substr(2);
    m.kind = Kind::DD;
    if (rest.size() > 3 && rest.compare(rest.size() - 3, 3, "+CG") == 0) {
      m.kind = Kind::DDCG;
      rest.resize(rest.size() - 3);
    }
    const long k = number(rest);
    if (k < 1) throw std::invalid_argument("K must be at least 1: '" + label + "'");
    m.k = static_cast<std::size_t>(k);
  } else {
    throw std::invalid_argument("unknown method '" + label + "'");
  }
  return m;
}

namespace {

double total_demand(const Scenario& sc) { return std::accumulate(sc.demand.begin(), sc.demand.end(), 0.0); }

struct Evaluated {
  double cost = 0.0;
  double abs_slack = 0.0;
  std::vector<std::uint8_t> commitment;
};

Evaluated evaluate_commitment(std::span<const std::uint8_t> commitment, const PowerSystem& system,
                              const PtdfMatrix& ptdf, const Scenario& sc, const UCOptions& options) {
  const auto sol = fix_and_resolve(commitment, system, ptdf, sc, options);
  if (!sol.optimal()) throw std::runtime_error("fix-and-resolve failed: " + sol.message);
  return {sol.cost, sol.total_abs_slack(), sol.commitment};
}

void aggregate(MethodReport& r, const MethodReport& bn, std::size_t num_lines, double shared_t1) {
  double removed = 0.0, cost = 0.0, slack = 0.0, demand = 0.0, t1 = shared_t1, t2 = 0.0;
  for (const auto& p : r.periods) {
    removed += static_cast<double>(p.removed_lines.size());
    cost += p.cost;
    slack += p.abs_slack;
    demand += p.demand;
    t1 += p.t1_seconds;
    t2 += p.t2_seconds;
  }
  const double periods = static_cast<double>(r.periods.size());
  r.removed_pct = num_lines == 0 || periods == 0 ? 0.0 : 100.0 * removed / (static_cast<double>(num_lines) * periods);
  r.infeasibility_pct = demand > 0.0 ? 100.0 * slack / demand : 0.0;
  r.t1_seconds = t1;
  r.t2_seconds = t2;
  double bn_cost = 0.0;
  for (const auto& p : bn.periods) bn_cost += p.cost;
  if (bn_cost != 0.0) r.cost_error_pct = 100.0 * (cost - bn_cost) / bn_cost;
  else r.cost_error_pct = cost == 0.0 ? 0.0 : std::numeric_limits<double>::quiet_NaN();
  r.tau_pct = bn.t2_seconds > 0.0 ? 100.0 * (t1 + t2) / bn.t2_seconds : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

Baseline solve_baseline(const PowerSystem& system, const PtdfMatrix& ptdf, std::span<const Scenario> test,
                        const ExperimentConfig& config) {
  if (test.empty()) throw std::invalid_argument("test set is empty");
  Baseline b;
  b.solutions.resize(test.size());
  b.report.method = "BN";
  b.report.periods.resize(test.size());
  parallel_for(test.size(), config.jobs, [&](std::size_t t) {
    CpuStopwatch watch;
    auto sol = solve_tcuc(build_tcuc(system, ptdf, test[t], all_lines(system.num_lines()), config.uc));
    const double t2 = watch.cpu();
    if (!sol.optimal()) throw std::runtime_error("benchmark failed in period " + std::to_string(t) + ": " + sol.message);
    const auto ev = evaluate_commitment(sol.commitment, system, ptdf, test[t], config.uc);
    auto& p = b.report.periods[t];
    p.period = t;
    p.commitment = sol.commitment;
    p.cost = ev.cost;
    p.abs_slack = ev.abs_slack;
    p.demand = total_demand(test[t]);
    p.t2_seconds = t2;
    p.same_commitment_as_bn = true;
    b.solutions[t] = std::move(sol);
  });
  for (const auto& p : b.report.periods) b.report.t2_seconds += p.t2_seconds;
  aggregate(b.report, b.report, system.num_lines(), 0.0);
  b.report.cost_error_pct = 0.0;
  b.report.tau_pct = 100.0;
  return b;
}

MethodReport evaluate_method(const MethodSpec& method, const PowerSystem& system, const PtdfMatrix& ptdf,
                             const CongestionHistory& history, std::span<const Scenario> training,
                             std::span<const Scenario> test, const Baseline& baseline, const ExperimentConfig& config) {
  using Kind = MethodSpec::Kind;
  if (baseline.solutions.size() != test.size()) throw std::invalid_argument("baseline does not cover the test set");
  if (method.kind == Kind::BN) return baseline.report;

  MethodReport r;
  r.method = method.label();
  r.periods.resize(test.size());
  const std::size_t nl = system.num_lines();

  // Screens computed once for the whole test horizon.
  double shared_t1 = 0.0;
  std::optional<std::vector<int>> fixed_removed;
  std::string fixed_note;
  if (method.kind == Kind::NV) {
    const auto s = screen_naive(history);
    shared_t1 = s.t1_seconds;
    fixed_removed = s.removed_lines;
  } else if (method.kind == Kind::RO) {
    CpuStopwatch watch;
    try {
      fixed_removed = screen_roald(system, ptdf, training, method.percentile).removed_lines;
    } catch (const std::runtime_error& e) {
      fixed_removed = std::vector<int>{};
      fixed_note = std::string("bound problem failed, keeping all lines: ") + e.what();
    }
    shared_t1 = watch.cpu();
  } else if (method.kind == Kind::SB || method.kind == Kind::CG) {
    fixed_removed = all_lines(nl);
  }
  if ((method.kind == Kind::DD || method.kind == Kind::DDCG) && (method.k < 1 || method.k > history.size()))
    throw std::out_of_range("K = " + std::to_string(method.k) + " outside [1, " + std::to_string(history.size()) + "]");

  CgOptions cg;
  cg.uc = config.uc;
  cg.max_iterations = config.cg_max_iterations;
  cg.policy = config.cg_policy;

  parallel_for(test.size(), config.jobs, [&](std::size_t t) {
    const Scenario& sc = test[t];
    PeriodDetail p;
    p.period = t;
    p.demand = total_demand(sc);
    p.note = fixed_note;

    std::vector<int> removed;
    if (fixed_removed) {
      removed = *fixed_removed;
    } else if (method.kind == Kind::PI) {
      const auto s = screen_perfect_information(system, baseline.solutions[t]);
      removed = s.removed_lines;
      p.t1_seconds = s.t1_seconds;
    } else if (method.kind == Kind::ZH || method.kind == Kind::ZHPlus) {
      CpuStopwatch watch;
      try {
        removed = screen_zhai(system, ptdf, sc,
                              method.kind == Kind::ZH ? ZhaiVariant::Plain : ZhaiVariant::WithNetwork)
                      .removed_lines;
      } catch (const std::runtime_error& e) {
        p.note = std::string("bound problem failed, keeping all lines: ") + e.what();
      }
      p.t1_seconds = watch.cpu();
    } else {
      const auto s = screen_knn(ptdf, history, net_demand(sc, system), method.k, config.knn_metric);
      removed = s.removed_lines;
      p.t1_seconds = s.t1_seconds;
    }

    std::vector<std::uint8_t> commitment;
    if (method.kind == Kind::CG || method.kind == Kind::DDCG) {
      CpuStopwatch watch;
      const auto res = solve_with_constraint_generation(system, ptdf, sc, removed, cg);
      p.t2_seconds = watch.cpu();
      p.cg_iterations = res.iterations;
      commitment = res.solution.commitment;
      removed = res.final_removed;
    } else {
      CpuStopwatch watch;
      const auto sol = solve_tcuc(build_tcuc(system, ptdf, sc, complement_lines(nl, removed), config.uc));
      p.t2_seconds = watch.cpu();
      if (!sol.optimal()) throw std::runtime_error("reduced TC-UC failed in period " + std::to_string(t) + ": " + sol.message);
      commitment = sol.commitment;
    }

    const auto ev = evaluate_commitment(commitment, system, ptdf, sc, config.uc);
    p.removed_lines = std::move(removed);
    p.commitment = ev.commitment;
    p.cost = ev.cost;
    p.abs_slack = ev.abs_slack;
    p.same_commitment_as_bn = commitment == baseline.solutions[t].commitment;
    r.periods[t] = std::move(p);
  });

  aggregate(r, baseline.report, nl, shared_t1);
  return r;
}

const MethodReport* ComparisonReport::find(const std::string& method) const {
  for (const auto& m : methods)
    if (m.method == method) return &m;
  return nullptr;
}

ComparisonReport compare(const PowerSystem& system, std::span<const Scenario> training, std::span<const Scenario> test,
                         const ExperimentConfig& config) {
  if (config.methods.empty()) throw std::invalid_argument("no methods configured");
  for (const auto& sc : training) validate_scenario(system, sc);
  for (const auto& sc : test) validate_scenario(system, sc);
  const auto ptdf = build_ptdf(system, 1);

  ComparisonReport out;
  out.num_lines = system.num_lines();
  out.test_periods = test.size();

  CongestionHistory history;
  bool needs_history = false;
  for (const auto& m : config.methods) {
    using Kind = MethodSpec::Kind;
    needs_history |= m.kind == Kind::NV || m.kind == Kind::DD || m.kind == Kind::DDCG;
  }
  if (needs_history) {
    auto built = build_history(system, ptdf, training, config.uc, config.congestion_tol, config.jobs);
    history = std::move(built.history);
    out.history_failures = std::move(built.failures);
  }
  out.training_periods = training.size();

  const auto baseline = solve_baseline(system, ptdf, test, config);
  for (const auto& m : config.methods) {
    try {
      out.methods.push_back(evaluate_method(m, system, ptdf, history, training, test, baseline, config));
    } catch (const std::exception& e) {
      MethodReport failed;
      failed.method = m.label();
      failed.status = e.what();
      const double nan = std::numeric_limits<double>::quiet_NaN();
      failed.removed_pct = failed.cost_error_pct = failed.infeasibility_pct = nan;
      failed.t1_seconds = failed.t2_seconds = failed.tau_pct = nan;
      out.methods.push_back(std::move(failed));
    }
  }
  return out;
}

}  // namespace ucscreen
