#pragma once

// Experiment pipeline: congestion history, scenario generation, per-method
// evaluation against the full-network benchmark and comparison reports.

#include "ucscreen/netmodel.hpp"
#include "ucscreen/screening.hpp"
#include "ucscreen/ucopt.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ucscreen {

// Runs fn(0..count-1) on up to `jobs` threads. The first exception thrown by
// any task is rethrown after all workers finish.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& fn);

// Worker count from UCSCREEN_JOBS, or 1 when unset or invalid.
unsigned jobs_from_env();

struct HistoryFailure {
  std::size_t period = 0;
  std::string message;
};

struct HistoryBuild {
  CongestionHistory history;
  std::vector<std::size_t> periods;  // scenario index of each record
  std::vector<HistoryFailure> failures;
};

// Solves the full TC-UC for every scenario. A line is congested when
// |flow| >= capacity * (1 - congestion_tol). Periods whose solve fails are
// skipped and reported in `failures`.
HistoryBuild build_history(const PowerSystem& system, const PtdfMatrix& ptdf, std::span<const Scenario> scenarios,
                           const UCOptions& options = {}, double congestion_tol = kBindingTol, unsigned jobs = 1);

// Per-bus demand ~ U(0, 2 * nominal) and renewable capacity factor ~ U(0, 1),
// independent across buses, units and periods.
std::vector<Scenario> generate_scenarios(const PowerSystem& system, std::size_t count, std::uint64_t seed);

struct SyntheticGridSpec {
  std::size_t buses = 20;
  std::size_t lines = 30;
  std::size_t thermal_units = 10;
  std::size_t renewable_units = 2;
  // Thermal fleet capacity as a multiple of total nominal demand.
  double fleet_margin = 2.2;
  // Line capacities come from copper-plate merit-order flows over sampled
  // demand draws. A `tight_fraction` share of non-bridge lines gets a
  // capacity at a random quantile of its flow distribution; the rest sit
  // above the largest sampled flow.
  double tight_fraction = 0.2;
  double tight_quantile_low = 0.6;
  double tight_quantile_high = 0.9;
  double loose_low = 1.05;
  double loose_high = 1.5;
};

// Connected random grid (spanning tree plus extra lines).
PowerSystem generate_system(const SyntheticGridSpec& spec, std::uint64_t seed);

struct MethodSpec {
  enum class Kind { BN, SB, PI, NV, CG, ZH, ZHPlus, RO, DD, DDCG };
  Kind kind = Kind::BN;
  int percentile = 100;  // RO
  std::size_t k = 0;     // DD, DDCG

  std::string label() const;
  // BN, SB, PI, NV, CG, ZH, ZH+, RO100, RO95, RO90, DD<K>, DD<K>+CG
  static MethodSpec parse(const std::string& label);
};

struct ExperimentConfig {
  std::vector<MethodSpec> methods;
  UCOptions uc;
  double congestion_tol = kBindingTol;
  int cg_max_iterations = 50;
  CgPolicy cg_policy = CgPolicy::MostViolated;
  KnnMetric knn_metric = KnnMetric::Projected;
  unsigned jobs = 1;
};

struct PeriodDetail {
  std::size_t period = 0;
  std::vector<int> removed_lines;
  std::vector<std::uint8_t> commitment;
  double cost = 0.0;       // after fix-and-resolve on the full network
  double abs_slack = 0.0;  // sum |eps_n| after fix-and-resolve
  double demand = 0.0;
  double t1_seconds = 0.0;
  double t2_seconds = 0.0;
  int cg_iterations = 0;
  bool same_commitment_as_bn = false;
  std::string note;
};

struct MethodReport {
  std::string method;
  double removed_pct = 0.0;  // R
  double cost_error_pct = 0.0;  // dC
  double infeasibility_pct = 0.0;  // I
  double t1_seconds = 0.0;
  double t2_seconds = 0.0;
  double tau_pct = 0.0;
  std::string status = "ok";  // "ok" or an error message
  std::vector<PeriodDetail> periods;

  bool ok() const { return status == "ok"; }
};

// Full-network reference on the test set.
struct Baseline {
  std::vector<UCSolution> solutions;
  MethodReport report;
};

Baseline solve_baseline(const PowerSystem& system, const PtdfMatrix& ptdf, std::span<const Scenario> test,
                        const ExperimentConfig& config);

// `training` supplies RO's demand box; `history` supplies NV and DD.
MethodReport evaluate_method(const MethodSpec& method, const PowerSystem& system, const PtdfMatrix& ptdf,
                             const CongestionHistory& history, std::span<const Scenario> training,
                             std::span<const Scenario> test, const Baseline& baseline, const ExperimentConfig& config);

struct ComparisonReport {
  std::size_t num_lines = 0;
  std::size_t training_periods = 0;
  std::size_t test_periods = 0;
  std::vector<HistoryFailure> history_failures;
  std::vector<MethodReport> methods;

  const MethodReport* find(const std::string& method) const;
};

// Builds the history from `training`, solves the baseline on `test`, then
// evaluates every configured method. A failing method gets an error status
// without stopping the others.
ComparisonReport compare(const PowerSystem& system, std::span<const Scenario> training, std::span<const Scenario> test,
                         const ExperimentConfig& config);

}  // namespace ucscreen
