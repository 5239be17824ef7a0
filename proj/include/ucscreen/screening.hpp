#pragma once

// Network-constraint screening: each method returns the set of lines whose
// capacity constraints (both directions) are dropped from the TC-UC.
//
// Line sets are 0-based line indices, sorted ascending.

#include "ucscreen/netmodel.hpp"
#include "ucscreen/ucopt.hpp"

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ucscreen {

struct ScreeningResult {
  std::string method;
  std::vector<int> removed_lines;
  double t1_seconds = 0.0;  // CPU time spent screening
};

struct HistoryRecord {
  std::vector<double> net_demand;     // MW, one per bus
  std::vector<std::uint8_t> status;  // 1 if the line was congested
};

class CongestionHistory {
 public:
  CongestionHistory() = default;
  explicit CongestionHistory(std::vector<HistoryRecord> records);

  const std::vector<HistoryRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  std::size_t num_buses() const { return records_.empty() ? 0 : records_.front().net_demand.size(); }
  std::size_t num_lines() const { return records_.empty() ? 0 : records_.front().status.size(); }

  void add(HistoryRecord record);

 private:
  std::vector<HistoryRecord> records_;
};

// Lines whose |flow| is at capacity in the full-network optimum stay; all
// others go.
ScreeningResult screen_perfect_information(const PowerSystem& system, const UCSolution& full_solution);

// Drops every line never congested in the history.
ScreeningResult screen_naive(const CongestionHistory& history);

struct FlowBounds {
  double min = 0.0;
  double max = 0.0;
};

// Extreme flows of `line` over the relaxed dispatch region with fixed demand
// (0 <= p_g <= rho_g pmax_g, slacks fixed to 0). With `include_network` the
// limits of all other lines are imposed too. Throws std::runtime_error when
// the relaxed region is empty.
FlowBounds zhai_flow_bounds(const PowerSystem& system, const PtdfMatrix& ptdf, const Scenario& scenario, int line,
                            bool include_network);

enum class ZhaiVariant { Plain, WithNetwork };

ScreeningResult screen_zhai(const PowerSystem& system, const PtdfMatrix& ptdf, const Scenario& scenario,
                            ZhaiVariant variant);

// Extreme flows of `line` with nodal demand free in [demand_lo, demand_hi]
// and every line limit imposed (including the target's).
FlowBounds roald_flow_bounds(const PowerSystem& system, const PtdfMatrix& ptdf, std::span<const double> demand_lo,
                             std::span<const double> demand_hi, std::span<const double> capacity_factor, int line);

// Demand box and capacity factors derived from historical scenarios at the
// given percentile (100: min/max, 95: [5, 95], 90: [10, 90]).
struct RoaldBox {
  std::vector<double> demand_lo;
  std::vector<double> demand_hi;
  std::vector<double> capacity_factor;
};
RoaldBox roald_box(const PowerSystem& system, std::span<const Scenario> training, int percentile);

ScreeningResult screen_roald(const PowerSystem& system, const PtdfMatrix& ptdf, std::span<const Scenario> training,
                             int percentile);

enum class KnnMetric {
  Projected,    // |a_l . (d_t - d_q)|
  Elementwise,  // || diag(a_l) (d_t - d_q) ||_2
};

const char* to_string(KnnMetric metric);
KnnMetric knn_metric_from_string(const std::string& s);

double knn_distance(std::span<const double> a, std::span<const double> b, std::span<const double> weights,
                    KnnMetric metric);

// Indices of the K records closest to `query`, nearest first; ties go to the
// earlier record.
std::vector<std::size_t> knn_neighbors(const CongestionHistory& history, std::span<const double> query, std::size_t k,
                                       std::span<const double> weights, KnnMetric metric = KnnMetric::Projected);

// Per line: drop it when none of its own K neighbours (weights = that line's
// PTDF row) saw it congested.
ScreeningResult screen_knn(const PtdfMatrix& ptdf, const CongestionHistory& history,
                           std::span<const double> query_net_demand, std::size_t k,
                           KnnMetric metric = KnnMetric::Projected);

enum class CgPolicy {
  MostViolated,  // add the line with the largest relative overload
  AllViolated,   // add every overloaded line at once
};

const char* to_string(CgPolicy policy);
CgPolicy cg_policy_from_string(const std::string& s);

struct CgOptions {
  UCOptions uc;
  int max_iterations = 50;
  CgPolicy policy = CgPolicy::MostViolated;
};

struct CgResult {
  UCSolution solution;
  std::vector<int> final_removed;
  int iterations = 0;
};

class ConstraintGenerationError : public std::runtime_error {
 public:
  ConstraintGenerationError(const std::string& what, CgResult last)
      : std::runtime_error(what), last_(std::move(last)) {}
  const CgResult& last_iterate() const { return last_; }

 private:
  CgResult last_;
};

// Solve with the lines in `initial_removed` dropped, then add overloaded
// lines back (per `options.policy`) until no flow exceeds its capacity.
CgResult solve_with_constraint_generation(const PowerSystem& system, const PtdfMatrix& ptdf, const Scenario& scenario,
                                          std::span<const int> initial_removed, const CgOptions& options = {});

}  // namespace ucscreen
