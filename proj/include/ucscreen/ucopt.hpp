#pragma once

// Single-period transmission-constrained unit commitment (TC-UC).
//
//   min  sum_g c_g p_g + L sum_n |eps_n|
//   s.t. q_n + eps_n = sum_{g at n} p_g - d_n         (nodal balance)
//        sum_n q_n = 0                                (system balance)
//        u_g pmin_g <= p_g <= u_g rho_g pmax_g          (generation limits)
//        -fmax_l <= sum_n a_ln q_n <= fmax_l            (monitored lines only)
//        u_g in {0, 1}
//
// |eps_n| is split as eps_n = eps+_n - eps-_n with both parts nonnegative.

#include "ucscreen/lp.hpp"
#include "ucscreen/netmodel.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ucscreen {

// Relative tolerance at which a line counts as binding (flow at capacity).
inline constexpr double kBindingTol = 1e-4;
// Relative tolerance on flow-limit violations.
inline constexpr double kFlowViolationTol = 1e-6;

struct UCOptions {
  double slack_penalty = -1.0;  // L; < 0 selects default_slack_penalty(system)
  double mip_gap = -1.0;        // < 0 selects default_mip_gap(system)
  long max_nodes = 2000000;
};

// 1000 x the largest generator cost (or 1000 when every unit is free).
double default_slack_penalty(const PowerSystem& system);
// 0 up to 200 buses, 1% beyond.
double default_mip_gap(const PowerSystem& system);

struct FormulationStats {
  std::size_t binaries = 0;
  std::size_t nodal_balance = 0;
  std::size_t system_balance = 0;
  std::size_t generator_bounds = 0;  // double-bounds, one per unit
  std::size_t flow_bounds = 0;       // double-bounds, one per monitored line
};

// Column layout of the TC-UC model.
struct UCColumns {
  std::vector<int> commitment;  // u_g
  std::vector<int> dispatch;    // p_g
  std::vector<int> injection;   // q_n
  std::vector<int> slack_pos;   // eps+_n
  std::vector<int> slack_neg;   // eps-_n
};

// A built TC-UC model. Holds references to `system` and `ptdf`; both must
// outlive the instance.
class UCInstance {
 public:
  UCInstance(const PowerSystem& system, const PtdfMatrix& ptdf, Scenario scenario,
             std::vector<int> monitored_lines, double slack_penalty, double mip_gap);

  const PowerSystem& system() const { return *system_; }
  const PtdfMatrix& ptdf() const { return *ptdf_; }
  const Scenario& scenario() const { return scenario_; }
  const std::vector<int>& monitored_lines() const { return monitored_; }
  double slack_penalty() const { return penalty_; }
  double mip_gap() const { return gap_; }

  const lp::Model& model() const { return model_; }
  lp::Model& mutable_model() { return model_; }
  const UCColumns& columns() const { return cols_; }
  const FormulationStats& stats() const { return stats_; }

  // Pin every u_g to the given commitment (turns the MILP into an LP).
  void fix_commitment(std::span<const std::uint8_t> commitment);

  // Human-readable LP-style dump.
  std::string to_lp_text() const;

 private:
  const PowerSystem* system_;
  const PtdfMatrix* ptdf_;
  Scenario scenario_;
  std::vector<int> monitored_;
  double penalty_;
  double gap_;
  lp::Model model_;
  UCColumns cols_;
  FormulationStats stats_;
};

enum class UCStatus { Optimal, Infeasible, Failed };
const char* to_string(UCStatus s);

struct UCSolution {
  UCStatus status = UCStatus::Failed;
  std::string message;
  std::vector<std::uint8_t> commitment;
  std::vector<double> dispatch;
  std::vector<double> injections;
  std::vector<double> slack;  // signed eps_n
  std::vector<double> flows;  // evaluated on every line
  double cost = 0.0;          // sum c_g p_g
  double objective = 0.0;     // cost + L sum |eps_n|
  double bound = 0.0;         // proven lower bound on objective
  long nodes = 0;
  long lp_iterations = 0;
  double cpu_seconds = 0.0;

  bool optimal() const { return status == UCStatus::Optimal; }
  double total_abs_slack() const;
};

// Lines (0-based indices) monitored when `removed` is screened out.
std::vector<int> complement_lines(std::size_t num_lines, std::span<const int> removed);
std::vector<int> all_lines(std::size_t num_lines);

UCInstance build_tcuc(const PowerSystem& system, const PtdfMatrix& ptdf, const Scenario& scenario,
                      std::vector<int> monitored_lines, const UCOptions& options = {});

UCSolution solve_tcuc(const UCInstance& instance);

// LP with the commitment fixed and every line monitored.
UCSolution fix_and_resolve(std::span<const std::uint8_t> commitment, const PowerSystem& system,
                           const PtdfMatrix& ptdf, const Scenario& scenario, const UCOptions& options = {});

// Enumerates all 2^G commitments (G <= 15); ties go to the lexicographically
// smallest commitment vector.
UCSolution brute_force_solve(const PowerSystem& system, const PtdfMatrix& ptdf, const Scenario& scenario,
                             std::vector<int> monitored_lines, const UCOptions& options = {});

// Re-checks the UCSolution invariants outside the solver. Returns an empty
// string when everything holds, else a description of the first violation.
std::string check_solution(const UCInstance& instance, const UCSolution& solution);

// Lines whose |flow| is within kBindingTol of capacity.
std::vector<int> binding_lines(const PowerSystem& system, std::span<const double> flows,
                               double rel_tol = kBindingTol);

// Lines whose |flow| exceeds capacity by more than kFlowViolationTol (relative).
std::vector<int> violated_lines(const PowerSystem& system, std::span<const double> flows,
                                double rel_tol = kFlowViolationTol);

}  // namespace ucscreen
