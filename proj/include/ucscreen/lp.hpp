#pragma once

// Small dense LP / MILP engine used by every optimization in the toolkit.
//
// Problems here are tiny by solver standards (a few hundred rows at most), so
// a dense bounded-variable primal simplex and a best-first branch-and-bound
// are enough. Rows are ranged: lo <= a^T x <= hi, with +-inf allowed.

#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace ucscreen::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { Minimize, Maximize };

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit, NodeLimit };

const char* to_string(Status s);

struct Term {
  int col;
  double coef;
};

struct Row {
  std::string name;
  std::vector<Term> terms;
  double lo = -kInf;
  double hi = kInf;
};

struct Column {
  std::string name;
  double lo = 0.0;
  double hi = kInf;
  double cost = 0.0;
  bool integer = false;
};

class Model {
 public:
  Sense sense = Sense::Minimize;

  int add_column(std::string name, double lo, double hi, double cost, bool integer = false);
  int add_row(std::string name, std::vector<Term> terms, double lo, double hi);

  const std::vector<Column>& columns() const { return columns_; }
  const std::vector<Row>& rows() const { return rows_; }
  std::vector<Column>& columns() { return columns_; }
  std::vector<Row>& rows() { return rows_; }

  std::size_t num_columns() const { return columns_.size(); }
  std::size_t num_rows() const { return rows_.size(); }
  std::size_t num_integer() const;

  double objective_value(const std::vector<double>& x) const;
  double row_activity(std::size_t row, const std::vector<double>& x) const;

  // Largest bound or row violation of x (absolute, MW-scale for our models).
  double max_violation(const std::vector<double>& x) const;

  // LP-format style text dump; meant for humans, not for re-parsing.
  std::string to_lp_text() const;

 private:
  std::vector<Column> columns_;
  std::vector<Row> rows_;
};

struct Solution {
  Status status = Status::Infeasible;
  double objective = 0.0;
  std::vector<double> x;
  // Best proven bound for MILPs (equals objective for LPs).
  double bound = 0.0;
  long iterations = 0;
  long nodes = 0;
};

struct LpOptions {
  long max_iterations = 200000;
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
};

struct MipOptions {
  // Relative gap |incumbent - bound| / max(1, |incumbent|) at which search stops.
  double gap = 0.0;
  long max_nodes = 2000000;
  double integrality_tol = 1e-6;
  LpOptions lp;
};

// Solves the continuous relaxation (integrality flags are ignored).
Solution solve_lp(const Model& model, const LpOptions& options = {});

// Branch-and-bound over the integer columns.
Solution solve_mip(const Model& model, const MipOptions& options = {});

}  // namespace ucscreen::lp
