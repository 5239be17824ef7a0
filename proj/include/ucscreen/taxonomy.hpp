#pragma once

// Active / quasi-active / inactive / redundant classification of the
// inequality constraints of a small MILP.

#include "ucscreen/lp.hpp"

#include <string>
#include <vector>

namespace ucscreen::taxonomy {

struct Variable {
  std::string name;
  double lo = -lp::kInf;
  double hi = lp::kInf;
  bool integer = false;
};

enum class Relation { LessEqual, GreaterEqual };

struct Constraint {
  std::string name;
  std::vector<lp::Term> terms;  // columns index `SmallMilp::variables`
  Relation relation = Relation::LessEqual;
  double rhs = 0.0;
};

struct SmallMilp {
  lp::Sense sense = lp::Sense::Maximize;
  std::vector<Variable> variables;
  std::vector<double> objective;  // one coefficient per variable
  std::vector<Constraint> constraints;

  // Throws std::invalid_argument on dangling indices or size mismatches.
  void validate() const;
  // The MILP with every constraint except `skip` (pass -1 to keep all).
  lp::Model to_model(int skip = -1) const;
};

enum class ConstraintClass { Active, QuasiActive, Inactive, Redundant };

const char* to_string(ConstraintClass c);

struct Classification {
  std::string constraint;
  ConstraintClass cls = ConstraintClass::Inactive;
  double optimum = 0.0;          // with every constraint
  double optimum_without = 0.0;  // +-inf when removal makes the problem unbounded
  double extreme_lhs = 0.0;      // max (<=) or min (>=) of the left side without the constraint
  std::string note;
};

// Active when the constraint holds with equality at the optimum; otherwise
// Redundant when the rest of the MILP already implies it, QuasiActive when
// dropping it strictly improves the optimum, and Inactive otherwise.
// Throws std::runtime_error when the full MILP has no finite optimum.
Classification classify_constraint(const SmallMilp& milp, std::size_t index);
std::vector<Classification> classify_all(const SmallMilp& milp);

// The four-constraint example: max x + y s.t. x <= 4, x + y >= 4, y <= 4.5,
// y <= 3.5 with x real and y integer.
SmallMilp illustrative_milp();

}  // namespace ucscreen::taxonomy
