#include "ucscreen/taxonomy.hpp"

#include <cmath>
#include <stdexcept>

namespace ucscreen::taxonomy {

namespace {

constexpr double kTol = 1e-9;

bool improves(lp::Sense sense, double before, double after) {
  const double margin = 1e-6 * (1.0 + std::abs(before));
  return sense == lp::Sense::Maximize ? after > before + margin : after < before - margin;
}

}  // namespace

const char* to_string(ConstraintClass c) {
  switch (c) {
    case ConstraintClass::Active: return "active";
    case ConstraintClass::QuasiActive: return "quasi-active";
    case ConstraintClass::Inactive: return "inactive";
    case ConstraintClass::Redundant: return "redundant";
  }
  return "?";
}

void SmallMilp::validate() const {
  if (objective.size() != variables.size()) throw std::invalid_argument("objective needs one coefficient per variable");
  for (const auto& v : variables)
    if (v.lo > v.hi) throw std::invalid_argument("variable '" + v.name + "' has lower bound above upper bound");
  for (const auto& c : constraints) {
    if (!std::isfinite(c.rhs)) throw std::invalid_argument("constraint '" + c.name + "' needs a finite right side");
    for (const auto& t : c.terms)
      if (t.col < 0 || static_cast<std::size_t>(t.col) >= variables.size())
        throw std::invalid_argument("constraint '" + c.name + "' references an unknown variable");
  }
}

lp::Model SmallMilp::to_model(int skip) const {
  validate();
  lp::Model m;
  m.sense = sense;
  for (std::size_t j = 0; j < variables.size(); ++j)
    m.add_column(variables[j].name, variables[j].lo, variables[j].hi, objective[j], variables[j].integer);
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    if (static_cast<int>(i) == skip) continue;
    const auto& c = constraints[i];
    if (c.relation == Relation::LessEqual) m.add_row(c.name, c.terms, -lp::kInf, c.rhs);
    else m.add_row(c.name, c.terms, c.rhs, lp::kInf);
  }
  return m;
}

Classification classify_constraint(const SmallMilp& milp, std::size_t index) {
  if (index >= milp.constraints.size()) throw std::out_of_range("constraint index out of range");
  const auto& c = milp.constraints[index];
  const auto full = milp.to_model();
  const auto base = lp::solve_mip(full);
  if (base.status != lp::Status::Optimal)
    throw std::runtime_error(std::string("full problem has no finite optimum: ") + lp::to_string(base.status));

  Classification out;
  out.constraint = c.name;
  out.optimum = base.objective;

  double lhs = 0.0;
  for (const auto& t : c.terms) lhs += t.coef * base.x[static_cast<std::size_t>(t.col)];

  // Removal effect on the optimum.
  const auto relaxed_model = milp.to_model(static_cast<int>(index));
  const auto relaxed = lp::solve_mip(relaxed_model);
  const bool unbounded = relaxed.status == lp::Status::Unbounded;
  if (unbounded) {
    out.optimum_without = milp.sense == lp::Sense::Maximize ? lp::kInf : -lp::kInf;
  } else if (relaxed.status == lp::Status::Optimal) {
    out.optimum_without = relaxed.objective;
  } else {
    throw std::runtime_error(std::string("problem without '") + c.name + "' failed: " + lp::to_string(relaxed.status));
  }

  // Extreme value of the left side over the remaining feasible set.
  auto probe = relaxed_model;
  probe.sense = c.relation == Relation::LessEqual ? lp::Sense::Maximize : lp::Sense::Minimize;
  for (auto& col : probe.columns()) col.cost = 0.0;
  for (const auto& t : c.terms) probe.columns()[static_cast<std::size_t>(t.col)].cost += t.coef;
  const auto ext = lp::solve_mip(probe);
  bool redundant = false;
  if (ext.status == lp::Status::Optimal) {
    out.extreme_lhs = ext.objective;
    const double slack_tol = kTol * (1.0 + std::abs(c.rhs));
    redundant = c.relation == Relation::LessEqual ? ext.objective <= c.rhs + slack_tol
                                                  : ext.objective >= c.rhs - slack_tol;
  } else if (ext.status == lp::Status::Unbounded) {
    out.extreme_lhs = c.relation == Relation::LessEqual ? lp::kInf : -lp::kInf;
  } else {
    throw std::runtime_error(std::string("left-side probe for '") + c.name + "' failed: " + lp::to_string(ext.status));
  }

  if (std::abs(lhs - c.rhs) <= kTol * (1.0 + std::abs(c.rhs))) {
    out.cls = ConstraintClass::Active;
    if (unbounded) out.note = "problem becomes unbounded without it";
  } else if (redundant) {
    out.cls = ConstraintClass::Redundant;
  } else if (unbounded || improves(milp.sense, base.objective, out.optimum_without)) {
    out.cls = ConstraintClass::QuasiActive;
    if (unbounded) out.note = "problem becomes unbounded without it";
  } else {
    out.cls = ConstraintClass::Inactive;
  }
  return out;
}

std::vector<Classification> classify_all(const SmallMilp& milp) {
  std::vector<Classification> out;
  for (std::size_t i = 0; i < milp.constraints.size(); ++i) out.push_back(classify_constraint(milp, i));
  return out;
}

SmallMilp illustrative_milp() {
  SmallMilp m;
  m.sense = lp::Sense::Maximize;
  m.variables = {{"x", -lp::kInf, lp::kInf, false}, {"y", -lp::kInf, lp::kInf, true}};
  m.objective = {1.0, 1.0};
  m.constraints = {
      {"x_le_4", {{0, 1.0}}, Relation::LessEqual, 4.0},
      {"sum_ge_4", {{0, 1.0}, {1, 1.0}}, Relation::GreaterEqual, 4.0},
      {"y_le_4.5", {{1, 1.0}}, Relation::LessEqual, 4.5},
      {"y_le_3.5", {{1, 1.0}}, Relation::LessEqual, 3.5},
  };
  return m;
}

}  // namespace ucscreen::taxonomy
