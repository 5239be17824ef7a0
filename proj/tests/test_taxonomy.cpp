#include "doctest.h"

#include "ucscreen/taxonomy.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

using namespace ucscreen;
using namespace ucscreen::taxonomy;

TEST_CASE("the four-constraint example") {
  const auto milp = illustrative_milp();
  const auto base = lp::solve_mip(milp.to_model());
  REQUIRE(base.status == lp::Status::Optimal);
  CHECK(base.objective == doctest::Approx(7.0));
  CHECK(base.x[0] == doctest::Approx(4.0));
  CHECK(base.x[1] == doctest::Approx(3.0));

  const auto c = classify_all(milp);
  REQUIRE(c.size() == 4);
  CHECK(c[0].cls == ConstraintClass::Active);
  CHECK(std::isinf(c[0].optimum_without));
  CHECK(c[1].cls == ConstraintClass::Inactive);
  CHECK(c[1].optimum_without == doctest::Approx(7.0));
  CHECK(c[2].cls == ConstraintClass::Redundant);
  CHECK(c[2].extreme_lhs == doctest::Approx(3.0));
  CHECK(c[3].cls == ConstraintClass::QuasiActive);
  CHECK(c[3].optimum == 7.0);
  CHECK(c[3].optimum_without == 8.0);
}

TEST_CASE("y treated as continuous changes the picture") {
  auto milp = illustrative_milp();
  milp.variables[1].integer = false;
  const auto c = classify_all(milp);
  // optimum moves to (4, 3.5): the tight bound on y is binding
  CHECK(c[0].cls == ConstraintClass::Active);
  CHECK(c[3].cls == ConstraintClass::Active);
  CHECK(c[2].cls == ConstraintClass::Redundant);
}

TEST_CASE("a duplicated constraint is redundant") {
  auto milp = illustrative_milp();
  milp.constraints.push_back(milp.constraints[1]);
  milp.constraints.back().name = "copy";
  const auto c = classify_constraint(milp, 4);
  CHECK(c.cls == ConstraintClass::Redundant);
}

TEST_CASE("non-binding constraint whose removal unbounds the problem") {
  SmallMilp m;
  m.sense = lp::Sense::Maximize;
  m.variables = {{"x", 0.0, lp::kInf, false}};
  m.objective = {1.0};
  m.constraints = {{"tight", {{0, 1.0}}, Relation::LessEqual, 2.0}, {"loose", {{0, 1.0}}, Relation::LessEqual, 9.0}};
  CHECK(classify_constraint(m, 0).cls == ConstraintClass::Active);
  const auto loose = classify_constraint(m, 1);
  CHECK(loose.cls == ConstraintClass::Redundant);

  m.constraints = {{"x_le_2_5", {{0, 2.0}}, Relation::LessEqual, 5.0}};
  m.variables[0].integer = true;
  const auto only = classify_constraint(m, 0);
  CHECK(only.cls == ConstraintClass::QuasiActive);
  CHECK(!only.note.empty());
}

TEST_CASE("errors") {
  auto milp = illustrative_milp();
  CHECK_THROWS_AS(classify_constraint(milp, 9), std::out_of_range);
  milp.constraints.erase(milp.constraints.begin());
  CHECK_THROWS_AS(classify_constraint(milp, 0), std::runtime_error);  // unbounded
  auto bad = illustrative_milp();
  bad.objective.pop_back();
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("random small MILPs: removal effects match the class") {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> coef(-3, 3);
  std::uniform_int_distribution<int> rhs(0, 12);
  int seen[4] = {0, 0, 0, 0};
  for (int trial = 0; trial < 150; ++trial) {
    SmallMilp m;
    m.sense = trial % 2 ? lp::Sense::Maximize : lp::Sense::Minimize;
    m.variables = {{"a", 0, 6, true}, {"b", 0, 6, trial % 3 == 0}, {"c", 0, 6, false}};
    m.objective = {double(coef(rng)), double(coef(rng)), double(coef(rng))};
    for (int i = 0; i < 4; ++i) {
      Constraint c;
      c.name = "c" + std::to_string(i);
      for (int j = 0; j < 3; ++j) {
        const int a = coef(rng);
        if (a != 0) c.terms.push_back({j, double(a)});
      }
      c.relation = rng() % 2 ? Relation::LessEqual : Relation::GreaterEqual;
      c.rhs = c.relation == Relation::LessEqual ? rhs(rng) : -rhs(rng);
      m.constraints.push_back(c);
    }
    const auto base = lp::solve_mip(m.to_model());
    if (base.status != lp::Status::Optimal) continue;
    for (std::size_t i = 0; i < m.constraints.size(); ++i) {
      const auto cl = classify_constraint(m, i);
      ++seen[static_cast<int>(cl.cls)];
      const double gap = std::abs(cl.optimum_without - cl.optimum);
      switch (cl.cls) {
        case ConstraintClass::Redundant:
        case ConstraintClass::Inactive: CHECK(gap <= 1e-9 * (1 + std::abs(cl.optimum))); break;
        case ConstraintClass::QuasiActive: CHECK(gap > 1e-6); break;
        case ConstraintClass::Active: break;
      }
    }
  }
  CHECK(seen[0] > 0);
  CHECK(seen[2] > 0);
  CHECK(seen[3] > 0);
}
