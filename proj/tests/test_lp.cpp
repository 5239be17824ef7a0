#include "doctest.h"

#include "ucscreen/lp.hpp"

#include <array>
#include <cmath>
#include <random>

using namespace ucscreen::lp;

TEST_CASE("two-variable LP reaches the textbook vertex") {
  Model m;
  m.sense = Sense::Maximize;
  const int x = m.add_column("x", 0, kInf, 1.0);
  const int y = m.add_column("y", 0, kInf, 1.0);
  m.add_row("c1", {{x, 1}, {y, 2}}, -kInf, 4);
  m.add_row("c2", {{x, 3}, {y, 1}}, -kInf, 6);
  const auto s = solve_lp(m);
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.x[0] == doctest::Approx(1.6));
  CHECK(s.x[1] == doctest::Approx(1.2));
  CHECK(s.objective == doctest::Approx(2.8));
}

TEST_CASE("equalities, free columns and ranged rows") {
  Model m;
  const int a = m.add_column("a", -kInf, kInf, 1.0);
  const int b = m.add_column("b", -kInf, kInf, -1.0);
  m.add_row("sum", {{a, 1}, {b, 1}}, 10, 10);
  m.add_row("range", {{a, 1}, {b, -1}}, -4, 2);
  const auto s = solve_lp(m);
  REQUIRE(s.status == Status::Optimal);
  // min a - b with a - b in [-4, 2] -> -4
  CHECK(s.objective == doctest::Approx(-4.0));
  CHECK(s.x[0] + s.x[1] == doctest::Approx(10.0));
}

TEST_CASE("infeasible and unbounded are reported") {
  Model inf;
  const int x = inf.add_column("x", 0, 10, 1.0);
  inf.add_row("lo", {{x, 1}}, 5, kInf);
  inf.add_row("hi", {{x, 1}}, -kInf, 3);
  CHECK(solve_lp(inf).status == Status::Infeasible);

  Model unb;
  unb.sense = Sense::Maximize;
  const int u = unb.add_column("u", 0, kInf, 1.0);
  const int v = unb.add_column("v", 0, kInf, 0.0);
  unb.add_row("r", {{u, 1}, {v, -1}}, -kInf, 1);
  CHECK(solve_lp(unb).status == Status::Unbounded);
}

TEST_CASE("column bounds alone (no rows)") {
  Model m;
  m.add_column("x", -3, 7, 2.0);
  m.add_column("y", -1, 4, -1.0);
  const auto s = solve_lp(m);
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.objective == doctest::Approx(-6 - 4));
}

namespace {

// Vertex enumeration oracle for 3-variable LPs in a box: every vertex is the
// intersection of three active planes drawn from rows and box faces.
struct Plane {
  std::array<double, 3> a;
  double b;
};

double det3(const std::array<std::array<double, 3>, 3>& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

bool solve3(const Plane& p, const Plane& q, const Plane& r, std::array<double, 3>& x) {
  std::array<std::array<double, 3>, 3> m{p.a, q.a, r.a};
  const double d = det3(m);
  if (std::abs(d) < 1e-10) return false;
  const std::array<double, 3> rhs{p.b, q.b, r.b};
  for (int k = 0; k < 3; ++k) {
    auto mk = m;
    for (int i = 0; i < 3; ++i) mk[i][k] = rhs[i];
    x[k] = det3(mk) / d;
  }
  return true;
}

}  // namespace

TEST_CASE("random 3-variable LPs match vertex enumeration") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coef(-5, 5);
  std::uniform_real_distribution<double> rhs(1, 10);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    Model m;
    std::array<double, 3> c{coef(rng), coef(rng), coef(rng)};
    std::vector<Plane> planes;
    for (int j = 0; j < 3; ++j) {
      m.add_column("x" + std::to_string(j), -4, 4, c[j]);
      std::array<double, 3> e{0, 0, 0};
      e[j] = 1;
      planes.push_back({e, 4});
      planes.push_back({e, -4});
    }
    const int rows = 2 + static_cast<int>(rng() % 4);
    std::vector<Plane> ineq;
    for (int i = 0; i < rows; ++i) {
      Plane p{{coef(rng), coef(rng), coef(rng)}, rhs(rng)};
      m.add_row("r" + std::to_string(i), {{0, p.a[0]}, {1, p.a[1]}, {2, p.a[2]}}, -kInf, p.b);
      ineq.push_back(p);
      planes.push_back(p);
    }
    // Origin is always feasible (rhs > 0), so the LP is feasible and bounded.
    double best = kInf;
    for (std::size_t i = 0; i < planes.size(); ++i)
      for (std::size_t j = i + 1; j < planes.size(); ++j)
        for (std::size_t k = j + 1; k < planes.size(); ++k) {
          std::array<double, 3> x{};
          if (!solve3(planes[i], planes[j], planes[k], x)) continue;
          bool ok = true;
          for (double v : x) ok = ok && v >= -4 - 1e-7 && v <= 4 + 1e-7;
          for (const auto& p : ineq) ok = ok && p.a[0] * x[0] + p.a[1] * x[1] + p.a[2] * x[2] <= p.b + 1e-7;
          if (ok) best = std::min(best, c[0] * x[0] + c[1] * x[1] + c[2] * x[2]);
        }
    const auto s = solve_lp(m);
    REQUIRE(s.status == Status::Optimal);
    CHECK(s.objective == doctest::Approx(best).epsilon(1e-7));
    CHECK(m.max_violation(s.x) < 1e-7);
    ++checked;
  }
  CHECK(checked == 300);
}

TEST_CASE("random pure-integer programs match enumeration") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> coef(-6, 6);
  for (int trial = 0; trial < 150; ++trial) {
    Model m;
    m.sense = trial % 2 ? Sense::Maximize : Sense::Minimize;
    const int nvar = 3;
    std::vector<double> c(nvar);
    for (int j = 0; j < nvar; ++j) {
      c[j] = coef(rng) + 0.5;
      m.add_column("z" + std::to_string(j), -3, 3, c[j], true);
    }
    std::vector<std::pair<std::array<double, 3>, double>> rows;
    for (int i = 0; i < 3; ++i) {
      std::array<double, 3> a{double(coef(rng)), double(coef(rng)), double(coef(rng))};
      const double b = 2.5 + (rng() % 5);
      m.add_row("r", {{0, a[0]}, {1, a[1]}, {2, a[2]}}, -kInf, b);
      rows.push_back({a, b});
    }
    double best = m.sense == Sense::Minimize ? kInf : -kInf;
    for (int x = -3; x <= 3; ++x)
      for (int y = -3; y <= 3; ++y)
        for (int z = -3; z <= 3; ++z) {
          bool ok = true;
          for (const auto& [a, b] : rows) ok = ok && a[0] * x + a[1] * y + a[2] * z <= b;
          if (!ok) continue;
          const double v = c[0] * x + c[1] * y + c[2] * z;
          best = m.sense == Sense::Minimize ? std::min(best, v) : std::max(best, v);
        }
    const auto s = solve_mip(m);
    REQUIRE(s.status == Status::Optimal);  // origin feasible
    CHECK(s.objective == doctest::Approx(best).epsilon(1e-9));
    for (double v : s.x) CHECK(v == std::round(v));
  }
}

TEST_CASE("MIP with unbounded relaxation is reported unbounded") {
  Model m;
  m.sense = Sense::Maximize;
  const int x = m.add_column("x", -kInf, kInf, 1.0);
  const int y = m.add_column("y", -kInf, kInf, 1.0, true);
  m.add_row("2c", {{x, 1}, {y, 1}}, 4, kInf);
  m.add_row("2e", {{y, 1}}, -kInf, 3.5);
  CHECK(solve_mip(m).status == Status::Unbounded);
}

TEST_CASE("LP text dump lists rows and generals") {
  Model m;
  const int x = m.add_column("x", 0, 1, 2.0, true);
  m.add_row("only", {{x, 1}}, -kInf, 1);
  const auto text = m.to_lp_text();
  CHECK(text.find("Subject To") != std::string::npos);
  CHECK(text.find("only:") != std::string::npos);
  CHECK(text.find("Generals\n x") != std::string::npos);
}
