#include "doctest.h"

#include "random_grid.hpp"
#include "ucscreen/fixtures.hpp"
#include "ucscreen/ucopt.hpp"

#include <cmath>
#include <random>

using namespace ucscreen;

namespace {

struct ThreeBus {
  PowerSystem sys = fixtures::three_bus();
  PtdfMatrix ptdf = build_ptdf(sys, 1);
  Scenario at(double d3) const { return fixtures::three_bus_scenario(sys, d3); }
};

}  // namespace

TEST_CASE("formulation counts") {
  ThreeBus tb;
  const auto full = build_tcuc(tb.sys, tb.ptdf, tb.at(85), all_lines(3));
  CHECK(full.stats().binaries == 2);
  CHECK(full.stats().nodal_balance == 3);
  CHECK(full.stats().system_balance == 1);
  CHECK(full.stats().generator_bounds == 2);
  CHECK(full.stats().flow_bounds == 3);
  CHECK(full.model().num_integer() == 2);

  const auto partial = build_tcuc(tb.sys, tb.ptdf, tb.at(85), {1, 2});
  CHECK(partial.stats().flow_bounds == 2);
  CHECK(partial.model().num_rows() == full.model().num_rows() - 1);

  const auto none = build_tcuc(tb.sys, tb.ptdf, tb.at(85), {});
  CHECK(none.stats().flow_bounds == 0);
  CHECK(none.slack_penalty() == doctest::Approx(20000.0));
  CHECK(none.mip_gap() == 0.0);

  CHECK_THROWS(build_tcuc(tb.sys, tb.ptdf, tb.at(85), {3}));
  UCOptions bad;
  bad.slack_penalty = 5.0;
  CHECK_THROWS(build_tcuc(tb.sys, tb.ptdf, tb.at(85), {}, bad));
}

TEST_CASE("benchmark at d3 = 85") {
  ThreeBus tb;
  const auto inst = build_tcuc(tb.sys, tb.ptdf, tb.at(85), all_lines(3));
  const auto sol = solve_tcuc(inst);
  REQUIRE(sol.optimal());
  CHECK(check_solution(inst, sol).empty());
  CHECK(sol.commitment == std::vector<std::uint8_t>{1, 1});
  CHECK(sol.dispatch[0] == doctest::Approx(65.0));
  CHECK(sol.dispatch[1] == doctest::Approx(20.0));
  CHECK(sol.cost == doctest::Approx(1050.0));
  CHECK(sol.total_abs_slack() < 1e-9);
}

TEST_CASE("single-bus problem at d3 = 85") {
  ThreeBus tb;
  const auto inst = build_tcuc(tb.sys, tb.ptdf, tb.at(85), {});
  const auto sol = solve_tcuc(inst);
  REQUIRE(sol.optimal());
  CHECK(sol.commitment == std::vector<std::uint8_t>{1, 0});
  CHECK(sol.dispatch[0] == doctest::Approx(85.0));
  CHECK(sol.cost == doctest::Approx(850.0));
}

TEST_CASE("benchmark at d3 = 150") {
  ThreeBus tb;
  const auto sol = solve_tcuc(build_tcuc(tb.sys, tb.ptdf, tb.at(150), all_lines(3)));
  REQUIRE(sol.optimal());
  CHECK(sol.dispatch[0] == doctest::Approx(60.0));
  CHECK(sol.dispatch[1] == doctest::Approx(90.0));
}

TEST_CASE("fix and resolve") {
  ThreeBus tb;
  const std::vector<std::uint8_t> only_g1{1, 0};
  const auto sb = fix_and_resolve(only_g1, tb.sys, tb.ptdf, tb.at(85));
  REQUIRE(sb.optimal());
  CHECK(sb.dispatch[0] == doctest::Approx(82.5));
  CHECK(sb.slack[2] == doctest::Approx(-2.5));
  CHECK(sb.flows[1] == doctest::Approx(60.0));

  const std::vector<std::uint8_t> both{1, 1};
  const auto bn125 = fix_and_resolve(both, tb.sys, tb.ptdf, tb.at(125));
  REQUIRE(bn125.optimal());
  CHECK(std::abs(bn125.dispatch[0] - 68) <= 0.5);
  CHECK(std::abs(bn125.dispatch[1] - 57) <= 0.5);
  CHECK(std::abs(bn125.flows[0] - 8.2) <= 0.5);
  CHECK(std::abs(bn125.flows[1] - 60.0) <= 0.5);
  CHECK(std::abs(bn125.flows[2] - 65.2) <= 0.5);
  CHECK(bn125.total_abs_slack() < 1e-9);

  const auto bn85 = fix_and_resolve(both, tb.sys, tb.ptdf, tb.at(85));
  CHECK(bn85.dispatch[0] == doctest::Approx(65.0));
  CHECK(bn85.dispatch[1] == doctest::Approx(20.0));
  CHECK(bn85.cost == doctest::Approx(1050.0));
}

TEST_CASE("brute force reproduces the historical dispatch levels") {
  ThreeBus tb;
  // Hand-derived optima: from 110 MW up, line 2 binds (8 p1 + 2 p2 = 660), so
  // p1 = (660 - 2 d3) / 6. The published table prints 66/64 for 130 MW, which
  // is 0.67 MW off the exact 66.67/63.33.
  const double table[6][3] = {{50, 50, 0},           {70, 70, 0},           {90, 70, 20},
                              {110, 220.0 / 3, 110.0 / 3}, {130, 200.0 / 3, 190.0 / 3}, {150, 60, 90}};
  for (const auto& row : table) {
    const auto bf = brute_force_solve(tb.sys, tb.ptdf, tb.at(row[0]), all_lines(3));
    REQUIRE(bf.optimal());
    CHECK(bf.dispatch[0] == doctest::Approx(row[1]).epsilon(1e-9));
    CHECK(bf.dispatch[1] == doctest::Approx(row[2]).epsilon(1e-9));
    CHECK(bf.total_abs_slack() < 1e-9);
    const auto milp = solve_tcuc(build_tcuc(tb.sys, tb.ptdf, tb.at(row[0]), all_lines(3)));
    CHECK(milp.objective == doctest::Approx(bf.objective).epsilon(1e-9));
  }
}

TEST_CASE("brute force with no generators puts all demand on slack") {
  PowerSystem sys({{1, 10}, {2, 20}}, {{1, 1, 2, 1.0, 100.0}}, {});
  const auto ptdf = build_ptdf(sys);
  Scenario sc{{10.0, 20.0}, {}};
  const auto bf = brute_force_solve(sys, ptdf, sc, all_lines(1));
  REQUIRE(bf.optimal());
  CHECK(bf.cost == 0.0);
  CHECK(bf.objective == doctest::Approx(1000.0 * 30.0));
}

TEST_CASE("brute force refuses large fleets") {
  std::vector<Generator> gens;
  for (int g = 1; g <= 16; ++g) gens.push_back({g, 1, 1.0, 2.0, 1.0, GeneratorKind::Thermal});
  PowerSystem sys({{1, 1}}, {}, gens);
  const auto ptdf = build_ptdf(sys);
  CHECK_THROWS(brute_force_solve(sys, ptdf, Scenario::with_demand(sys, {1.0}), {}));
}

TEST_CASE("random systems: MILP matches enumeration, monotone in monitored set, invariants hold") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    const auto sys = testing::random_grid(rng, 4, 5);
    const auto ptdf = build_ptdf(sys);
    const auto sc = testing::random_scenario(rng, sys);
    const auto inst = build_tcuc(sys, ptdf, sc, all_lines(sys.num_lines()));
    const auto milp = solve_tcuc(inst);
    const auto bf = brute_force_solve(sys, ptdf, sc, all_lines(sys.num_lines()));
    REQUIRE(milp.optimal());
    REQUIRE(bf.optimal());
    CHECK(std::abs(milp.objective - bf.objective) <= 1e-6 * (1 + std::abs(bf.objective)));
    CHECK(check_solution(inst, milp) == "");

    // Dropping a line can only lower the optimum.
    auto fewer = all_lines(sys.num_lines());
    fewer.erase(fewer.begin() + static_cast<long>(rng() % fewer.size()));
    const auto relaxed = solve_tcuc(build_tcuc(sys, ptdf, sc, fewer));
    CHECK(relaxed.objective <= milp.objective + 1e-6 * (1 + std::abs(milp.objective)));
  }
}

TEST_CASE("slacks stay idle on the three-bus system up to 150 MW") {
  // Below the 20 MW minimum output (0 < d3 < 20) no balanced dispatch exists.
  ThreeBus tb;
  for (double d : {0.0, 20.0, 35.0, 50.0, 82.5, 85.0, 100.0, 110.0, 125.0, 137.0, 150.0}) {
    const auto sol = solve_tcuc(build_tcuc(tb.sys, tb.ptdf, tb.at(d), all_lines(3)));
    REQUIRE(sol.optimal());
    CHECK(sol.total_abs_slack() < 1e-7);
  }
}

TEST_CASE("LP dump mentions the monitored lines") {
  ThreeBus tb;
  const auto inst = build_tcuc(tb.sys, tb.ptdf, tb.at(85), {1});
  const auto text = inst.to_lp_text();
  CHECK(text.find("flow_2") != std::string::npos);
  CHECK(text.find("flow_1") == std::string::npos);
  CHECK(text.find("1 monitored") != std::string::npos);
}
