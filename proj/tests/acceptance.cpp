// Acceptance checks, one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include "random_grid.hpp"
#include "ucscreen/fixtures.hpp"
#include "ucscreen/harness.hpp"
#include "ucscreen/screening.hpp"
#include "ucscreen/taxonomy.hpp"
#include "ucscreen/ucopt.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace ucscreen;
using Lines = std::vector<int>;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> problems;

  void expect(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      problems.push_back(what);
    }
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string lines_str(const Lines& ls) {
  if (ls.empty()) return "{}";
  std::string s = "{";
  for (std::size_t i = 0; i < ls.size(); ++i) s += (i ? "," : "") + std::string("l") + std::to_string(ls[i] + 1);
  return s + "}";
}

double wall_seconds(const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

bool same_objective(double a, double b) { return std::abs(a - b) <= 1e-6 * std::max(1.0, std::abs(b)); }

// ---------------------------------------------------------------------------

Outcome history_table() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  const auto sys = fixtures::three_bus();
  const auto ptdf = build_ptdf(sys, 1);
  struct Row {
    double d3, p1, p2;
    std::vector<std::uint8_t> status;
  };
  const std::vector<Row> rows{{50, 50, 0, {0, 0, 0}},  {70, 70, 0, {0, 0, 0}},  {90, 70, 20, {0, 0, 0}},
                              {110, 73, 37, {0, 1, 0}}, {130, 66, 64, {0, 1, 0}}, {150, 60, 90, {0, 1, 1}}};
  std::vector<Scenario> sc;
  for (const auto& r : rows) sc.push_back(fixtures::three_bus_scenario(sys, r.d3));
  const auto built = build_history(sys, ptdf, sc);
  o.expect(built.failures.empty() && built.history.size() == rows.size(), "history build failed");
  for (std::size_t i = 0; i < rows.size() && i < built.history.size(); ++i) {
    const auto sol = solve_tcuc(build_tcuc(sys, ptdf, sc[i], all_lines(sys.num_lines())));
    const auto& r = rows[i];
    const std::string at = "d3=" + fmt(r.d3);
    o.expect(std::abs(sol.dispatch[0] - r.p1) <= 0.5, at + " p1 " + fmt(sol.dispatch[0]) + " vs " + fmt(r.p1));
    o.expect(std::abs(sol.dispatch[1] - r.p2) <= 0.5, at + " p2 " + fmt(sol.dispatch[1]) + " vs " + fmt(r.p2));
    o.expect(built.history.records()[i].status == r.status, at + " status bits differ");
  }
  const double t = wall_seconds(start);
  o.expect(t < 1.0, "runtime " + fmt(t) + " s");
  return o;
}

struct MethodRow {
  std::string method;
  Lines removed;
  std::vector<std::uint8_t> commitment;
  double p1, p2, f1, f2, f3, eps3;
};

Outcome method_table(double d3, const std::vector<MethodRow>& rows) {
  Outcome o;
  const auto sys = fixtures::three_bus();
  const auto ptdf = build_ptdf(sys, 1);
  std::vector<Scenario> training;
  for (double d : fixtures::three_bus_history_levels()) training.push_back(fixtures::three_bus_scenario(sys, d));
  const std::vector<Scenario> test{fixtures::three_bus_scenario(sys, d3)};

  ExperimentConfig config;
  for (const auto& r : rows) config.methods.push_back(MethodSpec::parse(r.method));
  const auto report = compare(sys, training, test, config);

  for (const auto& r : rows) {
    const auto* m = report.find(r.method);
    if (!m || !m->ok()) {
      o.expect(false, r.method + " did not run");
      continue;
    }
    const auto& p = m->periods.front();
    o.expect(p.removed_lines == r.removed,
             r.method + " removes " + lines_str(p.removed_lines) + ", expected " + lines_str(r.removed));
    o.expect(p.commitment == r.commitment, r.method + " commitment differs");
    const auto sol = fix_and_resolve(p.commitment, sys, ptdf, test.front(), config.uc);
    const double got[] = {sol.dispatch[0], sol.dispatch[1], sol.flows[0], sol.flows[1], sol.flows[2]};
    const double want[] = {r.p1, r.p2, r.f1, r.f2, r.f3};
    const char* names[] = {"p1", "p2", "f1", "f2", "f3"};
    for (int i = 0; i < 5; ++i)
      o.expect(std::abs(got[i] - want[i]) <= 0.5, r.method + " " + names[i] + " " + fmt(got[i]) + " vs " + fmt(want[i]));
    o.expect(std::abs(sol.slack[2] - r.eps3) <= 0.1, r.method + " eps3 " + fmt(sol.slack[2]) + " vs " + fmt(r.eps3));
  }
  return o;
}

Outcome low_demand_rows() {
  const Lines all{0, 1, 2};
  const std::vector<std::uint8_t> both{1, 1}, cheap{1, 0};
  return method_table(85.0, {
                                {"BN", {}, both, 65, 20, 14.1, 50.9, 34.1, 0},
                                {"SB", all, cheap, 82.5, 0, 22.5, 60.0, 22.5, -2.5},
                                {"PI", all, cheap, 82.5, 0, 22.5, 60.0, 22.5, -2.5},
                                {"NV", {0}, both, 65, 20, 14.1, 50.9, 34.1, 0},
                                {"CG", {0, 2}, both, 65, 20, 14.1, 50.9, 34.1, 0},
                                {"ZH", {0, 2}, both, 65, 20, 14.1, 50.9, 34.1, 0},
                                {"RO100", {}, both, 65, 20, 14.1, 50.9, 34.1, 0},
                                {"DD2", all, cheap, 82.5, 0, 22.5, 60.0, 22.5, -2.5},
                                {"DD3", {0, 2}, both, 65, 20, 14.1, 50.9, 34.1, 0},
                                {"DD6", {0}, both, 65, 20, 14.1, 50.9, 34.1, 0},
                            });
}

Outcome high_demand_rows() {
  const Lines all{0, 1, 2};
  const std::vector<std::uint8_t> both{1, 1}, cheap{1, 0};
  return method_table(125.0, {
                                 {"BN", {}, both, 68, 57, 8.2, 60.0, 65.2, 0},
                                 {"SB", all, cheap, 82.5, 0, 22.5, 60.0, 22.5, -42.5},
                                 {"PI", {0, 2}, both, 68, 57, 8.2, 60.0, 65.2, 0},
                                 {"NV", {0}, both, 68, 57, 8.2, 60.0, 65.2, 0},
                                 {"CG", {0, 2}, both, 68, 57, 8.2, 60.0, 65.2, 0},
                                 {"ZH", {}, both, 68, 57, 8.2, 60.0, 65.2, 0},
                                 {"RO100", {}, both, 68, 57, 8.2, 60.0, 65.2, 0},
                                 {"DD2", {0, 2}, both, 68, 57, 8.2, 60.0, 65.2, 0},
                                 {"DD3", {0}, both, 68, 57, 8.2, 60.0, 65.2, 0},
                                 {"DD6", {0}, both, 68, 57, 8.2, 60.0, 65.2, 0},
                             });
}

Outcome narrative_checks() {
  Outcome o;
  const auto sys = fixtures::three_bus();
  const auto ptdf = build_ptdf(sys, 1);
  const auto nl = sys.num_lines();

  const auto cg = solve_with_constraint_generation(sys, ptdf, fixtures::three_bus_scenario(sys, 85.0), all_lines(nl));
  o.expect(cg.iterations == 2, "CG at d3=85 took " + std::to_string(cg.iterations) + " iterations");

  std::vector<Scenario> training;
  for (double d : fixtures::three_bus_history_levels()) training.push_back(fixtures::three_bus_scenario(sys, d));
  const auto history = build_history(sys, ptdf, training).history;
  const auto nv = screen_naive(history).removed_lines;
  for (double d3 : {85.0, 125.0}) {
    const auto q = net_demand(fixtures::three_bus_scenario(sys, d3), sys);
    const auto dd6 = screen_knn(ptdf, history, q, 6).removed_lines;
    o.expect(dd6 == nv, "DD6 at d3=" + fmt(d3) + " removes " + lines_str(dd6) + ", NV " + lines_str(nv));
  }

  const auto ro = screen_roald(sys, ptdf, training, 100).removed_lines;
  o.expect(ro.empty(), "RO over 50<=d3<=150 removes " + lines_str(ro));
  return o;
}

Outcome taxonomy_checks() {
  Outcome o;
  const auto classes = taxonomy::classify_all(taxonomy::illustrative_milp());
  using C = taxonomy::ConstraintClass;
  const std::vector<C> want{C::Active, C::Inactive, C::Redundant, C::QuasiActive};
  o.expect(classes.size() == want.size(), "wrong constraint count");
  for (std::size_t i = 0; i < std::min(classes.size(), want.size()); ++i)
    o.expect(classes[i].cls == want[i], classes[i].constraint + " is " + taxonomy::to_string(classes[i].cls) +
                                            ", expected " + taxonomy::to_string(want[i]));
  if (classes.size() == 4) {
    o.expect(classes[3].optimum == 7.0 && classes[3].optimum_without == 8.0,
             "quasi-active removal moves the optimum " + fmt(classes[3].optimum) + " -> " +
                 fmt(classes[3].optimum_without));
  }
  return o;
}

// Random corpus shared by the two property criteria.
struct Instance {
  PowerSystem system;
  PtdfMatrix ptdf;
  Scenario scenario;
  std::vector<Scenario> training;
};

std::vector<Instance> corpus(std::size_t count) {
  std::mt19937_64 rng(20240611);
  std::uniform_int_distribution<std::size_t> buses(2, 6), gens(1, 8);
  std::vector<Instance> out;
  while (out.size() < count) {
    auto sys = testing::random_grid(rng, buses(rng), gens(rng), 8);
    auto ptdf = build_ptdf(sys, 1);
    auto sc = testing::random_scenario(rng, sys);
    std::vector<Scenario> training;
    for (int t = 0; t < 10; ++t) training.push_back(testing::random_scenario(rng, sys));
    out.push_back({std::move(sys), std::move(ptdf), std::move(sc), std::move(training)});
  }
  return out;
}

Outcome oracle_equivalence(const std::vector<Instance>& instances) {
  Outcome o;
  std::mt19937_64 rng(99);
  UCOptions exact;
  exact.mip_gap = 0.0;
  int mismatches = 0, cg_mismatches = 0;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto& in = instances[i];
    const auto nl = in.system.num_lines();
    const auto mip = solve_tcuc(build_tcuc(in.system, in.ptdf, in.scenario, all_lines(nl), exact));
    const auto brute = brute_force_solve(in.system, in.ptdf, in.scenario, all_lines(nl), exact);
    if (!mip.optimal() || !brute.optimal() || !same_objective(mip.objective, brute.objective)) {
      if (++mismatches <= 3)
        o.expect(false, "system " + std::to_string(i) + ": MILP " + fmt(mip.objective) + " vs enumeration " +
                            fmt(brute.objective));
    }
    Lines initial;
    for (std::size_t l = 0; l < nl; ++l)
      if (rng() % 2) initial.push_back(static_cast<int>(l));
    CgOptions cg;
    cg.uc = exact;
    try {
      const auto res = solve_with_constraint_generation(in.system, in.ptdf, in.scenario, initial, cg);
      if (!same_objective(res.solution.objective, mip.objective) && ++cg_mismatches <= 3)
        o.expect(false, "system " + std::to_string(i) + ": CG " + fmt(res.solution.objective) + " vs " +
                            fmt(mip.objective));
    } catch (const std::exception& e) {
      if (++cg_mismatches <= 3) o.expect(false, "system " + std::to_string(i) + ": CG failed: " + e.what());
    }
  }
  o.expect(mismatches == 0, std::to_string(mismatches) + " MILP/enumeration mismatches");
  o.expect(cg_mismatches == 0, std::to_string(cg_mismatches) + " CG mismatches");
  return o;
}

// Removed lines must hold at the BN optimum, and the reduced problem must
// keep them within limits whenever its optimum needs no slack.
void check_removal(Outcome& o, const std::string& tag, const Instance& in, const UCSolution& bn, const Lines& removed,
                   int& failures) {
  const auto& lines = in.system.lines();
  bool ok = true;
  for (int l : removed) ok &= std::abs(bn.flows[static_cast<std::size_t>(l)]) <= lines[static_cast<std::size_t>(l)].capacity * (1 + 1e-6);
  const auto reduced = solve_tcuc(
      build_tcuc(in.system, in.ptdf, in.scenario, complement_lines(in.system.num_lines(), removed)));
  if (reduced.optimal() && reduced.total_abs_slack() <= 1e-6) {
    for (int l : removed)
      ok &= std::abs(reduced.flows[static_cast<std::size_t>(l)]) <=
            lines[static_cast<std::size_t>(l)].capacity * (1 + 1e-6) + 1e-6;
    ok &= same_objective(reduced.objective, bn.objective);
  }
  if (!ok && ++failures <= 3) o.expect(false, tag + " removed a line that binds or overloads");
}

Outcome screening_soundness(const std::vector<Instance>& instances) {
  Outcome o;
  int unsound = 0, ddcg_mismatch = 0, not_monotone = 0, skipped = 0;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto& in = instances[i];
    const auto nl = in.system.num_lines();
    const std::string tag = "system " + std::to_string(i);
    const auto bn = solve_tcuc(build_tcuc(in.system, in.ptdf, in.scenario, all_lines(nl)));
    if (!bn.optimal()) {
      o.expect(false, tag + ": BN failed");
      continue;
    }
    for (auto variant : {ZhaiVariant::Plain, ZhaiVariant::WithNetwork}) {
      try {
        check_removal(o, tag + (variant == ZhaiVariant::Plain ? " ZH" : " ZH+"), in, bn,
                      screen_zhai(in.system, in.ptdf, in.scenario, variant).removed_lines, unsound);
      } catch (const std::runtime_error&) {
        ++skipped;  // no slack-free dispatch exists; nothing is removed
      }
    }
    // The box must contain the period being screened.
    auto box_sample = in.training;
    box_sample.push_back(in.scenario);
    try {
      check_removal(o, tag + " RO", in, bn, screen_roald(in.system, in.ptdf, box_sample, 100).removed_lines, unsound);
    } catch (const std::runtime_error&) {
      ++skipped;
    }

    const auto history = build_history(in.system, in.ptdf, in.training).history;
    const auto q = net_demand(in.scenario, in.system);
    Lines previous = all_lines(nl);
    for (std::size_t k = 1; k <= history.size(); ++k) {
      const auto removed = screen_knn(in.ptdf, history, q, k).removed_lines;
      if (!std::includes(previous.begin(), previous.end(), removed.begin(), removed.end()) && ++not_monotone <= 3)
        o.expect(false, tag + ": DD" + std::to_string(k) + " removes lines DD" + std::to_string(k - 1) + " kept");
      previous = removed;
      try {
        const auto res = solve_with_constraint_generation(in.system, in.ptdf, in.scenario, removed);
        if (!same_objective(res.solution.objective, bn.objective) && ++ddcg_mismatch <= 3)
          o.expect(false, tag + ": DD" + std::to_string(k) + "+CG objective " + fmt(res.solution.objective) + " vs " +
                              fmt(bn.objective));
      } catch (const std::exception& e) {
        if (++ddcg_mismatch <= 3) o.expect(false, tag + ": DD+CG failed: " + e.what());
      }
    }
  }
  o.expect(unsound == 0, std::to_string(unsound) + " unsound removals");
  o.expect(ddcg_mismatch == 0, std::to_string(ddcg_mismatch) + " DD+CG mismatches");
  o.expect(not_monotone == 0, std::to_string(not_monotone) + " non-monotone K steps");
  (void)skipped;
  return o;
}

Outcome synthetic_ordinals() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  const auto sys = generate_system(SyntheticGridSpec{}, 2024);
  const auto all = generate_scenarios(sys, 320, 2024);
  const std::vector<Scenario> training(all.begin(), all.begin() + 300), test(all.begin() + 300, all.end());
  ExperimentConfig config;
  for (const char* m : {"BN", "NV", "ZH", "DD5", "DD5+CG"}) config.methods.push_back(MethodSpec::parse(m));
  config.jobs = jobs_from_env();
  const auto report = compare(sys, training, test, config);
  const auto *bn = report.find("BN"), *nv = report.find("NV"), *zh = report.find("ZH"), *dd = report.find("DD5"),
             *ddcg = report.find("DD5+CG");
  for (const auto* m : {bn, nv, zh, dd, ddcg}) {
    if (!m || !m->ok()) {
      o.expect(false, "a method failed to run");
      return o;
    }
  }
  o.expect(dd->removed_pct >= nv->removed_pct,
           "R(DD5)=" + fmt(dd->removed_pct) + " < R(NV)=" + fmt(nv->removed_pct));
  o.expect(nv->removed_pct >= zh->removed_pct, "R(NV)=" + fmt(nv->removed_pct) + " < R(ZH)=" + fmt(zh->removed_pct));
  o.expect(dd->tau_pct < 100.0, "tau(DD5)=" + fmt(dd->tau_pct));
  o.expect(std::abs(ddcg->cost_error_pct) <= 1e-6, "dC(DD5+CG)=" + fmt(ddcg->cost_error_pct));
  const double t = wall_seconds(start);
  o.expect(t < 600.0, "runtime " + fmt(t) + " s");
  std::ostringstream s;
  s << "R: DD5 " << fmt(dd->removed_pct) << ", NV " << fmt(nv->removed_pct) << ", ZH " << fmt(zh->removed_pct)
    << "; tau(DD5) " << fmt(dd->tau_pct) << "; dC(DD5+CG) " << fmt(ddcg->cost_error_pct);
  o.problems.insert(o.problems.begin(), s.str());
  return o;
}

}  // namespace

int main() {
  const auto instances = corpus(220);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"three-bus history dispatch and line status", history_table},
      {"three-bus method rows at d3=85", low_demand_rows},
      {"three-bus method rows at d3=125", high_demand_rows},
      {"CG iterations, DD6 vs NV, RO box", narrative_checks},
      {"constraint taxonomy example", taxonomy_checks},
      {"MILP and CG against enumeration on 220 random systems", [&] { return oracle_equivalence(instances); }},
      {"screening soundness, DD+CG exactness, K monotonicity", [&] { return screening_soundness(instances); }},
      {"synthetic 20-bus ordinal checks", synthetic_ordinals},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.expect(false, std::string("exception: ") + e.what());
    }
    failed += !o.pass;
    std::cout << "criterion " << i + 1 << ": " << (o.pass ? "PASS" : "FAIL") << "  " << criteria[i].first;
    if (!o.problems.empty()) {
      std::cout << "  [";
      for (std::size_t k = 0; k < o.problems.size(); ++k) std::cout << (k ? "; " : "") << o.problems[k];
      std::cout << "]";
    }
    std::cout << std::endl;
  }
  return failed;
}
