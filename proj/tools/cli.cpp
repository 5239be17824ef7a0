#include "cli.hpp"

#include "ucscreen/cputime.hpp"
#include "ucscreen/harness.hpp"
#include "ucscreen/io.hpp"
#include "ucscreen/screening.hpp"
#include "ucscreen/taxonomy.hpp"
#include "ucscreen/ucopt.hpp"

#include <algorithm>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

namespace ucscreen::cli {

namespace {

using io::json;
namespace fs = std::filesystem;

// Usage problems detected after flag parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  bool no_timing = false;
  unsigned jobs = 1;
};

struct ModelFlags {
  double slack_penalty = -1.0;
  double mip_gap = -1.0;

  void add(CLI::App* cmd) {
    cmd->add_option("--slack-penalty", slack_penalty, "Penalty L on nodal slack (default: 1000 x max cost)");
    cmd->add_option("--mip-gap", mip_gap, "Relative MIP gap (default: 0 up to 200 buses, else 0.01)");
  }
  UCOptions options() const {
    UCOptions o;
    o.slack_penalty = slack_penalty;
    o.mip_gap = mip_gap;
    return o;
  }
};

void emit(const json& j, const std::string& path, std::ostream& out) {
  const auto text = j.dump(2) + "\n";
  if (path.empty()) out << text;
  else io::write_text(path, text);
}

Scenario pick_period(const std::vector<Scenario>& scenarios, std::size_t period) {
  if (period < 1 || period > scenarios.size())
    throw UsageError("--period " + std::to_string(period) + " outside 1.." + std::to_string(scenarios.size()));
  return scenarios[period - 1];
}

std::vector<int> parse_line_ids(const std::string& text, std::size_t num_lines) {
  std::vector<int> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    int id = 0;
    try {
      std::size_t used = 0;
      id = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("bad line id '" + item + "'");
    }
    if (id < 1 || static_cast<std::size_t>(id) > num_lines) throw UsageError("unknown line id " + item);
    out.push_back(id - 1);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

json line_ids(const std::vector<int>& lines) {
  json ids = json::array();
  for (int l : lines) ids.push_back(l + 1);
  return ids;
}

// --- solve ------------------------------------------------------------------

struct SolveCmd {
  std::string system, scenarios, out, remove, removal_file;
  std::size_t period = 1;
  bool no_slack = false;
  ModelFlags model;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("solve", "Solve one TC-UC instance and write the solution as JSON");
    c->add_option("--system", system, "Grid directory (CSV trio) or JSON file")->required()->check(CLI::ExistingPath);
    c->add_option("--scenarios", scenarios, "Scenario CSV")->required()->check(CLI::ExistingFile);
    c->add_option("--period", period, "Period to solve (1-based)");
    c->add_option("--remove", remove, "Comma-separated line ids left unmonitored");
    c->add_option("--removal", removal_file, "Removal-set JSON naming the unmonitored lines")->check(CLI::ExistingFile);
    c->add_flag("--no-slack", no_slack, "Forbid nodal slack; infeasible instances exit with code 3");
    c->add_option("--out", out, "Output JSON (default: stdout)");
    model.add(c);
  }

  int run(const Common& common, std::ostream& os, std::ostream& err) const {
    const auto sys = io::read_system(system);
    const auto sc = pick_period(io::read_scenarios(scenarios, sys), period);
    if (!remove.empty() && !removal_file.empty()) throw UsageError("use --remove or --removal, not both");
    std::vector<int> removed;
    if (!remove.empty()) removed = parse_line_ids(remove, sys.num_lines());
    if (!removal_file.empty()) {
      json j;
      try {
        j = json::parse(io::read_text(removal_file));
      } catch (const json::parse_error& e) {
        throw io::FormatError(removal_file + ": " + e.what());
      }
      removed = io::removal_from_json(j, sys.num_lines()).removed_lines;
    }
    const auto ptdf = build_ptdf(sys, 1);
    auto inst = build_tcuc(sys, ptdf, sc, complement_lines(sys.num_lines(), removed), model.options());
    if (no_slack) {
      auto& cols = inst.mutable_model().columns();
      for (int c : inst.columns().slack_pos) cols[static_cast<std::size_t>(c)].hi = 0.0;
      for (int c : inst.columns().slack_neg) cols[static_cast<std::size_t>(c)].hi = 0.0;
    }
    const auto sol = solve_tcuc(inst);
    auto j = io::solution_to_json(sys, sol, !common.no_timing);
    j["period"] = period;
    j["removed_line_ids"] = line_ids(removed);
    j["slack_allowed"] = !no_slack;
    emit(j, out, os);
    if (sol.status == UCStatus::Infeasible) {
      err << json{{"error", {{"command", "solve"}, {"kind", "infeasible"}, {"message", sol.message.empty() ? "instance is infeasible" : sol.message}}}}.dump()
          << "\n";
      return no_slack ? kInfeasible : kOk;
    }
    if (!sol.optimal()) throw std::runtime_error("solver failed: " + sol.message);
    return kOk;
  }
};

// --- screen -----------------------------------------------------------------

struct ScreenCmd {
  std::string method, system, scenarios, history, training, out, knn_metric = "projected", cg_policy = "most-violated";
  std::size_t period = 1;
  int cg_max_iterations = 50;
  ModelFlags model;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("screen", "Screen line limits for one period and write the removal set as JSON");
    c->add_option("--method", method, "BN, SB, PI, NV, CG, ZH, ZH+, RO100, RO95, RO90, DD<K> or DD<K>+CG")->required();
    c->add_option("--system", system, "Grid directory (CSV trio) or JSON file")->required()->check(CLI::ExistingPath);
    c->add_option("--scenarios", scenarios, "Scenario CSV holding the period to screen")->required()->check(CLI::ExistingFile);
    c->add_option("--period", period, "Period to screen (1-based)");
    c->add_option("--history", history, "History directory (NV, DD)")->check(CLI::ExistingDirectory);
    c->add_option("--training", training, "Training scenario CSV (RO; builds the history for NV and DD when --history is absent)")
        ->check(CLI::ExistingFile);
    c->add_option("--knn-metric", knn_metric, "projected or elementwise");
    c->add_option("--cg-policy", cg_policy, "most-violated or all-violated");
    c->add_option("--cg-max-iterations", cg_max_iterations, "Iteration cap for CG");
    c->add_option("--out", out, "Output JSON (default: stdout)");
    model.add(c);
  }

  int run(const Common& common, std::ostream& os, std::ostream&) const {
    MethodSpec spec;
    try {
      spec = MethodSpec::parse(method);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    using Kind = MethodSpec::Kind;
    const auto sys = io::read_system(system);
    const auto sc = pick_period(io::read_scenarios(scenarios, sys), period);
    const auto ptdf = build_ptdf(sys, 1);
    const std::size_t nl = sys.num_lines();
    const auto uc = model.options();

    auto need_history = [&] {
      if (!history.empty()) return io::read_history(history);
      if (training.empty()) throw UsageError(spec.label() + " needs --history or --training");
      const auto train = io::read_scenarios(training, sys);
      return build_history(sys, ptdf, train, uc, kBindingTol, common.jobs).history;
    };

    ScreeningResult r;
    std::optional<int> iterations;
    switch (spec.kind) {
      case Kind::BN:
        r.removed_lines = {};
        break;
      case Kind::SB:
      case Kind::CG:
        r.removed_lines = all_lines(nl);
        break;
      case Kind::PI: {
        CpuStopwatch watch;
        const auto full = solve_tcuc(build_tcuc(sys, ptdf, sc, all_lines(nl), uc));
        if (!full.optimal()) throw std::runtime_error("full TC-UC failed: " + full.message);
        r = screen_perfect_information(sys, full);
        r.t1_seconds = watch.cpu();
        break;
      }
      case Kind::NV:
        r = screen_naive(need_history());
        break;
      case Kind::ZH:
      case Kind::ZHPlus:
        r = screen_zhai(sys, ptdf, sc, spec.kind == Kind::ZH ? ZhaiVariant::Plain : ZhaiVariant::WithNetwork);
        break;
      case Kind::RO: {
        if (training.empty()) throw UsageError(spec.label() + " needs --training");
        r = screen_roald(sys, ptdf, io::read_scenarios(training, sys), spec.percentile);
        break;
      }
      case Kind::DD:
      case Kind::DDCG: {
        const auto h = need_history();
        if (spec.k > h.size())
          throw UsageError("K = " + std::to_string(spec.k) + " exceeds the history size " + std::to_string(h.size()));
        r = screen_knn(ptdf, h, net_demand(sc, sys), spec.k, knn_metric_from_string(knn_metric));
        break;
      }
    }
    if (spec.kind == Kind::CG || spec.kind == Kind::DDCG) {
      CgOptions cg;
      cg.uc = uc;
      cg.max_iterations = cg_max_iterations;
      cg.policy = cg_policy_from_string(cg_policy);
      const auto res = solve_with_constraint_generation(sys, ptdf, sc, r.removed_lines, cg);
      r.removed_lines = res.final_removed;
      iterations = res.iterations;
    }
    r.method = spec.label();
    auto j = io::removal_to_json(r, !common.no_timing);
    j["period"] = period;
    if (iterations) j["cg_iterations"] = *iterations;
    emit(j, out, os);
    return kOk;
  }
};

// --- classify ---------------------------------------------------------------

struct ClassifyCmd {
  std::string milp, out;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("classify", "Classify every constraint of a small MILP");
    c->add_option("milp", milp, "MILP JSON file")->required()->check(CLI::ExistingFile);
    c->add_option("--out", out, "Output JSON (default: stdout)");
  }

  int run(const Common&, std::ostream& os, std::ostream&) const {
    json j;
    try {
      j = json::parse(io::read_text(milp));
    } catch (const json::parse_error& e) {
      throw io::FormatError(milp + ": " + e.what());
    }
    const auto m = io::milp_from_json(j);
    emit(json{{"constraints", io::classification_to_json(taxonomy::classify_all(m))}}, out, os);
    return kOk;
  }
};

// --- history ----------------------------------------------------------------

struct HistoryCmd {
  std::string system, scenarios, out;
  double congestion_tol = kBindingTol;
  ModelFlags model;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("history", "Solve every scenario and record congested lines and net demand");
    c->add_option("--system", system, "Grid directory (CSV trio) or JSON file")->required()->check(CLI::ExistingPath);
    c->add_option("--scenarios", scenarios, "Scenario CSV")->required()->check(CLI::ExistingFile);
    c->add_option("--out", out, "Output directory for status.csv and net_demand.csv")->required();
    c->add_option("--congestion-tol", congestion_tol, "Relative tolerance for calling a line congested")
        ->check(CLI::Range(0.0, 1.0));
    model.add(c);
  }

  int run(const Common& common, std::ostream& os, std::ostream&) const {
    const auto sys = io::read_system(system);
    const auto sc = io::read_scenarios(scenarios, sys);
    const auto ptdf = build_ptdf(sys, 1);
    const auto built = build_history(sys, ptdf, sc, model.options(), congestion_tol, common.jobs);
    io::write_history(out, built.history);
    json failures = json::array();
    for (const auto& f : built.failures) failures.push_back({{"period", f.period + 1}, {"message", f.message}});
    json congested = json::array();
    for (std::size_t l = 0; l < sys.num_lines(); ++l) {
      int count = 0;
      for (const auto& rec : built.history.records()) count += rec.status[l];
      congested.push_back(count);
    }
    emit(json{{"periods", built.history.size()}, {"congested_periods_per_line", congested}, {"failures", failures}}, "",
         os);
    return kOk;
  }
};

// --- gen-data ---------------------------------------------------------------

struct GenDataCmd {
  std::string system, grid_out, out;
  std::size_t count = 0;
  std::uint64_t seed = 1;
  std::uint64_t grid_seed = 1;
  SyntheticGridSpec spec;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("gen-data", "Generate random scenarios, optionally on a new synthetic grid");
    c->add_option("--count", count, "Number of periods (>= 1)")->required();
    c->add_option("--seed", seed, "Scenario seed");
    c->add_option("--out", out, "Scenario CSV to write")->required();
    c->add_option("--system", system, "Existing grid to generate scenarios for")->check(CLI::ExistingPath);
    c->add_option("--grid-out", grid_out, "Write a new synthetic grid (CSV trio) here and use it");
    c->add_option("--grid-seed", grid_seed, "Seed for the synthetic grid");
    c->add_option("--buses", spec.buses, "Synthetic grid: buses");
    c->add_option("--lines", spec.lines, "Synthetic grid: lines");
    c->add_option("--thermal", spec.thermal_units, "Synthetic grid: thermal units");
    c->add_option("--renewable", spec.renewable_units, "Synthetic grid: renewable units");
  }

  int run(const Common&, std::ostream& os, std::ostream&) const {
    if (count == 0) throw UsageError("--count must be at least 1");
    if (system.empty() == grid_out.empty()) throw UsageError("give exactly one of --system and --grid-out");
    std::optional<PowerSystem> sys;
    if (!system.empty()) {
      sys = io::read_system(system);
    } else {
      try {
        sys = generate_system(spec, grid_seed);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      io::write_system_csv(grid_out, *sys);
    }
    io::write_scenarios(out, *sys, generate_scenarios(*sys, count, seed));
    json j{{"periods", count}, {"seed", seed}, {"scenarios", out}};
    if (!grid_out.empty()) j["grid"] = grid_out;
    emit(j, "", os);
    return kOk;
  }
};

// --- compare ----------------------------------------------------------------

struct CompareCmd {
  std::string config, system, training, test, methods, csv_out, json_out, cg_policy;
  ModelFlags model;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("compare", "Run the screening comparison and write the report");
    c->add_option("--config", config, "key=value or JSON configuration")->check(CLI::ExistingFile);
    c->add_option("--system", system, "Grid directory (CSV trio) or JSON file")->check(CLI::ExistingPath);
    c->add_option("--training", training, "Training scenario CSV")->check(CLI::ExistingFile);
    c->add_option("--test", test, "Test scenario CSV")->check(CLI::ExistingFile);
    c->add_option("--methods", methods, "Comma-separated method labels (overrides the config)");
    c->add_option("--cg-policy", cg_policy, "most-violated or all-violated");
    c->add_option("--csv", csv_out, "Report CSV (default: stdout when --json is absent)");
    c->add_option("--json", json_out, "Report JSON with per-period detail");
    model.add(c);
  }

  int run(const Common& common, std::ostream& os, std::ostream&) const {
    io::CompareSetup setup;
    if (!config.empty()) {
      setup = io::read_compare_config(config);
    } else {
      if (system.empty() || training.empty() || test.empty())
        throw UsageError("compare needs --config or all of --system, --training and --test");
      for (const char* l : {"BN", "SB", "PI", "NV", "CG", "ZH", "ZH+", "RO100", "DD5"})
        setup.config.methods.push_back(MethodSpec::parse(l));
      setup.config.jobs = common.jobs;
    }
    if (!system.empty()) setup.system_path = system;
    if (!training.empty()) setup.training_path = training;
    if (!test.empty()) setup.test_path = test;
    if (setup.training_path.empty() != setup.test_path.empty()) throw UsageError("give both --training and --test");
    if (!methods.empty()) {
      setup.config.methods.clear();
      std::stringstream in(methods);
      std::string item;
      while (std::getline(in, item, ',')) {
        item.erase(0, item.find_first_not_of(' '));
        item.erase(item.find_last_not_of(' ') + 1);
        if (item.empty()) continue;
        try {
          setup.config.methods.push_back(MethodSpec::parse(item));
        } catch (const std::invalid_argument& e) {
          throw UsageError(e.what());
        }
      }
    }
    if (setup.config.methods.empty()) throw UsageError("no methods to compare");
    if (!cg_policy.empty()) setup.config.cg_policy = cg_policy_from_string(cg_policy);
    if (model.slack_penalty >= 0.0) setup.config.uc.slack_penalty = model.slack_penalty;
    if (model.mip_gap >= 0.0) setup.config.uc.mip_gap = model.mip_gap;
    if (common.jobs > 1 || config.empty()) setup.config.jobs = common.jobs;

    const auto in = io::load_compare_inputs(setup);
    const auto report = compare(in.system, in.training, in.test, setup.config);
    const bool timing = !common.no_timing;
    if (!csv_out.empty()) io::write_text(csv_out, io::report_csv(report, timing));
    if (!json_out.empty()) io::write_text(json_out, io::report_to_json(report, timing).dump(2) + "\n");
    if (csv_out.empty() && json_out.empty()) os << io::report_csv(report, timing);
    return kOk;
  }
};

void error_record(std::ostream& err, const std::string& command, const std::string& kind, const std::string& message) {
  err << json{{"error", {{"command", command}, {"kind", kind}, {"message", message}}}}.dump() << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Line-limit screening for transmission-constrained unit commitment", "ucscreen"};
  app.require_subcommand(1);
  Common common;
  common.jobs = jobs_from_env();
  app.add_flag("--no-timing", common.no_timing, "Omit CPU timings so outputs are byte-reproducible");
  app.add_option("--jobs", common.jobs, "Worker threads (default: UCSCREEN_JOBS or 1)")->check(CLI::Range(1u, 1024u));
  app.fallthrough();

  SolveCmd solve;
  ScreenCmd screen;
  ClassifyCmd classify;
  HistoryCmd history;
  GenDataCmd gen;
  CompareCmd cmp;
  solve.add(app);
  screen.add(app);
  classify.add(app);
  history.add(app);
  gen.add(app);
  cmp.add(app);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    std::string command;
    for (const auto* sub : app.get_subcommands()) command = sub->get_name();
    error_record(err, command, "usage", e.what());
    return kUsage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    if (command == "solve") return solve.run(common, out, err);
    if (command == "screen") return screen.run(common, out, err);
    if (command == "classify") return classify.run(common, out, err);
    if (command == "history") return history.run(common, out, err);
    if (command == "gen-data") return gen.run(common, out, err);
    return cmp.run(common, out, err);
  } catch (const UsageError& e) {
    error_record(err, command, "usage", e.what());
    return kUsage;
  } catch (const io::FormatError& e) {
    error_record(err, command, "input", e.what());
  } catch (const std::invalid_argument& e) {
    error_record(err, command, "input", e.what());
  } catch (const ConstraintGenerationError& e) {
    error_record(err, command, "constraint-generation", e.what());
  } catch (const std::exception& e) {
    error_record(err, command, "failure", e.what());
  }
  return kFailure;
}

}  // namespace ucscreen::cli
