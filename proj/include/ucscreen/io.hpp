#pragma once

// File formats. Ids in files are 1-based; in memory lines, buses and units
// are 0-based indices.
//
//   buses.csv        id,nominal_demand
//   lines.csv        id,from,to,susceptance_pu,capacity_mw
//   generators.csv   id,bus,pmin_mw,pmax_mw,cost,kind        (kind: thermal|renewable)
//   scenarios.csv    period,bus,demand_mw[,gen,capfac]        (periods from 1)
//   status.csv       period,line,status
//   net_demand.csv   period,bus,net_demand_mw

#include "ucscreen/harness.hpp"
#include "ucscreen/netmodel.hpp"
#include "ucscreen/screening.hpp"
#include "ucscreen/taxonomy.hpp"
#include "ucscreen/ucopt.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace ucscreen::io {

namespace fs = std::filesystem;
using nlohmann::json;

// Raised for malformed or inconsistent input files.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Minimal CSV table: header names plus string cells. Quoting is not
// supported; cells are trimmed.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;  // -1 when absent
};

CsvTable read_csv(const fs::path& path);
void write_csv(const fs::path& path, const CsvTable& table);

// Reads `path` as a directory holding buses.csv, lines.csv and
// generators.csv, or as a single JSON file.
PowerSystem read_system(const fs::path& path);
void write_system_csv(const fs::path& dir, const PowerSystem& system);
json system_to_json(const PowerSystem& system);
PowerSystem system_from_json(const json& j);

std::vector<Scenario> read_scenarios(const fs::path& path, const PowerSystem& system);
void write_scenarios(const fs::path& path, const PowerSystem& system, const std::vector<Scenario>& scenarios);

// History directory with status.csv and net_demand.csv.
CongestionHistory read_history(const fs::path& dir);
void write_history(const fs::path& dir, const CongestionHistory& history);

json removal_to_json(const ScreeningResult& result, bool timing = true);
ScreeningResult removal_from_json(const json& j, std::size_t num_lines);

json solution_to_json(const PowerSystem& system, const UCSolution& solution, bool timing = true);

taxonomy::SmallMilp milp_from_json(const json& j);
json milp_to_json(const taxonomy::SmallMilp& milp);
json classification_to_json(const std::vector<taxonomy::Classification>& classes);

// One row per method: method,R_pct,dC_pct,I_pct,T1_s,T2_s,tau_pct,status
std::string report_csv(const ComparisonReport& report, bool timing = true);
json report_to_json(const ComparisonReport& report, bool timing = true);

// A comparison run: grid, training and test scenarios plus settings.
struct CompareSetup {
  fs::path system_path;
  fs::path training_path;  // empty when scenarios are generated
  fs::path test_path;
  std::size_t generate_count = 0;  // generate this many scenarios when no paths are given
  std::size_t train_size = 0;      // 0: everything except the test share
  std::size_t test_size = 0;
  std::uint64_t seed = 1;
  ExperimentConfig config;
};

// Flat key=value lines (# comments) or a JSON object with the same keys.
// Keys: system, training, test, scenarios, train_size, test_size, seed,
// methods, slack_penalty, mip_gap, congestion_tol, cg_max_iterations,
// cg_policy, knn_metric, jobs. Relative paths resolve against the file's
// directory.
CompareSetup read_compare_config(const fs::path& path);

struct CompareInputs {
  PowerSystem system;
  std::vector<Scenario> training;
  std::vector<Scenario> test;
};

// Loads or generates the scenario sets. Generated sets take the first
// train_size periods for training and the last test_size for testing.
CompareInputs load_compare_inputs(const CompareSetup& setup);

std::string read_text(const fs::path& path);
void write_text(const fs::path& path, const std::string& text);

}  // namespace ucscreen::io
