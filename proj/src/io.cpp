#include "ucscreen/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace ucscreen::io {

namespace {

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(trim(cell));
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string where(const fs::path& path, std::size_t row) {
  return path.filename().string() + " row " + std::to_string(row + 2);
}

double to_double(const std::string& s, const std::string& context) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc() || ptr != end) {
    if (s == "inf" || s == "+inf") return lp::kInf;
    if (s == "-inf") return -lp::kInf;
    throw FormatError(context + ": expected a number, got '" + s + "'");
  }
  return v;
}

long to_long(const std::string& s, const std::string& context) {
  long v = 0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc() || ptr != end)
    throw FormatError(context + ": expected an integer, got '" + s + "'");
  return v;
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

const std::string& cell(const CsvTable& t, std::size_t row, const std::string& name, const fs::path& path) {
  const int c = t.column(name);
  if (c < 0) throw FormatError(path.filename().string() + ": missing column '" + name + "'");
  const auto& r = t.rows[row];
  if (static_cast<std::size_t>(c) >= r.size()) throw FormatError(where(path, row) + ": too few cells");
  return r[static_cast<std::size_t>(c)];
}

// Wraps library validation errors with the file they came from.
template <class F>
auto with_context(const fs::path& path, F&& f) {
  try {
    return f();
  } catch (const FormatError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double bound_from_json(const json& j, const char* key, double fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  if (j.at(key).is_string()) return to_double(j.at(key).get<std::string>(), key);
  return j.at(key).get<double>();
}

}  // namespace

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

CsvTable read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  CsvTable t;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || trim(line)[0] == '#') continue;
    if (!have_header) {
      t.header = split(line, ',');
      have_header = true;
    } else {
      t.rows.push_back(split(line, ','));
    }
  }
  if (!have_header) throw FormatError(path.string() + ": empty file");
  return t;
}

void write_csv(const fs::path& path, const CsvTable& table) {
  std::ostringstream out;
  auto row = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  row(table.header);
  for (const auto& r : table.rows) row(r);
  write_text(path, out.str());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << text;
  if (!out) throw FormatError("failed writing " + path.string());
}

// --- grid -------------------------------------------------------------------

PowerSystem read_system(const fs::path& path) {
  if (fs::is_directory(path)) {
    const auto bp = path / "buses.csv", lp_ = path / "lines.csv", gp = path / "generators.csv";
    const auto bt = read_csv(bp), lt = read_csv(lp_), gt = read_csv(gp);
    std::vector<Bus> buses;
    for (std::size_t r = 0; r < bt.rows.size(); ++r) {
      buses.push_back({static_cast<int>(to_long(cell(bt, r, "id", bp), where(bp, r))),
                       to_double(cell(bt, r, "nominal_demand", bp), where(bp, r))});
    }
    std::vector<Line> lines;
    for (std::size_t r = 0; r < lt.rows.size(); ++r) {
      const auto ctx = where(lp_, r);
      lines.push_back({static_cast<int>(to_long(cell(lt, r, "id", lp_), ctx)),
                       static_cast<int>(to_long(cell(lt, r, "from", lp_), ctx)),
                       static_cast<int>(to_long(cell(lt, r, "to", lp_), ctx)),
                       to_double(cell(lt, r, "susceptance_pu", lp_), ctx),
                       to_double(cell(lt, r, "capacity_mw", lp_), ctx)});
    }
    std::vector<Generator> gens;
    for (std::size_t r = 0; r < gt.rows.size(); ++r) {
      const auto ctx = where(gp, r);
      Generator g;
      g.id = static_cast<int>(to_long(cell(gt, r, "id", gp), ctx));
      g.bus = static_cast<int>(to_long(cell(gt, r, "bus", gp), ctx));
      g.p_min = to_double(cell(gt, r, "pmin_mw", gp), ctx);
      g.p_max = to_double(cell(gt, r, "pmax_mw", gp), ctx);
      g.cost = to_double(cell(gt, r, "cost", gp), ctx);
      g.kind = with_context(gp, [&] { return generator_kind_from_string(cell(gt, r, "kind", gp)); });
      gens.push_back(g);
    }
    return with_context(path, [&] { return PowerSystem(std::move(buses), std::move(lines), std::move(gens)); });
  }
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return with_context(path, [&] { return system_from_json(j); });
}

void write_system_csv(const fs::path& dir, const PowerSystem& system) {
  CsvTable b{{"id", "nominal_demand"}, {}};
  for (const auto& x : system.buses()) b.rows.push_back({std::to_string(x.id), num(x.nominal_demand)});
  CsvTable l{{"id", "from", "to", "susceptance_pu", "capacity_mw"}, {}};
  for (const auto& x : system.lines())
    l.rows.push_back({std::to_string(x.id), std::to_string(x.from_bus), std::to_string(x.to_bus), num(x.susceptance),
                      num(x.capacity)});
  CsvTable g{{"id", "bus", "pmin_mw", "pmax_mw", "cost", "kind"}, {}};
  for (const auto& x : system.generators())
    g.rows.push_back({std::to_string(x.id), std::to_string(x.bus), num(x.p_min), num(x.p_max), num(x.cost),
                      to_string(x.kind)});
  write_csv(dir / "buses.csv", b);
  write_csv(dir / "lines.csv", l);
  write_csv(dir / "generators.csv", g);
}

json system_to_json(const PowerSystem& system) {
  json j;
  j["buses"] = json::array();
  for (const auto& x : system.buses()) j["buses"].push_back({{"id", x.id}, {"nominal_demand", x.nominal_demand}});
  j["lines"] = json::array();
  for (const auto& x : system.lines())
    j["lines"].push_back({{"id", x.id},
                          {"from", x.from_bus},
                          {"to", x.to_bus},
                          {"susceptance_pu", x.susceptance},
                          {"capacity_mw", x.capacity}});
  j["generators"] = json::array();
  for (const auto& x : system.generators())
    j["generators"].push_back({{"id", x.id},
                               {"bus", x.bus},
                               {"pmin_mw", x.p_min},
                               {"pmax_mw", x.p_max},
                               {"cost", x.cost},
                               {"kind", to_string(x.kind)}});
  return j;
}

PowerSystem system_from_json(const json& j) {
  try {
    std::vector<Bus> buses;
    for (const auto& b : j.at("buses")) buses.push_back({b.at("id").get<int>(), b.at("nominal_demand").get<double>()});
    std::vector<Line> lines;
    for (const auto& l : j.at("lines"))
      lines.push_back({l.at("id").get<int>(), l.at("from").get<int>(), l.at("to").get<int>(),
                       l.at("susceptance_pu").get<double>(), l.at("capacity_mw").get<double>()});
    std::vector<Generator> gens;
    for (const auto& g : j.value("generators", json::array())) {
      gens.push_back({g.at("id").get<int>(), g.at("bus").get<int>(), g.at("pmin_mw").get<double>(),
                      g.at("pmax_mw").get<double>(), g.at("cost").get<double>(),
                      generator_kind_from_string(g.value("kind", std::string("thermal")))});
    }
    return PowerSystem(std::move(buses), std::move(lines), std::move(gens));
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad system JSON: ") + e.what());
  }
}

// --- scenarios --------------------------------------------------------------

std::vector<Scenario> read_scenarios(const fs::path& path, const PowerSystem& system) {
  const auto t = read_csv(path);
  const int bus_col = t.column("bus"), demand_col = t.column("demand_mw");
  const int gen_col = t.column("gen"), cf_col = t.column("capfac");
  if (t.column("period") < 0 || bus_col < 0 || demand_col < 0)
    throw FormatError(path.string() + ": need columns period,bus,demand_mw");
  if ((gen_col < 0) != (cf_col < 0)) throw FormatError(path.string() + ": gen and capfac come together");

  const std::size_t nb = system.num_buses(), ng = system.num_generators();
  std::map<long, Scenario> periods;
  std::map<long, std::vector<bool>> seen;
  auto get = [&](const std::vector<std::string>& r, int c) -> std::string {
    return c >= 0 && static_cast<std::size_t>(c) < r.size() ? r[static_cast<std::size_t>(c)] : std::string();
  };
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto ctx = where(path, r);
    const long p = to_long(cell(t, r, "period", path), ctx);
    auto [it, fresh] = periods.try_emplace(p);
    if (fresh) {
      it->second.demand.assign(nb, 0.0);
      it->second.capacity_factor.assign(ng, 1.0);
      seen[p].assign(nb, false);
    }
    const auto bus = get(t.rows[r], bus_col);
    if (!bus.empty()) {
      const long b = to_long(bus, ctx);
      if (b < 1 || static_cast<std::size_t>(b) > nb) throw FormatError(ctx + ": unknown bus " + bus);
      if (seen[p][static_cast<std::size_t>(b - 1)]) throw FormatError(ctx + ": duplicate demand for bus " + bus);
      seen[p][static_cast<std::size_t>(b - 1)] = true;
      it->second.demand[static_cast<std::size_t>(b - 1)] = to_double(get(t.rows[r], demand_col), ctx);
    }
    const auto gen = get(t.rows[r], gen_col);
    if (!gen.empty()) {
      const long g = to_long(gen, ctx);
      if (g < 1 || static_cast<std::size_t>(g) > ng) throw FormatError(ctx + ": unknown generator " + gen);
      it->second.capacity_factor[static_cast<std::size_t>(g - 1)] = to_double(get(t.rows[r], cf_col), ctx);
    }
  }
  std::vector<Scenario> out;
  long expect = 1;
  for (auto& [p, sc] : periods) {
    if (p != expect) throw FormatError(path.string() + ": periods must run 1, 2, ... without gaps");
    ++expect;
    for (std::size_t b = 0; b < nb; ++b)
      if (!seen[p][b])
        throw FormatError(path.string() + ": period " + std::to_string(p) + " lacks demand for bus " +
                          std::to_string(b + 1));
    with_context(path, [&] {
      validate_scenario(system, sc);
      return 0;
    });
    out.push_back(std::move(sc));
  }
  return out;
}

void write_scenarios(const fs::path& path, const PowerSystem& system, const std::vector<Scenario>& scenarios) {
  bool has_renewables = false;
  for (const auto& g : system.generators()) has_renewables |= g.kind == GeneratorKind::Renewable;
  CsvTable t{{"period", "bus", "demand_mw"}, {}};
  if (has_renewables) {
    t.header.push_back("gen");
    t.header.push_back("capfac");
  }
  for (std::size_t p = 0; p < scenarios.size(); ++p) {
    const auto period = std::to_string(p + 1);
    for (std::size_t b = 0; b < scenarios[p].demand.size(); ++b) {
      std::vector<std::string> row{period, std::to_string(b + 1), num(scenarios[p].demand[b])};
      if (has_renewables) row.insert(row.end(), {"", ""});
      t.rows.push_back(std::move(row));
    }
    for (std::size_t g = 0; g < system.num_generators(); ++g) {
      if (system.generators()[g].kind != GeneratorKind::Renewable) continue;
      t.rows.push_back({period, "", "", std::to_string(g + 1), num(scenarios[p].capacity_factor[g])});
    }
  }
  write_csv(path, t);
}

// --- history ----------------------------------------------------------------

CongestionHistory read_history(const fs::path& dir) {
  const auto sp = dir / "status.csv", np = dir / "net_demand.csv";
  const auto st = read_csv(sp), nt = read_csv(np);
  std::map<long, std::map<long, int>> status;
  std::map<long, std::map<long, double>> demand;
  for (std::size_t r = 0; r < st.rows.size(); ++r) {
    const auto ctx = where(sp, r);
    const long s = to_long(cell(st, r, "status", sp), ctx);
    if (s != 0 && s != 1) throw FormatError(ctx + ": status must be 0 or 1");
    status[to_long(cell(st, r, "period", sp), ctx)][to_long(cell(st, r, "line", sp), ctx)] = static_cast<int>(s);
  }
  for (std::size_t r = 0; r < nt.rows.size(); ++r) {
    const auto ctx = where(np, r);
    demand[to_long(cell(nt, r, "period", np), ctx)][to_long(cell(nt, r, "bus", np), ctx)] =
        to_double(cell(nt, r, "net_demand_mw", np), ctx);
  }
  if (status.size() != demand.size()) throw FormatError(dir.string() + ": status and net demand cover different periods");
  CongestionHistory h;
  long expect = 1;
  auto s_it = status.begin();
  for (const auto& [p, buses] : demand) {
    if (p != expect || s_it->first != p) throw FormatError(dir.string() + ": periods must run 1, 2, ... without gaps");
    ++expect;
    HistoryRecord rec;
    long b_expect = 1;
    for (const auto& [b, v] : buses) {
      if (b != b_expect++) throw FormatError(np.string() + ": buses must run 1, 2, ... in every period");
      rec.net_demand.push_back(v);
    }
    long l_expect = 1;
    for (const auto& [l, v] : s_it->second) {
      if (l != l_expect++) throw FormatError(sp.string() + ": lines must run 1, 2, ... in every period");
      rec.status.push_back(static_cast<std::uint8_t>(v));
    }
    with_context(dir, [&] {
      h.add(std::move(rec));
      return 0;
    });
    ++s_it;
  }
  return h;
}

void write_history(const fs::path& dir, const CongestionHistory& history) {
  CsvTable st{{"period", "line", "status"}, {}};
  CsvTable nt{{"period", "bus", "net_demand_mw"}, {}};
  for (std::size_t p = 0; p < history.size(); ++p) {
    const auto& rec = history.records()[p];
    for (std::size_t l = 0; l < rec.status.size(); ++l)
      st.rows.push_back({std::to_string(p + 1), std::to_string(l + 1), std::to_string(rec.status[l])});
    for (std::size_t b = 0; b < rec.net_demand.size(); ++b)
      nt.rows.push_back({std::to_string(p + 1), std::to_string(b + 1), num(rec.net_demand[b])});
  }
  fs::create_directories(dir);
  write_csv(dir / "status.csv", st);
  write_csv(dir / "net_demand.csv", nt);
}

// --- results ----------------------------------------------------------------

json removal_to_json(const ScreeningResult& result, bool timing) {
  json ids = json::array();
  for (int l : result.removed_lines) ids.push_back(l + 1);
  json j{{"method", result.method}, {"line_ids", ids}};
  j["t1_seconds"] = timing ? json(result.t1_seconds) : json(nullptr);
  return j;
}

ScreeningResult removal_from_json(const json& j, std::size_t num_lines) {
  try {
    ScreeningResult r;
    r.method = j.at("method").get<std::string>();
    for (const auto& id : j.at("line_ids")) {
      const int v = id.get<int>();
      if (v < 1 || static_cast<std::size_t>(v) > num_lines)
        throw FormatError("removal set references unknown line " + std::to_string(v));
      r.removed_lines.push_back(v - 1);
    }
    std::sort(r.removed_lines.begin(), r.removed_lines.end());
    r.removed_lines.erase(std::unique(r.removed_lines.begin(), r.removed_lines.end()), r.removed_lines.end());
    if (j.contains("t1_seconds") && j.at("t1_seconds").is_number()) r.t1_seconds = j.at("t1_seconds").get<double>();
    return r;
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad removal-set JSON: ") + e.what());
  }
}

json solution_to_json(const PowerSystem& system, const UCSolution& s, bool timing) {
  json j;
  j["status"] = to_string(s.status);
  if (!s.message.empty()) j["message"] = s.message;
  if (!s.optimal()) return j;
  j["objective"] = s.objective;
  j["cost"] = s.cost;
  j["total_abs_slack"] = s.total_abs_slack();
  j["bound"] = s.bound;
  j["generators"] = json::array();
  for (std::size_t g = 0; g < system.num_generators(); ++g)
    j["generators"].push_back(
        {{"id", system.generators()[g].id}, {"on", static_cast<int>(s.commitment[g])}, {"p_mw", s.dispatch[g]}});
  j["buses"] = json::array();
  for (std::size_t n = 0; n < system.num_buses(); ++n)
    j["buses"].push_back({{"id", system.buses()[n].id}, {"injection_mw", s.injections[n]}, {"slack_mw", s.slack[n]}});
  j["lines"] = json::array();
  for (std::size_t l = 0; l < system.num_lines(); ++l)
    j["lines"].push_back({{"id", system.lines()[l].id},
                          {"flow_mw", s.flows[l]},
                          {"capacity_mw", system.lines()[l].capacity}});
  j["nodes"] = s.nodes;
  j["lp_iterations"] = s.lp_iterations;
  j["cpu_seconds"] = timing ? json(s.cpu_seconds) : json(nullptr);
  return j;
}

// --- small MILPs ------------------------------------------------------------

taxonomy::SmallMilp milp_from_json(const json& j) {
  using namespace taxonomy;
  try {
    SmallMilp m;
    const auto sense = j.value("sense", std::string("max"));
    if (sense == "max" || sense == "maximize") m.sense = lp::Sense::Maximize;
    else if (sense == "min" || sense == "minimize") m.sense = lp::Sense::Minimize;
    else throw FormatError("sense must be max or min, got '" + sense + "'");

    std::map<std::string, int> index;
    for (const auto& v : j.at("variables")) {
      Variable var;
      var.name = v.at("name").get<std::string>();
      var.lo = bound_from_json(v, "lower", -lp::kInf);
      var.hi = bound_from_json(v, "upper", lp::kInf);
      var.integer = v.value("integer", false);
      if (!index.emplace(var.name, static_cast<int>(m.variables.size())).second)
        throw FormatError("duplicate variable '" + var.name + "'");
      m.variables.push_back(var);
    }
    auto terms = [&](const json& coeffs, const std::string& owner) {
      std::vector<lp::Term> out;
      for (const auto& [name, value] : coeffs.items()) {
        const auto it = index.find(name);
        if (it == index.end()) throw FormatError(owner + " references unknown variable '" + name + "'");
        out.push_back({it->second, value.get<double>()});
      }
      return out;
    };
    m.objective.assign(m.variables.size(), 0.0);
    for (const auto& t : terms(j.at("objective"), "objective")) m.objective[static_cast<std::size_t>(t.col)] += t.coef;
    for (const auto& c : j.at("constraints")) {
      Constraint con;
      con.name = c.at("name").get<std::string>();
      con.terms = terms(c.at("terms"), "constraint '" + con.name + "'");
      const auto rel = c.at("relation").get<std::string>();
      if (rel == "<=") con.relation = Relation::LessEqual;
      else if (rel == ">=") con.relation = Relation::GreaterEqual;
      else throw FormatError("constraint '" + con.name + "': relation must be <= or >=");
      con.rhs = c.at("rhs").get<double>();
      m.constraints.push_back(std::move(con));
    }
    m.validate();
    return m;
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad MILP JSON: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("bad MILP JSON: ") + e.what());
  }
}

json milp_to_json(const taxonomy::SmallMilp& m) {
  json j;
  j["sense"] = m.sense == lp::Sense::Maximize ? "max" : "min";
  j["variables"] = json::array();
  j["objective"] = json::object();
  for (std::size_t i = 0; i < m.variables.size(); ++i) {
    const auto& v = m.variables[i];
    j["variables"].push_back(
        {{"name", v.name}, {"lower", number_or_null(v.lo)}, {"upper", number_or_null(v.hi)}, {"integer", v.integer}});
    if (m.objective[i] != 0.0) j["objective"][v.name] = m.objective[i];
  }
  j["constraints"] = json::array();
  for (const auto& c : m.constraints) {
    json terms = json::object();
    for (const auto& t : c.terms) terms[m.variables[static_cast<std::size_t>(t.col)].name] = t.coef;
    j["constraints"].push_back({{"name", c.name},
                                {"terms", terms},
                                {"relation", c.relation == taxonomy::Relation::LessEqual ? "<=" : ">="},
                                {"rhs", c.rhs}});
  }
  return j;
}

json classification_to_json(const std::vector<taxonomy::Classification>& classes) {
  json out = json::array();
  for (const auto& c : classes) {
    json j{{"constraint", c.constraint},
           {"class", taxonomy::to_string(c.cls)},
           {"optimum", c.optimum},
           {"optimum_without", std::isinf(c.optimum_without) ? json(num(c.optimum_without)) : json(c.optimum_without)},
           {"extreme_lhs", std::isinf(c.extreme_lhs) ? json(num(c.extreme_lhs)) : json(c.extreme_lhs)}};
    if (!c.note.empty()) j["note"] = c.note;
    out.push_back(std::move(j));
  }
  return out;
}

// --- reports ----------------------------------------------------------------

std::string report_csv(const ComparisonReport& report, bool timing) {
  std::ostringstream out;
  out << "method,R_pct,dC_pct,I_pct,T1_s,T2_s,tau_pct,status\n";
  for (const auto& m : report.methods) {
    std::string status = m.status;
    std::replace(status.begin(), status.end(), ',', ';');
    std::replace(status.begin(), status.end(), '\n', ' ');
    out << m.method << ',' << num(m.removed_pct) << ',' << num(m.cost_error_pct) << ',' << num(m.infeasibility_pct)
        << ',' << (timing ? num(m.t1_seconds) : "") << ',' << (timing ? num(m.t2_seconds) : "") << ','
        << (timing ? num(m.tau_pct) : "") << ',' << status << '\n';
  }
  return out.str();
}

json report_to_json(const ComparisonReport& report, bool timing) {
  auto timed = [&](double v) { return timing ? number_or_null(v) : json(nullptr); };
  json j;
  j["num_lines"] = report.num_lines;
  j["training_periods"] = report.training_periods;
  j["test_periods"] = report.test_periods;
  j["history_failures"] = json::array();
  for (const auto& f : report.history_failures)
    j["history_failures"].push_back({{"period", f.period + 1}, {"message", f.message}});
  j["methods"] = json::array();
  for (const auto& m : report.methods) {
    json mj{{"method", m.method},
            {"R_pct", number_or_null(m.removed_pct)},
            {"dC_pct", number_or_null(m.cost_error_pct)},
            {"I_pct", number_or_null(m.infeasibility_pct)},
            {"T1_s", timed(m.t1_seconds)},
            {"T2_s", timed(m.t2_seconds)},
            {"tau_pct", timed(m.tau_pct)},
            {"status", m.status}};
    mj["periods"] = json::array();
    for (const auto& p : m.periods) {
      json ids = json::array();
      for (int l : p.removed_lines) ids.push_back(l + 1);
      json commit = json::array();
      for (auto u : p.commitment) commit.push_back(static_cast<int>(u));
      json pj{{"period", p.period + 1},
              {"removed_line_ids", ids},
              {"commitment", commit},
              {"cost", p.cost},
              {"abs_slack_mw", p.abs_slack},
              {"demand_mw", p.demand},
              {"t1_s", timed(p.t1_seconds)},
              {"t2_s", timed(p.t2_seconds)},
              {"same_commitment_as_bn", p.same_commitment_as_bn}};
      if (p.cg_iterations > 0) pj["cg_iterations"] = p.cg_iterations;
      if (!p.note.empty()) pj["note"] = p.note;
      mj["periods"].push_back(std::move(pj));
    }
    j["methods"].push_back(std::move(mj));
  }
  return j;
}

// --- comparison configuration ----------------------------------------------

CompareSetup read_compare_config(const fs::path& path) {
  const auto text = read_text(path);
  std::map<std::string, json> kv;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw FormatError(path.string() + ": " + e.what());
    }
    for (const auto& [k, v] : j.items()) kv[k] = v;
  } else {
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.resize(hash);
      if (trim(line).empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw FormatError(path.string() + " line " + std::to_string(lineno) + ": expected key = value");
      kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
  }

  const auto base = path.parent_path();
  auto str = [&](const std::string& key) {
    const auto& v = kv.at(key);
    return v.is_string() ? v.get<std::string>() : v.dump();
  };
  auto number = [&](const std::string& key) {
    const auto& v = kv.at(key);
    return v.is_number() ? v.get<double>() : to_double(str(key), path.string() + ": " + key);
  };
  auto count = [&](const std::string& key) {
    const double v = number(key);
    if (v < 0 || v != std::floor(v)) throw FormatError(path.string() + ": " + key + " must be a non-negative integer");
    return static_cast<std::size_t>(v);
  };
  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };

  static const char* known[] = {"system",  "training",      "test",   "scenarios",     "train_size",
                                "test_size", "seed",        "methods", "slack_penalty", "mip_gap",
                                "congestion_tol", "cg_max_iterations", "cg_policy", "knn_metric", "jobs"};
  for (const auto& [k, v] : kv)
    if (std::find(std::begin(known), std::end(known), k) == std::end(known))
      throw FormatError(path.string() + ": unknown key '" + k + "'");

  CompareSetup s;
  if (!kv.count("system")) throw FormatError(path.string() + ": 'system' is required");
  s.system_path = resolve(str("system"));
  if (kv.count("training")) s.training_path = resolve(str("training"));
  if (kv.count("test")) s.test_path = resolve(str("test"));
  if (s.training_path.empty() != s.test_path.empty())
    throw FormatError(path.string() + ": give both 'training' and 'test', or neither");
  if (kv.count("scenarios")) s.generate_count = count("scenarios");
  if (s.training_path.empty() && s.generate_count == 0)
    throw FormatError(path.string() + ": give scenario files or a 'scenarios' count to generate");
  if (kv.count("train_size")) s.train_size = count("train_size");
  if (kv.count("test_size")) s.test_size = count("test_size");
  if (kv.count("seed")) s.seed = count("seed");

  auto& c = s.config;
  if (kv.count("methods")) {
    const auto& v = kv.at("methods");
    std::vector<std::string> labels;
    if (v.is_array()) {
      for (const auto& m : v) labels.push_back(m.get<std::string>());
    } else {
      for (auto& m : split(str("methods"), ','))
        if (!m.empty()) labels.push_back(m);
    }
    for (const auto& l : labels) {
      try {
        c.methods.push_back(MethodSpec::parse(l));
      } catch (const std::invalid_argument& e) {
        throw FormatError(path.string() + ": " + e.what());
      }
    }
  } else {
    for (const char* l : {"BN", "SB", "PI", "NV", "CG", "ZH", "ZH+", "RO100", "DD5"}) c.methods.push_back(MethodSpec::parse(l));
  }
  if (kv.count("slack_penalty")) c.uc.slack_penalty = number("slack_penalty");
  if (kv.count("mip_gap")) c.uc.mip_gap = number("mip_gap");
  if (kv.count("congestion_tol")) c.congestion_tol = number("congestion_tol");
  if (kv.count("cg_max_iterations")) c.cg_max_iterations = static_cast<int>(count("cg_max_iterations"));
  try {
    if (kv.count("cg_policy")) c.cg_policy = cg_policy_from_string(str("cg_policy"));
    if (kv.count("knn_metric")) c.knn_metric = knn_metric_from_string(str("knn_metric"));
  } catch (const std::invalid_argument& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  c.jobs = kv.count("jobs") ? static_cast<unsigned>(std::max<std::size_t>(1, count("jobs"))) : jobs_from_env();
  return s;
}

CompareInputs load_compare_inputs(const CompareSetup& s) {
  auto system = read_system(s.system_path);
  std::vector<Scenario> training, test;
  if (!s.training_path.empty()) {
    training = read_scenarios(s.training_path, system);
    test = read_scenarios(s.test_path, system);
  } else {
    const auto all = generate_scenarios(system, s.generate_count, s.seed);
    std::size_t n_test = s.test_size, n_train = s.train_size;
    if (n_test == 0) n_test = std::max<std::size_t>(1, all.size() / 6);
    if (n_train == 0) n_train = all.size() > n_test ? all.size() - n_test : 0;
    if (n_train + n_test > all.size() || n_train == 0)
      throw FormatError("train_size + test_size must not exceed the generated count, and training must be nonempty");
    training.assign(all.begin(), all.begin() + static_cast<long>(n_train));
    test.assign(all.end() - static_cast<long>(n_test), all.end());
  }
  return {std::move(system), std::move(training), std::move(test)};
}

}  // namespace ucscreen::io
