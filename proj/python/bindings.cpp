#include "ucscreen/fixtures.hpp"
#include "ucscreen/harness.hpp"
#include "ucscreen/io.hpp"
#include "ucscreen/screening.hpp"
#include "ucscreen/taxonomy.hpp"
#include "ucscreen/ucopt.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace ucscreen;
using io::json;

namespace {

UCOptions uc_options(double slack_penalty, double mip_gap) {
  UCOptions o;
  o.slack_penalty = slack_penalty;
  o.mip_gap = mip_gap;
  return o;
}

// Structured results cross the boundary as JSON text; the Python package
// decodes them into plain dicts.
std::string solve_json(const PowerSystem& system, const Scenario& scenario, const std::vector<int>& removed,
                       double slack_penalty, double mip_gap) {
  const auto ptdf = build_ptdf(system, 1);
  const auto sol = solve_tcuc(build_tcuc(system, ptdf, scenario, complement_lines(system.num_lines(), removed),
                                         uc_options(slack_penalty, mip_gap)));
  return io::solution_to_json(system, sol).dump();
}

std::vector<int> screen(const std::string& method, const PowerSystem& system, const Scenario& scenario,
                        const std::vector<Scenario>& training, std::size_t k, int percentile) {
  const auto ptdf = build_ptdf(system, 1);
  if (method == "ZH") return screen_zhai(system, ptdf, scenario, ZhaiVariant::Plain).removed_lines;
  if (method == "ZH+") return screen_zhai(system, ptdf, scenario, ZhaiVariant::WithNetwork).removed_lines;
  if (method == "RO") return screen_roald(system, ptdf, training, percentile).removed_lines;
  if (method == "NV" || method == "DD") {
    const auto h = build_history(system, ptdf, training).history;
    if (method == "NV") return screen_naive(h).removed_lines;
    return screen_knn(ptdf, h, net_demand(scenario, system), k).removed_lines;
  }
  throw std::invalid_argument("screen: method must be ZH, ZH+, RO, NV or DD, got '" + method + "'");
}

py::tuple constraint_generation(const PowerSystem& system, const Scenario& scenario, const std::vector<int>& removed,
                                const std::string& policy, int max_iterations) {
  const auto ptdf = build_ptdf(system, 1);
  CgOptions o;
  o.policy = cg_policy_from_string(policy);
  o.max_iterations = max_iterations;
  const auto r = solve_with_constraint_generation(system, ptdf, scenario, removed, o);
  return py::make_tuple(io::solution_to_json(system, r.solution).dump(), r.final_removed, r.iterations);
}

std::string compare_json(const PowerSystem& system, const std::vector<Scenario>& training,
                         const std::vector<Scenario>& test, const std::vector<std::string>& methods, unsigned jobs,
                         const std::string& cg_policy, bool timing) {
  ExperimentConfig c;
  for (const auto& m : methods) c.methods.push_back(MethodSpec::parse(m));
  c.jobs = jobs;
  c.cg_policy = cg_policy_from_string(cg_policy);
  ComparisonReport report;
  {
    py::gil_scoped_release release;
    report = compare(system, training, test, c);
  }
  return io::report_to_json(report, timing).dump();
}

std::string classify_json(const std::string& milp) {
  return io::classification_to_json(taxonomy::classify_all(io::milp_from_json(json::parse(milp)))).dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Line-limit screening for transmission-constrained unit commitment";

  py::register_exception<io::FormatError>(m, "FormatError", PyExc_ValueError);
  py::register_exception<ConstraintGenerationError>(m, "ConstraintGenerationError", PyExc_RuntimeError);

  py::class_<PowerSystem>(m, "PowerSystem")
      .def_property_readonly("num_buses", &PowerSystem::num_buses)
      .def_property_readonly("num_lines", &PowerSystem::num_lines)
      .def_property_readonly("num_generators", &PowerSystem::num_generators)
      .def("to_json", [](const PowerSystem& s) { return io::system_to_json(s).dump(); });

  py::class_<Scenario>(m, "Scenario")
      .def(py::init<>())
      .def_readwrite("demand", &Scenario::demand)
      .def_readwrite("capacity_factor", &Scenario::capacity_factor)
      .def_static("with_demand", &Scenario::with_demand, py::arg("system"), py::arg("demand"));

  m.def("three_bus", &fixtures::three_bus);
  m.def("three_bus_scenario", &fixtures::three_bus_scenario, py::arg("system"), py::arg("d3"));
  m.def("read_system", [](const std::filesystem::path& p) { return io::read_system(p); }, py::arg("path"));
  m.def("system_from_json", [](const std::string& s) { return io::system_from_json(json::parse(s)); });
  m.def("read_scenarios", [](const std::filesystem::path& p, const PowerSystem& s) { return io::read_scenarios(p, s); },
        py::arg("path"), py::arg("system"));
  m.def("generate_scenarios", &generate_scenarios, py::arg("system"), py::arg("count"), py::arg("seed"));
  m.def(
      "generate_system",
      [](std::uint64_t seed, std::size_t buses, std::size_t lines, std::size_t thermal, std::size_t renewable) {
        SyntheticGridSpec spec;
        spec.buses = buses;
        spec.lines = lines;
        spec.thermal_units = thermal;
        spec.renewable_units = renewable;
        return generate_system(spec, seed);
      },
      py::arg("seed"), py::arg("buses") = 20, py::arg("lines") = 30, py::arg("thermal") = 10, py::arg("renewable") = 2);

  m.def("ptdf", [](const PowerSystem& s, int ref_bus) {
        const auto p = build_ptdf(s, ref_bus);
        std::vector<std::vector<double>> rows(s.num_lines(), std::vector<double>(s.num_buses()));
        for (std::size_t l = 0; l < s.num_lines(); ++l)
          for (std::size_t n = 0; n < s.num_buses(); ++n) rows[l][n] = p(l, n);
        return rows;
      },
      py::arg("system"), py::arg("ref_bus") = 1);

  m.def("_solve", &solve_json, py::arg("system"), py::arg("scenario"), py::arg("removed") = std::vector<int>{},
        py::arg("slack_penalty") = -1.0, py::arg("mip_gap") = -1.0);
  m.def("screen", &screen, py::arg("method"), py::arg("system"), py::arg("scenario"),
        py::arg("training") = std::vector<Scenario>{}, py::arg("k") = 5, py::arg("percentile") = 100);
  m.def("_constraint_generation", &constraint_generation, py::arg("system"), py::arg("scenario"),
        py::arg("removed") = std::vector<int>{}, py::arg("policy") = "most-violated", py::arg("max_iterations") = 50);
  m.def("_compare", &compare_json, py::arg("system"), py::arg("training"), py::arg("test"), py::arg("methods"),
        py::arg("jobs") = 1, py::arg("cg_policy") = "most-violated", py::arg("timing") = true);
  m.def("_classify", &classify_json, py::arg("milp_json"));
  m.def("_illustrative_milp", [] { return io::milp_to_json(taxonomy::illustrative_milp()).dump(); });
}
