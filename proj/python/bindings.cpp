// Python surface: scenario execution with the same artifact contract as the
// CLI, plus value-level kinematics helpers for quick checks. JSON crosses
// the boundary as text; the package wrapper decodes it.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rrlab/geom.hpp"
#include "rrlab/lines.hpp"
#include "rrlab/radiation.hpp"
#include "rrlab/scenario.hpp"

namespace py = pybind11;
using namespace rrlab;

namespace {

LorentzVector to_lv(const std::vector<double>& x, int dim) {
  if (static_cast<int>(x.size()) != dim) {
    throw std::invalid_argument("expected a vector of " + std::to_string(dim) +
                                " components, got " +
                                std::to_string(x.size()));
  }
  LorentzVector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = x[static_cast<std::size_t>(i)];
  return v;
}

std::vector<double> from_lv(const LorentzVector& v) {
  std::vector<double> out(static_cast<std::size_t>(v.dim));
  for (int i = 0; i < v.dim; ++i) out[static_cast<std::size_t>(i)] = v[i];
  return out;
}

py::dict run_packed(Scenario sc, const std::optional<std::string>& out_dir,
                    const std::optional<std::uint64_t>& seed) {
  if (out_dir) sc.out_dir = *out_dir;
  if (seed) sc.seed = *seed;
  validate_scenario(sc);
  std::ostringstream log;
  const RunArtifacts art = run_scenario(sc, log);
  py::dict d;
  d["exit_code"] = art.exit_code;
  d["summary_json"] = art.summary.dump(2);
  d["files"] = art.files;
  d["out_dir"] = sc.out_dir;
  d["log"] = log.str();
  return d;
}

Scenario scenario_from_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config error: invalid JSON: ") + e.what());
  }
  return parse_scenario(j);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Point-charge electrodynamics laboratory: scenario runs and "
      "kinematics helpers";
  m.attr("__version__") = "0.1.0";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def(
      "list_presets",
      [] {
        std::vector<std::pair<std::string, std::string>> out;
        for (const Preset& p : preset_gallery())
          out.emplace_back(p.name, p.rationale);
        return out;
      },
      "Preset gallery as (name, rationale) pairs.");

  m.def(
      "run_config_text",
      [](const std::string& text, const std::optional<std::string>& out_dir,
         const std::optional<std::uint64_t>& seed,
         const std::optional<std::string>& name) {
        Scenario sc = scenario_from_text(text);
        if (name) sc.name = *name;
        return run_packed(std::move(sc), out_dir, seed);
      },
      py::arg("text"), py::arg("out_dir") = py::none(),
      py::arg("seed") = py::none(), py::arg("name") = py::none(),
      "Parse, validate, and run a JSON scenario; returns the artifact "
      "record.");

  m.def(
      "run_preset",
      [](const std::string& name, const std::optional<std::string>& out_dir,
         const std::optional<std::uint64_t>& seed) {
        return run_packed(preset_scenario(name), out_dir, seed);
      },
      py::arg("name"), py::arg("out_dir") = py::none(),
      py::arg("seed") = py::none(),
      "Run a gallery preset; returns the artifact record.");

  m.def(
      "validate_config_text",
      [](const std::string& text) {
        Scenario sc = scenario_from_text(text);
        validate_scenario(sc);
      },
      py::arg("text"),
      "Parse and validate a JSON scenario, raising ConfigError on any "
      "defect.");

  m.def(
      "minkowski_dot",
      [](const std::vector<double>& a, const std::vector<double>& b) {
        const int dim = static_cast<int>(a.size());
        if (dim != 4 && dim != 6)
          throw std::invalid_argument("vectors must have 4 or 6 components");
        return minkowski_dot(to_lv(a, dim), to_lv(b, dim));
      },
      py::arg("a"), py::arg("b"),
      "Mostly-plus inner product of two 4- or 6-vectors.");

  m.def(
      "larmor_rate",
      [](const std::vector<double>& u, const std::vector<double>& a,
         double e) {
        WorldlinePoint pt;
        pt.z = LorentzVector(4);
        pt.u = to_lv(u, 4);
        pt.a = to_lv(a, 4);
        return from_lv(larmor_rate_4d(pt, e));
      },
      py::arg("u"), py::arg("a"), py::arg("e"),
      "Radiated 4-momentum rate of a point charge in 4D.");

  m.def(
      "sixd_rate",
      [](const std::vector<double>& u, const std::vector<double>& a,
         const std::vector<double>& da, double e) {
        WorldlinePoint pt;
        pt.z = LorentzVector(6);
        pt.u = to_lv(u, 6);
        pt.a = to_lv(a, 6);
        pt.da = to_lv(da, 6);
        return from_lv(sixd_rate(pt, e));
      },
      py::arg("u"), py::arg("a"), py::arg("da"), py::arg("e"),
      "Radiated 6-momentum rate of a point charge in 6D.");

  m.def(
      "hyperbolic_point",
      [](double g, double z3, double tau) {
        ParticleProps props;
        const WorldlinePoint pt = hyperbolic_point(props, g, z3, tau);
        py::dict d;
        d["tau"] = pt.tau;
        d["z"] = from_lv(pt.z);
        d["u"] = from_lv(pt.u);
        d["a"] = from_lv(pt.a);
        d["da"] = from_lv(pt.da);
        return d;
      },
      py::arg("g"), py::arg("z3"), py::arg("tau"),
      "State of the uniformly accelerated worldline at proper time tau.");
}
