#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>

#include "duolind/cli.hpp"
#include "duolind/fock.hpp"
#include "duolind/observables.hpp"
#include "duolind/oracle.hpp"
#include "duolind/sim_config.hpp"
#include "duolind/solver.hpp"

namespace py = pybind11;
using namespace duolind;

namespace {

// Recover the mode cutoff from a square two-mode matrix.
TwoModeSpace space_for(const Matrix& m) {
  if (m.rows() != m.cols()) throw ConfigError("matrix must be square");
  const int per_mode = static_cast<int>(std::lround(std::sqrt(double(m.rows()))));
  if (static_cast<long>(per_mode) * per_mode != m.rows() || per_mode < 2)
    throw ConfigError("matrix dimension must be a perfect square of cutoff+1 >= 2");
  return build_space(per_mode - 1);
}

DensityMatrix as_density(const Matrix& m) {
  const TwoModeSpace space = space_for(m);
  return density_from_matrix(space, m);
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "Exact evolution of two coupled lossy bosonic modes";
  mod.attr("__version__") = cli::tool_version();

  py::class_<SimConfig>(mod, "SimConfig")
      .def(py::init([](double g, double gamma1, double gamma2, double nbar,
                       int cutoff, const std::string& method) {
             SimConfig cfg;
             cfg.g = g;
             cfg.gamma1 = gamma1;
             cfg.gamma2 = gamma2;
             cfg.nbar = nbar;
             cfg.cutoff = cutoff;
             cfg.method = method_from_name(method);
             validate(cfg);
             return cfg;
           }),
           py::arg("g") = 1.0, py::arg("gamma1") = 0.0,
           py::arg("gamma2") = 0.0, py::arg("nbar") = 0.0,
           py::arg("cutoff") = 6, py::arg("method") = "auto")
      .def_readwrite("g", &SimConfig::g)
      .def_readwrite("gamma1", &SimConfig::gamma1)
      .def_readwrite("gamma2", &SimConfig::gamma2)
      .def_readwrite("nbar", &SimConfig::nbar)
      .def_readwrite("cutoff", &SimConfig::cutoff)
      .def_property(
          "method",
          [](const SimConfig& c) { return std::string(method_name(c.method)); },
          [](SimConfig& c, const std::string& n) { c.method = method_from_name(n); })
      .def("__repr__", [](const SimConfig& c) {
        return "SimConfig(g=" + std::to_string(c.g) +
               ", gamma1=" + std::to_string(c.gamma1) +
               ", gamma2=" + std::to_string(c.gamma2) +
               ", nbar=" + std::to_string(c.nbar) +
               ", cutoff=" + std::to_string(c.cutoff) + ", method='" +
               std::string(method_name(c.method)) + "')";
      });

  py::class_<EvolveInfo>(mod, "EvolveInfo")
      .def_readonly("working_cutoff", &EvolveInfo::working_cutoff)
      .def_readonly("pipeline_drift", &EvolveInfo::pipeline_drift)
      .def_readonly("herm_defect", &EvolveInfo::herm_defect)
      .def_readonly("trace_dev", &EvolveInfo::trace_dev)
      .def_readonly("min_eig", &EvolveInfo::min_eig)
      .def_readonly("leakage", &EvolveInfo::leakage)
      .def_readonly("truncation_warning", &EvolveInfo::truncation_warning)
      .def_property_readonly(
          "path", [](const EvolveInfo& i) { return std::string(method_name(i.path)); })
      .def("__repr__", [](const EvolveInfo& i) {
        return "EvolveInfo(path='" + std::string(method_name(i.path)) +
               "', working_cutoff=" + std::to_string(i.working_cutoff) +
               ", trace_dev=" + std::to_string(i.trace_dev) +
               ", leakage=" + std::to_string(i.leakage) + ")";
      });

  mod.def(
      "number_state_density",
      [](int n1, int n2, int cutoff) {
        const TwoModeSpace space = build_space(cutoff);
        return density_from_state(number_state(space, n1, n2)).mat;
      },
      py::arg("n1"), py::arg("n2"), py::arg("cutoff"),
      "Density matrix of the photon number state |n1, n2>.");

  mod.def(
      "thermal_density",
      [](double nbar, int cutoff) {
        return thermal_state(build_space(cutoff), nbar).mat;
      },
      py::arg("nbar"), py::arg("cutoff"),
      "Product of per-mode thermal states with mean occupation nbar.");

  mod.def(
      "evolve",
      [](const Matrix& rho, double t, const SimConfig& cfg) {
        EvolveInfo info;
        const DensityMatrix out = evolve(as_density(rho), t, cfg, &info);
        return py::make_tuple(out.mat, info);
      },
      py::arg("rho"), py::arg("t"), py::arg("config"),
      "Closed-form evolution; returns (rho_t, info).");

  mod.def(
      "integrate",
      [](const Matrix& rho, double t, const SimConfig& cfg, double dt) {
        IntegratorConfig ic;
        ic.dt = dt;
        return integrate(as_density(rho), t, cfg, ic);
      },
      py::arg("rho"), py::arg("t"), py::arg("config"), py::arg("dt") = 0.0,
      "Brute-force master equation integration of the same dynamics.");

  mod.def(
      "coincidence_rate",
      [](const Matrix& rho) { return coincidence_rate(space_for(rho), rho); },
      py::arg("rho"), "Population of the |1,1> state.");

  mod.def(
      "mode_occupation",
      [](const Matrix& rho, int mode) {
        return mode_occupation(space_for(rho), rho, mode);
      },
      py::arg("rho"), py::arg("mode"), "Mean photon number of mode 1 or 2.");

  mod.def(
      "trace_distance",
      [](const Matrix& a, const Matrix& b) {
        if (b.rows() != a.rows() || b.cols() != a.cols())
          throw DimensionError("matrices must share one truncated space");
        return trace_distance(a, b);
      },
      py::arg("a"), py::arg("b"), "Trace distance between two states.");
}
