/*
Copyright 2026 the congested-crowds authors
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at
    http://www.apache.org/licenses/LICENSE-2.0
Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <stdexcept>
#include <vector>

#include "crowd/analysis.hpp"
#include "crowd/dynamics.hpp"
#include "crowd/errors.hpp"
#include "crowd/presets.hpp"
#include "crowd/pressure.hpp"
#include "crowd/scenario.hpp"
#include "crowd/transport.hpp"

namespace py = pybind11;
using namespace crowd;

namespace {

py::array_t<double> toArray(const std::vector<double>& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

DensityField densityFrom(const Grid& grid, const std::vector<double>& values) {
  return DensityField(grid, values);
}

VelocityField velocityFrom(const Grid& grid, const std::vector<double>& ux,
                           const std::optional<std::vector<double>>& uy) {
  if (grid.dim() == 2) {
    if (!uy) throw InputError("2d velocity needs both components");
    return VelocityField(grid, 0.0, ux, *uy);
  }
  return VelocityField(grid, 0.0, ux);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Congested crowd motion: hard-congestion projections and split-step dynamics";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<SolveError>(m, "SolveError", PyExc_RuntimeError);

  py::class_<Grid>(m, "Grid")
      .def_static("line", &Grid::line, py::arg("length"), py::arg("cells"))
      .def_static("box", &Grid::box, py::arg("length_x"), py::arg("length_y"), py::arg("cells_x"),
                  py::arg("cells_y"))
      .def_property_readonly("dim", &Grid::dim)
      .def_property_readonly("nx", &Grid::nx)
      .def_property_readonly("ny", &Grid::ny)
      .def_property_readonly("h", &Grid::h)
      .def_property_readonly("cell_count", &Grid::cellCount)
      .def_property_readonly("cell_volume", &Grid::cellVolume)
      .def_property_readonly("volume", &Grid::volume)
      .def("centers",
           [](const Grid& g) {
             py::array_t<double> out({g.cellCount(), 2});
             auto r = out.mutable_unchecked<2>();
             for (int i = 0; i < g.cellCount(); ++i) {
               const auto c = g.center(i);
               r(i, 0) = c[0];
               r(i, 1) = c[1];
             }
             return out;
           })
      .def("__eq__", [](const Grid& a, const Grid& b) { return a == b; })
      .def("__repr__", [](const Grid& g) {
        return g.dim() == 1 ? "Grid.line(" + std::to_string(g.lengthX()) + ", " +
                                  std::to_string(g.nx()) + ")"
                            : "Grid.box(" + std::to_string(g.lengthX()) + ", " +
                                  std::to_string(g.lengthY()) + ", " + std::to_string(g.nx()) +
                                  ", " + std::to_string(g.ny()) + ")";
      });

  m.def(
      "total_mass",
      [](const Grid& g, const std::vector<double>& v) { return totalMass(g, v); },
      py::arg("grid"), py::arg("values"));

  m.def(
      "l1_distance",
      [](const Grid& g, const std::vector<double>& a, const std::vector<double>& b) {
        return l1Norm(g, a, b);
      },
      py::arg("grid"), py::arg("a"), py::arg("b"));

  m.def(
      "wasserstein_project",
      [](const Grid& g, const std::vector<double>& rho) {
        ProjectionResult info;
        const DensityField out = wassersteinProject(densityFrom(g, rho), SolverConfig::defaults(), &info);
        return py::make_tuple(toArray(out.values()), info.transportCost);
      },
      py::arg("grid"), py::arg("rho"),
      "Project onto {rho <= 1}; returns (values, squared transport cost).");

  m.def(
      "admissible_project",
      [](const Grid& g, const std::vector<double>& rho, const std::vector<double>& ux,
         const std::optional<std::vector<double>>& uy) {
        const ConeProjectionResult r =
            admissibleProject(densityFrom(g, rho), velocityFrom(g, ux, uy), SolverConfig::defaults());
        py::dict out;
        out["pressure"] = toArray(r.pressure.values());
        out["corrected_x"] = toArray(r.corrected.comp(0));
        if (g.dim() == 2) out["corrected_y"] = toArray(r.corrected.comp(1));
        out["kkt_residual"] = r.kktResidual;
        out["orthogonality_residual"] = r.orthogonalityResidual;
        out["complementarity_residual"] = r.complementarityResidual;
        out["converged"] = r.converged;
        out["iterations"] = r.iterations;
        return out;
      },
      py::arg("grid"), py::arg("rho"), py::arg("ux"), py::arg("uy") = std::nullopt,
      "Split a drift u = grad(p) + v against the congestion cone of rho.");

  m.def(
      "w2_exact_1d",
      [](const Grid& g, const std::vector<double>& a, const std::vector<double>& b) {
        return w2Exact1d(densityFrom(g, a), densityFrom(g, b));
      },
      py::arg("grid"), py::arg("a"), py::arg("b"));

  m.def(
      "w2_squared",
      [](const Grid& g, const std::vector<double>& a, const std::vector<double>& b) {
        return w2SquaredExact(densityFrom(g, a), densityFrom(g, b), SolverConfig::defaults());
      },
      py::arg("grid"), py::arg("a"), py::arg("b"));

  m.def(
      "sinkhorn_w2",
      [](const Grid& g, const std::vector<double>& a, const std::vector<double>& b,
         std::optional<double> epsilon) {
        return sinkhornW2(densityFrom(g, a), densityFrom(g, b), epsilon.value_or(0.0));
      },
      py::arg("grid"), py::arg("a"), py::arg("b"), py::arg("epsilon") = std::nullopt);

  m.def(
      "displacement_interpolate",
      [](const Grid& g, const std::vector<double>& a, const std::vector<double>& b, double t) {
        const LpTransportResult lp = lpTransport(densityFrom(g, a), densityFrom(g, b));
        return toArray(displacementInterpolate(lp.plan, t).values());
      },
      py::arg("grid"), py::arg("a"), py::arg("b"), py::arg("t"));

  m.def(
      "advect",
      [](const Grid& g, const std::vector<double>& rho, const std::vector<double>& ux,
         const std::optional<std::vector<double>>& uy, double tau) {
        return toArray(advect(densityFrom(g, rho), velocityFrom(g, ux, uy), tau).values());
      },
      py::arg("grid"), py::arg("rho"), py::arg("ux"), py::arg("uy"), py::arg("tau"));

  m.def(
      "diffuse",
      [](const Grid& g, const std::vector<double>& rho, double tau) {
        return toArray(diffuse(densityFrom(g, rho), tau).values());
      },
      py::arg("grid"), py::arg("rho"), py::arg("tau"));

  m.def(
      "split_step",
      [](const Grid& g, const std::vector<double>& rho, const std::vector<double>& ux,
         const std::optional<std::vector<double>>& uy, double tau, int order) {
        const DensityField d = densityFrom(g, rho);
        const VelocityField u = velocityFrom(g, ux, uy);
        const DensityField out = order == 0 ? splitStepFirstOrder(d, u, tau)
                                            : splitStepSecondOrder(d, u, tau);
        return toArray(out.values());
      },
      py::arg("grid"), py::arg("rho"), py::arg("ux"), py::arg("uy"), py::arg("tau"),
      py::arg("order") = 0);

  py::class_<Scenario>(m, "Scenario")
      .def_property_readonly("grid", [](const Scenario& s) { return s.grid; })
      .def_property_readonly("order", [](const Scenario& s) { return s.solver.order; })
      .def_property_readonly("horizon", [](const Scenario& s) { return s.solver.horizon; })
      .def_property_readonly("tau", [](const Scenario& s) { return s.solver.tau; })
      .def("serialize", &serializeScenario)
      .def("__eq__", [](const Scenario& a, const Scenario& b) { return a == b; });

  m.def("parse_scenario", &parseScenario, py::arg("text"),
        py::arg("overrides") = std::map<std::string, std::string>{});
  m.def("load_scenario", &loadScenario, py::arg("path"),
        py::arg("overrides") = std::map<std::string, std::string>{});
  m.def("serialize_scenario", &serializeScenario, py::arg("scenario"));

  py::class_<Trajectory>(m, "Trajectory")
      .def_property_readonly("steps", [](const Trajectory& t) { return t.steps; })
      .def_property_readonly("mass_drift", [](const Trajectory& t) { return t.massDrift; })
      .def_property_readonly("max_density", [](const Trajectory& t) { return t.maxDensity; })
      .def_property_readonly("max_cfl", [](const Trajectory& t) { return t.maxCfl; })
      .def_property_readonly("times",
                             [](const Trajectory& t) {
                               std::vector<double> out;
                               for (const auto& f : t.frames) out.push_back(f.time);
                               return toArray(out);
                             })
      .def("frame", [](const Trajectory& t, int i) {
        return toArray(t.frames.at(static_cast<std::size_t>(i)).density.values());
      })
      .def("__len__", [](const Trajectory& t) { return t.frames.size(); });

  m.def("run", &run, py::arg("scenario"), py::call_guard<py::gil_scoped_release>(),
        "Run the projected split-step scheme for a parsed scenario.");

  m.def(
      "estimate_lambda",
      [](const Grid& g, const std::vector<double>& ux, const std::optional<std::vector<double>>& uy,
         int samples, std::uint64_t seed) {
        return estimateLambda(velocityFrom(g, ux, uy), samples, seed);
      },
      py::arg("grid"), py::arg("ux"), py::arg("uy") = std::nullopt, py::arg("samples") = 20000,
      py::arg("seed") = 0);
}
