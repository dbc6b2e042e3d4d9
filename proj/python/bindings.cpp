#include <optional>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pmelab/error.hpp"
#include "pmelab/experiment.hpp"
#include "pmelab/geometry.hpp"
#include "pmelab/grid.hpp"
#include "pmelab/norms.hpp"
#include "pmelab/solver.hpp"
#include "pmelab/suites.hpp"
#include "pmelab/verify.hpp"

namespace py = pybind11;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Core of the porous medium equation lab";
  py::register_exception<pmelab::Error>(m, "Error", PyExc_RuntimeError);

  m.def(
      "barenblatt",
      [](double t, const std::vector<double>& x, double m_exp, double mass) {
        const pmelab::Barenblatt b({m_exp, mass, 1, {0.0, 0.0}});
        std::vector<double> out;
        out.reserve(x.size());
        for (double xi : x) out.push_back(b(t, {xi, 0.0}));
        return out;
      },
      py::arg("t"), py::arg("x"), py::arg("m") = 2.0, py::arg("mass") = 1.0,
      "One-dimensional Barenblatt profile at time t.");

  m.def(
      "evolve_1d",
      [](const std::vector<double>& u0, double lo, double hi, double t0, double t1, int nt,
         double m_exp, bool periodic) {
        const pmelab::Interval ext[] = {{lo, hi}};
        const int nx[] = {static_cast<int>(u0.size())};
        const auto grid = pmelab::make_grid(1, ext, nx, t0, t1, nt);
        pmelab::SolverConfig cfg;
        cfg.m = m_exp;
        cfg.boundary = periodic ? pmelab::Boundary::periodic : pmelab::Boundary::zero_flux;
        const auto r = pmelab::evolve(grid, u0, {}, cfg);
        std::vector<std::vector<double>> slices;
        for (int k = 0; k < grid.slices(); ++k) {
          const auto s = r.u.slice(k);
          slices.emplace_back(s.begin(), s.end());
        }
        return py::dict(py::arg("u") = slices, py::arg("steps") = r.steps,
                        py::arg("min_value") = r.min_value, py::arg("initial_mass") = r.initial_mass,
                        py::arg("final_mass") = r.final_mass);
      },
      py::arg("u0"), py::arg("lo"), py::arg("hi"), py::arg("t0"), py::arg("t1"), py::arg("nt"),
      py::arg("m") = 2.0, py::arg("periodic") = false,
      "Unforced explicit solve on a uniform 1D grid; returns every output slice.");

  m.def(
      "weak_lp_norm",
      [](const std::vector<double>& v, double p, double vol) { return pmelab::weak_lp_norm(v, p, vol); },
      py::arg("values"), py::arg("p"), py::arg("cell_volume") = 1.0);
  m.def(
      "strong_lp_norm",
      [](const std::vector<double>& v, double p, double vol) { return pmelab::strong_lp_norm(v, p, vol); },
      py::arg("values"), py::arg("p"), py::arg("cell_volume") = 1.0);
  m.def(
      "marcinkiewicz_bounds",
      [](const std::vector<double>& v, double p, double vol) {
        const auto r = pmelab::marcinkiewicz_bounds(v, p, vol);
        return py::dict(py::arg("weak_norm") = r.weak_norm, py::arg("sup_quantity") = r.sup_quantity,
                        py::arg("constant") = r.constant, py::arg("lower_ok") = r.lower_ok,
                        py::arg("upper_ok") = r.upper_ok);
      },
      py::arg("values"), py::arg("p"), py::arg("cell_volume") = 1.0);

  m.def(
      "derive_exponents",
      [](double p, double q, int n) {
        const auto e = pmelab::derive_exponents(p, q, n);
        return py::dict(py::arg("sigma0") = e.sigma0, py::arg("q_prime") = e.q_prime,
                        py::arg("p_star") = e.p_star, py::arg("q_star") = e.q_star);
      },
      py::arg("p"), py::arg("q"), py::arg("n") = 1);

  m.def(
      "recursion_lemma",
      [](double C, double b, double delta, double eps, double Y0, double Z0, int steps) {
        const auto t = pmelab::recursion_lemma({C, b, delta, eps}, Y0, Z0, steps);
        return py::dict(py::arg("d") = t.d, py::arg("lambda") = t.lambda, py::arg("Y") = t.Y,
                        py::arg("Z") = t.Z, py::arg("thresholds_met") = t.thresholds_met,
                        py::arg("bound_holds") = t.bound_holds);
      },
      py::arg("C"), py::arg("b"), py::arg("delta"), py::arg("eps"), py::arg("Y0"), py::arg("Z0"),
      py::arg("steps") = 30);

  m.def(
      "verify",
      [](const std::string& suite, std::optional<std::uint64_t> seed) {
        py::gil_scoped_release release;
        const auto r = seed ? pmelab::run_suite(suite, *seed) : pmelab::run_suite(suite);
        return pmelab::to_json(r).dump();
      },
      py::arg("suite"), py::arg("seed") = py::none(), "Property suite report as a JSON string.");

  m.def(
      "run",
      [](const std::string& config, std::optional<std::string> out, std::optional<std::uint64_t> seed) {
        auto cfg = pmelab::load_config(config);
        if (out) cfg.output_dir = *out;
        if (seed) cfg.seed = *seed;
        pmelab::RunSummary s;
        {
          py::gil_scoped_release release;
          s = pmelab::run_experiment(cfg);
        }
        py::list checks;
        for (const auto& c : s.checks) checks.append(py::make_tuple(c.name, c.pass, c.detail));
        return py::make_tuple(s.ok(), checks);
      },
      py::arg("config"), py::arg("out") = py::none(), py::arg("seed") = py::none());
}
