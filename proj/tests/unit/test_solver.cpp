#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pmelab/error.hpp"
#include "pmelab/solver.hpp"

using namespace pmelab;

namespace {
Grid line(int nx, double lo, double hi, double t0, double t1, int nt) {
  const Interval ext[] = {{lo, hi}};
  const int n[] = {nx};
  return make_grid(1, ext, n, t0, t1, nt);
}
}  // namespace

TEST_CASE("cfl_dt formula") {
  const std::vector<double> u{0.5, 2.0, 1.0};
  const double dx[] = {0.1};
  SolverConfig cfg;
  cfg.m = 2.0;
  // 0.9 * 0.01 / (2 * 1 * 2 * 2^1)
  CHECK(cfl_dt(u, cfg, dx) == doctest::Approx(0.9 * 0.01 / 8.0).epsilon(1e-12));
  cfg.dt_cap = 1e-4;
  CHECK(cfl_dt(u, cfg, dx) == 1e-4);
  const std::vector<double> zero{0.0, 0.0};
  cfg.dt_cap = 0.5;
  CHECK(cfl_dt(zero, cfg, dx) == 0.5);
}

TEST_CASE("constant states are steady") {
  const Grid g = line(16, 0.0, 1.0, 0.0, 0.1, 4);
  const std::vector<double> u0(16, 0.7);
  for (auto b : {Boundary::zero_flux, Boundary::periodic}) {
    SolverConfig cfg;
    cfg.boundary = b;
    const auto r = evolve(g, u0, {}, cfg);
    for (double v : r.u.values()) CHECK(v == 0.7);
  }
}

TEST_CASE("mass is conserved without forcing") {
  const Grid g = line(50, 0.0, 1.0, 0.0, 0.05, 5);
  std::vector<double> u0(50);
  for (int i = 0; i < 50; ++i) u0[i] = std::max(0.0, std::sin(2 * std::numbers::pi * g.center(0, i)));
  for (auto b : {Boundary::zero_flux, Boundary::periodic}) {
    SolverConfig cfg;
    cfg.boundary = b;
    const auto r = evolve(g, u0, {}, cfg);
    CHECK(std::abs(r.final_mass - r.initial_mass) <= 1e-13 * r.initial_mass);
    CHECK(r.min_value >= -tol_neg);
    CHECK(r.steps > 5);
  }
}

TEST_CASE("constant source adds c |Ω| T of mass") {
  const Grid g = line(20, 0.0, 2.0, 0.0, 0.2, 4);
  std::vector<double> u0(20, 0.2);
  ForcingPair fp;
  fp.g = Field(g, std::vector<double>(g.cells() * g.slices(), 3.0), "g");
  SolverConfig cfg;
  cfg.boundary = Boundary::periodic;
  const auto r = evolve(g, u0, fp, cfg);
  CHECK(r.final_mass - r.initial_mass == doctest::Approx(3.0 * 2.0 * 0.2).epsilon(1e-12));
  // A uniform source keeps the state uniform: u = 0.2 + 3t.
  for (int k = 0; k < g.slices(); ++k) CHECK(r.u(k, 7) == doctest::Approx(0.2 + 3.0 * g.time(k)).epsilon(1e-12));
}

TEST_CASE("fixed dt must divide the output interval and respect CFL") {
  const Grid g = line(10, 0.0, 1.0, 0.0, 0.1, 2);
  const std::vector<double> u0(10, 1.0);
  SolverConfig cfg;
  cfg.fixed_dt = 0.003;
  CHECK_THROWS_AS(evolve(g, u0, {}, cfg), Error);
  cfg.fixed_dt = 0.05;  // divides, but far above the CFL limit 0.9 * 0.01 / 4
  CHECK_THROWS_AS(evolve(g, u0, {}, cfg), Error);
  cfg.fixed_dt = 0.001;
  const auto r = evolve(g, u0, {}, cfg);
  CHECK(r.steps == 100);
}

TEST_CASE("strongly negative states are a scheme failure") {
  const Grid g = line(10, 0.0, 1.0, 0.0, 0.1, 2);
  std::vector<double> u0(10, 0.1);
  ForcingPair fp;
  fp.g = Field(g, std::vector<double>(g.cells() * g.slices(), -100.0), "g");
  try {
    evolve(g, u0, fp, {});
    FAIL("expected scheme failure");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::scheme_failure);
  }
}

TEST_CASE("max_steps is enforced") {
  const Grid g = line(100, 0.0, 1.0, 0.0, 1.0, 1);
  SolverConfig cfg;
  cfg.max_steps = 10;
  CHECK_THROWS_AS(evolve(g, std::vector<double>(100, 1.0), {}, cfg), Error);
}

TEST_CASE("weak-form defect of the Barenblatt solve shrinks under refinement") {
  auto defect = [](int nx) {
    const Grid g = line(nx, -3.0, 3.0, 1.0, 1.5, nx / 4);
    const Field exact = barenblatt_field(g, {2.0, 1.0, 1, {0.0, 0.0}});
    const auto r = evolve(g, exact.slice(0), {}, {});
    const Field phi = sample_field(g, [](double t, const Point& x) {
      const double s = std::max(0.0, 1.0 - x[0] * x[0] / 4.0);
      return s * s * (2.0 - t);
    });
    return std::abs(weak_form_residual(r.u, exact.slice(0), {}, phi, g.nt, 2.0));
  };
  const double coarse = defect(80);
  const double fine = defect(320);
  CHECK(fine < coarse);
  CHECK(fine < 1e-3);
}
