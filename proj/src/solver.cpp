#include "pmelab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pmelab/error.hpp"

namespace pmelab {

void ForcingPair::validate(const Grid& grid) const {
  if (!f.empty() && f.size() != static_cast<std::size_t>(grid.n))
    fail(Errc::invalid_argument, "f needs one component per spatial axis");
  for (const auto& c : f)
    if (!(c.grid() == grid)) fail(Errc::invalid_argument, "f component is not on the solver grid");
  if (g && !(g->grid() == grid)) fail(Errc::invalid_argument, "g is not on the solver grid");
  auto finite = [](const Field& fld) {
    return std::all_of(fld.values().begin(), fld.values().end(),
                       [](double v) { return std::isfinite(v); });
  };
  for (const auto& c : f)
    if (!finite(c)) fail(Errc::numeric_error, "f has non-finite samples");
  if (g && !finite(*g)) fail(Errc::numeric_error, "g has non-finite samples");
}

double cfl_dt(std::span<const double> state, const SolverConfig& config,
              std::span<const double> dx) {
  constexpr double eps_guard = 1e-30;
  double umax = 0.0;
  for (double v : state) umax = std::max(umax, v);
  double dx2 = dx[0] * dx[0];
  for (double d : dx) dx2 = std::min(dx2, d * d);
  const double n = static_cast<double>(dx.size());
  const double diff = 2.0 * n * config.m * std::pow(umax, config.m - 1.0);
  return std::min(config.cfl_safety * dx2 / (diff + eps_guard), config.dt_cap);
}

namespace {

struct Stepper {
  const Grid& grid;
  const SolverConfig& cfg;
  bool periodic;
  std::vector<double> w;
  std::vector<double> next;

  Stepper(const Grid& g, const SolverConfig& c)
      : grid(g), cfg(c), periodic(c.boundary == Boundary::periodic), w(g.cells()), next(g.cells()) {}

  // Neighbour along `axis` in direction `dir`; -1 marks a no-flux face.
  long neighbour(std::size_t cell, int axis, int dir) const {
    auto idx = grid.multi(cell);
    int i = idx[axis] + dir;
    if (i < 0 || i >= grid.nx[axis]) {
      if (!periodic) return -1;
      i = (i + grid.nx[axis]) % grid.nx[axis];
    }
    idx[axis] = i;
    return static_cast<long>(grid.flat(idx[0], idx[1]));
  }

  void step(std::vector<double>& u, double dt, std::span<const std::vector<double>> f,
            const std::vector<double>* g, std::size_t step_no) {
    const std::size_t cells = grid.cells();
    for (std::size_t c = 0; c < cells; ++c) w[c] = u[c] > 0.0 ? std::pow(u[c], cfg.m) : 0.0;

    for (std::size_t c = 0; c < cells; ++c) {
      double rhs = 0.0;
      for (int a = 0; a < grid.n; ++a) {
        const double h = grid.dx(a);
        const long up = neighbour(c, a, +1);
        const long dn = neighbour(c, a, -1);
        const double flux_up = up < 0 ? 0.0 : (w[up] - w[c]) / h;
        const double flux_dn = dn < 0 ? 0.0 : (w[c] - w[dn]) / h;
        rhs += (flux_up - flux_dn) / h;
        if (!f.empty()) {
          const auto& fa = f[a];
          const double face_up = up < 0 ? 0.0 : 0.5 * (fa[c] + fa[up]);
          const double face_dn = dn < 0 ? 0.0 : 0.5 * (fa[c] + fa[dn]);
          rhs += (face_up - face_dn) / h;
        }
      }
      if (g) rhs += (*g)[c];
      double v = u[c] + dt * rhs;
      if (v < 0.0) {
        if (v < -tol_neg) {
          std::ostringstream os;
          os << "negative value " << v << " at step " << step_no << ", cell " << c;
          fail(Errc::scheme_failure, os.str());
        }
        v = 0.0;
      }
      next[c] = v;
    }
    u.swap(next);
  }
};

void blend(std::span<const double> a, std::span<const double> b, double wt,
           std::vector<double>& out) {
  out.resize(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = (1.0 - wt) * a[i] + wt * b[i];
}

double mass_of(const std::vector<double>& u, double vol) {
  double s = 0.0;
  for (double v : u) s += v;
  return s * vol;
}

}  // namespace

EvolveResult evolve(const Grid& grid, std::span<const double> u0, const ForcingPair& forcing,
                    const SolverConfig& config) {
  if (!(config.m > 1.0)) fail(Errc::invalid_argument, "solver exponent must satisfy m > 1");
  if (!(config.cfl_safety > 0.0 && config.cfl_safety <= 1.0))
    fail(Errc::invalid_argument, "cfl_safety must lie in (0, 1]");
  if (u0.size() != grid.cells()) fail(Errc::invalid_argument, "initial slice does not match grid");
  forcing.validate(grid);

  std::vector<double> u(u0.begin(), u0.end());
  for (std::size_t c = 0; c < u.size(); ++c) {
    if (!std::isfinite(u[c])) fail(Errc::numeric_error, "initial data not finite at cell " + std::to_string(c));
    if (u[c] < -tol_neg) fail(Errc::domain_error, "initial data negative at cell " + std::to_string(c));
    u[c] = std::max(u[c], 0.0);
  }

  std::vector<double> dx(grid.n);
  for (int a = 0; a < grid.n; ++a) dx[a] = grid.dx(a);

  EvolveResult res;
  res.u = Field(grid, "u");
  std::copy(u.begin(), u.end(), res.u.slice(0).begin());
  res.initial_mass = mass_of(u, grid.cell_volume());
  res.min_value = *std::min_element(u.begin(), u.end());

  Stepper stepper(grid, config);
  std::vector<std::vector<double>> f_now(forcing.f.size());
  std::vector<double> g_now;

  for (int k = 0; k < grid.nt; ++k) {
    const double t_begin = grid.time(k);
    const double span = grid.dt();
    std::size_t substeps = 0;
    if (config.fixed_dt) {
      const double h = *config.fixed_dt;
      if (!(h > 0.0)) fail(Errc::invalid_argument, "fixed_dt must be positive");
      substeps = static_cast<std::size_t>(std::llround(span / h));
      if (substeps == 0 || std::abs(substeps * h - span) > 1e-9 * span)
        fail(Errc::invalid_argument, "fixed_dt does not divide the output interval");
    }

    double elapsed = 0.0;
    std::size_t taken = 0;
    while (config.fixed_dt ? taken < substeps : elapsed < span * (1.0 - 1e-13)) {
      const double limit = cfl_dt(u, config, dx);
      double h = 0.0;
      if (config.fixed_dt) {
        h = *config.fixed_dt;
        if (h > limit * (1.0 + 1e-12)) {
          std::ostringstream os;
          os << "requested dt " << h << " exceeds the stability limit " << limit << " at step "
             << res.steps;
          fail(Errc::invalid_argument, os.str());
        }
      } else {
        h = std::min(limit, span - elapsed);
      }

      const double wt = elapsed / span;
      for (std::size_t a = 0; a < forcing.f.size(); ++a)
        blend(forcing.f[a].slice(k), forcing.f[a].slice(k + 1), wt, f_now[a]);
      if (forcing.g) blend(forcing.g->slice(k), forcing.g->slice(k + 1), wt, g_now);

      stepper.step(u, h, f_now, forcing.g ? &g_now : nullptr, res.steps);
      elapsed += h;
      ++taken;
      if (++res.steps > config.max_steps)
        fail(Errc::scheme_failure, "exceeded max_steps at t = " + std::to_string(t_begin + elapsed));
      res.min_value = std::min(res.min_value, *std::min_element(u.begin(), u.end()));
    }
    std::copy(u.begin(), u.end(), res.u.slice(k + 1).begin());
  }
  res.final_mass = mass_of(u, grid.cell_volume());
  return res;
}

namespace {

// Centered difference of `v` along `axis` at an interior cell.
double centered(std::span<const double> v, const Grid& g, std::size_t cell, int axis) {
  auto idx = g.multi(cell);
  auto up = idx;
  auto dn = idx;
  ++up[axis];
  --dn[axis];
  return (v[g.flat(up[0], up[1])] - v[g.flat(dn[0], dn[1])]) / (2.0 * g.dx(axis));
}

bool interior(const Grid& g, std::size_t cell) {
  const auto idx = g.multi(cell);
  for (int a = 0; a < g.n; ++a)
    if (idx[a] == 0 || idx[a] == g.nx[a] - 1) return false;
  return true;
}

}  // namespace

double weak_form_residual(const Field& u, std::span<const double> u0, const ForcingPair& forcing,
                          const Field& phi, int t_index, double m) {
  const Grid& g = u.grid();
  if (!(phi.grid() == g)) fail(Errc::invalid_argument, "test function is not on the field grid");
  if (u0.size() != g.cells()) fail(Errc::invalid_argument, "initial slice does not match grid");
  if (t_index < 0 || t_index > g.nt) fail(Errc::invalid_argument, "time index out of range");
  forcing.validate(g);

  for (int k = 0; k <= t_index; ++k) {
    const auto ph = phi.slice(k);
    for (std::size_t c = 0; c < g.cells(); ++c)
      if (!interior(g, c) && std::abs(ph[c]) > 1e-14)
        fail(Errc::invalid_argument, "test function is not compactly supported (nonzero on the boundary ring)");
  }

  const double vol = g.cell_volume();
  const double dt = g.dt();
  const std::size_t cells = g.cells();

  auto slice_energy = [&](int k) {
    // ∫ ∇u^m·∇φ + f·∇φ - gφ at node k.
    const auto uk = u.slice(k);
    std::vector<double> w(cells);
    for (std::size_t c = 0; c < cells; ++c) w[c] = uk[c] > 0.0 ? std::pow(uk[c], m) : 0.0;
    const auto ph = phi.slice(k);
    double s = 0.0;
    for (std::size_t c = 0; c < cells; ++c) {
      if (!interior(g, c)) continue;
      for (int a = 0; a < g.n; ++a) {
        const double dphi = centered(ph, g, c, a);
        s += centered(w, g, c, a) * dphi;
        if (!forcing.f.empty()) s += forcing.f[a].slice(k)[c] * dphi;
      }
    }
    if (forcing.g) {
      const auto gk = forcing.g->slice(k);
      for (std::size_t c = 0; c < cells; ++c) s -= gk[c] * ph[c];
    }
    return s * vol;
  };

  double res = 0.0;
  {
    const auto uk = u.slice(t_index);
    const auto pk = phi.slice(t_index);
    const auto p0 = phi.slice(0);
    for (std::size_t c = 0; c < cells; ++c) res += (uk[c] * pk[c] - u0[c] * p0[c]) * vol;
  }
  double prev = t_index > 0 ? slice_energy(0) : 0.0;
  for (int k = 0; k < t_index; ++k) {
    const auto ua = u.slice(k);
    const auto ub = u.slice(k + 1);
    const auto pa = phi.slice(k);
    const auto pb = phi.slice(k + 1);
    double s = 0.0;
    for (std::size_t c = 0; c < cells; ++c) s += 0.5 * (ua[c] + ub[c]) * (pb[c] - pa[c]);
    res -= s * vol;
    const double next = slice_energy(k + 1);
    res += 0.5 * dt * (prev + next);
    prev = next;
  }
  return res;
}

}  // namespace pmelab
