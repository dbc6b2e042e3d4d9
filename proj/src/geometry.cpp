#include "pmelab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pmelab/error.hpp"

namespace pmelab {

double Cylinder::full_length() const { return rho * rho / std::pow(M, 1.0 - 1.0 / m); }

double Cylinder::length() const {
  return theta0 ? 0.5 * (*theta0) * full_length() : full_length();
}

Cylinder Cylinder::full() const {
  Cylinder c = *this;
  c.theta0.reset();
  return c;
}

Cylinder Cylinder::shortened(double theta) const {
  Cylinder c = *this;
  c.theta0 = theta;
  return c;
}

Cylinder make_cylinder(double t0, Point x0, double rho, double M, double m,
                       std::optional<double> theta0) {
  if (!(rho > 0.0)) fail(Errc::invalid_argument, "cylinder radius must be positive");
  if (!(M > 0.0)) fail(Errc::degenerate, "intrinsic scale M must be positive");
  if (!(m > 1.0)) fail(Errc::invalid_argument, "exponent m must exceed 1");
  if (theta0 && !(*theta0 > 0.0 && *theta0 < 1.0))
    fail(Errc::invalid_argument, "theta0 must lie in (0, 1)");
  return Cylinder{t0, x0, rho, M, m, theta0};
}

nlohmann::json cylinder_to_json(const Cylinder& c) {
  nlohmann::json j = {{"t0", c.t0}, {"x0", {c.x0[0], c.x0[1]}}, {"rho", c.rho},
                      {"M", c.M},   {"m", c.m}};
  if (c.theta0) j["theta0"] = *c.theta0;
  return j;
}

std::vector<std::size_t> ball_cells(const Grid& grid, Point x0, double rho) {
  std::vector<std::size_t> out;
  const double r2 = rho * rho;
  for (std::size_t c = 0; c < grid.cells(); ++c) {
    const Point p = grid.point(c);
    double d2 = 0.0;
    for (int a = 0; a < grid.n; ++a) d2 += (p[a] - x0[a]) * (p[a] - x0[a]);
    if (d2 < r2) out.push_back(c);
  }
  return out;
}

std::vector<int> slices_in(const Grid& grid, Interval window) {
  // Nodes in (lo, hi]; the tolerance keeps nodes that land on an endpoint
  // through rounding on the intended side.
  const double eps = 1e-9 * grid.dt();
  std::vector<int> out;
  for (int k = 0; k < grid.slices(); ++k) {
    const double t = grid.time(k);
    if (t > window.lo + eps && t <= window.hi + eps) out.push_back(k);
  }
  return out;
}

void require_inside(const Grid& grid, const Cylinder& cyl, double margin) {
  const double eps = 1e-12;
  for (int a = 0; a < grid.n; ++a) {
    const double lo = cyl.x0[a] - cyl.rho - margin;
    const double hi = cyl.x0[a] + cyl.rho + margin;
    if (lo < grid.extents[a].lo - eps || hi > grid.extents[a].hi + eps) {
      std::ostringstream os;
      os << "ball of radius " << cyl.rho << " (margin " << margin << ") around x0[" << a
         << "] = " << cyl.x0[a] << " leaves [" << grid.extents[a].lo << ", "
         << grid.extents[a].hi << "]";
      fail(Errc::out_of_domain, os.str());
    }
  }
  const Interval I = cyl.time_interval();
  const double teps = 1e-9 * grid.dt();
  if (I.lo < grid.t0 - teps || I.hi > grid.t1 + teps) {
    std::ostringstream os;
    os << "time interval (" << I.lo << ", " << I.hi << "] leaves the grid history [" << grid.t0
       << ", " << grid.t1 << "]";
    fail(Errc::out_of_domain, os.str());
  }
}

CellSet cylinder_cells(const Grid& grid, const Cylinder& cyl) {
  require_inside(grid, cyl);
  CellSet s;
  s.cells = ball_cells(grid, cyl.x0, cyl.rho);
  s.slices = slices_in(grid, cyl.time_interval());
  if (s.cells.empty() || s.slices.empty())
    fail(Errc::degenerate, "cylinder contains no grid points (refine the grid or enlarge rho)");
  s.ball_measure = static_cast<double>(s.cells.size()) * grid.cell_volume();
  s.measure = static_cast<double>(s.slices.size()) * grid.dt() * s.ball_measure;
  return s;
}

Extrema extrema(const Field& field, const CellSet& set) {
  Extrema e{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  for (int k : set.slices) {
    const auto v = field.slice(k);
    for (auto c : set.cells) {
      e.sup = std::max(e.sup, v[c]);
      e.inf = std::min(e.inf, v[c]);
    }
  }
  return e;
}

OscStats osc_stats(const Field& field, const Cylinder& cyl, std::optional<double> omega,
                   std::optional<double> M) {
  const CellSet set = cylinder_cells(field.grid(), cyl);
  const Extrema e = extrema(field, set);
  if (!(e.sup > 0.0))
    fail(Errc::degenerate, "supremum over the cylinder is zero; intrinsic length undefined");
  OscStats s;
  s.mu_plus = e.sup;
  s.mu_minus = e.inf;
  s.osc = e.sup - e.inf;
  s.omega = omega.value_or(s.osc);
  s.M = M.value_or(s.mu_plus);
  const double tol = 1e-12 * std::max(1.0, std::abs(e.sup));
  if (s.M < e.sup - tol || s.M > 3.0 * e.sup + tol)
    fail(Errc::invalid_argument, "M must satisfy sup <= M <= 3 sup");
  if (s.osc > s.omega + tol || 0.75 * s.omega > s.osc + tol)
    fail(Errc::invalid_argument, "omega must satisfy (3/4) omega <= osc <= omega");
  return s;
}

namespace {

Grid relabel_time(const Grid& g, double factor) {
  Grid out = g;
  out.t0 = g.t0 * factor;
  out.t1 = g.t1 * factor;
  return out;
}

}  // namespace

Field scale_transform(const Field& field, double M, double m) {
  if (!(M > 0.0)) fail(Errc::invalid_argument, "scale M must be positive");
  const double factor = std::pow(M, m - 1.0);
  std::vector<double> v(field.values().begin(), field.values().end());
  for (double& x : v) x /= M;
  return Field(relabel_time(field.grid(), factor), std::move(v), field.name());
}

ForcingPair scale_transform(const ForcingPair& forcing, double M, double m) {
  if (!(M > 0.0)) fail(Errc::invalid_argument, "scale M must be positive");
  const double factor = std::pow(M, m - 1.0);
  ForcingPair out;
  for (const auto& c : forcing.f) {
    std::vector<double> v(c.values().begin(), c.values().end());
    out.f.emplace_back(relabel_time(c.grid(), factor), std::move(v), c.name());
  }
  if (forcing.g) {
    std::vector<double> v(forcing.g->values().begin(), forcing.g->values().end());
    out.g = Field(relabel_time(forcing.g->grid(), factor), std::move(v), forcing.g->name());
  }
  return out;
}

ForcingPair scaled_forcing(const ForcingPair& forcing, double factor) {
  auto scale = [factor](const Field& f) {
    std::vector<double> v(f.values().begin(), f.values().end());
    for (double& x : v) x *= factor;
    return Field(f.grid(), std::move(v), f.name());
  };
  ForcingPair out;
  for (const auto& c : forcing.f) out.f.push_back(scale(c));
  if (forcing.g) out.g = scale(*forcing.g);
  return out;
}

Point UnitMap::point_of(const Point& y) const {
  return {cyl.x0[0] + cyl.rho * y[0], cyl.x0[1] + cyl.rho * y[1]};
}

Point UnitMap::y_of(const Point& x) const {
  return {(x[0] - cyl.x0[0]) / cyl.rho, (x[1] - cyl.x0[1]) / cyl.rho};
}

Field rescale_to_unit(const Field& field, const Cylinder& cyl, int nx, int nt) {
  const Grid& g = field.grid();
  require_inside(g, cyl.full());
  if (nx <= 0) nx = std::max(2, static_cast<int>(std::lround(2.0 * cyl.rho / g.min_dx())));
  if (nt <= 0) nt = std::max(1, static_cast<int>(std::lround(cyl.full_length() / g.dt())));
  std::vector<Interval> ext(g.n, Interval{-1.0, 1.0});
  std::vector<int> counts(g.n, nx);
  const Grid unit = make_grid(g.n, ext, counts, -1.0, 0.0, nt);
  const UnitMap map{cyl.full()};
  return sample_field(
      unit,
      [&](double s, const Point& y) { return field.interpolate(map.time_of(s), map.point_of(y)) / cyl.M; },
      field.name() + "_unit");
}

ExponentSet derive_exponents(double p, double q, int n) {
  if (n != 1 && n != 2) fail(Errc::invalid_argument, "dimension must be 1 or 2");
  if (!(p > 2.0) || !(q > 2.0)) {
    std::ostringstream os;
    os << "forcing exponents must satisfy p, q > 2 (got p = " << p << ", q = " << q
       << "); the Hölder estimate assumes 2/q + n/p < 1 with p, q > 2";
    fail(Errc::hypothesis_violation, os.str());
  }
  ExponentSet e;
  e.p = p;
  e.q = q;
  e.n = n;
  e.sigma0 = 1.0 - 2.0 / q - n / p;
  if (!(e.sigma0 > 0.0)) {
    std::ostringstream os;
    os << "2/q + n/p = " << 2.0 / q + n / p
       << " >= 1 violates the Hölder estimate's hypothesis 2/q + n/p < 1";
    fail(Errc::hypothesis_violation, os.str());
  }
  e.q_prime = 1.0 / (0.5 - 1.0 / q);
  e.q_star = e.q_prime * (1.0 + 2.0 * e.sigma0 / n);
  e.p_star = e.q_star / (e.q_prime * (0.5 - 1.0 / p));
  return e;
}

}  // namespace pmelab
