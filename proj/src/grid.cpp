#include "pmelab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "pmelab/error.hpp"

namespace pmelab {

double Grid::min_dx() const {
  double d = dx(0);
  for (int a = 1; a < n; ++a) d = std::min(d, dx(a));
  return d;
}

std::size_t Grid::cells() const {
  std::size_t c = 1;
  for (int a = 0; a < n; ++a) c *= static_cast<std::size_t>(nx[a]);
  return c;
}

double Grid::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < n; ++a) v *= dx(a);
  return v;
}

double Grid::domain_volume() const {
  double v = 1.0;
  for (int a = 0; a < n; ++a) v *= extents[a].length();
  return v;
}

Point Grid::point(std::size_t cell) const {
  const auto idx = multi(cell);
  Point p{0.0, 0.0};
  for (int a = 0; a < n; ++a) p[a] = center(a, idx[a]);
  return p;
}

int Grid::nearest_slice(double t) const {
  const double s = std::round((t - t0) / dt());
  return static_cast<int>(std::clamp(s, 0.0, static_cast<double>(nt)));
}

Grid make_grid(int n, std::span<const Interval> extents, std::span<const int> nx, double t0,
               double t1, int nt) {
  if (n != 1 && n != 2) fail(Errc::invalid_argument, "dimension must be 1 or 2");
  if (extents.size() != static_cast<std::size_t>(n) || nx.size() != static_cast<std::size_t>(n))
    fail(Errc::invalid_argument, "extents and nx must have one entry per axis");
  Grid g;
  g.n = n;
  for (int a = 0; a < n; ++a) {
    if (nx[a] < 2) {
      std::ostringstream os;
      os << "nx[" << a << "] = " << nx[a] << " must be >= 2";
      fail(Errc::invalid_argument, os.str());
    }
    if (!(extents[a].hi > extents[a].lo) || !std::isfinite(extents[a].lo) ||
        !std::isfinite(extents[a].hi))
      fail(Errc::invalid_argument, "degenerate spatial extent on axis " + std::to_string(a));
    g.extents[a] = extents[a];
    g.nx[a] = nx[a];
  }
  if (nt < 1) fail(Errc::invalid_argument, "nt must be >= 1");
  if (!(t1 > t0) || !std::isfinite(t0) || !std::isfinite(t1))
    fail(Errc::invalid_argument, "time interval must satisfy t1 > t0");
  g.t0 = t0;
  g.t1 = t1;
  g.nt = nt;
  return g;
}

Field::Field(Grid grid, std::string name)
    : grid_(grid), values_(grid.cells() * grid.slices(), 0.0), name_(std::move(name)) {}

Field::Field(Grid grid, std::vector<double> values, std::string name)
    : grid_(grid), values_(std::move(values)), name_(std::move(name)) {
  if (values_.size() != grid_.cells() * grid_.slices())
    fail(Errc::invalid_argument, "value count does not match grid");
}

std::span<const double> Field::slice(int k) const {
  return std::span<const double>(values_).subspan(offset(k), grid_.cells());
}

std::span<double> Field::slice(int k) {
  return std::span<double>(values_).subspan(offset(k), grid_.cells());
}

double Field::max() const { return *std::max_element(values_.begin(), values_.end()); }
double Field::min() const { return *std::min_element(values_.begin(), values_.end()); }

namespace {

struct Bracket {
  int i0;
  double w;
};

Bracket bracket_center(const Grid& g, int axis, double x) {
  const double p = (x - g.extents[axis].lo) / g.dx(axis) - 0.5;
  const int i = std::clamp(static_cast<int>(std::floor(p)), 0, g.nx[axis] - 2);
  return {i, std::clamp(p - i, 0.0, 1.0)};
}

}  // namespace

double Field::interpolate(double t, Point x) const {
  const double s = (t - grid_.t0) / grid_.dt();
  const int k = std::clamp(static_cast<int>(std::floor(s)), 0, grid_.nt - 1);
  const double wt = std::clamp(s - k, 0.0, 1.0);

  auto spatial = [&](int slice) {
    const Bracket bx = bracket_center(grid_, 0, x[0]);
    if (grid_.n == 1) {
      return (1 - bx.w) * (*this)(slice, grid_.flat(bx.i0)) +
             bx.w * (*this)(slice, grid_.flat(bx.i0 + 1));
    }
    const Bracket by = bracket_center(grid_, 1, x[1]);
    const double v00 = (*this)(slice, grid_.flat(bx.i0, by.i0));
    const double v10 = (*this)(slice, grid_.flat(bx.i0 + 1, by.i0));
    const double v01 = (*this)(slice, grid_.flat(bx.i0, by.i0 + 1));
    const double v11 = (*this)(slice, grid_.flat(bx.i0 + 1, by.i0 + 1));
    return (1 - by.w) * ((1 - bx.w) * v00 + bx.w * v10) + by.w * ((1 - bx.w) * v01 + bx.w * v11);
  };
  if (wt == 0.0) return spatial(k);
  if (wt == 1.0) return spatial(k + 1);
  return (1 - wt) * spatial(k) + wt * spatial(k + 1);
}

Field sample_field(const Grid& grid, const SampleFn& fn, std::string name) {
  Field out(grid, std::move(name));
  const std::size_t cells = grid.cells();
  for (int k = 0; k < grid.slices(); ++k) {
    const double t = grid.time(k);
    auto dst = out.slice(k);
    for (std::size_t c = 0; c < cells; ++c) {
      const double v = fn(t, grid.point(c));
      if (!std::isfinite(v)) {
        std::ostringstream os;
        os << "non-finite sample at time index " << k << ", cell " << c;
        fail(Errc::numeric_error, os.str());
      }
      dst[c] = v;
    }
  }
  return out;
}

Field pow_transform(const Field& field, double exponent) {
  std::vector<double> out(field.values().begin(), field.values().end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    double v = out[i];
    if (v < -tol_neg) {
      std::ostringstream os;
      os << "negative value " << v << " at flat index " << i;
      fail(Errc::domain_error, os.str());
    }
    if (v < 0.0) v = 0.0;
    out[i] = (v == 0.0) ? 0.0 : std::pow(v, exponent);
  }
  return Field(field.grid(), std::move(out), field.name());
}

namespace {

// Composite Simpson on [a, b] with an even number of panels.
template <class F>
double simpson(F&& f, double a, double b, int panels) {
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += f(a + i * h) * ((i % 2) ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace

Barenblatt::Barenblatt(BarenblattParams params) : params_(params) {
  const double m = params.m;
  const int n = params.n;
  if (!(m > 1.0)) fail(Errc::invalid_argument, "Barenblatt exponent must satisfy m > 1");
  if (!(params.mass > 0.0)) fail(Errc::invalid_argument, "Barenblatt mass must be positive");
  if (n != 1 && n != 2) fail(Errc::invalid_argument, "dimension must be 1 or 2");

  alpha_ = n / (n * (m - 1.0) + 2.0);
  beta_ = alpha_ / n;
  k_ = alpha_ * (m - 1.0) / (2.0 * m * n);

  // mass(A) = A^{γ + n/2} k^{-n/2} J_n with J_n the unit-profile integral;
  // s = sin θ removes the endpoint singularity of (1 - s^2)^γ.
  const double gamma = 1.0 / (m - 1.0);
  const double pi = std::numbers::pi;
  double J = 0.0;
  if (n == 1) {
    J = 2.0 * simpson([&](double th) { return std::pow(std::cos(th), 2 * gamma + 1); }, 0.0,
                      pi / 2, 4096);
  } else {
    J = 2.0 * pi * simpson([&](double th) {
          return std::pow(std::cos(th), 2 * gamma + 1) * std::sin(th);
        }, 0.0, pi / 2, 4096);
  }
  const double unit_mass = J * std::pow(k_, -0.5 * n);
  A_ = std::pow(params.mass / unit_mass, 1.0 / (gamma + 0.5 * n));
}

double Barenblatt::operator()(double t, const Point& x) const {
  double r2 = 0.0;
  for (int a = 0; a < params_.n; ++a) {
    const double d = x[a] - params_.center[a];
    r2 += d * d;
  }
  const double base = A_ - k_ * r2 * std::pow(t, -2.0 * beta_);
  if (base <= 0.0) return 0.0;
  return std::pow(t, -alpha_) * std::pow(base, 1.0 / (params_.m - 1.0));
}

double Barenblatt::support_radius(double t) const {
  return std::sqrt(A_ / k_) * std::pow(t, beta_);
}

double Barenblatt::max_at(double t) const {
  return std::pow(t, -alpha_) * std::pow(A_, 1.0 / (params_.m - 1.0));
}

Field barenblatt_field(const Grid& grid, const BarenblattParams& params) {
  if (!(grid.t0 > 0.0))
    fail(Errc::invalid_argument, "Barenblatt field needs a time interval inside (0, inf)");
  if (params.n != grid.n) fail(Errc::invalid_argument, "Barenblatt dimension differs from grid");
  const Barenblatt b(params);
  return sample_field(grid, [&](double t, const Point& x) { return b(t, x); }, "barenblatt");
}

double gradient_component(std::span<const double> v, const Grid& g, std::size_t cell, int axis) {
  const auto idx = g.multi(cell);
  const int i = idx[axis];
  auto at = [&](int j) {
    auto id = idx;
    id[axis] = j;
    return v[g.flat(id[0], id[1])];
  };
  const double h = g.dx(axis);
  if (i == 0) return (at(1) - at(0)) / h;
  if (i == g.nx[axis] - 1) return (at(i) - at(i - 1)) / h;
  return (at(i + 1) - at(i - 1)) / (2.0 * h);
}

double slice_integral(const Field& field, int k) {
  double s = 0.0;
  for (double v : field.slice(k)) s += v;
  return s * field.grid().cell_volume();
}

}  // namespace pmelab
