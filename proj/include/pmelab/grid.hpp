#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace pmelab {

using Point = std::array<double, 2>;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
  bool operator==(const Interval&) const = default;
};

/// Uniform space-time grid. Spatial samples sit at cell centers; time
/// samples sit at the nt + 1 nodes t0 + k dt, k = 0..nt. Each time node
/// stands for a slab of width dt when space-time measures are taken.
struct Grid {
  int n = 1;
  std::array<Interval, 2> extents{};
  std::array<int, 2> nx{1, 1};
  double t0 = 0.0;
  double t1 = 1.0;
  int nt = 1;

  double dx(int axis) const { return extents[axis].length() / nx[axis]; }
  double min_dx() const;
  double dt() const { return (t1 - t0) / nt; }
  int slices() const { return nt + 1; }
  std::size_t cells() const;
  double cell_volume() const;
  double spacetime_cell_measure() const { return dt() * cell_volume(); }
  double domain_volume() const;

  double center(int axis, int i) const { return extents[axis].lo + (i + 0.5) * dx(axis); }
  double time(int k) const { return t0 + k * dt(); }

  std::size_t flat(int i, int j = 0) const {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(j) * nx[0];
  }
  std::array<int, 2> multi(std::size_t cell) const {
    return {static_cast<int>(cell % nx[0]), static_cast<int>(cell / nx[0])};
  }
  Point point(std::size_t cell) const;

  /// Index of the time node closest to t (clamped).
  int nearest_slice(double t) const;

  bool operator==(const Grid&) const = default;
};

/// extents.size() and nx.size() must both equal n (1 or 2).
Grid make_grid(int n, std::span<const Interval> extents, std::span<const int> nx, double t0,
               double t1, int nt);

/// Scalar function sampled on a Grid: values[k * cells + cell].
class Field {
 public:
  Field() = default;
  Field(Grid grid, std::string name);
  Field(Grid grid, std::vector<double> values, std::string name);

  const Grid& grid() const { return grid_; }
  const std::string& name() const { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  std::span<const double> slice(int k) const;
  std::span<double> slice(int k);

  double operator()(int k, std::size_t cell) const { return values_[offset(k) + cell]; }
  double& operator()(int k, std::size_t cell) { return values_[offset(k) + cell]; }

  /// Linear in time between nodes, multilinear in space between cell
  /// centers; clamped at the edges of the grid.
  double interpolate(double t, Point x) const;

  double max() const;
  double min() const;

 private:
  std::size_t offset(int k) const { return static_cast<std::size_t>(k) * grid_.cells(); }

  Grid grid_{};
  std::vector<double> values_;
  std::string name_;
};

inline constexpr double tol_neg = 1e-12;

using SampleFn = std::function<double(double t, const Point& x)>;

/// Exact evaluation at (time node, cell center). Throws numeric-error on a
/// non-finite sample, naming the offending index.
Field sample_field(const Grid& grid, const SampleFn& fn, std::string name = "field");

/// Pointwise power of a nonnegative field. Values in [-tol_neg, 0) are read
/// as 0; anything more negative is a domain-error.
Field pow_transform(const Field& field, double exponent);

struct BarenblattParams {
  double m = 2.0;
  double mass = 1.0;
  int n = 1;
  Point center{0.0, 0.0};
};

/// Zel'dovich-Kompaneets-Barenblatt source-type solution of u_t = Δ(u^m):
///   U(t,x) = t^{-α} (A - k |x|^2 t^{-2β})_+^{1/(m-1)}
/// with α = n/(n(m-1)+2), β = α/n, k = α(m-1)/(2mn). A is fixed from the
/// mass by quadrature of the t = 1 profile.
class Barenblatt {
 public:
  explicit Barenblatt(BarenblattParams params);

  const BarenblattParams& params() const { return params_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double k() const { return k_; }
  double A() const { return A_; }

  double operator()(double t, const Point& x) const;
  double support_radius(double t) const;
  double max_at(double t) const;

 private:
  BarenblattParams params_;
  double alpha_ = 0.0;
  double beta_ = 0.0;
  double k_ = 0.0;
  double A_ = 0.0;
};

Field barenblatt_field(const Grid& grid, const BarenblattParams& params);

/// Centered difference of a slice along `axis`, one-sided on the first and
/// last cell of that axis.
double gradient_component(std::span<const double> slice, const Grid& grid, std::size_t cell,
                          int axis);

/// Sum of a slice times the cell volume.
double slice_integral(const Field& field, int k);

}  // namespace pmelab
