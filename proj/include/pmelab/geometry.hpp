#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <json.hpp>

#include "pmelab/grid.hpp"
#include "pmelab/solver.hpp"

namespace pmelab {

/// Backward cylinder (t0 - L, t0] x B_ρ(x0) with intrinsic length
/// L = ρ²/M^{1-1/m}, or (θ0/2)·that when theta0 is set.
struct Cylinder {
  double t0 = 0.0;
  Point x0{0.0, 0.0};
  double rho = 1.0;
  double M = 1.0;
  double m = 2.0;
  std::optional<double> theta0;

  double full_length() const;
  double length() const;
  Interval time_interval() const { return {t0 - length(), t0}; }
  /// Same center, radius and scale without the θ0 shortening.
  Cylinder full() const;
  Cylinder shortened(double theta) const;
};

Cylinder make_cylinder(double t0, Point x0, double rho, double M, double m,
                       std::optional<double> theta0 = std::nullopt);

nlohmann::json cylinder_to_json(const Cylinder& c);

/// Discrete index set of a cylinder: time nodes t_k in (t0 - L, t0] and
/// cells whose centers satisfy |x - x0| < ρ.
struct CellSet {
  std::vector<int> slices;
  std::vector<std::size_t> cells;
  double ball_measure = 0.0;       // m_n(B_ρ), cell count x cell volume
  double measure = 0.0;            // m_{n+1}(Q), slice count x dt x ball_measure
  std::size_t size() const { return slices.size() * cells.size(); }
};

std::vector<std::size_t> ball_cells(const Grid& grid, Point x0, double rho);
std::vector<int> slices_in(const Grid& grid, Interval window);

/// Fails with out-of-domain (naming the violated margin) when the ball
/// leaves the spatial extent by more than `margin`, or the time interval
/// leaves the grid history.
void require_inside(const Grid& grid, const Cylinder& cyl, double margin = 0.0);

/// require_inside, then the index set. Empty sets are a degenerate error.
CellSet cylinder_cells(const Grid& grid, const Cylinder& cyl);

struct Extrema {
  double sup = 0.0;
  double inf = 0.0;
};
Extrema extrema(const Field& field, const CellSet& set);

struct OscStats {
  double mu_plus = 0.0;
  double mu_minus = 0.0;
  double osc = 0.0;
  double omega = 0.0;
  double M = 0.0;
};

/// μ± over the cylinder; ω defaults to osc and M to μ⁺. Overrides must
/// satisfy sup ≤ M ≤ 3 sup and (3/4)ω ≤ osc ≤ ω.
OscStats osc_stats(const Field& field, const Cylinder& cyl,
                   std::optional<double> omega = std::nullopt,
                   std::optional<double> M = std::nullopt);

/// u_M(s, x) = u(t, x)/M with s = M^{m-1} t. The grid time axis is
/// relabeled, nothing is resampled.
Field scale_transform(const Field& field, double M, double m);

/// Forcing components relabeled onto the s axis, values unchanged. The
/// equation solved by u_M then carries the factor M^{-m} in front of
/// div f + g (see effective_forcing).
ForcingPair scale_transform(const ForcingPair& forcing, double M, double m);

/// Forcing multiplied by a constant factor, e.g. M^{-m} for the transformed
/// equation.
ForcingPair scaled_forcing(const ForcingPair& forcing, double factor);

/// Coordinates of the unit cylinder Q_1 = (-1, 0] x B_1 attached to a
/// cylinder: t = t0 + s L, x = x0 + ρ y, values divided by M.
struct UnitMap {
  Cylinder cyl;

  double time_of(double s) const { return cyl.t0 + s * cyl.full_length(); }
  Point point_of(const Point& y) const;
  double s_of(double t) const { return (t - cyl.t0) / cyl.full_length(); }
  Point y_of(const Point& x) const;

  /// Amplitude factors applied to f and g when the equation is rewritten
  /// on Q_1: ρ/M and ρ²/M.
  double f_factor() const { return cyl.rho / cyl.M; }
  double g_factor() const { return cyl.rho * cyl.rho / cyl.M; }
};

/// Field on Q_1 (s in [-1, 0], y in [-1, 1]^n) sampled from `field` by
/// multilinear interpolation, values divided by M. Resolution defaults to
/// the number of original cells across the ball and the number of original
/// time steps inside the cylinder.
Field rescale_to_unit(const Field& field, const Cylinder& cyl, int nx = 0, int nt = 0);

struct ExponentSet {
  double p = 0.0;
  double q = 0.0;
  int n = 1;
  double sigma0 = 0.0;
  double q_prime = 0.0;
  double p_star = 0.0;
  double q_star = 0.0;
};

/// σ0 = 1 - 2/q - n/p, 1/q' = 1/2 - 1/q, q* = q'(1 + 2σ0/n),
/// p* = q*/(q'(1/2 - 1/p)). Requires p, q > 2 and σ0 > 0.
ExponentSet derive_exponents(double p, double q, int n);

}  // namespace pmelab
