#pragma once

#include <span>

#include <json.hpp>

#include "pmelab/geometry.hpp"
#include "pmelab/grid.hpp"
#include "pmelab/solver.hpp"

namespace pmelab {

/// m_n({|f| > λ}) for a slice of cells of volume `cell_volume`.
double distribution_function(std::span<const double> values, double lambda, double cell_volume);

/// sup_K |K|^{-(1-1/p)} ∫_K |f|. For a fixed measure the integral is largest
/// on a superlevel set, so K ranges over prefixes of |f| sorted descending.
double weak_lp_norm(std::span<const double> values, double p, double cell_volume);

/// (∫|f|^p)^{1/p}; p = ∞ gives max |f|.
double strong_lp_norm(std::span<const double> values, double p, double cell_volume);

struct MarcinkiewiczReport {
  double p = 0.0;
  double weak_norm = 0.0;
  double sup_quantity = 0.0;  // sup_λ λ m_n({|f| > λ})^{1/p}
  double constant = 0.0;      // (p-1)/p^{1+1/p}
  bool lower_ok = false;
  bool upper_ok = false;
};

/// Two-sided comparison c_p ‖f‖_w ≤ sup_λ λ μ(λ)^{1/p} ≤ ‖f‖_w. The sup is
/// taken just below each attained |value| (λ = |v|(1 - 1e-9)). Both sides
/// are compared with a relative slack of 1e-12 for rounding.
MarcinkiewiczReport marcinkiewicz_bounds(std::span<const double> values, double p,
                                         double cell_volume);

struct NormSpec {
  double p = 2.0;
  double q = 2.0;  // may be infinity
  bool weak = true;
};

/// Inner (weak or strong) L^p norm on each slice of the cylinder, then the
/// rectangle-rule L^q norm over the slices (max for q = ∞).
double mixed_norm(const Field& field, const Cylinder& cyl, const NormSpec& spec);

/// Pointwise Euclidean length of a vector field given by components.
Field magnitude(std::span<const Field> components);

struct ForcingNorms {
  double p = 0.0;
  double q = 0.0;
  double sigma0 = 0.0;
  double norm_f = 0.0;  // ‖f‖ in L^q(L^p_w)
  double norm_g = 0.0;  // ‖g‖ in L^{q/2}(L^{p/2}_w)
  double h = 0.0;       // norm_f² + ω norm_g
};

/// Checks the exponent hypothesis for dimension n before measuring.
ForcingNorms forcing_h(const ForcingPair& forcing, const Cylinder& cyl, double p, double q,
                       double omega, int n);

nlohmann::json to_json(const ForcingNorms& n);

}  // namespace pmelab
