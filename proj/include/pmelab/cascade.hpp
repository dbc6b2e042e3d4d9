#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pmelab/geometry.hpp"
#include "pmelab/norms.hpp"
#include "pmelab/solver.hpp"

namespace pmelab {

struct CascadeParams {
  double theta0 = 0.5;
  double eta0 = 0.25;
  double delta0 = 0.5;
  int max_levels = 12;

  /// min{(1-η0)^{1/σ0}, (1/2)(1/3)^{(1-1/m)/2}(θ0/2)^{1/2}}
  double shrink_ratio(double m, double sigma0) const;
  void validate() const;
};

struct CascadeOptions {
  /// Intrinsic scale of the first cylinder; defaults to the global sup of
  /// the field.
  std::optional<double> M0;
  /// Oscillation bound of the first cylinder; defaults to its oscillation.
  std::optional<double> omega0;
};

struct CascadeLevel {
  int j = 0;
  double rho = 0.0;
  double omega = 0.0;
  double M = 0.0;
  double length = 0.0;
  double mu_plus = 0.0;
  double mu_minus = 0.0;
  double osc = 0.0;
  std::size_t cells = 0;
  std::size_t slices = 0;
  bool pass_osc = false;       // osc over Q_j ≤ ω_j
  bool pass_sup = false;       // sup over Q_j ≤ M_j
  bool pass_eq9 = false;       // both of the above
  double h = 0.0;
  bool pass_rho_cond = false;  // ρ^{σ0} ≤ δ0 ω M^{-(1/q)(1-1/m)} h^{-1/2}; h = 0 counts as satisfied
  bool nest_condition = false; // M_j ≥ M_{j-1}/3 (j ≥ 1)
  bool nested = false;         // index set of Q_j inside that of Q_{j-1} (j ≥ 1)
  bool pass_chain = true;      // μ⁺_{j-1} ≤ max{3ω_j/(2(1-η0)), 3μ⁺_j} (j ≥ 1)
};

struct CascadeState {
  CascadeParams params;
  ExponentSet exponents;
  double m = 2.0;
  double shrink_ratio = 0.0;
  Point x0{0.0, 0.0};
  double t0 = 0.0;
  std::vector<CascadeLevel> levels;
  std::string stop_reason;
  ForcingNorms norms0;  // forcing norms on the first cylinder

  /// Levels where osc ≤ ω_j failed, and levels where the nesting
  /// condition held but Q_j ⊄ Q_{j-1}.
  int osc_violations() const;
  int nesting_violations() const;
};

/// Iterates ω_j = (1-η0)ω_{j-1}, ρ_j = r0 ρ_{j-1}, M_j = max{μ⁺_{j-1}, ω_j}
/// on backward cylinders anchored at (t0, x0), recording the checks of each
/// level. Stops at max_levels, when ρ_j < 3 min dx, or when the cylinder
/// leaves the grid.
CascadeState oscillation_cascade(const Field& field, double m, double t0, Point x0, double rho0,
                                 const CascadeParams& params, const ExponentSet& exponents,
                                 const ForcingPair& forcing, const CascadeOptions& options = {});

nlohmann::json to_json(const CascadeState& s);
/// Header `level,rho,omega,M,osc,pass_eq9,pass_rho_cond`.
std::string cascade_csv(const CascadeState& s);

struct HolderFit {
  bool flat = false;
  double sigma = 0.0;
  double intercept = 0.0;
  double C_fit = 0.0;
  double bracket = 0.0;
  std::array<double, 3> bracket_terms{};  // M0, M0^{(1/q)(1-1/m)}‖f‖, M0^{(2/q)(1-1/m)}‖g‖
  int levels_used = 0;
};

/// Least-squares slope of log osc against log ρ over the levels with
/// positive osc; C_fit = max osc_j/ρ_j^σ divided by the bracket.
HolderFit holder_fit(const std::vector<double>& rho, const std::vector<double>& osc, double M0,
                     const ForcingNorms& norms, double m);
HolderFit holder_fit(const CascadeState& s);

nlohmann::json to_json(const HolderFit& f);

}  // namespace pmelab
