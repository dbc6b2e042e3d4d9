#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "pmelab/grid.hpp"

namespace pmelab {

struct RecursionParams {
  double C = 1.0;
  double b = 2.0;
  double delta = 1.0;
  double eps = 1.0;

  void validate() const;
  /// min{δ, ε/(1+ε)}
  double d() const;
  /// min{(2C)^{-1/δ} b^{-1/(δd)}, (2C)^{-(1+ε)/ε} b^{-1/(εd)}}
  double lambda() const;
};

struct RecursionTrace {
  double d = 0.0;
  double lambda = 0.0;
  std::vector<double> Y;
  std::vector<double> Z;
  bool thresholds_met = false;  // Y0 ≤ λ and Z0 ≤ λ^{1/(1+ε)}
  bool bound_holds = false;     // Y_n ≤ λ b^{-n/d}, Z_n ≤ (λ b^{-n/d})^{1/(1+ε)} for every n computed
  bool bound_ok = false;        // thresholds_met implies bound_holds
  int diverged_at = -1;         // first step with a non-finite value
};

/// Runs the recursion with equality,
///   Y_{n+1} = C bⁿ (Y_n^{1+δ} + Y_n^δ Z_n^{1+ε}),  Z_{n+1} = C bⁿ (Y_n + Z_n^{1+ε}),
/// and compares against the geometric bound. Comparisons allow a relative
/// slack of 1e-12 for rounding in the powers.
RecursionTrace recursion_lemma(const RecursionParams& params, double Y0, double Z0, int n_steps);

struct InequalityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;  // lhs/rhs; 0 when lhs = 0
  bool degenerate = false;
};

/// ‖f‖_{L^q(L^p)} against ‖f‖_{L^∞(L²)} + ‖∇f‖_{L²} over the whole grid.
/// Requires p, q ≥ 2 and 2/q + n/p = n/2 (to 1e-12), excluding q = 2,
/// p = ∞ when n = 2. Either exponent may be infinite.
InequalityCheck ladyzhenskaya_check(const Field& field, double p, double q);

/// (l-k) m_n({f > l}) against ρ^{n+1}/(m_n(B_ρ) - m_n({f > k})) ∫_{k<f≤l} |∇f|
/// on the cells of `grid` inside B_ρ(x0). Each cell contributes |∇f| times
/// the share of its linearized range f ± (1/2)Σ|∂_a f|dx_a lying in (k, l].
/// degenerate is set (ratio 0) when
/// {f > k} fills the ball.
InequalityCheck poincare_levelset_check(const Grid& grid, std::span<const double> slice, Point x0,
                                        double rho, double k, double l);

struct VerificationReport {
  std::string check;
  nlohmann::json params;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  bool pass = false;
};

nlohmann::json to_json(const VerificationReport& r);

}  // namespace pmelab
