#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "pmelab/geometry.hpp"
#include "pmelab/grid.hpp"
#include "pmelab/solver.hpp"

namespace pmelab {

enum class Side { below, above };

/// Space-time measure of {u < k} (below) or {u > k} (above) inside `set`.
double levelset_measure(const Field& field, const CellSet& set, double k, Side side);

/// Spatial measure of the same set on one time slice, restricted to `cells`.
double levelset_measure(const Field& field, int slice, std::span<const std::size_t> cells,
                        double k, Side side);

enum class Alternative { first, second };

struct AlternativeResult {
  Alternative which = Alternative::first;
  double fraction = 0.0;  // m(Q ∩ {u < μ⁻ + ω/2}) / m(Q)
};

/// First iff the sublevel fraction at μ⁻ + ω/2 is at most θ0.
AlternativeResult alternative_classify(const Field& field, const Cylinder& cyl,
                                       const OscStats& stats, double theta0);

enum class Variant { sublevel, superlevel };

struct IterationTrace {
  Variant variant = Variant::sublevel;
  ExponentSet exponents;
  int q0 = 0;
  std::vector<double> k;
  std::vector<double> rho;
  std::vector<double> Y;
  std::vector<double> Z;
  int converged_at = -1;  // first i with Y_i < 1e-3, or -1
  double floor = 0.0;     // one space-time cell relative to the normalizing cylinder
  bool converged() const { return converged_at >= 0; }
};

/// Level sequences of the De Giorgi iteration:
///   sublevel   k_i = μ⁻ + ω/4 + ω/2^{i+1},            ρ_i = ρ/2 + ρ/2^{i+1}
///   superlevel k_i = μ⁺ - ω/2^{q0+2} - ω/2^{q0+i+2},  ρ_i = ρ/2 + ρ/2^{i+2}
/// The superlevel levels increase from μ⁺ - ω/2^{q0+1} to μ⁺ - ω/2^{q0+2}
/// so that the sets {u > k_i} shrink with i. Y_i and Z_i are normalized by
/// the cylinder of radius ρ_0; Z_i is measured in the intrinsic time
/// s = M^{1-1/m} t, where it does not depend on the cylinder's scale. The
/// cylinder's θ0 (if any) is kept for every ρ_i.
IterationTrace yz_sequences(const Field& field, const Cylinder& cyl, const OscStats& stats,
                            const ExponentSet& exponents, Variant variant, int i_max, int q0 = 0);

nlohmann::json to_json(const IterationTrace& t);

/// η(t,x) = ramp((t - a)/(τ (b - a))) · S((ρ - |x - x0|)/(σ ρ)) on (a, b] x B_ρ
/// with S the quintic smoothstep 6z⁵ - 15z⁴ + 10z³ clamped to [0, 1].
struct CutoffSpec {
  double sigma = 0.5;
  double tau = 1.0;
};

struct CutoffValue {
  double eta = 0.0;
  double eta_t = 0.0;
  double grad_norm = 0.0;
};

CutoffValue evaluate_cutoff(const Cylinder& cyl, const CutoffSpec& spec, double t, const Point& x,
                            int n);

struct CaccioppoliResult {
  Variant variant = Variant::sublevel;
  double k = 0.0;
  double lhs_sup = 0.0;   // sup_t ∫ (u-k)∓² η²
  double lhs_grad = 0.0;  // weighted ∬ |∇(u-k)∓|² η²
  double lhs = 0.0;
  std::array<double, 3> rhs{};
  double rhs_sum = 0.0;
  double ratio = 0.0;  // lhs / rhs_sum; 0 when lhs = 0
  double h = 0.0;
};

/// Both sides of the energy inequalities for truncations (u - k)_- on the
/// cylinder (sublevel, μ⁻ < k < μ⁻ + ω/2) and (u - k)_+ on its θ0-shortened
/// variant (superlevel, k ≥ μ⁺ - ω/2). `field` is the variable of the
/// equation ∂t u^{1/m} = Δu + div f + g. `exponents` is needed only when
/// the forcing is nonzero.
CaccioppoliResult caccioppoli_residual(const Field& field, const ForcingPair& forcing,
                                       const Cylinder& cyl, const OscStats& stats, double k,
                                       const CutoffSpec& cutoff, Variant variant,
                                       const std::optional<ExponentSet>& exponents = std::nullopt);

nlohmann::json to_json(const CaccioppoliResult& r);

struct GoodSlice {
  int slice = -1;
  double time = 0.0;
  double measure = 0.0;  // m_n(B ∩ {u(τ0) > μ⁻ + ω/2})
  double bound = 0.0;    // (1-θ0)/(1-θ) m_n(B)
};

/// Earliest time node in (t0 - L, t0 - θL) whose superlevel set at
/// μ⁻ + ω/2 is within the bound. Requires the second alternative.
GoodSlice select_good_slice(const Field& field, const Cylinder& cyl, const OscStats& stats,
                            double theta, double theta0);

struct SliceCheck {
  int slice = 0;
  double time = 0.0;
  double measure = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct LogShrinkReport {
  double H = 0.0;
  double k = 0.0;
  double c = 0.0;
  double psi_max = 0.0;
  double psi_bound = 0.0;   // (r0_level - 1) log 2
  double psi_energy = 0.0;  // sup_t ∫_B ψ(u)²
  std::vector<SliceCheck> slices;
  bool all_pass = false;
};

/// ψ(ξ) = log_+(H / (H - (ξ - k)_+ + c)) with ξ capped at μ⁺.
double log_psi(double xi, double mu_plus, double k, double H, double c);

/// Per-slice check m_n(B ∩ {u(t) > μ⁺ - ω/2^{r0}}) ≤ (1 - (θ0/2)²) m_n(B)
/// over the θ0-shortened interval, plus ψ diagnostics over the cylinder.
LogShrinkReport log_levelset_shrink(const Field& field, const Cylinder& cyl,
                                    const OscStats& stats, double theta0, int r0_level);

struct DyadicRow {
  int q0 = 0;
  double level = 0.0;
  double fraction = 0.0;
};

struct DyadicResult {
  std::optional<int> q0;
  std::vector<DyadicRow> table;
};

/// Superlevel fractions on Q^{θ0}_{3ρ/4,M} at μ⁺ - ω/2^{q0+1} for
/// q0 = q0_min..q0_max; q0 is the first one with fraction ≤ ν.
DyadicResult dyadic_measure_decay(const Field& field, const Cylinder& cyl, const OscStats& stats,
                                  double theta0, double nu, int q0_max, int q0_min = 1);

}  // namespace pmelab
