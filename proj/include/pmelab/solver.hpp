#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "pmelab/grid.hpp"

namespace pmelab {

enum class Boundary { periodic, zero_flux };

struct SolverConfig {
  double m = 2.0;
  Boundary boundary = Boundary::zero_flux;
  double cfl_safety = 0.9;
  std::size_t max_steps = 50'000'000;
  /// Upper bound returned by cfl_dt when the diffusivity vanishes.
  double dt_cap = std::numeric_limits<double>::infinity();
  /// When set, every substep uses this dt; it must divide each output
  /// interval and never exceed cfl_dt.
  std::optional<double> fixed_dt;
};

/// Right-hand side div f + g of the forced equation, sampled on the
/// solver's grid. f holds one component per spatial axis, or is empty.
struct ForcingPair {
  std::vector<Field> f;
  std::optional<Field> g;

  bool empty() const { return f.empty() && !g.has_value(); }
  void validate(const Grid& grid) const;
};

double cfl_dt(std::span<const double> state, const SolverConfig& config,
              std::span<const double> dx);

struct EvolveResult {
  Field u;
  std::size_t steps = 0;
  double min_value = 0.0;
  double initial_mass = 0.0;
  double final_mass = 0.0;
};

/// Explicit conservative scheme
///   u^{n+1} = u^n + dt [Δ_h (u^n)^m + div_h f + g]
/// in flux form, adaptive substeps inside every output interval of `grid`.
/// Slice 0 of the result is u0.
EvolveResult evolve(const Grid& grid, std::span<const double> u0, const ForcingPair& forcing,
                    const SolverConfig& config);

/// Discrete weak-form defect at time node `t_index`:
///   ∫u(t)φ(t) - ∫∫u ∂tφ + ∫∫∇u^m·∇φ - ∫u0 φ(0) + ∫∫f·∇φ - ∫∫gφ.
/// Space by midpoint rule over cells, time by the average of neighbouring
/// nodes, gradients by centered differences on interior cells. φ must
/// vanish on the outermost ring of cells.
double weak_form_residual(const Field& u, std::span<const double> u0, const ForcingPair& forcing,
                          const Field& phi, int t_index, double m);

}  // namespace pmelab
