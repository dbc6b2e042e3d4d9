#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pmelab/cascade.hpp"
#include "pmelab/expr.hpp"
#include "pmelab/grid.hpp"
#include "pmelab/solver.hpp"

namespace pmelab {

enum class Scenario { barenblatt, custom_initial, forced };

struct Anchor {
  double t0 = 0.0;
  Point x0{0.0, 0.0};
};

/// Either analytic expressions or CSV fields (same grid as the run).
struct FieldSource {
  std::optional<Expr> expr;
  std::optional<std::filesystem::path> csv;
};

struct ExperimentConfig {
  Scenario scenario = Scenario::barenblatt;
  Grid grid;
  SolverConfig solver;

  BarenblattParams barenblatt;  // barenblatt scenario
  FieldSource initial;          // custom-initial and forced scenarios
  std::vector<FieldSource> forcing_f;
  std::optional<FieldSource> forcing_g;

  std::vector<Anchor> anchors;
  int random_anchors = 0;
  double rho0 = 0.5;
  CascadeParams cascade;
  double p = 8.0;
  double q = 8.0;
  bool analyze_um = false;  // analyze u^m instead of u
  int caccioppoli_draws = 8;
  double oracle_tolerance = 0.05;  // barenblatt scenario, relative ℓ∞ error

  std::filesystem::path output_dir = "pmelab_out";
  int checkpoint_stride = 10;
  std::uint64_t seed = 1;
};

/// Validates every field; failures are config-error (or the hypothesis
/// violation raised for inadmissible exponents) with the JSON path of the
/// offending entry. Relative CSV paths resolve against `base_dir`.
ExperimentConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = ".");
ExperimentConfig load_config(const std::filesystem::path& path);

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct RunSummary {
  std::vector<Check> checks;
  std::filesystem::path output_dir;
  bool ok() const;
};

/// Solve, then analyze every anchor: cascade, Hölder fit, Caccioppoli
/// draws. Writes checkpoints/, norms.json, cascade_<i>.json/.csv,
/// holder_fit.json, verification.json and summary.json. `log` may be null.
RunSummary run_experiment(const ExperimentConfig& config, std::ostream* log = nullptr);

}  // namespace pmelab
