#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "pmelab/geometry.hpp"
#include "pmelab/random.hpp"
#include "pmelab/verify.hpp"

namespace pmelab {

struct SuiteResult {
  std::string name;
  int passed = 0;
  int failed = 0;
  /// Headline checks plus every failing check.
  std::vector<VerificationReport> reports;
  bool ok() const { return failed == 0; }
};

/// Property suites behind `pmelab verify`: "lemma9", "norms", "appendix",
/// "degiorgi", or "all" (every one of them).
SuiteResult run_suite(const std::string& name, std::uint64_t seed = 20240601);

nlohmann::json to_json(const SuiteResult& r);

/// Two-valued field on a 1D grid: on each time slice a share s(t) of the
/// ball sits at μ⁻ and the rest at μ⁺ = μ⁻ + ω, with s decreasing in time
/// and an overall sublevel share above θ0 (the second alternative).
struct TwoValuedCase {
  Field field;
  Cylinder cyl;
  OscStats stats;
  double theta0 = 0.5;
  double theta = 0.25;
};

TwoValuedCase two_valued_case(Rng& rng);

}  // namespace pmelab
