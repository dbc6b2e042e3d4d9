#include <doctest.h>

#include <cmath>
#include <sstream>

#include "pmelab/cascade.hpp"
#include "pmelab/error.hpp"

using namespace pmelab;

namespace {
Grid line(int nx, double lo, double hi, double t0, double t1, int nt) {
  const Interval ext[] = {{lo, hi}};
  const int n[] = {nx};
  return make_grid(1, ext, n, t0, t1, nt);
}
}  // namespace

TEST_CASE("shrink ratio") {
  CascadeParams p;
  // min{0.75^2, (1/2)(1/3)^{1/4}(1/4)^{1/2}}
  CHECK(p.shrink_ratio(2.0, 0.5) == doctest::Approx(0.25 * std::pow(3.0, -0.25)));
  // Large σ0 makes the first term the binding one: 0.75^{1/0.05} ≈ 0.0032.
  CHECK(p.shrink_ratio(2.0, 0.05) == doctest::Approx(std::pow(0.75, 20.0)));
  p.eta0 = 1.5;
  CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("Hölder fit of exact power laws") {
  std::vector<double> rho;
  std::vector<double> osc;
  for (int j = 0; j < 5; ++j) {
    rho.push_back(std::pow(0.2, j));
    osc.push_back(3.0 * std::pow(rho.back(), 0.7));
  }
  const auto f = holder_fit(rho, osc, 2.0, ForcingNorms{8.0, 8.0, 0.625, 0.0, 0.0, 0.0}, 2.0);
  CHECK(f.sigma == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(f.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(f.bracket == 2.0);
  CHECK(f.C_fit == doctest::Approx(1.5));
  CHECK(f.levels_used == 5);

  const auto flat = holder_fit(rho, std::vector<double>(5, 0.0), 1.0, ForcingNorms{8.0, 8.0, 0.625, 0.0, 0.0, 0.0}, 2.0);
  CHECK(flat.flat);
  CHECK(std::isnan(flat.sigma));
  CHECK(to_json(flat)["sigma"].is_null());

  try {
    holder_fit({1.0, 0.5}, {1.0, 0.5}, 1.0, ForcingNorms{8.0, 8.0, 0.625, 0.0, 0.0, 0.0}, 2.0);
    FAIL("expected insufficient data");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::insufficient_data);
  }
}

TEST_CASE("cascade on the Barenblatt profile") {
  const Grid g = line(600, -3.0, 3.0, 1.0, 2.0, 800);
  const Field u = barenblatt_field(g, {2.0, 1.0, 1, {0.0, 0.0}});
  const auto e = derive_exponents(8.0, 8.0, 1);
  const auto st = oscillation_cascade(u, 2.0, 2.0, {0.6, 0.0}, 0.5, CascadeParams{}, e, {});
  REQUIRE(st.levels.size() >= 2);
  CHECK(st.osc_violations() == 0);
  CHECK(st.nesting_violations() == 0);
  CHECK(st.levels[0].M == doctest::Approx(u.max()));
  CHECK(st.levels[0].omega == st.levels[0].osc);
  for (std::size_t j = 1; j < st.levels.size(); ++j) {
    const auto& a = st.levels[j - 1];
    const auto& b = st.levels[j];
    CHECK(b.rho == doctest::Approx(st.shrink_ratio * a.rho));
    CHECK(b.omega == doctest::Approx(0.75 * a.omega));
    CHECK(b.M == doctest::Approx(std::max(a.mu_plus, b.omega)));
    CHECK(b.pass_rho_cond);
  }
  CHECK_FALSE(st.stop_reason.empty());

  std::istringstream csv(cascade_csv(st));
  std::string line_;
  std::getline(csv, line_);
  CHECK(line_ == "level,rho,omega,M,osc,pass_eq9,pass_rho_cond");
  std::size_t rows = 0;
  while (std::getline(csv, line_)) {
    CHECK(std::count(line_.begin(), line_.end(), ',') == 6);
    ++rows;
  }
  CHECK(rows == st.levels.size());
  const auto j = to_json(st);
  CHECK(j["levels"].size() == st.levels.size());
}

TEST_CASE("cascade rejects a first cylinder outside the grid") {
  const Grid g = line(100, -1.0, 1.0, 0.0, 1.0, 50);
  const Field u = sample_field(g, [](double, const Point& x) { return 1.0 + x[0]; });
  const auto e = derive_exponents(8.0, 8.0, 1);
  CHECK_THROWS_AS(oscillation_cascade(u, 2.0, 1.0, {0.9, 0.0}, 0.5, CascadeParams{}, e, {}), Error);
  const Field zero(g, "zero");
  CHECK_THROWS_AS(oscillation_cascade(zero, 2.0, 1.0, {0.0, 0.0}, 0.5, CascadeParams{}, e, {}), Error);
}
