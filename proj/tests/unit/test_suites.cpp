#include <doctest.h>

#include "pmelab/error.hpp"
#include "pmelab/suites.hpp"

using namespace pmelab;

TEST_CASE("property suites pass") {
  for (const char* s : {"lemma9", "norms", "appendix", "degiorgi"}) {
    const auto r = run_suite(s);
    INFO(s);
    CHECK(r.ok());
    CHECK(r.passed > 0);
    const auto j = to_json(r);
    CHECK(j["suite"] == s);
    CHECK(j["failed"] == 0);
  }
}

TEST_CASE("lemma9 suite reports its headline checks") {
  const auto r = run_suite("lemma9");
  int draws = 0;
  for (const auto& rep : r.reports)
    if (rep.check == "lemma9.random_draws") {
      draws = static_cast<int>(rep.lhs);
      CHECK(rep.pass);
    }
  CHECK(draws == 200);
}

TEST_CASE("suites are deterministic and seeded") {
  CHECK(to_json(run_suite("degiorgi", 5)) == to_json(run_suite("degiorgi", 5)));
  const auto all = run_suite("all");
  CHECK(all.passed == run_suite("lemma9").passed + run_suite("norms").passed + run_suite("appendix").passed +
                          run_suite("degiorgi").passed);
}

TEST_CASE("unknown suite") { CHECK_THROWS_AS(run_suite("nope"), Error); }
