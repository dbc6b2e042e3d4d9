#include <doctest.h>

#include <cmath>

#include "pmelab/error.hpp"
#include "pmelab/expr.hpp"

using namespace pmelab;

TEST_CASE("arithmetic and precedence") {
  CHECK(Expr::parse("1 + 2 * 3")(0, 0) == 7.0);
  CHECK(Expr::parse("(1 + 2) * 3")(0, 0) == 9.0);
  CHECK(Expr::parse("8 / 4 / 2")(0, 0) == 1.0);
  CHECK(Expr::parse("2 - 3 - 4")(0, 0) == -5.0);
  CHECK(Expr::parse("-2^2")(0, 0) == -4.0);
  CHECK(Expr::parse("2^3^2")(0, 0) == 512.0);
  CHECK(Expr::parse("1.5e2")(0, 0) == 150.0);
}

TEST_CASE("variables and functions") {
  const Expr e = Expr::parse("t * x + pow(y, 2) - abs(x) + exp(0)");
  CHECK(e(2.0, -3.0, 4.0) == -6.0 + 16.0 - 3.0 + 1.0);
  CHECK(Expr::parse("exp(1)")(0, 0) == doctest::Approx(std::exp(1.0)));
  CHECK(Expr::parse(" pow ( x , 0.5 ) ")(0, 9.0) == 3.0);
  CHECK(Expr::parse("x")(0, 1.0) == 1.0);
}

TEST_CASE("syntax errors are config errors") {
  for (const char* bad : {"", "1 +", "(1", "foo(1)", "pow(1)", "1 2", "x $ y", "exp 1"}) {
    INFO(bad);
    try {
      Expr::parse(bad);
      FAIL("expected a parse error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::config_error);
    }
  }
}
