#include <catch2/catch_amalgamated.hpp>

#include "corepo/rational.hpp"

using namespace corepo;

TEST_CASE("rationals normalize sign and reduce", "[rational]") {
  CHECK(Rational(2, 4) == Rational(1, 2));
  CHECK(Rational(-2, 4) == Rational(-1, 2));
  CHECK(Rational(2, -4) == Rational(-1, 2));
  CHECK(Rational(-2, -4) == Rational(1, 2));
  CHECK(Rational(0, 7) == Rational(0));
  CHECK(Rational(2, 4).den() == 2);
}

TEST_CASE("rational arithmetic is exact", "[rational]") {
  Rational a(1, 3);
  Rational b(1, 6);
  CHECK(a + b == Rational(1, 2));
  CHECK(a - b == Rational(1, 6));
  CHECK(a * b == Rational(1, 18));
  CHECK(a / b == Rational(2));
  // (4 + 8) * (6 - 4) evaluates to 24 exactly.
  CHECK((Rational(4) + Rational(8)) * (Rational(6) - Rational(4)) == Rational(24));
}

TEST_CASE("rational division by zero throws a distinct type", "[rational]") {
  CHECK_THROWS_AS(Rational(1) / Rational(0), rational_divzero);
  CHECK_THROWS_AS(Rational(1, 0), rational_divzero);
}

TEST_CASE("rational overflow is detected", "[rational]") {
  Rational big(INT64_MAX);
  CHECK_THROWS_AS(big * big, rational_overflow);
  CHECK_THROWS_AS(big + Rational(1), rational_overflow);
  // Reduction can keep a product representable.
  CHECK(Rational(INT64_MAX, 2) * Rational(2, INT64_MAX) == Rational(1));
}

TEST_CASE("parse_rational handles integers, decimals, fractions", "[rational]") {
  CHECK(parse_rational("42") == Rational(42));
  CHECK(parse_rational("-42") == Rational(-42));
  CHECK(parse_rational("+7") == Rational(7));
  CHECK(parse_rational("2.50") == Rational(5, 2));
  CHECK(parse_rational("-0.125") == Rational(-1, 8));
  CHECK(parse_rational(".5") == Rational(1, 2));
  CHECK(parse_rational("3.") == Rational(3));
  CHECK(parse_rational("3/4") == Rational(3, 4));
  CHECK(parse_rational("-3/4") == Rational(-3, 4));
  CHECK(parse_rational("6/4") == Rational(3, 2));
}

TEST_CASE("parse_rational rejects malformed text", "[rational]") {
  CHECK_THROWS_AS(parse_rational(""), Error);
  CHECK_THROWS_AS(parse_rational("abc"), Error);
  CHECK_THROWS_AS(parse_rational("1.2.3"), Error);
  CHECK_THROWS_AS(parse_rational("1/2/3"), Error);
  CHECK_THROWS_AS(parse_rational("1e5"), Error);
  CHECK_THROWS_AS(parse_rational("."), Error);
  CHECK_THROWS_AS(parse_rational("1/0"), rational_divzero);
}

TEST_CASE("canonical strings are n or n/d", "[rational]") {
  CHECK(Rational(42).str() == "42");
  CHECK(Rational(-3, 6).str() == "-1/2");
  CHECK(Rational(5, 2).str() == "5/2");
  CHECK(Rational(0).str() == "0");
}
