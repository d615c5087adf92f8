#include <doctest.h>

#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>

#include "fracspec/rational.hpp"

using fracspec::AffineMap;
using fracspec::Point;
using fracspec::Rational;

TEST_CASE("rationals are stored reduced with a positive denominator") {
  Rational a(6, -4);
  CHECK(a.num() == -3);
  CHECK(a.den() == 2);
  CHECK(Rational(0, 7) == Rational(0));
  CHECK(Rational(0, 7).den() == 1);
  CHECK_THROWS_AS(Rational(1, 0), std::domain_error);
}

TEST_CASE("field operations") {
  Rational a(1, 3), b(1, 6);
  CHECK(a + b == Rational(1, 2));
  CHECK(a - b == Rational(1, 6));
  CHECK(a * b == Rational(1, 18));
  CHECK(a / b == Rational(2));
  CHECK(-a == Rational(-1, 3));
  CHECK(a > b);
  CHECK(Rational(-1, 2) < Rational(1, 3));
  CHECK_THROWS(a / Rational(0));
}

TEST_CASE("text round trip") {
  for (Rational r : {Rational(5), Rational(-7, 3), Rational(1, 1024), Rational(0)}) {
    CHECK(Rational::parse(r.to_string()) == r);
  }
  CHECK(Rational(3, 4).to_string() == "3/4");
  CHECK(Rational(-2).to_string() == "-2");
}

TEST_CASE("overflow throws instead of wrapping") {
  const std::int64_t big = std::numeric_limits<std::int64_t>::max() / 2;
  Rational r(big);
  CHECK_THROWS(r * Rational(big));
  CHECK_NOTHROW(r * Rational(1, big));
}

TEST_CASE("random arithmetic agrees with floating point") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::int64_t> num(-1000, 1000), den(1, 1000);
  for (int i = 0; i < 500; ++i) {
    Rational a(num(rng), den(rng)), b(num(rng), den(rng));
    CHECK((a + b).to_double() == doctest::Approx(a.to_double() + b.to_double()));
    CHECK((a * b).to_double() == doctest::Approx(a.to_double() * b.to_double()));
    CHECK(a + b - b == a);
    CHECK((a < b) == (a.to_double() < b.to_double()));
  }
}

TEST_CASE("affine maps compose and invert exactly") {
  AffineMap half{Rational(1, 2), Rational(0), Rational(0), Rational(1, 2), {Rational(1, 2), Rational(0)}};
  AffineMap rot{Rational(0), Rational(-1), Rational(1), Rational(0), {Rational(3), Rational(1, 4)}};
  Point p{Rational(1, 3), Rational(-5, 8)};
  CHECK(half.compose(rot).apply(p) == half.apply(rot.apply(p)));
  CHECK(half.inverse().apply(half.apply(p)) == p);
  CHECK(rot.compose(rot.inverse()) == AffineMap::identity());
  CHECK(half.determinant() == Rational(1, 4));
}
