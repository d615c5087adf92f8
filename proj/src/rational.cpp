#include "fracspec/rational.hpp"

#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace fracspec {

namespace {

__int128 gcd128(__int128 a, __int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    __int128 r = a % b;
    a = b;
    b = r;
  }
  return a;
}

}  // namespace

Rational::Rational(std::int64_t num) : num_(num), den_(1) {}

Rational::Rational(std::int64_t num, std::int64_t den) {
  *this = from_wide(num, den);
}

Rational Rational::from_wide(__int128 num, __int128 den) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  __int128 g = gcd128(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  constexpr auto lo = std::numeric_limits<std::int64_t>::min();
  constexpr auto hi = std::numeric_limits<std::int64_t>::max();
  if (num < lo || num > hi || den > hi) throw std::overflow_error("rational overflow");
  Rational r;
  r.num_ = static_cast<std::int64_t>(num);
  r.den_ = static_cast<std::int64_t>(den);
  return r;
}

std::string Rational::to_string() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::parse(const std::string& text) {
  auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return Rational(std::stoll(text));
    return Rational(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
  } catch (const std::logic_error&) {
    throw std::invalid_argument("malformed rational: '" + text + "'");
  }
}

Rational Rational::operator-() const { return from_wide(-static_cast<__int128>(num_), den_); }

Rational operator+(const Rational& a, const Rational& b) {
  if (a.den_ == b.den_) return Rational::from_wide(static_cast<__int128>(a.num_) + b.num_, a.den_);
  return Rational::from_wide(static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_,
                             static_cast<__int128>(a.den_) * b.den_);
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b) {
  return Rational::from_wide(static_cast<__int128>(a.num_) * b.num_, static_cast<__int128>(a.den_) * b.den_);
}

Rational operator/(const Rational& a, const Rational& b) {
  return Rational::from_wide(static_cast<__int128>(a.num_) * b.den_, static_cast<__int128>(a.den_) * b.num_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  return static_cast<__int128>(a.num_) * b.den_ <=> static_cast<__int128>(b.num_) * a.den_;
}

std::size_t PointHash::operator()(const Point& p) const noexcept {
  std::size_t h = std::hash<std::int64_t>{}(p.x.num());
  auto mix = [&h](std::int64_t v) {
    h ^= std::hash<std::int64_t>{}(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  };
  mix(p.x.den());
  mix(p.y.num());
  mix(p.y.den());
  return h;
}

Point AffineMap::apply(const Point& p) const {
  return {a11 * p.x + a12 * p.y + t.x, a21 * p.x + a22 * p.y + t.y};
}

AffineMap AffineMap::compose(const AffineMap& in) const {
  AffineMap r;
  r.a11 = a11 * in.a11 + a12 * in.a21;
  r.a12 = a11 * in.a12 + a12 * in.a22;
  r.a21 = a21 * in.a11 + a22 * in.a21;
  r.a22 = a21 * in.a12 + a22 * in.a22;
  r.t = apply(in.t);
  return r;
}

AffineMap AffineMap::inverse() const {
  Rational det = determinant();
  if (det == Rational(0)) throw std::domain_error("singular affine map");
  AffineMap r;
  r.a11 = a22 / det;
  r.a12 = -a12 / det;
  r.a21 = -a21 / det;
  r.a22 = a11 / det;
  r.t = {-(r.a11 * t.x + r.a12 * t.y), -(r.a21 * t.x + r.a22 * t.y)};
  return r;
}

}  // namespace fracspec
