#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>

namespace fracspec {

// Exact rational with 64-bit numerator and positive denominator, always reduced.
// Intermediate products use 128-bit arithmetic; results that do not fit throw.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num);  // NOLINT(google-explicit-constructor)
  Rational(std::int64_t num, std::int64_t den);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  // "p/q", or "p" when the denominator is 1.
  std::string to_string() const;
  static Rational parse(const std::string& text);

  Rational operator-() const;
  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }

  friend bool operator==(const Rational& a, const Rational& b) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

 private:
  static Rational from_wide(__int128 num, __int128 den);
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

struct Point {
  Rational x;
  Rational y;
  friend bool operator==(const Point&, const Point&) = default;
  friend auto operator<=>(const Point&, const Point&) = default;
};

struct PointHash {
  std::size_t operator()(const Point& p) const noexcept;
};

// x -> A x + t with exact rational entries.
struct AffineMap {
  Rational a11{1}, a12{0}, a21{0}, a22{1};
  Point t{};

  Point apply(const Point& p) const;
  // (*this) o inner
  AffineMap compose(const AffineMap& inner) const;
  AffineMap inverse() const;
  Rational determinant() const { return a11 * a22 - a12 * a21; }

  static AffineMap identity() { return {}; }
  friend bool operator==(const AffineMap&, const AffineMap&) = default;
};

}  // namespace fracspec
