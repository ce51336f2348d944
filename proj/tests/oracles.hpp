#pragma once

// Test-only oracles, independent of the library's numerical paths: exact
// rational arithmetic, exact polynomial integration on the unit square, and
// closed-form cubic roots.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

class Rational {
 public:
  Rational(std::int64_t n = 0, std::int64_t d = 1) : num_(n), den_(d) {
    if (d == 0) throw std::domain_error("zero denominator");
    normalize();
  }
  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  friend Rational operator+(Rational a, Rational b) { return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_}; }
  friend Rational operator-(Rational a, Rational b) { return {a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_}; }
  friend Rational operator*(Rational a, Rational b) { return {a.num_ * b.num_, a.den_ * b.den_}; }
  friend Rational operator/(Rational a, Rational b) { return {a.num_ * b.den_, a.den_ * b.num_}; }
  friend bool operator==(Rational a, Rational b) { return a.num_ == b.num_ && a.den_ == b.den_; }
  friend bool operator<(Rational a, Rational b) { return a.num_ * b.den_ < b.num_ * a.den_; }
  Rational& operator+=(Rational b) { return *this = *this + b; }

 private:
  void normalize() {
    if (den_ < 0) num_ = -num_, den_ = -den_;
    auto g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) num_ /= g, den_ /= g;
  }
  std::int64_t num_, den_;
};

/// Univariate polynomial, coefficient i multiplies x^i.
using Poly = std::vector<Rational>;

/// Bivariate polynomial in (u, v): (i, j) -> coefficient of u^i v^j.
using Poly2 = std::map<std::pair<int, int>, Rational>;

inline Poly2 in_u(const Poly& p) {
  Poly2 out;
  for (std::size_t i = 0; i < p.size(); ++i) out[{static_cast<int>(i), 0}] += p[i];
  return out;
}

inline Poly2 in_v(const Poly& p) {
  Poly2 out;
  for (std::size_t i = 0; i < p.size(); ++i) out[{0, static_cast<int>(i)}] += p[i];
  return out;
}

inline Poly2 operator*(const Poly2& a, const Poly2& b) {
  Poly2 out;
  for (const auto& [ea, ca] : a)
    for (const auto& [eb, cb] : b) out[{ea.first + eb.first, ea.second + eb.second}] += ca * cb;
  return out;
}

inline Poly2 operator+(Poly2 a, const Poly2& b) {
  for (const auto& [e, c] : b) a[e] += c;
  return a;
}

/// ∫∫_[0,1]^2 p(u,v) du dv, exactly.
inline Rational integrate_unit_square(const Poly2& p) {
  Rational sum;
  for (const auto& [e, c] : p) sum += c / Rational((e.first + 1) * (e.second + 1));
  return sum;
}

inline Rational eval(const std::vector<Rational>& coeffs_high_first, Rational x) {
  Rational acc;
  for (const auto& c : coeffs_high_first) acc = acc * x + c;
  return acc;
}

/// Real roots of a x^3 + b x^2 + c x + d (a != 0) by the trigonometric /
/// Cardano formulas, ascending.
inline std::vector<double> cubic_real_roots(double a, double b, double c, double d) {
  const double p = (3 * a * c - b * b) / (3 * a * a);
  const double q = (2 * b * b * b - 9 * a * b * c + 27 * a * a * d) / (27 * a * a * a);
  const double shift = -b / (3 * a);
  std::vector<double> roots;
  const double disc = q * q / 4 + p * p * p / 27;
  if (disc > 0) {
    const double s = std::sqrt(disc);
    roots.push_back(std::cbrt(-q / 2 + s) + std::cbrt(-q / 2 - s) + shift);
  } else {
    const double r = std::sqrt(-p / 3);
    const double arg = std::clamp(3 * q / (2 * p) * std::sqrt(-3 / p), -1.0, 1.0);
    const double phi = std::acos(arg) / 3;
    for (int k = 0; k < 3; ++k) roots.push_back(2 * r * std::cos(phi - 2 * std::numbers::pi * k / 3) + shift);
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

}  // namespace oracle
