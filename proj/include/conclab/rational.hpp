#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace conclab {

// Exact fraction for 2-density arithmetic and small exact-probability
// recursions. Numerators and denominators stay tiny here, so int64 with
// gcd normalization is plenty.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n) : num(n), den(1) {}
  Rational(std::int64_t n, std::int64_t d) : num(n), den(d) { normalize(); }

  void normalize() {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const {
    return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
  }

  friend Rational operator+(Rational a, Rational b) {
    return Rational(a.num * b.den + b.num * a.den, a.den * b.den);
  }
  friend Rational operator-(Rational a, Rational b) {
    return Rational(a.num * b.den - b.num * a.den, a.den * b.den);
  }
  friend Rational operator*(Rational a, Rational b) {
    return Rational(a.num * b.num, a.den * b.den);
  }
  friend Rational operator/(Rational a, Rational b) {
    return Rational(a.num * b.den, a.den * b.num);
  }
  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num == b.num && a.den == b.den;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    return a.num * b.den <=> b.num * a.den;
  }
};

}  // namespace conclab
