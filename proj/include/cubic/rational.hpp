#pragma once
// Small exact rationals over __int128, enough for local mass sums.

#include <ostream>
#include <stdexcept>

#include "cubic/arith.hpp"

namespace cubic {

class Rational {
 public:
  Rational(i128 n = 0, i128 d = 1) : num_(n), den_(d) {
    if (d == 0) throw std::domain_error("zero denominator");
    normalize();
  }

  i128 num() const { return num_; }
  i128 den() const { return den_; }
  long double to_ld() const { return static_cast<long double>(num_) / static_cast<long double>(den_); }

  friend Rational operator+(const Rational& x, const Rational& y) {
    i128 g = gcd128(x.den_, y.den_);
    return {x.num_ * (y.den_ / g) + y.num_ * (x.den_ / g), x.den_ / g * y.den_};
  }
  friend Rational operator-(const Rational& x, const Rational& y) { return x + Rational(-y.num_, y.den_); }
  friend Rational operator*(const Rational& x, const Rational& y) {
    i128 g1 = gcd128(x.num_, y.den_), g2 = gcd128(y.num_, x.den_);
    if (g1 == 0) g1 = 1;
    if (g2 == 0) g2 = 1;
    return {(x.num_ / g1) * (y.num_ / g2), (x.den_ / g2) * (y.den_ / g1)};
  }
  friend Rational operator/(const Rational& x, const Rational& y) {
    if (y.num_ == 0) throw std::domain_error("division by zero");
    return x * Rational(y.den_, y.num_);
  }
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  friend bool operator==(const Rational& x, const Rational& y) { return x.num_ == y.num_ && x.den_ == y.den_; }
  friend bool operator<(const Rational& x, const Rational& y) { return x.num_ * y.den_ < y.num_ * x.den_; }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) {
    os << to_string(r.num_);
    if (r.den_ != 1) os << '/' << to_string(r.den_);
    return os;
  }

 private:
  void normalize() {
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    i128 g = gcd128(num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }
  i128 num_, den_;
};

/// p^-k as a rational.
inline Rational inv_power(u64 p, int k) {
  i128 d = 1;
  for (int i = 0; i < k; ++i) d *= p;
  return {1, d};
}

}  // namespace cubic
