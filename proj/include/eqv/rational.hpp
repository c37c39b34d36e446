#ifndef EQV_RATIONAL_HPP
#define EQV_RATIONAL_HPP

#include <cstdint>
#include <numeric>
#include <string>

#include "eqv/error.hpp"

namespace eqv {

namespace checked {

inline std::int64_t add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r))
    throw Error(Errc::arithmetic_overflow, "64-bit overflow in addition");
  return r;
}

inline std::int64_t sub(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_sub_overflow(a, b, &r))
    throw Error(Errc::arithmetic_overflow, "64-bit overflow in subtraction");
  return r;
}

inline std::int64_t mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r))
    throw Error(Errc::arithmetic_overflow, "64-bit overflow in multiplication");
  return r;
}

}  // namespace checked

/// Exact fraction over int64 with overflow detection; always normalized with
/// a positive denominator.
class Rational {
 public:
  Rational(std::int64_t num = 0, std::int64_t den = 1) : num_(num), den_(den) {
    if (den_ == 0)
      throw Error(Errc::internal, "rational with zero denominator");
    normalize();
  }

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }
  bool is_integer() const noexcept { return den_ == 1; }

  friend Rational operator+(const Rational &a, const Rational &b) {
    const std::int64_t g = std::gcd(a.den_, b.den_);
    const std::int64_t l = checked::mul(a.den_ / g, b.den_);
    return {checked::add(checked::mul(a.num_, l / a.den_), checked::mul(b.num_, l / b.den_)), l};
  }
  friend Rational operator-(const Rational &a) { return {checked::sub(0, a.num_), a.den_}; }
  friend Rational operator-(const Rational &a, const Rational &b) { return a + (-b); }
  friend Rational operator*(const Rational &a, const Rational &b) {
    const std::int64_t g1 = std::gcd(a.num_, b.den_);
    const std::int64_t g2 = std::gcd(b.num_, a.den_);
    const std::int64_t d1 = g1 ? g1 : 1;
    const std::int64_t d2 = g2 ? g2 : 1;
    return {checked::mul(a.num_ / d1, b.num_ / d2), checked::mul(a.den_ / d2, b.den_ / d1)};
  }
  friend Rational operator/(const Rational &a, const Rational &b) {
    if (b.num_ == 0)
      throw Error(Errc::internal, "rational division by zero");
    return a * Rational(b.den_, b.num_);
  }
  friend bool operator==(const Rational &a, const Rational &b) = default;

  std::string to_string() const {
    return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
  }

 private:
  void normalize() {
    if (den_ < 0) {
      num_ = checked::sub(0, num_);
      den_ = checked::sub(0, den_);
    }
    const std::int64_t g = std::gcd(num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  std::int64_t num_;
  std::int64_t den_;
};

}  // namespace eqv

#endif  // EQV_RATIONAL_HPP
