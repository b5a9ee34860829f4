#pragma once

#include <compare>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace coingame {

/// Exact rational number in canonical form (reduced, positive denominator).
///
/// Backed by GMP so that products of large powers and rewards never
/// overflow. Every game quantity (powers, rewards, RPUs, payoffs) is a
/// Rational; there is no floating point anywhere in the model.
class Rational {
 public:
  Rational() = default;
  Rational(long value) : value_(value) {}  // NOLINT: integers promote freely
  Rational(long numerator, long denominator);
  explicit Rational(mpq_class value);

  /// Accepts "n", "-n", "n/d" with decimal digits; throws std::invalid_argument.
  static Rational parse(std::string_view text);

  /// Always "num/den", e.g. "2/1", "-1/3".
  std::string to_string() const;

  int sign() const { return sgn(value_); }
  bool is_zero() const { return sign() == 0; }
  bool is_integer() const;
  const mpq_class& raw() const { return value_; }

  Rational& operator+=(const Rational& other);
  Rational& operator-=(const Rational& other);
  Rational& operator*=(const Rational& other);
  Rational& operator/=(const Rational& other);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend Rational operator-(const Rational& a) { return Rational(mpq_class(-a.value_)); }

  friend bool operator==(const Rational& a, const Rational& b) {
    return cmp(a.value_, b.value_) == 0;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const int c = cmp(a.value_, b.value_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) {
    return os << r.to_string();
  }

 private:
  mpq_class value_;
};

/// A Rational or +infinity. +infinity is the RPU of a coin nobody mines.
class ExtendedRational {
 public:
  ExtendedRational(Rational value) : value_(std::move(value)) {}  // NOLINT
  static ExtendedRational infinity() { return ExtendedRational(); }

  bool is_infinite() const { return !value_.has_value(); }
  /// Throws std::logic_error when infinite.
  const Rational& value() const;

  /// "inf" or "num/den".
  std::string to_string() const;

  friend bool operator==(const ExtendedRational& a, const ExtendedRational& b) {
    return a.value_ == b.value_;
  }
  friend std::strong_ordering operator<=>(const ExtendedRational& a,
                                          const ExtendedRational& b) {
    if (a.is_infinite() || b.is_infinite()) {
      return static_cast<int>(a.is_infinite()) <=> static_cast<int>(b.is_infinite());
    }
    return *a.value_ <=> *b.value_;
  }

  friend std::ostream& operator<<(std::ostream& os, const ExtendedRational& r) {
    return os << r.to_string();
  }

 private:
  ExtendedRational() = default;
  std::optional<Rational> value_;
};

}  // namespace coingame
