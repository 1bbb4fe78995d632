#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>

namespace bellmem {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Canonical "p/q" form, always with an explicit denominator ("3/1").
std::string to_string(const Rational& value);

double to_double(const Rational& value);

/// Parses "p/q", an integer, or a decimal literal ("0.25", "-1.5e-3") into an
/// exact rational. Decimal literals are read digit by digit, so "0.1" is
/// exactly 1/10. Throws InputError on malformed text or a zero denominator.
Rational parse_rational(std::string_view text);

/// Exact element of Q(sqrt 2): rational + radical * sqrt(2).
struct Sqrt2Number {
  Rational rational{0};
  Rational radical{0};

  friend Sqrt2Number operator+(const Sqrt2Number& lhs, const Sqrt2Number& rhs) {
    return {lhs.rational + rhs.rational, lhs.radical + rhs.radical};
  }
  friend Sqrt2Number operator-(const Sqrt2Number& lhs, const Sqrt2Number& rhs) {
    return {lhs.rational - rhs.rational, lhs.radical - rhs.radical};
  }
  friend Sqrt2Number operator*(const Sqrt2Number& lhs, const Sqrt2Number& rhs) {
    return {lhs.rational * rhs.rational + 2 * lhs.radical * rhs.radical,
            lhs.rational * rhs.radical + lhs.radical * rhs.rational};
  }
  friend bool operator==(const Sqrt2Number& lhs, const Sqrt2Number& rhs) {
    return lhs.rational == rhs.rational && lhs.radical == rhs.radical;
  }

  double to_double() const;
  /// "a + b*sqrt(2)" with both coefficients in p/q form.
  std::string to_string() const;
};

}  // namespace bellmem
