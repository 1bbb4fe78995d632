#include "bellmem/rational.hpp"

#include "bellmem/errors.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

namespace bellmem {

std::string to_string(const Rational& value) {
  return numerator(value).str() + "/" + denominator(value).str();
}

double to_double(const Rational& value) { return value.convert_to<double>(); }

namespace {

bool all_digits(std::string_view text) {
  if (text.empty()) return false;
  for (char c : text) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

BigInt parse_integer(std::string_view text, std::string_view whole) {
  bool negative = false;
  if (!text.empty() && (text.front() == '+' || text.front() == '-')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  if (!all_digits(text)) {
    throw InputError("malformed rational '" + std::string(whole) + "'");
  }
  BigInt value{std::string(text)};
  return negative ? BigInt(-value) : value;
}

BigInt pow10(unsigned exponent) {
  BigInt result = 1;
  for (unsigned i = 0; i < exponent; ++i) result *= 10;
  return result;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const std::string_view whole = text;
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw InputError("empty rational");

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    BigInt num = parse_integer(text.substr(0, slash), whole);
    BigInt den = parse_integer(text.substr(slash + 1), whole);
    if (den == 0) throw InputError("zero denominator in '" + std::string(whole) + "'");
    return Rational(num, den);
  }

  bool negative = false;
  if (text.front() == '+' || text.front() == '-') {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  long exponent = 0;
  if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_text = text.substr(e + 1);
    BigInt exp_value = parse_integer(exp_text, whole);
    if (abs(exp_value) > 400) throw InputError("exponent out of range in '" + std::string(whole) + "'");
    exponent = exp_value.convert_to<long>();
    text = text.substr(0, e);
  }
  std::string digits;
  long frac_digits = 0;
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view int_part = text.substr(0, dot);
    std::string_view frac_part = text.substr(dot + 1);
    if ((!int_part.empty() && !all_digits(int_part)) || (!frac_part.empty() && !all_digits(frac_part)) ||
        (int_part.empty() && frac_part.empty())) {
      throw InputError("malformed rational '" + std::string(whole) + "'");
    }
    digits = std::string(int_part) + std::string(frac_part);
    frac_digits = static_cast<long>(frac_part.size());
  } else {
    if (!all_digits(text)) throw InputError("malformed rational '" + std::string(whole) + "'");
    digits = std::string(text);
  }
  Rational value{BigInt(digits)};
  long scale = exponent - frac_digits;
  if (scale > 0) value *= pow10(static_cast<unsigned>(scale));
  if (scale < 0) value /= pow10(static_cast<unsigned>(-scale));
  return negative ? Rational(-value) : value;
}

double Sqrt2Number::to_double() const {
  return bellmem::to_double(rational) + bellmem::to_double(radical) * std::sqrt(2.0);
}

std::string Sqrt2Number::to_string() const {
  return bellmem::to_string(rational) + " + " + bellmem::to_string(radical) + "*sqrt(2)";
}

}  // namespace bellmem
