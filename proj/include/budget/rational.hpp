#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <string_view>

namespace budget {

// Exact rationals. GMP keeps every value in lowest terms with a positive
// denominator once canonicalized, and all arithmetic results are canonical.
using Rational = mpq_class;

/// Raised for malformed user input (numbers, documents, dimensions).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Parses "0.4", "-2.5e-3", "7" or "2/5" into an exact rational.
Rational parse_rational(std::string_view text);

/// "2/5", "1", "0"
std::string to_fraction(const Rational& value);

/// Decimal rendering with the given number of significant digits.
std::string to_decimal(const Rational& value, int significant_digits = 12);

inline Rational make_rational(long numerator, long denominator = 1) {
  Rational r(numerator, denominator);
  r.canonicalize();
  return r;
}

inline Rational abs_diff(const Rational& a, const Rational& b) {
  return a < b ? Rational(b - a) : Rational(a - b);
}

/// Median of three values.
inline const Rational& median3(const Rational& a, const Rational& b, const Rational& c) {
  if (a < b) {
    if (b < c) return b;
    return a < c ? c : a;
  }
  if (a < c) return a;
  return b < c ? c : b;
}

}  // namespace budget
