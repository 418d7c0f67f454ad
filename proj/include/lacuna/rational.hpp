#pragma once

// Exact arithmetic primitives shared by every module. Certified paths never
// touch floating point; decimals appear only in convenience exports.

#include <gmpxx.h>

#include <string>
#include <string_view>
#include <vector>

namespace lacuna {

using Integer = mpz_class;
using Rational = mpq_class;
using Point = std::vector<Rational>;

/// Closed interval [lo, hi] with exact rational endpoints.
struct Interval {
  Rational lo;
  Rational hi;

  Rational width() const { return hi - lo; }
  bool contains(const Rational& x) const { return lo <= x && x <= hi; }
  bool exact() const { return lo == hi; }
};

/// Parses "p/q", "p", or a decimal such as "-1.25" or "3e-2". Decimals are
/// read exactly. Throws Error(ParseError).
Rational parse_rational(std::string_view text);

/// Canonical "p/q" rendering; integers keep the "/1" suffix.
std::string to_string(const Rational& x);
std::string to_string(const Integer& x);

/// Decimal rendering rounded half away from zero to `digits` fractional digits.
std::string to_decimal(const Rational& x, int digits);

Integer floor(const Rational& x);
Integer ceil(const Rational& x);
Rational abs(const Rational& x);
int sign(const Rational& x);
Rational pow(const Rational& x, long exponent);
Integer pow(const Integer& x, unsigned long exponent);
Integer pow2(unsigned long exponent);
Integer lcm(const Integer& a, const Integer& b);

/// Largest multiple of 2^-bits that is <= x, and the smallest that is >= x.
Rational round_down(const Rational& x, int bits);
Rational round_up(const Rational& x, int bits);

Interval operator*(const Interval& a, const Interval& b);

}  // namespace lacuna
