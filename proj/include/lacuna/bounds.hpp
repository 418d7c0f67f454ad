#pragma once

// Certified enclosures of elementary functions at rational arguments. Every
// returned interval contains the true value; endpoints are dyadic or exact.

#include "lacuna/rational.hpp"

namespace lacuna::bounds {

/// Enclosure of x^(1/q) for x >= 0 with width <= 2^-bits for x <= 2^q.
/// Exact (lo == hi) whenever numerator and denominator are perfect q-th powers.
Interval root(const Rational& x, unsigned long q, int bits);

/// Enclosure of sqrt(n) for a non-negative integer, width <= 2^-bits.
Interval sqrt(const Integer& n, int bits);

/// ln(2) enclosure with width <= 2^-bits.
Interval ln2(int bits);

/// ln(y) for y > 0 with width <= 2^-bits.
Interval ln(const Rational& y, int bits);

/// exp(x) with relative width <= 2^-bits (absolute when exp(x) <= 1).
Interval exp(const Rational& x, int bits);

/// log2(y) for y > 0, width <= 2^-bits.
Interval log2(const Rational& y, int bits);

}  // namespace lacuna::bounds
