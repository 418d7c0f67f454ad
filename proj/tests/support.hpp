#pragma once

#include <gtest/gtest.h>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "lacuna/dimfn.hpp"
#include "lacuna/engine.hpp"
#include "lacuna/error.hpp"
#include "lacuna/pattern.hpp"
#include "lacuna/rational.hpp"

namespace lacuna::test {

inline Rational q(const char* text) { return parse_rational(text); }

inline LinearPattern ap_pattern() { return LinearPattern(1, 3, {Rational(1), Rational(-2), Rational(1)}); }
inline LinearPattern quotient_pattern(long a = 2) { return LinearPattern(1, 2, {Rational(a), Rational(-1)}); }

inline ConstructionState ap_state(int depth, const char* h = "pow:1/2") {
  ConstructionState s = init(1, {ap_pattern()}, parse_dimfn(h, 1));
  build(s, depth);
  return s;
}

/// The interval meets [ref - eps, ref + eps] for a decimal reference computed
/// independently to 50+ digits.
inline ::testing::AssertionResult encloses(const Interval& iv, const char* ref, const char* eps = "1e-45") {
  const Rational r = parse_rational(ref), e = parse_rational(eps);
  if (iv.lo <= r + e && iv.hi >= r - e) return ::testing::AssertionSuccess();
  return ::testing::AssertionFailure() << "[" << to_decimal(iv.lo, 50) << ", " << to_decimal(iv.hi, 50)
                                       << "] misses " << ref;
}

template <class F>
::testing::AssertionResult throws_kind(F&& f, ErrorKind kind) {
  try {
    f();
  } catch (const Error& e) {
    if (e.kind() == kind) return ::testing::AssertionSuccess();
    return ::testing::AssertionFailure() << "threw " << to_string(e.kind()) << ": " << e.what();
  }
  return ::testing::AssertionFailure() << "no exception, expected " << to_string(kind);
}

/// Hand-rolled generator of small rationals.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  long integer(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng_); }

  Rational rational(long num_bound = 50, long den_bound = 20) {
    Rational r(Integer(integer(-num_bound, num_bound)), Integer(integer(1, den_bound)));
    r.canonicalize();
    return r;
  }

  /// Uniform-ish rational in [lo, hi] on a grid of 1/den.
  Rational in(const Rational& lo, const Rational& hi, long den = 1 << 16) {
    Rational r = lo + (hi - lo) * Rational(Integer(integer(0, den)), Integer(den));
    r.canonicalize();
    return r;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace lacuna::test
