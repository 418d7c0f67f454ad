#pragma once

// Dimension functions (gauges) h with h ≺ x^d, restricted to two parametric
// families whose ratio h(r)/r^d is provably non-increasing:
//
//   Power(s):    h(x) = x^s,          0 < s < d
//   PowerLog(s): h(x) = x^s * (-ln x), 0 < s <= d
//
// All evaluation is certified: results are exact or carry rational bounds.

#include <string>
#include <string_view>

#include "lacuna/rational.hpp"

namespace lacuna {

enum class Family { Power, PowerLog };

class DimensionFunction {
 public:
  Family family() const { return family_; }
  const Rational& exponent() const { return exponent_; }
  int dimension() const { return dimension_; }
  /// h is positive and strictly increasing on (0, domain_cap], and the ratio
  /// h(r)/r^d is non-increasing there.
  const Rational& domain_cap() const { return domain_cap_; }

  /// "pow:p/q" or "powlog:p/q".
  std::string spec() const;

  friend bool operator==(const DimensionFunction&, const DimensionFunction&) = default;

 private:
  friend DimensionFunction make_dimfn(Family, const Rational&, int);

  Family family_ = Family::Power;
  Rational exponent_;
  int dimension_ = 1;
  Rational domain_cap_;
};

/// Throws RejectNonPositive for s <= 0, RejectNotDominated when h ⊀ x^d.
DimensionFunction make_dimfn(Family family, const Rational& exponent, int d);

/// Parses "pow:p/q" / "powlog:p/q" (the exponent may be any rational literal).
DimensionFunction parse_dimfn(std::string_view spec, int d);

/// lo <= h(r) <= hi with hi - lo <= 2^-precision. Throws OutOfDomain unless
/// 0 < r <= domain_cap.
Interval eval_bounds(const DimensionFunction& h, const Rational& r, int precision);

/// Certified h(r) >= threshold. Exact for Power; PowerLog raises precision up
/// to an internal cap and then throws Undecidable.
bool value_ge(const DimensionFunction& h, const Rational& r, const Rational& threshold);

/// Certified h(r)/r^d >= threshold, same decision semantics as value_ge.
bool ratio_ge(const DimensionFunction& h, const Rational& r, const Rational& threshold);

/// Maximum working precision (bits) used by the PowerLog decision loops.
inline constexpr int kPrecisionCap = 2048;

}  // namespace lacuna
