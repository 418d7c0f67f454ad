#include "lacuna/dimfn.hpp"

#include "lacuna/bounds.hpp"
#include "lacuna/error.hpp"

namespace lacuna {

namespace {

// Largest dyadic x0 <= 1/2 with s * ln(1/x0) >= 1 certified, i.e. x0 <= e^(-1/s):
// below it x^s * (-ln x) is increasing.
Rational powerlog_cap(const Rational& s) {
  auto increasing_up_to = [&](const Rational& r) {
    return s * bounds::ln(Rational(1 / r), 64).lo >= 1;
  };
  if (increasing_up_to(Rational(1, 2))) return Rational(1, 2);
  unsigned long k = 2;
  while (!increasing_up_to(Rational(1, pow2(k)))) ++k;
  // refine inside [2^-k, 2^-(k-1)) on a grid of 2^-(k+24)
  const Integer base = pow2(24);
  Integer good = base, bad = 2 * base;
  const Integer den = pow2(k + 24);
  while (bad - good > 1) {
    Integer mid = (good + bad) / 2;
    Rational r(mid, den);
    r.canonicalize();
    if (increasing_up_to(r)) good = mid;
    else bad = mid;
  }
  Rational cap(good, den);
  cap.canonicalize();
  return cap;
}

void check_domain(const DimensionFunction& h, const Rational& r) {
  if (sgn(r) <= 0 || r > h.domain_cap()) {
    throw Error(ErrorKind::OutOfDomain,
                "argument " + to_string(r) + " outside (0, " + to_string(h.domain_cap()) + "]");
  }
}

unsigned long exponent_num(const DimensionFunction& h) { return h.exponent().get_num().get_ui(); }
unsigned long exponent_den(const DimensionFunction& h) { return h.exponent().get_den().get_ui(); }

}  // namespace

std::string DimensionFunction::spec() const {
  return std::string(family_ == Family::Power ? "pow:" : "powlog:") + to_string(exponent_);
}

DimensionFunction make_dimfn(Family family, const Rational& exponent, int d) {
  if (d < 1) throw Error(ErrorKind::InvalidArgument, "dimension must be >= 1");
  if (sgn(exponent) <= 0) throw Error(ErrorKind::RejectNonPositive, "exponent must be positive");
  if (!exponent.get_num().fits_ulong_p() || !exponent.get_den().fits_ulong_p()) {
    throw Error(ErrorKind::InvalidArgument, "exponent too large");
  }
  if (family == Family::Power && exponent >= d) {
    throw Error(ErrorKind::RejectNotDominated, "x^" + to_string(exponent) + " is not ≺ x^" + std::to_string(d));
  }
  if (family == Family::PowerLog && exponent > d) {
    throw Error(ErrorKind::RejectNotDominated,
                "x^" + to_string(exponent) + "(-ln x) is not ≺ x^" + std::to_string(d));
  }
  DimensionFunction h;
  h.family_ = family;
  h.exponent_ = exponent;
  h.dimension_ = d;
  h.domain_cap_ = family == Family::Power ? Rational(1) : powerlog_cap(exponent);
  return h;
}

DimensionFunction parse_dimfn(std::string_view spec, int d) {
  auto colon = spec.find(':');
  if (colon == std::string_view::npos) {
    throw Error(ErrorKind::ParseError, "dimension function spec must look like pow:p/q or powlog:p/q");
  }
  std::string_view name = spec.substr(0, colon);
  Rational s = parse_rational(spec.substr(colon + 1));
  if (name == "pow") return make_dimfn(Family::Power, s, d);
  if (name == "powlog") return make_dimfn(Family::PowerLog, s, d);
  throw Error(ErrorKind::ParseError, "unknown dimension function family '" + std::string(name) + "'");
}

Interval eval_bounds(const DimensionFunction& h, const Rational& r, int precision) {
  check_domain(h, r);
  if (precision < 1) throw Error(ErrorKind::InvalidArgument, "precision must be positive");
  const Rational rp = pow(r, static_cast<long>(exponent_num(h)));
  if (h.family() == Family::Power) return bounds::root(rp, exponent_den(h), precision);

  const Rational target(1, pow2(static_cast<unsigned long>(precision + 1)));
  for (int work = precision + 8;; work += 16) {
    const Interval power = bounds::root(rp, exponent_den(h), work);
    const Interval log = bounds::ln(Rational(1 / r), work);
    const Interval v = power * log;
    if (v.width() <= target) {
      return {round_down(v.lo, precision + 2), round_up(v.hi, precision + 2)};
    }
  }
}

bool value_ge(const DimensionFunction& h, const Rational& r, const Rational& threshold) {
  check_domain(h, r);
  if (sgn(threshold) <= 0) return true;
  if (h.family() == Family::Power) {
    // r^(p/q) >= t  <=>  r^p >= t^q
    return pow(r, static_cast<long>(exponent_num(h))) >= pow(threshold, static_cast<long>(exponent_den(h)));
  }
  for (int precision = 32; precision <= kPrecisionCap; precision *= 2) {
    const Interval v = eval_bounds(h, r, precision);
    if (v.lo >= threshold) return true;
    if (v.hi < threshold) return false;
  }
  throw Error(ErrorKind::Undecidable, "h(" + to_string(r) + ") vs " + to_string(threshold));
}

bool ratio_ge(const DimensionFunction& h, const Rational& r, const Rational& threshold) {
  check_domain(h, r);
  if (sgn(threshold) <= 0) return true;
  const long d = h.dimension();
  if (h.family() == Family::Power) {
    // r^(p/q - d) >= t  <=>  r^(p - dq) >= t^q
    const long p = static_cast<long>(exponent_num(h));
    const long q = static_cast<long>(exponent_den(h));
    return pow(r, p - d * q) >= pow(threshold, q);
  }
  const Rational rd = pow(r, d);
  for (int precision = 32; precision <= kPrecisionCap; precision *= 2) {
    const Interval v = eval_bounds(h, r, precision);
    if (v.lo / rd >= threshold) return true;
    if (v.hi / rd < threshold) return false;
  }
  throw Error(ErrorKind::Undecidable, "h(r)/r^d at r = " + to_string(r) + " vs " + to_string(threshold));
}

}  // namespace lacuna
