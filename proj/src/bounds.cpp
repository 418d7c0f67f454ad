#include "lacuna/bounds.hpp"

#include "lacuna/error.hpp"

namespace lacuna::bounds {

namespace {

long bit_length(const Integer& n) {
  return n == 0 ? 0 : static_cast<long>(mpz_sizeinbase(n.get_mpz_t(), 2));
}

// Enclosure of 2*atanh(u) = ln((1+u)/(1-u)) for 0 <= u <= 1/3.
Interval two_atanh(const Rational& u, int bits) {
  const int guard = bits + 24;
  const Rational u2 = u * u;
  const Rational tail_factor = 1 / (1 - u2);
  Rational sum_lo = 0, sum_hi = 0;
  Rational pow_lo = u, pow_hi = u;  // enclosure of u^(2k+1)
  for (long k = 0;; ++k) {
    sum_lo += round_down(pow_lo / (2 * k + 1), guard);
    sum_hi += round_up(pow_hi / (2 * k + 1), guard);
    pow_lo = round_down(pow_lo * u2, guard);
    pow_hi = round_up(pow_hi * u2, guard);
    // sum_{j>k} u^(2j+1)/(2j+1) <= u^(2k+3) / ((2k+3)(1-u^2))
    Rational tail = pow_hi * tail_factor / (2 * k + 3);
    if (tail <= Rational(1, pow2(static_cast<unsigned long>(bits + 4)))) {
      sum_hi += tail;
      break;
    }
  }
  return {round_down(2 * sum_lo, bits + 2), round_up(2 * sum_hi, bits + 2)};
}

}  // namespace

Interval root(const Rational& x, unsigned long q, int bits) {
  if (sgn(x) < 0) throw Error(ErrorKind::OutOfDomain, "root of a negative number");
  if (q == 0) throw Error(ErrorKind::InvalidArgument, "zeroth root");
  if (x == 0) return {Rational(0), Rational(0)};
  Integer rn, rd;
  const bool num_exact = mpz_root(rn.get_mpz_t(), x.get_num_mpz_t(), q) != 0;
  const bool den_exact = mpz_root(rd.get_mpz_t(), x.get_den_mpz_t(), q) != 0;
  if (num_exact && den_exact) {
    Rational r(rn, rd);
    r.canonicalize();
    return {r, r};
  }
  const Integer scale = pow2(static_cast<unsigned long>(bits));
  Integer scaled = x.get_num() * pow(scale, q);
  mpz_fdiv_q(scaled.get_mpz_t(), scaled.get_mpz_t(), x.get_den_mpz_t());
  Integer t;
  mpz_root(t.get_mpz_t(), scaled.get_mpz_t(), q);
  Rational lo(t, scale), hi(Integer(t + 1), scale);
  lo.canonicalize();
  hi.canonicalize();
  return {lo, hi};
}

Interval sqrt(const Integer& n, int bits) { return root(Rational(n), 2, bits); }

Interval ln2(int bits) { return two_atanh(Rational(1, 3), bits); }

Interval ln(const Rational& y, int bits) {
  if (sgn(y) <= 0) throw Error(ErrorKind::OutOfDomain, "logarithm of a non-positive number");
  if (y == 1) return {Rational(0), Rational(0)};
  if (y < 1) {
    Interval r = ln(Rational(1 / y), bits);
    return {Rational(-r.hi), Rational(-r.lo)};
  }
  long e = bit_length(y.get_num()) - bit_length(y.get_den());
  auto scaled = [&](long shift) {
    Rational m = y;
    if (shift >= 0) m /= pow2(static_cast<unsigned long>(shift));
    else m *= pow2(static_cast<unsigned long>(-shift));
    return m;
  };
  Rational m = scaled(e);
  while (m < 1) m = scaled(--e);
  while (m >= 2) m = scaled(++e);

  const int guard = bits + 8 + static_cast<int>(bit_length(Integer(e)));
  const Rational m_lo = round_down(m, guard);
  const Rational m_hi = round_up(m, guard);
  const Interval lm_lo = two_atanh(Rational((m_lo - 1) / (m_lo + 1)), guard);
  const Interval lm_hi = two_atanh(Rational((m_hi - 1) / (m_hi + 1)), guard);
  const Interval l2 = ln2(guard);
  Rational lo = e * l2.lo + lm_lo.lo;
  Rational hi = e * l2.hi + lm_hi.hi;
  return {round_down(lo, bits + 1), round_up(hi, bits + 1)};
}

Interval exp(const Rational& x, int bits) {
  if (x == 0) return {Rational(1), Rational(1)};
  if (sgn(x) < 0) {
    Interval e = exp(Rational(-x), bits + 4);
    return {round_down(Rational(1 / e.hi), bits + 2), round_up(Rational(1 / e.lo), bits + 2)};
  }
  long halvings = 0;
  Rational y = x;
  while (y > Rational(1, 2)) {
    y /= 2;
    ++halvings;
  }
  const int guard = bits + static_cast<int>(halvings) + 2 * static_cast<int>(bit_length(ceil(x))) + 16;
  Rational sum_lo = 1, sum_hi = 1;
  Rational term = 1;
  for (long k = 1;; ++k) {
    term = term * y / k;
    sum_lo += round_down(term, guard + 8);
    sum_hi += round_up(term, guard + 8);
    // remaining tail <= 2 * next term since y <= 1/2
    Rational next = term * y / (k + 1);
    if (next <= Rational(1, pow2(static_cast<unsigned long>(guard + 2)))) {
      sum_hi += 2 * next;
      break;
    }
  }
  for (long i = 0; i < halvings; ++i) {
    sum_lo = round_down(sum_lo * sum_lo, guard);
    sum_hi = round_up(sum_hi * sum_hi, guard);
  }
  return {sum_lo, sum_hi};
}

Interval log2(const Rational& y, int bits) {
  if (sgn(y) <= 0) throw Error(ErrorKind::OutOfDomain, "logarithm of a non-positive number");
  // exact for powers of two
  const Integer& num = y.get_num();
  const Integer& den = y.get_den();
  if (mpz_popcount(num.get_mpz_t()) == 1 && mpz_popcount(den.get_mpz_t()) == 1) {
    Rational k(bit_length(num) - bit_length(den));
    return {k, k};
  }
  for (int work = bits + 8;; work += 32) {
    const Interval l = ln(y, work);
    const Interval t = ln2(work);
    Interval r;
    if (sgn(l.lo) >= 0) r = {l.lo / t.hi, l.hi / t.lo};
    else if (sgn(l.hi) <= 0) r = {l.lo / t.lo, l.hi / t.hi};
    else r = {l.lo / t.lo, l.hi / t.lo};
    r = {round_down(r.lo, bits + 2), round_up(r.hi, bits + 2)};
    if (r.width() <= Rational(1, pow2(static_cast<unsigned long>(bits)))) return r;
  }
}

}  // namespace lacuna::bounds
