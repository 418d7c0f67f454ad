#include "lacuna/rational.hpp"

#include <algorithm>
#include <cctype>

#include "lacuna/error.hpp"

namespace lacuna {

namespace {

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

Integer parse_integer(std::string_view s, std::string_view whole) {
  bool negative = false;
  if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (!all_digits(s)) {
    throw Error(ErrorKind::ParseError, "not a rational: '" + std::string(whole) + "'");
  }
  Integer value(std::string(s), 10);
  return negative ? Integer(-value) : value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const std::string_view whole = text;
  text = trim(text);
  if (text.empty()) throw Error(ErrorKind::ParseError, "empty rational");

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Integer num = parse_integer(trim(text.substr(0, slash)), whole);
    Integer den = parse_integer(trim(text.substr(slash + 1)), whole);
    if (den == 0) throw Error(ErrorKind::ParseError, "zero denominator: '" + std::string(whole) + "'");
    Rational q(num, den);
    q.canonicalize();
    return q;
  }

  // decimal with optional exponent
  long exponent = 0;
  if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    exponent = parse_integer(text.substr(e + 1), whole).get_si();
    text = text.substr(0, e);
  }
  bool negative = false;
  if (!text.empty() && (text.front() == '+' || text.front() == '-')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  std::string digits;
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view ip = text.substr(0, dot), fp = text.substr(dot + 1);
    if ((!ip.empty() && !all_digits(ip)) || (!fp.empty() && !all_digits(fp)) || (ip.empty() && fp.empty())) {
      throw Error(ErrorKind::ParseError, "not a rational: '" + std::string(whole) + "'");
    }
    digits = std::string(ip) + std::string(fp);
    exponent -= static_cast<long>(fp.size());
  } else {
    if (!all_digits(text)) throw Error(ErrorKind::ParseError, "not a rational: '" + std::string(whole) + "'");
    digits = std::string(text);
  }
  Rational q(Integer(digits, 10));
  if (exponent > 0) q *= pow(Integer(10), static_cast<unsigned long>(exponent));
  if (exponent < 0) q /= pow(Integer(10), static_cast<unsigned long>(-exponent));
  q.canonicalize();
  return negative ? Rational(-q) : q;
}

std::string to_string(const Rational& x) {
  return x.get_num().get_str() + "/" + x.get_den().get_str();
}

std::string to_string(const Integer& x) { return x.get_str(); }

std::string to_decimal(const Rational& x, int digits) {
  if (digits < 0) digits = 0;
  const Integer scale = pow(Integer(10), static_cast<unsigned long>(digits));
  Rational scaled = abs(x) * scale + Rational(1, 2);
  Integer n = floor(scaled);
  std::string s = n.get_str();
  if (digits > 0) {
    if (s.size() <= static_cast<std::size_t>(digits)) s.insert(0, static_cast<std::size_t>(digits) + 1 - s.size(), '0');
    s.insert(s.size() - static_cast<std::size_t>(digits), ".");
  }
  if (sgn(x) < 0 && n != 0) s.insert(0, "-");
  return s;
}

Integer floor(const Rational& x) {
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return q;
}

Integer ceil(const Rational& x) {
  Integer q;
  mpz_cdiv_q(q.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return q;
}

Rational abs(const Rational& x) { return sgn(x) < 0 ? Rational(-x) : x; }

int sign(const Rational& x) { return sgn(x); }

Rational pow(const Rational& x, long exponent) {
  if (exponent == 0) return Rational(1);
  if (exponent < 0) {
    if (x == 0) throw Error(ErrorKind::InvalidArgument, "zero to a negative power");
    Rational inv = 1 / x;
    return pow(inv, -exponent);
  }
  Integer num, den;
  mpz_pow_ui(num.get_mpz_t(), x.get_num_mpz_t(), static_cast<unsigned long>(exponent));
  mpz_pow_ui(den.get_mpz_t(), x.get_den_mpz_t(), static_cast<unsigned long>(exponent));
  return Rational(num, den);
}

Integer pow(const Integer& x, unsigned long exponent) {
  Integer r;
  mpz_pow_ui(r.get_mpz_t(), x.get_mpz_t(), exponent);
  return r;
}

Integer pow2(unsigned long exponent) {
  Integer r;
  mpz_ui_pow_ui(r.get_mpz_t(), 2, exponent);
  return r;
}

Integer lcm(const Integer& a, const Integer& b) {
  Integer r;
  mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

Rational round_down(const Rational& x, int bits) {
  Rational scaled = x;
  if (bits >= 0) scaled *= pow2(static_cast<unsigned long>(bits));
  else scaled /= pow2(static_cast<unsigned long>(-bits));
  Rational r(floor(scaled));
  if (bits >= 0) r /= pow2(static_cast<unsigned long>(bits));
  else r *= pow2(static_cast<unsigned long>(-bits));
  return r;
}

Rational round_up(const Rational& x, int bits) { return -round_down(-x, bits); }

Interval operator*(const Interval& a, const Interval& b) {
  Rational p[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
  Interval r{p[0], p[0]};
  for (const auto& v : p) {
    if (v < r.lo) r.lo = v;
    if (v > r.hi) r.hi = v;
  }
  return r;
}

}  // namespace lacuna
