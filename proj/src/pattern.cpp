#include "lacuna/pattern.hpp"

#include <algorithm>
#include <numeric>

#include "lacuna/error.hpp"

namespace lacuna {

LinearPattern::LinearPattern(int d, int m, std::vector<Rational> coeffs) : d_(d), m_(m), coeffs_(std::move(coeffs)) {
  if (d < 1) throw Error(ErrorKind::InvalidPattern, "dimension must be >= 1");
  if (m < 2) throw Error(ErrorKind::InvalidPattern, "arity must be >= 2");
  if (coeffs_.size() != static_cast<std::size_t>(d) * static_cast<std::size_t>(m)) {
    throw Error(ErrorKind::InvalidPattern, "expected " + std::to_string(d * m) + " coefficients, got " +
                                               std::to_string(coeffs_.size()));
  }
  if (std::all_of(coeffs_.begin(), coeffs_.end(), [](const Rational& b) { return b == 0; })) {
    throw Error(ErrorKind::ZeroPattern, "all coefficients vanish");
  }
}

NormalizedPattern normalize(const LinearPattern& p) {
  const int d = p.dimension(), m = p.arity();

  int best_block = -1, best_coord = -1;
  Rational best;
  for (int l = 0; l < m; ++l) {
    for (int v = 0; v < d; ++v) {
      const Rational a = abs(p.coeff(l, v));
      if (a == 0) continue;
      if (best_block < 0 || a < best) {
        best = a;
        best_block = l;
        best_coord = v;
      }
    }
  }
  if (best_block < 0) throw Error(ErrorKind::ZeroPattern, "all coefficients vanish");

  std::vector<int> perm(static_cast<std::size_t>(m));
  std::iota(perm.begin(), perm.end(), 0);
  std::swap(perm[static_cast<std::size_t>(best_block)], perm[static_cast<std::size_t>(m - 1)]);

  const Rational scale = 1 / p.coeff(best_block, best_coord);
  std::vector<Rational> coeffs;
  coeffs.reserve(p.coeffs().size());
  for (int l = 0; l < m; ++l) {
    for (int v = 0; v < d; ++v) coeffs.emplace_back(scale * p.coeff(perm[static_cast<std::size_t>(l)], v));
  }

  NormalizedPattern np{LinearPattern(d, m, std::move(coeffs)), std::move(perm), scale, best_coord, 0, {}, 0};
  Rational l1 = 0;
  np.lambda.reserve(np.base.coeffs().size());
  for (const Rational& b : np.base.coeffs()) {
    const Rational a = abs(b);
    l1 += a;
    np.lambda.emplace_back(a == 0 ? Rational(1) : Rational(1 / a));
    if (np.lambda.back() > np.max_lambda) np.max_lambda = np.lambda.back();
  }
  np.c = l1 / 2;
  return np;
}

Point phi(const NormalizedPattern& np, int block, std::span<const Integer> z) {
  const int d = np.dimension();
  if (block < 0 || block >= np.arity()) throw Error(ErrorKind::InvalidArgument, "block index out of range");
  if (z.size() != static_cast<std::size_t>(d)) throw Error(ErrorKind::DimensionMismatch, "phi expects d integers");
  Point out;
  out.reserve(static_cast<std::size_t>(d));
  for (int v = 0; v < d; ++v) out.emplace_back(np.lam(block, v) * z[static_cast<std::size_t>(v)] + np.shift(block, v));
  return out;
}

Rational eval(const LinearPattern& p, std::span<const Point> points) {
  if (points.size() != static_cast<std::size_t>(p.arity())) {
    throw Error(ErrorKind::DimensionMismatch,
                "pattern takes " + std::to_string(p.arity()) + " points, got " + std::to_string(points.size()));
  }
  Rational sum = 0;
  for (int l = 0; l < p.arity(); ++l) {
    const Point& x = points[static_cast<std::size_t>(l)];
    if (x.size() != static_cast<std::size_t>(p.dimension())) {
      throw Error(ErrorKind::DimensionMismatch, "point has wrong dimension");
    }
    for (int v = 0; v < p.dimension(); ++v) {
      if (p.coeff(l, v) != 0) sum += p.coeff(l, v) * x[static_cast<std::size_t>(v)];
    }
  }
  return sum;
}

bool key_inequality_check(const NormalizedPattern& np, int bound) {
  const int d = np.dimension(), m = np.arity();
  const std::size_t n = static_cast<std::size_t>(d) * static_cast<std::size_t>(m);
  std::vector<Integer> z(n, Integer(-bound));
  std::vector<Point> images(static_cast<std::size_t>(m));
  const Rational half(1, 2);
  for (;;) {
    for (int l = 0; l < m; ++l) {
      images[static_cast<std::size_t>(l)] =
          phi(np, l, std::span<const Integer>(z).subspan(static_cast<std::size_t>(l * d), static_cast<std::size_t>(d)));
    }
    if (abs(eval(np.base, images)) < half) return false;

    std::size_t i = 0;
    while (i < n && z[i] == bound) z[i++] = -bound;
    if (i == n) return true;
    ++z[i];
  }
}

}  // namespace lacuna
