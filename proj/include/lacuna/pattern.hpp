#pragma once

// Linear patterns psi(x_1, ..., x_m) = sum_{l,v} b[l][v] * x_l[v] over (R^d)^m
// and their normalized form used by the lattice placement.
//
// Block and coordinate indices are 0-based throughout the code base.

#include <span>
#include <vector>

#include "lacuna/rational.hpp"

namespace lacuna {

class LinearPattern {
 public:
  /// `coeffs` is row-major: block l outer, coordinate v inner (m*d entries).
  /// Throws InvalidPattern (shape, m < 2) or ZeroPattern.
  LinearPattern(int d, int m, std::vector<Rational> coeffs);

  int dimension() const { return d_; }
  int arity() const { return m_; }
  const Rational& coeff(int block, int coord) const { return coeffs_[static_cast<std::size_t>(block * d_ + coord)]; }
  const std::vector<Rational>& coeffs() const { return coeffs_; }

  friend bool operator==(const LinearPattern&, const LinearPattern&) = default;

 private:
  int d_;
  int m_;
  std::vector<Rational> coeffs_;
};

/// Pattern rescaled and block-permuted so that coefficient (m-1, pivot) is 1.
///
///   normalized(x_perm[0], ..., x_perm[m-1]) = scale * original(x_0, ..., x_{m-1})
///
/// c = max |psi| over [-1/2,1/2]^{md} = half the L1 norm of the coefficients;
/// lambda[l][v] = 1/|b[l][v]| (1 where b is zero).
struct NormalizedPattern {
  LinearPattern base;
  std::vector<int> perm;
  Rational scale;
  int pivot = 0;
  Rational c;
  std::vector<Rational> lambda;
  Rational max_lambda;

  int dimension() const { return base.dimension(); }
  int arity() const { return base.arity(); }
  const Rational& lam(int block, int coord) const {
    return lambda[static_cast<std::size_t>(block * base.dimension() + coord)];
  }
  /// phi^l shift in coordinate v: 1/2 on the pivot of the last block.
  Rational shift(int block, int coord) const {
    return (block == arity() - 1 && coord == pivot) ? Rational(1, 2) : Rational(0);
  }
};

/// Pivot: the nonzero coefficient of minimal |b| (ties: smallest block, then
/// smallest coordinate); its block is swapped into the last position.
NormalizedPattern normalize(const LinearPattern& p);

/// phi^l(z) = (lambda[l][0] z_0, ..., lambda[l][d-1] z_{d-1}) + [l == m-1] e_pivot / 2.
Point phi(const NormalizedPattern& np, int block, std::span<const Integer> z);

/// Exact psi(points); throws DimensionMismatch on shape errors.
Rational eval(const LinearPattern& p, std::span<const Point> points);

/// True iff |psi(phi^0(z_0), ..., phi^{m-1}(z_{m-1}))| >= 1/2 for every integer
/// tuple with all coordinates in [-bound, bound].
bool key_inequality_check(const NormalizedPattern& np, int bound);

}  // namespace lacuna
