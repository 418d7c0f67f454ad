#pragma once

// Construction schedule: the integers beta_i, the M-levels M_i, the per-level
// profile (delta_k, N_k), and the fair enumeration of (pattern, tuple) pairs.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "lacuna/dimfn.hpp"
#include "lacuna/pattern.hpp"
#include "lacuna/rational.hpp"

namespace lacuna {

/// Rational enclosure of sqrt(d) with hi - lo < 2^-20 (exact for squares).
struct SqrtBounds {
  Rational lo;
  Rational hi;
};

SqrtBounds sqrt_bounds(int d);

/// Smallest integer beta >= m with beta/2 >= max_lambda * 2c * sqrt(d) + sqrt(d)/2,
/// evaluated with the upper bound on sqrt(d).
Integer compute_beta(const NormalizedPattern& np, const SqrtBounds& sqrt_d);

/// 2^-k / prod(betas).
Rational side_length(int k, std::span<const Integer> betas);

/// 2^(i d) * prod(beta_j^d) for the i = betas.size() applied factors.
Rational ratio_threshold(int d, std::span<const Integer> betas);

/// h(sqrt(d) delta)/(sqrt(d) delta)^d >= threshold at level k with `betas` applied.
/// Uses sqrt_d.hi (the ratio is non-increasing); Undecidable counts as false,
/// as does an argument beyond the domain cap.
bool level_condition(const DimensionFunction& h, const SqrtBounds& sqrt_d, std::span<const Integer> betas, int k);

/// Smallest k in [min_level, cap] satisfying level_condition; ScheduleOverflow otherwise.
int find_level(const DimensionFunction& h, const SqrtBounds& sqrt_d, std::span<const Integer> betas, int min_level,
               int cap);

/// Greedy minimal M_1..M_count with M_1 >= 2 and M_{i+1} >= M_i + 2.
std::vector<int> compute_levels(const DimensionFunction& h, std::span<const Integer> betas, int count, int cap);

struct ScheduleParams {
  int d = 1;
  std::vector<Integer> betas;  // beta_1..beta_n
  std::vector<int> levels;     // M_1..M_n, strictly increasing
  SqrtBounds sqrt_d;
};

struct LevelInfo {
  int k = 0;
  Rational delta;  // side length
  Integer count;   // N_k
  int m_levels = 0;  // #{i : M_i <= k}
};

/// delta_k = 2^-k prod_{M_i <= k} beta_i^-1,  N_k = 2^(d (k - #{M_i <= k})).
std::vector<LevelInfo> level_profile(const ScheduleParams& params, int depth);

struct ScheduleEntry {
  int index = 0;       // i, 1-based
  int pattern_id = 0;  // into the input pattern list
  int level = 0;       // L, level of every tuple member
  std::vector<std::uint64_t> tuple;  // member cube indices at level L, normalized block order
  int level_M = 0;     // M_i
  Integer beta;        // beta_i

  friend bool operator==(const ScheduleEntry&, const ScheduleEntry&) = default;
};

// ----- ordered tuples of distinct indices --------------------------------

/// n (n-1) ... (n-m+1), zero when n < m.
Integer falling(const Integer& n, int m);

/// Lexicographic rank of an ordered tuple of distinct elements of [0, n).
Integer rank_tuple(std::uint64_t n, std::span<const std::uint64_t> tuple);
std::vector<std::uint64_t> unrank_tuple(std::uint64_t n, int m, const Integer& rank);

struct TupleChoice {
  int pattern_id = 0;
  int level = 0;
  Integer rank;
  std::vector<std::uint64_t> tuple;
};

/// Deterministic dovetailing over (pattern, level, tuple rank).
///
/// Round r = 0, 1, 2, ... walks levels 0..r in order; within a level the
/// patterns are interleaved rank by rank (rank 0 of every pattern, then rank 1,
/// ...), skipping patterns whose tuple space at that level is exhausted. A pair
/// at level L is therefore served once in every round r >= L.
class TupleEnumerator {
 public:
  using LevelCount = std::function<Integer(int level)>;

  explicit TupleEnumerator(std::vector<int> arities);

  /// Next pair. `count(L)` must return N_L; throws Starved if the cursor passes
  /// `max_level` before any level holds enough cubes.
  TupleChoice next(const LevelCount& count, int max_level);

  const Integer& served() const { return served_; }

  /// 0-based index at which (pattern, level, rank) is served in round `round`
  /// (round >= level). The first occurrence is round == level.
  static Integer position(std::span<const int> arities, int pattern, int level, const Integer& rank, int round,
                          const LevelCount& count);

 private:
  std::vector<int> arities_;
  int round_ = 0;
  int level_ = 0;
  Integer rank_ = 0;
  int pattern_ = 0;
  Integer served_ = 0;
};

}  // namespace lacuna
