#include "lacuna/schedule.hpp"

#include <algorithm>

#include "lacuna/bounds.hpp"
#include "lacuna/error.hpp"

namespace lacuna {

SqrtBounds sqrt_bounds(int d) {
  if (d < 1) throw Error(ErrorKind::InvalidArgument, "dimension must be >= 1");
  Interval r = bounds::sqrt(Integer(d), 24);
  return {r.lo, r.hi};
}

Integer compute_beta(const NormalizedPattern& np, const SqrtBounds& sqrt_d) {
  // beta/2 >= max_lambda 2c sqrt(d) + sqrt(d)/2  <=>  beta >= (4 c max_lambda + 1) sqrt(d)
  const Rational bound = (4 * np.c * np.max_lambda + 1) * sqrt_d.hi;
  return std::max(ceil(bound), Integer(np.arity()));
}

Rational side_length(int k, std::span<const Integer> betas) {
  Integer den = pow2(static_cast<unsigned long>(k));
  for (const Integer& b : betas) den *= b;
  return Rational(1, den);
}

Rational ratio_threshold(int d, std::span<const Integer> betas) {
  Integer t = pow2(static_cast<unsigned long>(betas.size()) * static_cast<unsigned long>(d));
  for (const Integer& b : betas) t *= pow(b, static_cast<unsigned long>(d));
  return Rational(t);
}

bool level_condition(const DimensionFunction& h, const SqrtBounds& sqrt_d, std::span<const Integer> betas, int k) {
  const Rational r = sqrt_d.hi * side_length(k, betas);
  if (r > h.domain_cap()) return false;
  try {
    return ratio_ge(h, r, ratio_threshold(h.dimension(), betas));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Undecidable) return false;
    throw;
  }
}

int find_level(const DimensionFunction& h, const SqrtBounds& sqrt_d, std::span<const Integer> betas, int min_level,
               int cap) {
  for (int k = std::max(min_level, 2); k <= cap; ++k) {
    if (level_condition(h, sqrt_d, betas, k)) return k;
  }
  throw Error(ErrorKind::ScheduleOverflow, "no admissible M-level for step " + std::to_string(betas.size()) +
                                               " at or below the level cap " + std::to_string(cap));
}

std::vector<int> compute_levels(const DimensionFunction& h, std::span<const Integer> betas, int count, int cap) {
  if (count < 1 || static_cast<std::size_t>(count) > betas.size()) {
    throw Error(ErrorKind::InvalidArgument, "need one beta per requested level");
  }
  const SqrtBounds sqrt_d = sqrt_bounds(h.dimension());
  std::vector<int> levels;
  int next_min = 2;
  for (int i = 1; i <= count; ++i) {
    const int m = find_level(h, sqrt_d, betas.first(static_cast<std::size_t>(i)), next_min, cap);
    levels.push_back(m);
    next_min = m + 2;
  }
  return levels;
}

std::vector<LevelInfo> level_profile(const ScheduleParams& params, int depth) {
  std::vector<LevelInfo> out;
  out.reserve(static_cast<std::size_t>(depth) + 1);
  Integer den = 1;
  int m_levels = 0;
  for (int k = 0; k <= depth; ++k) {
    if (k > 0) {
      den *= 2;
      auto it = std::find(params.levels.begin(), params.levels.end(), k);
      if (it != params.levels.end()) {
        den *= params.betas[static_cast<std::size_t>(it - params.levels.begin())];
        ++m_levels;
      }
    }
    out.push_back({k, Rational(1, den), pow2(static_cast<unsigned long>(params.d) * static_cast<unsigned long>(k - m_levels)),
                   m_levels});
  }
  return out;
}

// ----- tuples --------------------------------------------------------------

Integer falling(const Integer& n, int m) {
  if (n < m) return 0;
  Integer r = 1;
  for (int j = 0; j < m; ++j) r *= n - j;
  return r;
}

Integer rank_tuple(std::uint64_t n, std::span<const std::uint64_t> tuple) {
  const int m = static_cast<int>(tuple.size());
  Integer rank = 0;
  for (int j = 0; j < m; ++j) {
    const std::uint64_t e = tuple[static_cast<std::size_t>(j)];
    if (e >= n) throw Error(ErrorKind::InvalidArgument, "tuple element out of range");
    std::uint64_t smaller = e;
    for (int i = 0; i < j; ++i) {
      const std::uint64_t prev = tuple[static_cast<std::size_t>(i)];
      if (prev == e) throw Error(ErrorKind::InvalidArgument, "tuple elements must be distinct");
      if (prev < e) --smaller;
    }
    rank += Integer(static_cast<unsigned long>(smaller)) * falling(Integer(static_cast<unsigned long>(n - 1 - static_cast<std::uint64_t>(j))), m - 1 - j);
  }
  return rank;
}

std::vector<std::uint64_t> unrank_tuple(std::uint64_t n, int m, const Integer& rank) {
  const Integer total = falling(Integer(static_cast<unsigned long>(n)), m);
  if (rank < 0 || rank >= total) throw Error(ErrorKind::InvalidArgument, "tuple rank out of range");
  std::vector<std::uint64_t> tuple;
  std::vector<std::uint64_t> used;
  Integer rest = rank;
  for (int j = 0; j < m; ++j) {
    const Integer block = falling(Integer(static_cast<unsigned long>(n - 1 - static_cast<std::uint64_t>(j))), m - 1 - j);
    Integer idx_z = rest / block;
    rest -= idx_z * block;
    std::uint64_t value = idx_z.get_ui();
    for (std::uint64_t u : used) {
      if (u <= value) ++value;
    }
    tuple.push_back(value);
    used.insert(std::upper_bound(used.begin(), used.end(), value), value);
  }
  return tuple;
}

// ----- enumerator ----------------------------------------------------------

namespace {

std::vector<Integer> tuple_counts(std::span<const int> arities, const Integer& n) {
  std::vector<Integer> t;
  t.reserve(arities.size());
  for (int m : arities) t.push_back(falling(n, m));
  return t;
}

Integer level_size(std::span<const int> arities, const Integer& n) {
  Integer s = 0;
  for (const Integer& t : tuple_counts(arities, n)) s += t;
  return s;
}

}  // namespace

TupleEnumerator::TupleEnumerator(std::vector<int> arities) : arities_(std::move(arities)) {
  if (arities_.empty()) throw Error(ErrorKind::InvalidArgument, "no patterns to enumerate");
}

TupleChoice TupleEnumerator::next(const LevelCount& count, int max_level) {
  const int patterns = static_cast<int>(arities_.size());
  for (;;) {
    if (level_ > round_) {
      ++round_;
      level_ = 0;
      rank_ = 0;
      pattern_ = 0;
    }
    if (level_ > max_level) {
      throw Error(ErrorKind::Starved, "no admissible tuple at or below level " + std::to_string(max_level));
    }
    const Integer n = count(level_);
    const std::vector<Integer> t = tuple_counts(arities_, n);
    const Integer widest = *std::max_element(t.begin(), t.end());
    if (rank_ >= widest) {
      ++level_;
      rank_ = 0;
      pattern_ = 0;
      continue;
    }
    if (pattern_ >= patterns) {
      ++rank_;
      pattern_ = 0;
      continue;
    }
    const int p = pattern_++;
    if (rank_ >= t[static_cast<std::size_t>(p)]) continue;
    if (!n.fits_ulong_p()) throw Error(ErrorKind::CapacityExceeded, "level too large to address");
    TupleChoice choice{p, level_, rank_, unrank_tuple(n.get_ui(), arities_[static_cast<std::size_t>(p)], rank_)};
    ++served_;
    return choice;
  }
}

Integer TupleEnumerator::position(std::span<const int> arities, int pattern, int level, const Integer& rank, int round,
                                  const LevelCount& count) {
  if (round < level) throw Error(ErrorKind::InvalidArgument, "a level is first visited in the round of the same index");
  std::vector<Integer> sizes;  // level sizes 0..round
  sizes.reserve(static_cast<std::size_t>(round) + 1);
  for (int l = 0; l <= round; ++l) sizes.push_back(level_size(arities, count(l)));

  Integer pos = 0;
  Integer prefix = 0;  // size of levels 0..r
  for (int r = 0; r < round; ++r) {
    prefix += sizes[static_cast<std::size_t>(r)];
    pos += prefix;
  }
  for (int l = 0; l < level; ++l) pos += sizes[static_cast<std::size_t>(l)];

  const std::vector<Integer> t = tuple_counts(arities, count(level));
  if (rank >= t[static_cast<std::size_t>(pattern)]) throw Error(ErrorKind::InvalidArgument, "rank out of range");
  for (std::size_t p = 0; p < t.size(); ++p) {
    pos += std::min(t[p], rank);
    if (static_cast<int>(p) < pattern && t[p] > rank) ++pos;
  }
  return pos;
}

}  // namespace lacuna
