#include <gtest/gtest.h>

#include <algorithm>
#include <functional>

#include "support.hpp"

using namespace lacuna;
using lacuna::test::Gen;
using lacuna::test::throws_kind;

namespace {

const SqrtBounds kOne = sqrt_bounds(1);

// For pow:1/2 in d = 1 the ratio h(x)/x is x^(-1/2), so the level condition
// reduces to 1/delta >= T^2 exactly.
bool sqrt_condition(int k, const std::vector<Integer>& betas) {
  Integer prod = 1;
  for (const Integer& b : betas) prod *= b;
  const Integer inv_delta = pow2(static_cast<unsigned long>(k)) * prod;
  const Integer t = pow2(betas.size()) * prod;
  return inv_delta >= t * t;
}

}  // namespace

TEST(Schedule, SqrtBounds) {
  EXPECT_EQ(sqrt_bounds(1).lo, 1);
  EXPECT_EQ(sqrt_bounds(4).hi, 2);
  const SqrtBounds s2 = sqrt_bounds(2);
  EXPECT_LT(s2.lo * s2.lo, 2);
  EXPECT_GT(s2.hi * s2.hi, 2);
  EXPECT_LT(s2.hi - s2.lo, Rational(1, pow2(20)));
}

TEST(Schedule, BetaExamples) {
  const NormalizedPattern ap = normalize(lacuna::test::ap_pattern());
  const NormalizedPattern quo = normalize(lacuna::test::quotient_pattern(2));
  EXPECT_EQ(compute_beta(ap, kOne), 9);
  EXPECT_EQ(compute_beta(quo, kOne), 7);
}

TEST(Schedule, BetaIsMinimal) {
  Gen gen(41);
  for (int i = 0; i < 200; ++i) {
    const int d = static_cast<int>(gen.integer(1, 3)), m = static_cast<int>(gen.integer(2, 4));
    std::vector<Rational> coeffs;
    for (int j = 0; j < d * m; ++j) coeffs.push_back(gen.rational(10, 7));
    if (std::all_of(coeffs.begin(), coeffs.end(), [](const Rational& b) { return b == 0; })) coeffs[0] = 1;
    const NormalizedPattern np = normalize(LinearPattern(d, m, coeffs));
    const SqrtBounds s = sqrt_bounds(d);
    const Integer beta = compute_beta(np, s);
    auto admissible = [&](const Integer& b) {
      return b >= m && Rational(b) / 2 >= np.max_lambda * 2 * np.c * s.hi + s.hi / 2;
    };
    EXPECT_TRUE(admissible(beta));
    EXPECT_FALSE(admissible(beta - 1));
  }
}

TEST(Schedule, SideLengthAndThreshold) {
  const std::vector<Integer> betas{9, 7};
  EXPECT_EQ(side_length(7, std::span(betas).first(1)), Rational(1, 1152));
  EXPECT_EQ(side_length(0, std::span<const Integer>{}), 1);
  EXPECT_EQ(side_length(3, betas), Rational(1, 8 * 63));
  EXPECT_EQ(ratio_threshold(1, std::span(betas).first(1)), 18);
  EXPECT_EQ(ratio_threshold(2, betas), Rational(16 * 81 * 49));
}

TEST(Schedule, LevelExamplesForProgression) {
  const DimensionFunction h = parse_dimfn("pow:1/2", 1);
  const std::vector<Integer> betas{9, 9};
  const std::vector<int> levels = compute_levels(h, betas, 2, 64);
  EXPECT_EQ(levels, (std::vector<int>{6, 11}));
  // minimality against the closed form
  EXPECT_TRUE(sqrt_condition(6, {9}));
  EXPECT_FALSE(sqrt_condition(5, {9}));
  EXPECT_TRUE(sqrt_condition(11, {9, 9}));
  EXPECT_FALSE(sqrt_condition(10, {9, 9}));
}

TEST(Schedule, LevelConditionMatchesClosedForm) {
  const DimensionFunction h = parse_dimfn("pow:1/2", 1);
  Gen gen(42);
  for (int i = 0; i < 200; ++i) {
    std::vector<Integer> betas;
    const int n = static_cast<int>(gen.integer(1, 3));
    for (int j = 0; j < n; ++j) betas.push_back(gen.integer(2, 40));
    const int k = static_cast<int>(gen.integer(0, 40));
    EXPECT_EQ(level_condition(h, kOne, betas, k), sqrt_condition(k, betas));
  }
}

TEST(Schedule, FindLevelOverflow) {
  const DimensionFunction h = parse_dimfn("pow:1/2", 1);
  const std::vector<Integer> betas{9};
  EXPECT_EQ(find_level(h, kOne, betas, 2, 64), 6);
  EXPECT_EQ(find_level(h, kOne, betas, 8, 64), 8);
  EXPECT_TRUE(throws_kind([&] { (void)find_level(h, kOne, betas, 2, 5); }, ErrorKind::ScheduleOverflow));
}

TEST(Schedule, ComputedLevelsAreGreedyMinimal) {
  Gen gen(43);
  const DimensionFunction h = parse_dimfn("pow:1/2", 1);
  for (int i = 0; i < 30; ++i) {
    std::vector<Integer> betas;
    for (int j = 0; j < 4; ++j) betas.push_back(gen.integer(2, 12));
    const std::vector<int> levels = compute_levels(h, betas, 4, 200);
    int prev = 0;
    for (std::size_t j = 0; j < levels.size(); ++j) {
      const std::vector<Integer> applied(betas.begin(), betas.begin() + static_cast<long>(j) + 1);
      const int lo = std::max(2, j == 0 ? 2 : prev + 2);
      EXPECT_GE(levels[j], lo);
      EXPECT_TRUE(sqrt_condition(levels[j], applied));
      for (int k = lo; k < levels[j]; ++k) EXPECT_FALSE(sqrt_condition(k, applied)) << k;
      prev = levels[j];
    }
  }
}

TEST(Schedule, ProfileExample) {
  ScheduleParams params;
  params.d = 1;
  params.betas = {9, 9};
  params.levels = {6, 11};
  params.sqrt_d = kOne;
  const std::vector<LevelInfo> profile = level_profile(params, 12);
  ASSERT_EQ(profile.size(), 13u);
  EXPECT_EQ(profile[5].delta, Rational(1, 32));
  EXPECT_EQ(profile[5].count, 32);
  EXPECT_EQ(profile[6].delta, Rational(1, 576));
  EXPECT_EQ(profile[6].count, 32);
  EXPECT_EQ(profile[7].delta, Rational(1, 1152));
  EXPECT_EQ(profile[7].count, 64);
  EXPECT_EQ(profile[11].m_levels, 2);
  EXPECT_EQ(profile[12].delta, Rational(1, 4096 * 81));
  EXPECT_EQ(profile[12].count, 1024);
}

TEST(ScheduleProperty, ProfileRecurrence) {
  Gen gen(44);
  for (int i = 0; i < 50; ++i) {
    ScheduleParams params;
    params.d = static_cast<int>(gen.integer(1, 3));
    params.sqrt_d = sqrt_bounds(params.d);
    int level = 0;
    for (int j = 0; j < 3; ++j) {
      level += static_cast<int>(gen.integer(2, 5));
      params.levels.push_back(level);
      params.betas.push_back(gen.integer(2, 20));
    }
    const int depth = level + 2;
    const std::vector<LevelInfo> profile = level_profile(params, depth);
    for (int k = 1; k <= depth; ++k) {
      const auto it = std::find(params.levels.begin(), params.levels.end(), k);
      const LevelInfo& cur = profile[static_cast<std::size_t>(k)];
      const LevelInfo& prev = profile[static_cast<std::size_t>(k - 1)];
      if (it != params.levels.end()) {
        const Integer& beta = params.betas[static_cast<std::size_t>(it - params.levels.begin())];
        EXPECT_EQ(cur.count, prev.count);
        EXPECT_EQ(cur.delta, prev.delta / (2 * Rational(beta)));
      } else {
        EXPECT_EQ(cur.count, prev.count * pow2(static_cast<unsigned long>(params.d)));
        EXPECT_EQ(cur.delta, prev.delta / 2);
      }
    }
  }
}

// ----- tuples --------------------------------------------------------------

namespace {

void all_tuples(std::uint64_t n, int m, std::vector<std::uint64_t>& cur, std::vector<std::vector<std::uint64_t>>& out) {
  if (static_cast<int>(cur.size()) == m) {
    out.push_back(cur);
    return;
  }
  for (std::uint64_t x = 0; x < n; ++x) {
    if (std::find(cur.begin(), cur.end(), x) != cur.end()) continue;
    cur.push_back(x);
    all_tuples(n, m, cur, out);
    cur.pop_back();
  }
}

}  // namespace

TEST(Tuples, Falling) {
  EXPECT_EQ(falling(4, 3), 24);
  EXPECT_EQ(falling(2, 3), 0);
  EXPECT_EQ(falling(5, 1), 5);
}

TEST(Tuples, RankMatchesLexicographicOrder) {
  for (std::uint64_t n = 1; n <= 6; ++n) {
    for (int m = 1; m <= 3; ++m) {
      std::vector<std::vector<std::uint64_t>> tuples;
      std::vector<std::uint64_t> cur;
      all_tuples(n, m, cur, tuples);
      ASSERT_EQ(Integer(static_cast<unsigned long>(tuples.size())), falling(Integer(static_cast<unsigned long>(n)), m));
      for (std::size_t r = 0; r < tuples.size(); ++r) {
        EXPECT_EQ(rank_tuple(n, tuples[r]), Integer(static_cast<unsigned long>(r)));
        EXPECT_EQ(unrank_tuple(n, m, Integer(static_cast<unsigned long>(r))), tuples[r]);
      }
    }
  }
}

TEST(Tuples, RoundTripOnLargeLevels) {
  Gen gen(45);
  for (int i = 0; i < 300; ++i) {
    const std::uint64_t n = static_cast<std::uint64_t>(gen.integer(4, 1L << 40));
    const int m = static_cast<int>(gen.integer(2, 4));
    std::vector<std::uint64_t> t;
    while (static_cast<int>(t.size()) < m) {
      const auto x = static_cast<std::uint64_t>(gen.integer(0, static_cast<long>(n) - 1));
      if (std::find(t.begin(), t.end(), x) == t.end()) t.push_back(x);
    }
    EXPECT_EQ(unrank_tuple(n, m, rank_tuple(n, t)), t);
  }
}

namespace {

Integer dyadic_count(int level) { return pow2(static_cast<unsigned long>(level)); }

// Direct transcription of the dovetailing order.
std::vector<TupleChoice> naive_order(const std::vector<int>& arities, int rounds,
                                     const std::function<Integer(int)>& count) {
  std::vector<TupleChoice> out;
  for (int r = 0; r < rounds; ++r) {
    for (int level = 0; level <= r; ++level) {
      const Integer n = count(level);
      Integer widest = 0;
      for (int m : arities) widest = std::max(widest, falling(n, m));
      for (Integer rank = 0; rank < widest; ++rank) {
        for (std::size_t p = 0; p < arities.size(); ++p) {
          if (rank < falling(n, arities[p])) out.push_back({static_cast<int>(p), level, rank, {}});
        }
      }
    }
  }
  return out;
}

}  // namespace

TEST(Enumerator, FirstProgressionEntry) {
  TupleEnumerator e({3});
  const TupleChoice first = e.next(dyadic_count, 64);
  EXPECT_EQ(first.level, 2);
  EXPECT_EQ(first.rank, 0);
  EXPECT_EQ(first.tuple, (std::vector<std::uint64_t>{0, 1, 2}));
  const TupleChoice second = e.next(dyadic_count, 64);
  EXPECT_EQ(second.tuple, (std::vector<std::uint64_t>{0, 1, 3}));
}

TEST(Enumerator, StarvedBelowFirstAdmissibleLevel) {
  TupleEnumerator e({3});
  EXPECT_TRUE(throws_kind([&] { (void)e.next(dyadic_count, 1); }, ErrorKind::Starved));
}

TEST(Enumerator, MatchesNaiveOrderAndCycles) {
  const std::vector<int> arities{2, 3, 2};
  const std::vector<TupleChoice> expected = naive_order(arities, 5, dyadic_count);
  TupleEnumerator e(arities);
  for (const TupleChoice& want : expected) {
    const TupleChoice got = e.next(dyadic_count, 64);
    ASSERT_EQ(got.pattern_id, want.pattern_id);
    ASSERT_EQ(got.level, want.level);
    ASSERT_EQ(got.rank, want.rank);
    EXPECT_EQ(got.tuple, unrank_tuple(dyadic_count(got.level).get_ui(), arities[static_cast<std::size_t>(got.pattern_id)], got.rank));
  }
  EXPECT_EQ(e.served(), Integer(static_cast<unsigned long>(expected.size())));
  // level 1 is revisited in every later round
  int visits = 0;
  for (const TupleChoice& c : expected) visits += (c.level == 1 && c.pattern_id == 0 && c.rank == 1);
  EXPECT_EQ(visits, 4);
}

TEST(Enumerator, PositionAgreesWithDirectEnumeration) {
  const std::vector<int> arities{3, 2};
  const std::vector<TupleChoice> order = naive_order(arities, 5, dyadic_count);
  std::vector<int> round_of(order.size());
  {
    // recover the round of each emitted pair by walking the same loops
    std::size_t i = 0;
    for (int r = 0; r < 5; ++r) {
      for (int level = 0; level <= r; ++level) {
        const Integer n = dyadic_count(level);
        Integer total = 0;
        for (int m : arities) total += falling(n, m);
        for (Integer j = 0; j < total; ++j) round_of[i++] = r;
      }
    }
    ASSERT_EQ(i, order.size());
  }
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Integer pos = TupleEnumerator::position(arities, order[i].pattern_id, order[i].level, order[i].rank,
                                                  round_of[i], dyadic_count);
    EXPECT_EQ(pos, Integer(static_cast<unsigned long>(i)));
  }
}
