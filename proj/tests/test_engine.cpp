#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>

#include "lacuna/apps.hpp"
#include "support.hpp"

using namespace lacuna;
using lacuna::test::Gen;
using lacuna::test::throws_kind;

TEST(Address, RoundTrip) {
  Gen gen(51);
  for (int d : {1, 2, 3, 5, 6}) {
    for (int i = 0; i < 50; ++i) {
      const int digits = static_cast<int>(gen.integer(0, 60 / d));
      const std::uint64_t index =
          digits == 0 ? 0 : static_cast<std::uint64_t>(gen.integer(0, (1L << std::min(62, d * digits)) - 1));
      const CubeAddress a = address_of(index, digits, d, digits + 2);
      EXPECT_EQ(a.digits.size(), static_cast<std::size_t>(digits));
      EXPECT_EQ(index_of(a, d), index);
      EXPECT_EQ(CubeAddress::parse(a.to_string(d), d, a.level), a);
    }
  }
}

TEST(Address, Formats) {
  EXPECT_EQ(address_of(2, 2, 1, 2).to_string(1), "10");
  EXPECT_EQ(address_of(35, 1, 6, 1).to_string(6), "35");
  EXPECT_EQ(address_of(35 * 64 + 7, 2, 6, 2).to_string(6), "35.7");
  EXPECT_EQ(address_of(31, 1, 5, 1).to_string(5), "v");
  EXPECT_TRUE(throws_kind([] { (void)CubeAddress::parse("2", 1, 1); }, ErrorKind::ParseError));
  EXPECT_TRUE(throws_kind([] { (void)CubeAddress::parse("64", 6, 1); }, ErrorKind::ParseError));
}

TEST(Layer, StoresNumeratorsOverACommonDenominator) {
  Layer layer(2, 3, Integer(1152));
  layer.store(1, 0, Integer(1175));
  layer.store(2, 1, Integer(4 * 1152));
  EXPECT_EQ(layer.numerator(1, 0), 1175);
  EXPECT_EQ(layer.coord(1, 0), Rational(1175, 1152));
  EXPECT_EQ(layer.coord(2, 1), 4);
  EXPECT_EQ(layer.coord(0, 0), 0);
  EXPECT_TRUE(throws_kind([&] { layer.store(0, 0, Integer(-1)); }, ErrorKind::CapacityExceeded));
  EXPECT_TRUE(throws_kind([&] { layer.store(0, 0, Integer(4 * 1152 + 1)); }, ErrorKind::CapacityExceeded));
  const std::vector<Rational> bad{Rational(1, 7), Rational(1)};
  EXPECT_TRUE(throws_kind([&] { layer.set_lower(0, bad); }, ErrorKind::InvalidArgument));
}

TEST(Layer, FromPointsUsesTheLcm) {
  const std::vector<Point> pts{{Rational(1, 6), Rational(1)}, {Rational(3, 4), Rational(5, 3)}};
  const Layer layer = Layer::from_points(2, pts);
  EXPECT_EQ(layer.denominator(), 12);
  EXPECT_EQ(layer.lower(0), pts[0]);
  EXPECT_EQ(layer.lower(1), pts[1]);
}

TEST(LayerProperty, LargeNumeratorsRoundTrip) {
  Gen gen(52);
  const Integer den = pow2(200) * 81 + 1;
  Layer layer(3, 20, den);
  std::vector<Integer> values;
  for (std::uint64_t i = 0; i < 20; ++i) {
    for (int v = 0; v < 3; ++v) {
      Integer x = 0;
      for (int w = 0; w < 4; ++w) x = (x << 62) + gen.integer(0, (1L << 62) - 1);
      x %= 4 * den + 1;
      values.push_back(x);
      layer.store(i, v, x);
    }
  }
  std::size_t j = 0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    for (int v = 0; v < 3; ++v) EXPECT_EQ(layer.numerator(i, v), values[j++]);
  }
}

TEST(Engine, InitIsTheUnitCubeAtOne) {
  const ConstructionState s = init(2, parallelogram_patterns(2), parse_dimfn("pow:1/2", 2));
  EXPECT_EQ(s.depth(), 0);
  EXPECT_EQ(s.layers[0].size(), 1u);
  EXPECT_EQ(s.cube(0, 0).lower, (Point{Rational(1), Rational(1)}));
  EXPECT_EQ(s.cube(0, 0).side, 1);
  ASSERT_TRUE(s.pending.has_value());
}

TEST(Engine, InitValidatesInputs) {
  const DimensionFunction h1 = parse_dimfn("pow:1/2", 1);
  EXPECT_TRUE(throws_kind([&] { (void)init(1, {}, h1); }, ErrorKind::InvalidArgument));
  EXPECT_TRUE(throws_kind([&] { (void)init(2, parallelogram_patterns(2), h1); }, ErrorKind::DimensionMismatch));
  EXPECT_TRUE(throws_kind([&] { (void)init(1, parallelogram_patterns(2), h1); }, ErrorKind::DimensionMismatch));
}

TEST(Engine, FirstLevelIsADyadicSplit) {
  ConstructionState s = init(2, parallelogram_patterns(2), parse_dimfn("pow:1/2", 2));
  advance_level(s);
  ASSERT_EQ(s.layers[1].size(), 4u);
  EXPECT_EQ(s.deltas[1], Rational(1, 2));
  EXPECT_EQ(s.cube(1, 0).lower, (Point{Rational(1), Rational(1)}));
  EXPECT_EQ(s.cube(1, 1).lower, (Point{Rational(3, 2), Rational(1)}));
  EXPECT_EQ(s.cube(1, 2).lower, (Point{Rational(1), Rational(3, 2)}));
  EXPECT_EQ(s.cube(1, 3).lower, (Point{Rational(3, 2), Rational(3, 2)}));
  EXPECT_EQ(s.cube(1, 3).address.to_string(2), "3");
}

TEST(Engine, ProgressionScheduleAndCounts) {
  const ConstructionState s = lacuna::test::ap_state(12);
  ASSERT_EQ(s.schedule.size(), 2u);
  EXPECT_EQ(s.schedule[0].level, 2);
  EXPECT_EQ(s.schedule[0].tuple, (std::vector<std::uint64_t>{0, 1, 2}));
  EXPECT_EQ(s.schedule[0].level_M, 6);
  EXPECT_EQ(s.schedule[0].beta, 9);
  EXPECT_EQ(s.schedule[1].tuple, (std::vector<std::uint64_t>{0, 1, 3}));
  EXPECT_EQ(s.schedule[1].level_M, 11);
  EXPECT_EQ(s.layers[7].size(), 64u);
  EXPECT_EQ(s.deltas[7], Rational(1, 1152));
  EXPECT_EQ(s.layers[12].size(), 1024u);
  EXPECT_EQ(s.deltas[12], Rational(1, 4096 * 81));
  ASSERT_TRUE(s.pending.has_value());
  EXPECT_GT(s.pending->level_M, 12);
  EXPECT_EQ(s.entry_at_level(11), &s.schedule[1]);
  EXPECT_EQ(s.entry_at_level(10), nullptr);
}

TEST(Engine, PlacementExample) {
  // level-5 cube [1, 33/32] placed for the last normalized block at delta 1/576
  const NormalizedPattern np = normalize(lacuna::test::ap_pattern());
  const Cube parent{address_of(0, 5, 1, 5), {Rational(1)}, Rational(1, 32)};
  const LatticePlacement p = place_on_lattice(parent, np, 2, Rational(1, 576), sqrt_bounds(1));
  EXPECT_EQ(p.z, (std::vector<Integer>{73}));
  EXPECT_EQ(p.child.lower, (Point{Rational(1175, 1152)}));
  EXPECT_EQ(p.child.side, Rational(1, 576));
  EXPECT_EQ(lattice_point(p.child, np, 2), p.z);
  EXPECT_FALSE(lattice_point(parent, np, 2).has_value());
}

TEST(Engine, PlacedChildAtFirstMLevel) {
  const ConstructionState s = lacuna::test::ap_state(6);
  // cube 0 at level 5 descends from tuple member 0 (block 0, lambda 1, no shift)
  const Cube child = s.cube(6, 0);
  EXPECT_EQ(child.lower, (Point{Rational(389, 384)}));
  // a cube under level-2 cube 3 (not in the tuple) keeps its parent's corner
  const std::uint64_t i = 3u << 3;
  EXPECT_EQ(s.cube(5, i).lower, (Point{Rational(7, 4)}));
  EXPECT_EQ(s.cube(6, i).lower, (Point{Rational(7, 4)}));
  EXPECT_EQ(s.cube(6, i).side, Rational(1, 576));
  EXPECT_EQ(s.cube(6, i).address, CubeAddress({1, 1, 0, 0, 0}, 6));
}

TEST(Engine, BuildIsDeterministic) {
  const ConstructionState a = lacuna::test::ap_state(12), b = lacuna::test::ap_state(12);
  EXPECT_EQ(a.schedule, b.schedule);
  EXPECT_TRUE(a.layers == b.layers);
  EXPECT_EQ(a.deltas, b.deltas);
}

TEST(Engine, BuildRespectsTheCap) {
  ConstructionState s = init(1, {lacuna::test::ap_pattern()}, parse_dimfn("pow:1/2", 1), EngineOptions{8});
  EXPECT_TRUE(throws_kind([&] { build(s, 9); }, ErrorKind::ScheduleOverflow));
  build(s, 8);
  EXPECT_TRUE(throws_kind([&] { advance_level(s); }, ErrorKind::ScheduleOverflow));
  // the second M-level (11) is out of reach under cap 8
  EXPECT_TRUE(s.schedule_exhausted);
  EXPECT_FALSE(s.pending.has_value());
}

TEST(Engine, CubeCapacityLimit) {
  EngineOptions opts;
  opts.max_cubes_per_level = 100;
  ConstructionState s = init(1, {lacuna::test::ap_pattern()}, parse_dimfn("pow:1/2", 1), opts);
  EXPECT_TRUE(throws_kind([&] { build(s, 8); }, ErrorKind::CapacityExceeded));
}

TEST(Engine, LevelCapFromEnvironment) {
  ::unsetenv("LACUNA_LEVEL_CAP");
  EXPECT_EQ(level_cap_from_env(), 64);
  EXPECT_EQ(level_cap_from_env(30), 30);
  ::setenv("LACUNA_LEVEL_CAP", "7", 1);
  EXPECT_EQ(level_cap_from_env(), 7);
  ::setenv("LACUNA_LEVEL_CAP", "seven", 1);
  EXPECT_TRUE(throws_kind([] { (void)level_cap_from_env(); }, ErrorKind::InvalidArgument));
  ::unsetenv("LACUNA_LEVEL_CAP");
}

TEST(Engine, RestoreAcceptsAnExportedState) {
  const ConstructionState s = lacuna::test::ap_state(12);
  const ConstructionState r = restore(1, s.patterns, s.h, s.schedule, s.layers);
  EXPECT_EQ(r.schedule, s.schedule);
  EXPECT_EQ(r.deltas, s.deltas);
  EXPECT_TRUE(r.layers == s.layers);
  ASSERT_TRUE(r.pending.has_value());
  EXPECT_EQ(*r.pending, *s.pending);
}

TEST(Engine, RestoreRejectsTampering) {
  const ConstructionState s = lacuna::test::ap_state(12);
  std::vector<ScheduleEntry> wrong = s.schedule;
  wrong[1].tuple = {0, 1, 2};
  EXPECT_TRUE(throws_kind([&] { (void)restore(1, s.patterns, s.h, wrong, s.layers); }, ErrorKind::StructureViolated));
  std::vector<ScheduleEntry> missing(s.schedule.begin(), s.schedule.begin() + 1);
  EXPECT_TRUE(throws_kind([&] { (void)restore(1, s.patterns, s.h, missing, s.layers); }, ErrorKind::StructureViolated));
  std::vector<Layer> short_layers(s.layers.begin(), s.layers.end() - 1);
  short_layers.back() = s.layers[3];
  EXPECT_TRUE(throws_kind([&] { (void)restore(1, s.patterns, s.h, s.schedule, short_layers); },
                          ErrorKind::StructureViolated));
}

// ----- properties ----------------------------------------------------------

namespace {

ConstructionState random_build(Gen& gen, int d, int depth) {
  std::vector<LinearPattern> patterns;
  const int count = static_cast<int>(gen.integer(1, 2));
  for (int j = 0; j < count; ++j) {
    const int m = static_cast<int>(gen.integer(2, 3));
    std::vector<Rational> coeffs;
    for (int t = 0; t < d * m; ++t) coeffs.push_back(gen.rational(6, 4));
    if (std::all_of(coeffs.begin(), coeffs.end(), [](const Rational& b) { return b == 0; })) coeffs[0] = 1;
    patterns.emplace_back(d, m, coeffs);
  }
  ConstructionState s = init(d, patterns, parse_dimfn(d == 1 ? "pow:1/2" : "pow:1/1", d));
  build(s, depth);
  return s;
}

}  // namespace

TEST(EngineProperty, FastPlacementMatchesRationalPlacement) {
  Gen gen(53);
  int checked = 0;
  for (int trial = 0; trial < 12; ++trial) {
    const int d = trial % 3 == 2 ? 2 : 1;
    const ConstructionState s = random_build(gen, d, d == 1 ? 13 : 7);
    for (const ScheduleEntry& e : s.schedule) {
      const NormalizedPattern& np = s.normalized[static_cast<std::size_t>(e.pattern_id)];
      const int k = e.level_M;
      for (std::uint64_t i = 0; i < s.layers[static_cast<std::size_t>(k)].size(); ++i) {
        const std::uint64_t anc = s.ancestor(k, i, e.level);
        const auto it = std::find(e.tuple.begin(), e.tuple.end(), anc);
        const Cube parent = s.cube(k - 1, i), child = s.cube(k, i);
        if (it == e.tuple.end()) {
          EXPECT_EQ(child.lower, parent.lower);
          continue;
        }
        const int block = static_cast<int>(it - e.tuple.begin());
        const LatticePlacement p = place_on_lattice(parent, np, block, s.deltas[static_cast<std::size_t>(k)], s.sqrt_d);
        EXPECT_EQ(child.lower, p.child.lower);
        EXPECT_EQ(lattice_point(child, np, block), p.z);
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 100);
}

TEST(EngineProperty, NestedAndDisjoint) {
  Gen gen(54);
  for (int trial = 0; trial < 6; ++trial) {
    const int d = trial % 2 ? 2 : 1;
    const ConstructionState s = random_build(gen, d, d == 1 ? 11 : 6);
    const std::vector<LevelInfo> profile = s.profile();
    for (int k = 1; k <= s.depth(); ++k) {
      const std::uint64_t n = s.layers[static_cast<std::size_t>(k)].size();
      EXPECT_EQ(Integer(static_cast<unsigned long>(n)), profile[static_cast<std::size_t>(k)].count);
      std::vector<Cube> cubes;
      for (std::uint64_t i = 0; i < n; ++i) {
        cubes.push_back(s.cube(k, i));
        EXPECT_TRUE(s.cube(k - 1, s.ancestor(k, i, k - 1)).contains(cubes.back()));
      }
      if (n > 256) continue;
      for (std::size_t a = 0; a < cubes.size(); ++a) {
        for (std::size_t b = a + 1; b < cubes.size(); ++b) {
          bool separated = false;
          for (int v = 0; v < d; ++v) {
            const Rational& x = cubes[a].lower[static_cast<std::size_t>(v)];
            const Rational& y = cubes[b].lower[static_cast<std::size_t>(v)];
            if (x + cubes[a].side <= y || y + cubes[b].side <= x) separated = true;
          }
          EXPECT_TRUE(separated) << "level " << k << " cubes " << a << ", " << b;
        }
      }
    }
  }
}

TEST(EngineProperty, PlacementStaysNearTheParentCenter) {
  Gen gen(55);
  for (int i = 0; i < 300; ++i) {
    const int d = static_cast<int>(gen.integer(1, 3));
    std::vector<Rational> coeffs;
    for (int t = 0; t < 2 * d; ++t) coeffs.push_back(gen.rational(8, 5));
    if (std::all_of(coeffs.begin(), coeffs.end(), [](const Rational& b) { return b == 0; })) coeffs[0] = 1;
    const NormalizedPattern np = normalize(LinearPattern(d, 2, coeffs));
    const SqrtBounds sq = sqrt_bounds(d);
    const Integer beta = compute_beta(np, sq);
    const Rational side(1, pow2(static_cast<unsigned long>(gen.integer(2, 12))));
    Point lower;
    for (int v = 0; v < d; ++v) lower.push_back(1 + side * Integer(gen.integer(0, 100)));
    const Cube parent{CubeAddress{}, lower, side};
    const Rational delta = side / (2 * Rational(beta));
    const int block = static_cast<int>(gen.integer(0, 1));
    const LatticePlacement p = place_on_lattice(parent, np, block, delta, sq);
    EXPECT_TRUE(parent.contains(p.child));
    Rational dist2 = 0;
    const Point pc = parent.center(), cc = p.child.center();
    for (int v = 0; v < d; ++v) dist2 += (pc[static_cast<std::size_t>(v)] - cc[static_cast<std::size_t>(v)]) *
                                         (pc[static_cast<std::size_t>(v)] - cc[static_cast<std::size_t>(v)]);
    const Rational bound = delta * np.max_lambda * 2 * np.c * sq.hi;
    EXPECT_LE(dist2, bound * bound);
  }
}
