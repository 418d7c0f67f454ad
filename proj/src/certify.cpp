#include "lacuna/certify.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "lacuna/bounds.hpp"
#include "lacuna/error.hpp"

namespace lacuna {

namespace {

/// Number of leading-level digits to drop to reach `ancestor_level`.
int ancestor_shift(const ConstructionState& s, int level, int ancestor_level) {
  return s.d * (s.digit_count(level) - s.digit_count(ancestor_level));
}

/// t = ((2C + S) * a + b) / den recovers z for one axis of a placed child,
/// where C is the lower-corner numerator over D and S = delta * D.
struct AxisRecover {
  Integer a;
  Integer b;
  Integer den;
};

AxisRecover recover_plan(const NormalizedPattern& np, int block, int v, const Integer& S) {
  const Rational f = 1 / (2 * Rational(S) * 4 * np.c * np.lam(block, v));
  const Rational o = -np.shift(block, v) / np.lam(block, v);
  return {f.get_num() * o.get_den(), o.get_num() * f.get_den(), f.get_den() * o.get_den()};
}

/// z = ceil(t - 1/2) for t at the parent center: ((2P + S_p) * a + b) / den rounded up,
/// with P the parent corner numerator and S_p its side, both over D.
AxisRecover nearest_plan(const NormalizedPattern& np, int block, int v, const Integer& S) {
  const Rational f = 1 / (2 * Rational(S) * 4 * np.c * np.lam(block, v));
  const Rational o = -np.shift(block, v) / np.lam(block, v) - Rational(1, 2);
  return {f.get_num() * o.get_den(), o.get_num() * f.get_den(), f.get_den() * o.get_den()};
}

bool recover(const AxisRecover& r, const Integer& C, const Integer& S, Integer& z, Integer& tmp) {
  tmp = (2 * C + S) * r.a + r.b;
  if (!mpz_divisible_p(tmp.get_mpz_t(), r.den.get_mpz_t())) return false;
  mpz_divexact(z.get_mpz_t(), tmp.get_mpz_t(), r.den.get_mpz_t());
  return true;
}

struct KeyedChild {
  Integer key;
  std::uint64_t child;
};

/// Distinct lattice keys of one block, sorted, each with a representative child.
std::vector<KeyedChild> distinct_keys(std::vector<KeyedChild> keys) {
  std::sort(keys.begin(), keys.end(), [](const KeyedChild& x, const KeyedChild& y) {
    return x.key < y.key || (x.key == y.key && x.child < y.child);
  });
  keys.erase(std::unique(keys.begin(), keys.end(), [](const KeyedChild& x, const KeyedChild& y) { return x.key == y.key; }),
             keys.end());
  return keys;
}

struct PartialSum {
  Integer sum;
  std::uint32_t prev;  // index into the previous stage
  std::uint32_t key;   // index into this stage's block keys
};

Rational abs_half(const Integer& n) { return abs(Rational(n) + Rational(1, 2)); }

}  // namespace

// ----- gaps ----------------------------------------------------------------

GapCertificate certify_gap(const ConstructionState& s, const ScheduleEntry& entry, const GapOptions& options) {
  const int M = entry.level_M;
  if (M > s.depth() || !s.entry_at_level(M) || !(*s.entry_at_level(M) == entry)) {
    throw Error(ErrorKind::EntryNotProcessed, "entry " + std::to_string(entry.index) + " (M = " + std::to_string(M) +
                                                  ") is not processed at depth " + std::to_string(s.depth()));
  }
  const NormalizedPattern& np = s.normalized[static_cast<std::size_t>(entry.pattern_id)];
  const int d = s.d, m = np.arity(), L = entry.level;
  const Layer& layer = s.layers[static_cast<std::size_t>(M)];
  const Layer& members = s.layers[static_cast<std::size_t>(L)];
  const Rational delta = s.deltas[static_cast<std::size_t>(M)];
  const Integer& D = layer.denominator();
  const Rational S_q = delta * D;
  if (S_q.get_den() != 1) throw Error(ErrorKind::GapViolated, "side is not a multiple of 1/D at level " + std::to_string(M));
  const Integer S = S_q.get_num();
  const Rational member_side = s.deltas[static_cast<std::size_t>(L)] * D;
  if (member_side.get_den() != 1) throw Error(ErrorKind::GapViolated, "member side is not a multiple of 1/D");
  const int shift = ancestor_shift(s, M, L);

  GapCertificate cert;
  cert.entry = entry;
  cert.delta = delta;
  cert.c = np.c;
  cert.scale = np.scale;
  cert.threshold = np.c * delta;

  // lattice keys sum_v sg(b_{l,v}) z_v per block
  std::vector<std::vector<KeyedChild>> keys(static_cast<std::size_t>(m));
  Integer C, z, tmp, lo;
  for (int l = 0; l < m; ++l) {
    const std::uint64_t t = entry.tuple[static_cast<std::size_t>(l)];
    const std::uint64_t first = t << shift, last = (t + 1) << shift;
    if (last > layer.size()) throw Error(ErrorKind::GapViolated, "tuple member has no children at level " + std::to_string(M));
    std::vector<AxisRecover> plans;
    std::vector<Integer> member_lo;
    for (int v = 0; v < d; ++v) {
      plans.push_back(recover_plan(np, l, v, S));
      const Rational scaled = members.coord(t, v) * D;
      if (scaled.get_den() != 1) throw Error(ErrorKind::GapViolated, "member corner is not a multiple of 1/D");
      member_lo.push_back(scaled.get_num());
    }
    std::vector<KeyedChild>& block_keys = keys[static_cast<std::size_t>(l)];
    block_keys.reserve(static_cast<std::size_t>(last - first));
    for (std::uint64_t i = first; i < last; ++i) {
      Integer key = 0;
      for (int v = 0; v < d; ++v) {
        layer.load(i, v, C);
        const Integer& lo_v = member_lo[static_cast<std::size_t>(v)];
        if (C < lo_v || C + S > lo_v + member_side.get_num()) {
          throw Error(ErrorKind::GapViolated, "child " + std::to_string(i) + " at level " + std::to_string(M) +
                                                  " leaves tuple member " + std::to_string(t));
        }
        if (!recover(plans[static_cast<std::size_t>(v)], C, S, z, tmp)) {
          throw Error(ErrorKind::GapViolated, "child " + std::to_string(i) + " at level " + std::to_string(M) +
                                                  " is off the lattice of block " + std::to_string(l));
        }
        const int sg = sign(np.base.coeff(l, v));
        if (sg > 0) key += z;
        if (sg < 0) key -= z;
      }
      block_keys.push_back({std::move(key), i});
    }
    cert.children.push_back(last - first);
    block_keys = distinct_keys(std::move(block_keys));
  }

  // min |sum keys + 1/2|: fold blocks 0..m-2 exactly, then search the last block
  std::vector<std::vector<PartialSum>> stages;
  bool exact = true;
  {
    std::vector<PartialSum> stage;
    for (std::size_t j = 0; j < keys[0].size(); ++j) stage.push_back({keys[0][j].key, 0, static_cast<std::uint32_t>(j)});
    stages.push_back(std::move(stage));
  }
  for (int l = 1; l + 1 < m && exact; ++l) {
    const std::vector<PartialSum>& prev = stages.back();
    const std::vector<KeyedChild>& bk = keys[static_cast<std::size_t>(l)];
    if (static_cast<double>(prev.size()) * static_cast<double>(bk.size()) > static_cast<double>(options.fold_cap)) {
      exact = false;
      break;
    }
    std::vector<PartialSum> next;
    next.reserve(prev.size() * bk.size());
    for (std::size_t p = 0; p < prev.size(); ++p) {
      for (std::size_t j = 0; j < bk.size(); ++j) {
        next.push_back({prev[p].sum + bk[j].key, static_cast<std::uint32_t>(p), static_cast<std::uint32_t>(j)});
      }
    }
    std::sort(next.begin(), next.end(), [](const PartialSum& x, const PartialSum& y) { return x.sum < y.sum; });
    next.erase(std::unique(next.begin(), next.end(), [](const PartialSum& x, const PartialSum& y) { return x.sum == y.sum; }),
               next.end());
    stages.push_back(std::move(next));
  }

  const std::vector<KeyedChild>& last_keys = keys[static_cast<std::size_t>(m - 1)];
  if (exact) {
    const std::vector<PartialSum>& folded = stages.back();
    bool found = false;
    std::size_t best_p = 0, best_k = 0;
    Integer best_sum;
    Integer target;
    auto consider = [&](std::size_t p, std::size_t k) {
      const Integer total = folded[p].sum + last_keys[k].key;
      if (!found || abs_half(total) < abs_half(best_sum)) {
        found = true;
        best_sum = total;
        best_p = p;
        best_k = k;
      }
    };
    for (std::size_t p = 0; p < folded.size(); ++p) {
      target = -folded[p].sum;
      auto it = std::lower_bound(last_keys.begin(), last_keys.end(), target,
                                 [](const KeyedChild& x, const Integer& t) { return x.key < t; });
      if (it != last_keys.end()) consider(p, static_cast<std::size_t>(it - last_keys.begin()));
      if (it != last_keys.begin()) consider(p, static_cast<std::size_t>(it - last_keys.begin()) - 1);
    }
    cert.kappa = abs_half(best_sum);
    cert.method = "exact";

    // rebuild the minimizing children and evaluate psi exactly at their centers
    std::vector<std::uint64_t> argmin(static_cast<std::size_t>(m));
    argmin[static_cast<std::size_t>(m - 1)] = last_keys[best_k].child;
    std::size_t p = best_p;
    for (int l = m - 2; l >= 0; --l) {
      const PartialSum& ps = stages[static_cast<std::size_t>(l)][p];
      argmin[static_cast<std::size_t>(l)] = keys[static_cast<std::size_t>(l)][ps.key].child;
      p = ps.prev;
    }
    std::vector<Point> original(static_cast<std::size_t>(m));
    for (int l = 0; l < m; ++l) {
      Point c = layer.lower(argmin[static_cast<std::size_t>(l)]);
      for (Rational& x : c) x += delta / 2;
      original[static_cast<std::size_t>(np.perm[static_cast<std::size_t>(l)])] = std::move(c);
    }
    const Rational at_centers = np.scale * eval(s.patterns[static_cast<std::size_t>(entry.pattern_id)], original);
    if (at_centers != 4 * np.c * delta * (Rational(best_sum) + Rational(1, 2))) {
      throw Error(ErrorKind::GapViolated, "lattice identity fails at the minimizing centers of entry " +
                                              std::to_string(entry.index));
    }
  } else {
    Integer lo_sum = 0, hi_sum = 0;
    for (const std::vector<KeyedChild>& bk : keys) {
      lo_sum += bk.front().key;
      hi_sum += bk.back().key;
    }
    if (lo_sum >= 0) {
      cert.kappa = abs_half(lo_sum);
      cert.method = "hull";
    } else if (hi_sum <= -1) {
      cert.kappa = abs_half(hi_sum);
      cert.method = "hull";
    } else {
      cert.kappa = Rational(1, 2);
      cert.method = "lattice";
    }
  }

  cert.min_center = 4 * np.c * delta * cert.kappa;
  cert.gap = cert.min_center - np.c * delta;
  if (cert.kappa < Rational(1, 2) || cert.gap < cert.threshold || cert.gap <= 0) {
    throw Error(ErrorKind::GapViolated, "entry " + std::to_string(entry.index) + ": gap " + to_string(cert.gap) +
                                            " below threshold " + to_string(cert.threshold));
  }

  // random points inside the placed children
  std::mt19937_64 rng(options.seed ^ (static_cast<std::uint64_t>(entry.index) * 0x9e3779b97f4a7c15ULL));
  const Integer grid = pow2(20);
  std::uniform_int_distribution<unsigned long> unit(0, grid.get_ui());
  std::vector<Point> original(static_cast<std::size_t>(m));
  for (int sample = 0; sample < options.random_samples; ++sample) {
    for (int l = 0; l < m; ++l) {
      const std::uint64_t t = entry.tuple[static_cast<std::size_t>(l)];
      std::uniform_int_distribution<std::uint64_t> pick(t << shift, ((t + 1) << shift) - 1);
      Point x = layer.lower(pick(rng));
      for (Rational& xv : x) {
        Rational u(Integer(unit(rng)), grid);
        u.canonicalize();
        xv += delta * u;
      }
      original[static_cast<std::size_t>(np.perm[static_cast<std::size_t>(l)])] = std::move(x);
    }
    const Rational value = abs(np.scale * eval(s.patterns[static_cast<std::size_t>(entry.pattern_id)], original));
    if (value < cert.gap) {
      throw Error(ErrorKind::GapViolated, "random tuple of entry " + std::to_string(entry.index) + " has |psi| = " +
                                              to_string(value) + " below the gap " + to_string(cert.gap));
    }
    ++cert.random_checks;
  }
  return cert;
}

std::vector<GapCertificate> certify_gaps(const ConstructionState& s, const GapOptions& options) {
  std::vector<GapCertificate> out;
  for (const ScheduleEntry& e : s.schedule) out.push_back(certify_gap(s, e, options));
  return out;
}

// ----- measure -------------------------------------------------------------

MeasureCertificate certify_measure(const ConstructionState& s) {
  if (s.schedule.empty()) {
    const std::string where = s.pending ? " (M_1 = " + std::to_string(s.pending->level_M) + ")" : "";
    throw Error(ErrorKind::EntryNotProcessed, "depth " + std::to_string(s.depth()) + " is below the first M-level" + where);
  }
  MeasureCertificate cert;
  cert.k0 = s.schedule.front().level_M;
  cert.c2 = pow2(static_cast<unsigned long>(s.d));
  cert.c3_upper = Rational(cert.c2 * cert.c1) * pow(2 * s.sqrt_d.hi + 3, s.d);
  cert.lower_bound = 1 / cert.c3_upper;
  cert.condition = "conditional on the construction continuing per the schedule beyond depth " + std::to_string(s.depth());

  const std::vector<LevelInfo> profile = s.profile();
  for (int k = cert.k0; k <= s.depth(); ++k) {
    const LevelInfo& info = profile[static_cast<std::size_t>(k)];
    MeasureLevel level{k, info.count, info.delta, false};
    const Rational r = s.sqrt_d.lo * info.delta;
    bool ok = false;
    std::string why;
    if (r <= s.h.domain_cap()) {
      try {
        ok = value_ge(s.h, r, Rational(1, info.count));
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::Undecidable) throw;
        why = " (undecidable at the precision cap)";
      }
    } else {
      why = " (argument beyond the domain cap)";
    }
    if (!ok) throw Error(ErrorKind::MeasureViolated, "1/N_k <= h(sqrt(d) delta_k) fails at k = " + std::to_string(k) + why);
    level.ok = true;
    cert.per_level.push_back(level);
  }
  return cert;
}

// ----- structure -----------------------------------------------------------

namespace {

void fail_structure(int k, const std::string& what) {
  throw Error(ErrorKind::StructureViolated, "level " + std::to_string(k) + ": " + what);
}

/// Pairwise disjointness of interiors via a sweep along the first axis.
void sweep_disjoint(const Layer& layer, const Integer& S, int k) {
  const int d = layer.dimension();
  std::vector<std::vector<Integer>> lows(layer.size());
  for (std::uint64_t i = 0; i < layer.size(); ++i) {
    for (int v = 0; v < d; ++v) lows[i].push_back(layer.numerator(i, v));
  }
  std::vector<std::size_t> order(lows.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return lows[x] < lows[y]; });
  for (std::size_t a = 0; a < order.size(); ++a) {
    const std::vector<Integer>& p = lows[order[a]];
    for (std::size_t b = a + 1; b < order.size(); ++b) {
      const std::vector<Integer>& q = lows[order[b]];
      if (q[0] >= p[0] + S) break;
      bool overlap = true;
      for (int v = 1; v < d && overlap; ++v) {
        overlap = q[static_cast<std::size_t>(v)] < p[static_cast<std::size_t>(v)] + S &&
                  p[static_cast<std::size_t>(v)] < q[static_cast<std::size_t>(v)] + S;
      }
      if (overlap) fail_structure(k, "cubes " + std::to_string(order[a]) + " and " + std::to_string(order[b]) + " overlap");
    }
  }
}

}  // namespace

StructureReport verify_structure(const ConstructionState& s, std::uint64_t sweep_cap) {
  const int d = s.d;
  const std::vector<LevelInfo> profile = s.profile();
  if (s.layers.size() != profile.size() || s.deltas.size() != profile.size()) fail_structure(0, "level bookkeeping mismatch");
  StructureReport report;

  const Layer& root = s.layers.front();
  if (root.size() != 1 || s.deltas.front() != 1) fail_structure(0, "expected the single cube [1,2]^d");
  for (int v = 0; v < d; ++v) {
    if (root.coord(0, v) != 1) fail_structure(0, "expected the single cube [1,2]^d");
  }
  report.levels = 1;
  report.cubes = 1;

  Integer P, C, lo, tmp, z;
  for (int k = 1; k <= s.depth(); ++k) {
    const LevelInfo& info = profile[static_cast<std::size_t>(k)];
    const Layer& parent = s.layers[static_cast<std::size_t>(k - 1)];
    const Layer& layer = s.layers[static_cast<std::size_t>(k)];
    if (layer.dimension() != d) fail_structure(k, "wrong dimension");
    if (Integer(static_cast<unsigned long>(layer.size())) != info.count) {
      fail_structure(k, std::to_string(layer.size()) + " cubes, expected " + info.count.get_str());
    }
    if (s.deltas[static_cast<std::size_t>(k)] != info.delta) fail_structure(k, "side length differs from delta_k");

    const Integer D = lcm(parent.denominator(), layer.denominator());
    const Integer Rp = D / parent.denominator(), Rc = D / layer.denominator();
    const Rational Sc_q = info.delta * D, Sp_q = s.deltas[static_cast<std::size_t>(k - 1)] * D;
    if (Sc_q.get_den() != 1 || Sp_q.get_den() != 1) fail_structure(k, "side lengths are not multiples of 1/D");
    const Integer Sc = Sc_q.get_num(), Sp = Sp_q.get_num();

    const ScheduleEntry* entry = s.entry_at_level(k);
    if (!entry) {
      const std::uint64_t fan = std::uint64_t{1} << d;
      for (std::uint64_t i = 0; i < parent.size(); ++i) {
        for (int v = 0; v < d; ++v) {
          parent.load(i, v, P);
          lo = P * Rp;
          for (std::uint64_t g = 0; g < fan; ++g) {
            layer.load(i * fan + g, v, C);
            C *= Rc;
            if (C != (((g >> v) & 1) ? Integer(lo + Sc) : lo)) {
              fail_structure(k, "cube " + std::to_string(i * fan + g) + " is not the dyadic child of its parent");
            }
          }
        }
      }
    } else {
      const NormalizedPattern& np = s.normalized[static_cast<std::size_t>(entry->pattern_id)];
      const int shift = ancestor_shift(s, k - 1, entry->level);
      std::vector<AxisRecover> plans, nearest;
      for (int l = 0; l < np.arity(); ++l) {
        for (int v = 0; v < d; ++v) {
          plans.push_back(recover_plan(np, l, v, Sc));
          nearest.push_back(nearest_plan(np, l, v, Sc));
        }
      }
      Integer want;
      for (std::uint64_t i = 0; i < parent.size(); ++i) {
        const std::uint64_t anc = i >> shift;
        int block = -1;
        for (int l = 0; l < np.arity(); ++l) {
          if (entry->tuple[static_cast<std::size_t>(l)] == anc) block = l;
        }
        for (int v = 0; v < d; ++v) {
          parent.load(i, v, P);
          lo = P * Rp;
          layer.load(i, v, C);
          C *= Rc;
          if (block < 0) {
            if (C != lo) fail_structure(k, "cube " + std::to_string(i) + " is not anchored at its parent's corner");
            continue;
          }
          if (C < lo || C + Sc > lo + Sp) fail_structure(k, "cube " + std::to_string(i) + " leaves its parent");
          if (!recover(plans[static_cast<std::size_t>(block * d + v)], C, Sc, z, tmp)) {
            fail_structure(k, "cube " + std::to_string(i) + " is off the lattice");
          }
          const AxisRecover& n = nearest[static_cast<std::size_t>(block * d + v)];
          tmp = (2 * lo + Sp) * n.a + n.b;
          mpz_cdiv_q(want.get_mpz_t(), tmp.get_mpz_t(), n.den.get_mpz_t());
          if (z != want) fail_structure(k, "cube " + std::to_string(i) + " is not the lattice point nearest its parent's center");
        }
      }
    }
    if (layer.size() <= sweep_cap) {
      const Rational S_own = info.delta * layer.denominator();
      if (S_own.get_den() != 1) fail_structure(k, "side is not a multiple of 1/D");
      sweep_disjoint(layer, S_own.get_num(), k);
      ++report.overlap_sweeps;
    }
    ++report.levels;
    report.cubes += layer.size();
  }
  return report;
}

// ----- oracle --------------------------------------------------------------

namespace {

Rational block_value(const LinearPattern& p, int block, const Point& x) {
  Rational w = 0;
  for (int v = 0; v < p.dimension(); ++v) {
    if (p.coeff(block, v) != 0) w += p.coeff(block, v) * x[static_cast<std::size_t>(v)];
  }
  return w;
}

/// Instances with variable j drawn from candidates[j]; the last variable with a
/// nonzero row is solved by binary search.
OracleResult oracle_core(std::span<const Point> points, const LinearPattern& pattern,
                         const std::vector<std::vector<std::size_t>>& candidates, const OracleOptions& options) {
  const int m = pattern.arity();
  int solve = -1;
  for (int l = 0; l < m; ++l) {
    for (int v = 0; v < pattern.dimension(); ++v) {
      if (pattern.coeff(l, v) != 0) solve = l;
    }
  }
  if (solve < 0) throw Error(ErrorKind::ZeroPattern, "all coefficients vanish");

  std::vector<std::pair<Rational, std::size_t>> solved;
  for (std::size_t idx : candidates[static_cast<std::size_t>(solve)]) {
    solved.emplace_back(block_value(pattern, solve, points[idx]), idx);
  }
  std::sort(solved.begin(), solved.end());

  std::vector<int> order;  // enumerated variables
  for (int l = 0; l < m; ++l) {
    if (l != solve) order.push_back(l);
  }
  // precompute block values of every candidate
  std::vector<std::vector<Rational>> values(static_cast<std::size_t>(m));
  for (int l : order) {
    for (std::size_t idx : candidates[static_cast<std::size_t>(l)]) {
      values[static_cast<std::size_t>(l)].push_back(block_value(pattern, l, points[idx]));
    }
  }

  OracleResult result;
  std::vector<std::size_t> chosen(static_cast<std::size_t>(m));
  std::vector<Rational> partial(order.size() + 1, Rational(0));
  const auto used = [&](std::size_t idx, std::size_t depth) {
    for (std::size_t j = 0; j < depth; ++j) {
      if (chosen[static_cast<std::size_t>(order[j])] == idx) return true;
    }
    return false;
  };

  std::vector<std::size_t> cursor(order.size(), 0);
  std::size_t depth = 0;
  // iterative DFS over the enumerated variables
  for (;;) {
    if (depth == order.size()) {
      ++result.tuples;
      const Rational lo_t = -partial[depth] - options.tolerance, hi_t = -partial[depth] + options.tolerance;
      auto it = std::lower_bound(solved.begin(), solved.end(), lo_t,
                                 [](const std::pair<Rational, std::size_t>& x, const Rational& t) { return x.first < t; });
      for (; it != solved.end() && it->first <= hi_t; ++it) {
        if (used(it->second, depth)) continue;
        chosen[static_cast<std::size_t>(solve)] = it->second;
        result.instances.push_back(chosen);
        if (options.max_instances && result.instances.size() >= options.max_instances) {
          result.truncated = true;
          return result;
        }
      }
      if (depth == 0) break;
      --depth;
      ++cursor[depth];
      continue;
    }
    const int var = order[depth];
    const std::vector<std::size_t>& cands = candidates[static_cast<std::size_t>(var)];
    while (cursor[depth] < cands.size() && used(cands[cursor[depth]], depth)) ++cursor[depth];
    if (cursor[depth] == cands.size()) {
      cursor[depth] = 0;
      if (depth == 0) break;
      --depth;
      ++cursor[depth];
      continue;
    }
    chosen[static_cast<std::size_t>(var)] = cands[cursor[depth]];
    partial[depth + 1] = partial[depth] + values[static_cast<std::size_t>(var)][cursor[depth]];
    ++depth;
    if (depth < order.size()) cursor[depth] = 0;
  }
  return result;
}

}  // namespace

OracleResult brute_oracle(std::span<const Point> points, const LinearPattern& pattern, const OracleOptions& options) {
  if (options.tolerance < 0) throw Error(ErrorKind::InvalidArgument, "tolerance must be non-negative");
  for (const Point& p : points) {
    if (p.size() != static_cast<std::size_t>(pattern.dimension())) {
      throw Error(ErrorKind::DimensionMismatch, "point dimension differs from the pattern");
    }
  }
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return points[x] < points[y]; });
  for (std::size_t j = 1; j < order.size(); ++j) {
    if (points[order[j]] == points[order[j - 1]]) throw Error(ErrorKind::InvalidArgument, "points must be pairwise distinct");
  }
  std::vector<std::size_t> all(points.size());
  std::iota(all.begin(), all.end(), 0);
  const std::vector<std::vector<std::size_t>> candidates(static_cast<std::size_t>(pattern.arity()), all);
  return oracle_core(points, pattern, candidates, options);
}

const ScheduleEntry* covering_entry(const ConstructionState& s, int pattern_id, std::span<const std::size_t> leaves) {
  for (const ScheduleEntry& e : s.schedule) {
    if (e.pattern_id != pattern_id) continue;
    const NormalizedPattern& np = s.normalized[static_cast<std::size_t>(pattern_id)];
    if (leaves.size() != static_cast<std::size_t>(np.arity())) continue;
    const int shift = ancestor_shift(s, s.depth(), e.level);
    bool match = true;
    for (int l = 0; l < np.arity() && match; ++l) {
      const std::size_t leaf = leaves[static_cast<std::size_t>(np.perm[static_cast<std::size_t>(l)])];
      match = (static_cast<std::uint64_t>(leaf) >> shift) == e.tuple[static_cast<std::size_t>(l)];
    }
    if (match) return &e;
  }
  return nullptr;
}

OracleResult covered_oracle(const ConstructionState& s, const OracleOptions& options) {
  const std::vector<Point> centers = s.leaf_centers();
  OracleResult total;
  for (const ScheduleEntry& e : s.schedule) {
    const NormalizedPattern& np = s.normalized[static_cast<std::size_t>(e.pattern_id)];
    const int shift = ancestor_shift(s, s.depth(), e.level);
    std::vector<std::vector<std::size_t>> candidates(static_cast<std::size_t>(np.arity()));
    for (int l = 0; l < np.arity(); ++l) {
      const std::uint64_t t = e.tuple[static_cast<std::size_t>(l)];
      auto& c = candidates[static_cast<std::size_t>(np.perm[static_cast<std::size_t>(l)])];
      for (std::uint64_t i = t << shift; i < ((t + 1) << shift); ++i) c.push_back(static_cast<std::size_t>(i));
    }
    OracleResult r = oracle_core(centers, s.patterns[static_cast<std::size_t>(e.pattern_id)], candidates, options);
    total.tuples += r.tuples;
    for (auto& inst : r.instances) total.instances.push_back(std::move(inst));
    if (r.truncated || (options.max_instances && total.instances.size() >= options.max_instances)) {
      total.truncated = true;
      break;
    }
  }
  return total;
}

// ----- diagnostics ---------------------------------------------------------

std::vector<DimensionLevel> box_dimension_profile(const ConstructionState& s, int bits) {
  if (s.depth() < 1) throw Error(ErrorKind::InvalidArgument, "box dimension profile needs depth >= 1");
  const ScheduleParams params = s.params();
  const std::vector<LevelInfo> profile = s.profile();
  std::vector<Interval> log_beta;
  for (const Integer& b : params.betas) log_beta.push_back(bounds::log2(Rational(b), bits));

  std::vector<DimensionLevel> out;
  for (int k = 1; k <= s.depth(); ++k) {
    const LevelInfo& info = profile[static_cast<std::size_t>(k)];
    DimensionLevel row;
    row.k = k;
    row.count = info.count;
    row.delta = info.delta;
    const Rational n = s.d * (k - info.m_levels);
    row.log2_count = {n, n};
    row.log2_inv_delta = {Rational(k), Rational(k)};
    for (std::size_t i = 0; i < params.levels.size(); ++i) {
      if (params.levels[i] <= k) {
        row.log2_inv_delta.lo += log_beta[i].lo;
        row.log2_inv_delta.hi += log_beta[i].hi;
      }
    }
    row.ratio = {n / row.log2_inv_delta.hi, n / row.log2_inv_delta.lo};
    out.push_back(row);
  }
  return out;
}

}  // namespace lacuna
