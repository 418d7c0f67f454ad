#include "lacuna/engine.hpp"

#include <algorithm>
#include <cstdlib>
#include <cstring>

#include "lacuna/error.hpp"

namespace lacuna {

// ----- addresses -----------------------------------------------------------

namespace {

constexpr std::string_view kDigitChars = "0123456789abcdefghijklmnopqrstuvwxyz";

bool compact_digits(int d) { return d <= 5; }  // 2^d <= 36

int digit_value(char ch) {
  const auto pos = kDigitChars.find(ch);
  return pos == std::string_view::npos ? -1 : static_cast<int>(pos);
}

}  // namespace

std::string CubeAddress::to_string(int d) const {
  std::string out;
  if (compact_digits(d)) {
    out.reserve(digits.size());
    for (std::uint32_t g : digits) out.push_back(kDigitChars[g]);
    return out;
  }
  for (std::size_t j = 0; j < digits.size(); ++j) {
    if (j) out.push_back('.');
    out += std::to_string(digits[j]);
  }
  return out;
}

CubeAddress CubeAddress::parse(std::string_view text, int d, int level) {
  CubeAddress a;
  a.level = level;
  const std::uint64_t base = std::uint64_t{1} << d;
  if (compact_digits(d)) {
    for (char ch : text) {
      const int g = digit_value(ch);
      if (g < 0 || static_cast<std::uint64_t>(g) >= base) {
        throw Error(ErrorKind::ParseError, "bad address digit in '" + std::string(text) + "'");
      }
      a.digits.push_back(static_cast<std::uint32_t>(g));
    }
    return a;
  }
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('.', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string part(text.substr(start, end - start));
    char* stop = nullptr;
    const unsigned long g = std::strtoul(part.c_str(), &stop, 10);
    if (part.empty() || *stop != '\0' || g >= base) {
      throw Error(ErrorKind::ParseError, "bad address digit in '" + std::string(text) + "'");
    }
    a.digits.push_back(static_cast<std::uint32_t>(g));
    start = end + 1;
  }
  return a;
}

CubeAddress address_of(std::uint64_t index, int digit_count, int d, int level) {
  CubeAddress a;
  a.level = level;
  a.digits.resize(static_cast<std::size_t>(digit_count));
  const std::uint64_t mask = (std::uint64_t{1} << d) - 1;
  for (int j = digit_count - 1; j >= 0; --j) {
    a.digits[static_cast<std::size_t>(j)] = static_cast<std::uint32_t>(index & mask);
    index >>= d;
  }
  return a;
}

std::uint64_t index_of(const CubeAddress& address, int d) {
  if (static_cast<std::size_t>(d) * address.digits.size() > 63) {
    throw Error(ErrorKind::CapacityExceeded, "address too long to index");
  }
  std::uint64_t index = 0;
  for (std::uint32_t g : address.digits) index = (index << d) | g;
  return index;
}

// ----- cubes ---------------------------------------------------------------

Point Cube::center() const {
  Point c;
  c.reserve(lower.size());
  const Rational half = side / 2;
  for (const Rational& x : lower) c.emplace_back(x + half);
  return c;
}

bool Cube::contains(const Cube& other) const {
  if (other.lower.size() != lower.size()) return false;
  for (std::size_t v = 0; v < lower.size(); ++v) {
    if (other.lower[v] < lower[v] || other.lower[v] + other.side > lower[v] + side) return false;
  }
  return true;
}

// ----- layer ---------------------------------------------------------------

Layer::Layer(int d, std::uint64_t count, Integer denominator) : d_(d), count_(count), den_(std::move(denominator)) {
  if (den_ <= 0) throw Error(ErrorKind::InvalidArgument, "layer denominator must be positive");
  cap_ = 4 * den_;
  limbs_ = mpz_size(cap_.get_mpz_t());
  const std::size_t total = static_cast<std::size_t>(count_) * static_cast<std::size_t>(d_) * limbs_;
  data_.assign(total, 0);
}

Layer Layer::from_points(int d, std::span<const Point> lowers) {
  Integer den = 1;
  for (const Point& p : lowers) {
    if (p.size() != static_cast<std::size_t>(d)) throw Error(ErrorKind::DimensionMismatch, "point has wrong dimension");
    for (const Rational& x : p) den = lcm(den, x.get_den());
  }
  Layer layer(d, lowers.size(), den);
  for (std::size_t i = 0; i < lowers.size(); ++i) layer.set_lower(i, lowers[i]);
  return layer;
}

void Layer::load(std::uint64_t index, int coord, Integer& out) const {
  const mp_limb_t* src = data_.data() + (static_cast<std::size_t>(index) * static_cast<std::size_t>(d_) +
                                         static_cast<std::size_t>(coord)) * limbs_;
  mp_limb_t* dst = mpz_limbs_write(out.get_mpz_t(), static_cast<mp_size_t>(limbs_));
  std::memcpy(dst, src, limbs_ * sizeof(mp_limb_t));
  mpz_limbs_finish(out.get_mpz_t(), static_cast<mp_size_t>(limbs_));
}

Integer Layer::numerator(std::uint64_t index, int coord) const {
  Integer out;
  load(index, coord, out);
  return out;
}

void Layer::store(std::uint64_t index, int coord, const Integer& numerator) {
  const std::size_t n = mpz_size(numerator.get_mpz_t());
  if (sgn(numerator) < 0 || n > limbs_ || (n == limbs_ && numerator > cap_)) throw Error(ErrorKind::CapacityExceeded, "coordinate does not fit its slot");
  mp_limb_t* dst = data_.data() + (static_cast<std::size_t>(index) * static_cast<std::size_t>(d_) +
                                   static_cast<std::size_t>(coord)) * limbs_;
  if (n) std::memcpy(dst, mpz_limbs_read(numerator.get_mpz_t()), n * sizeof(mp_limb_t));
  std::fill(dst + n, dst + limbs_, mp_limb_t{0});
}

Rational Layer::coord(std::uint64_t index, int c) const {
  Rational q(numerator(index, c), den_);
  q.canonicalize();
  return q;
}

Point Layer::lower(std::uint64_t index) const {
  Point p;
  p.reserve(static_cast<std::size_t>(d_));
  for (int v = 0; v < d_; ++v) p.push_back(coord(index, v));
  return p;
}

void Layer::set_lower(std::uint64_t index, std::span<const Rational> lower) {
  if (lower.size() != static_cast<std::size_t>(d_)) throw Error(ErrorKind::DimensionMismatch, "point has wrong dimension");
  for (int v = 0; v < d_; ++v) {
    const Rational scaled = lower[static_cast<std::size_t>(v)] * den_;
    if (scaled.get_den() != 1) throw Error(ErrorKind::InvalidArgument, "coordinate is not a multiple of 1/D");
    store(index, v, scaled.get_num());
  }
}

// ----- state ---------------------------------------------------------------

int level_cap_from_env(int fallback) {
  const char* env = std::getenv("LACUNA_LEVEL_CAP");
  if (!env || !*env) return fallback;
  char* stop = nullptr;
  const long v = std::strtol(env, &stop, 10);
  if (*stop != '\0' || v < 0 || v > 100000) {
    throw Error(ErrorKind::InvalidArgument, std::string("LACUNA_LEVEL_CAP must be a non-negative integer, got '") + env + "'");
  }
  return static_cast<int>(v);
}

ScheduleParams ConstructionState::params() const {
  ScheduleParams p;
  p.d = d;
  p.sqrt_d = sqrt_d;
  for (const ScheduleEntry& e : schedule) {
    p.betas.push_back(e.beta);
    p.levels.push_back(e.level_M);
  }
  return p;
}

int ConstructionState::digit_count(int level) const {
  int m = 0;
  for (const ScheduleEntry& e : schedule) {
    if (e.level_M <= level) ++m;
  }
  return level - m;
}

std::uint64_t ConstructionState::ancestor(int level, std::uint64_t index, int ancestor_level) const {
  if (ancestor_level > level) throw Error(ErrorKind::InvalidArgument, "ancestor level above cube level");
  const int shift = d * (digit_count(level) - digit_count(ancestor_level));
  return index >> shift;
}

const ScheduleEntry* ConstructionState::entry_at_level(int k) const {
  for (const ScheduleEntry& e : schedule) {
    if (e.level_M == k) return &e;
  }
  return nullptr;
}

Cube ConstructionState::cube(int level, std::uint64_t index) const {
  if (level < 0 || level > depth()) throw Error(ErrorKind::InvalidArgument, "level not built");
  const Layer& layer = layers[static_cast<std::size_t>(level)];
  if (index >= layer.size()) throw Error(ErrorKind::InvalidArgument, "cube index out of range");
  return {address_of(index, digit_count(level), d, level), layer.lower(index), deltas[static_cast<std::size_t>(level)]};
}

std::vector<Point> ConstructionState::leaf_centers() const {
  const Layer& layer = layers.back();
  const Rational half = deltas.back() / 2;
  std::vector<Point> out;
  out.reserve(layer.size());
  for (std::uint64_t i = 0; i < layer.size(); ++i) {
    Point p = layer.lower(i);
    for (Rational& x : p) x += half;
    out.push_back(std::move(p));
  }
  return out;
}

// ----- schedule planning ---------------------------------------------------

namespace {

std::vector<int> arities_of(const std::vector<NormalizedPattern>& nps) {
  std::vector<int> a;
  for (const NormalizedPattern& np : nps) a.push_back(np.arity());
  return a;
}

/// N_L given the M-levels of the first `known` entries.
TupleEnumerator::LevelCount counter(int d, const std::vector<ScheduleEntry>& entries, std::size_t known) {
  std::vector<int> levels;
  for (std::size_t j = 0; j < known; ++j) levels.push_back(entries[j].level_M);
  return [d, levels](int level) {
    int m = 0;
    for (int M : levels) {
      if (M <= level) ++m;
    }
    return pow2(static_cast<unsigned long>(d) * static_cast<unsigned long>(level - m));
  };
}

/// Next entry after the first `known` entries of `entries`, or nullopt once no
/// admissible M-level remains under the cap.
std::optional<ScheduleEntry> plan_entry(ConstructionState& s, const std::vector<ScheduleEntry>& entries,
                                        std::size_t known) {
  const int cap = s.options.level_cap;
  TupleChoice choice;
  try {
    choice = s.enumerator.next(counter(s.d, entries, known), cap - 2);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Starved) return std::nullopt;
    throw;
  }
  const NormalizedPattern& np = s.normalized[static_cast<std::size_t>(choice.pattern_id)];
  std::vector<Integer> betas;
  for (std::size_t j = 0; j < known; ++j) betas.push_back(entries[j].beta);
  betas.push_back(compute_beta(np, s.sqrt_d));
  const int prev = known ? entries[known - 1].level_M : 0;
  const int min_level = std::max({2, prev + 2, choice.level + 2});
  int M = 0;
  try {
    M = find_level(s.h, s.sqrt_d, betas, min_level, cap);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ScheduleOverflow) return std::nullopt;
    throw;
  }
  ScheduleEntry entry;
  entry.index = static_cast<int>(known) + 1;
  entry.pattern_id = choice.pattern_id;
  entry.level = choice.level;
  entry.tuple = std::move(choice.tuple);
  entry.level_M = M;
  entry.beta = betas.back();
  return entry;
}

void plan_next(ConstructionState& s) {
  s.pending.reset();
  if (s.schedule_exhausted) return;
  s.pending = plan_entry(s, s.schedule, s.schedule.size());
  if (!s.pending) s.schedule_exhausted = true;
}

void validate_inputs(int d, const std::vector<LinearPattern>& patterns, const DimensionFunction& h) {
  if (d < 1) throw Error(ErrorKind::InvalidArgument, "dimension must be >= 1");
  if (patterns.empty()) throw Error(ErrorKind::InvalidArgument, "at least one pattern is required");
  for (const LinearPattern& p : patterns) {
    if (p.dimension() != d) throw Error(ErrorKind::DimensionMismatch, "pattern dimension differs from d");
  }
  if (h.dimension() != d) throw Error(ErrorKind::DimensionMismatch, "dimension function was made for another d");
}

ConstructionState base_state(int d, std::vector<LinearPattern> patterns, const DimensionFunction& h,
                             EngineOptions options) {
  validate_inputs(d, patterns, h);
  if (options.level_cap < 0) throw Error(ErrorKind::InvalidArgument, "level cap must be non-negative");
  ConstructionState s;
  s.d = d;
  s.h = h;
  s.patterns = std::move(patterns);
  for (const LinearPattern& p : s.patterns) s.normalized.push_back(normalize(p));
  s.sqrt_d = sqrt_bounds(d);
  s.options = options;
  s.enumerator = TupleEnumerator(arities_of(s.normalized));
  return s;
}

Integer den_of(const Rational& q) { return q.get_den(); }

Integer as_integer(const Rational& q) {
  if (q.get_den() != 1) throw Error(ErrorKind::StructureViolated, "expected an integer");
  return q.get_num();
}

/// Integer constants for one (block, coordinate) of the fast placement path.
struct AxisPlan {
  Integer num_coef;  // z = cdiv(P * num_coef + num_add, den)
  Integer num_add;
  Integer den;
  Integer G;  // child numerator = z * G + H
  Integer H;
};

void advance_dyadic(ConstructionState& s, int k) {
  const Layer& parent = s.layers.back();
  const Rational delta = s.deltas.back() / 2;
  const Integer D = lcm(parent.denominator(), den_of(delta));
  const Integer R = D / parent.denominator();
  const Integer E = as_integer(delta * D);
  const std::uint64_t fan = std::uint64_t{1} << s.d;
  if (parent.size() > s.options.max_cubes_per_level / fan) {
    throw Error(ErrorKind::CapacityExceeded, "level " + std::to_string(k) + " would exceed " +
                                                 std::to_string(s.options.max_cubes_per_level) + " cubes");
  }
  Layer child(s.d, parent.size() * fan, D);
  Integer p, base, c;
  for (std::uint64_t i = 0; i < parent.size(); ++i) {
    for (int v = 0; v < s.d; ++v) {
      parent.load(i, v, p);
      base = p * R;
      c = base + E;
      for (std::uint64_t g = 0; g < fan; ++g) child.store(i * fan + g, v, ((g >> v) & 1) ? c : base);
    }
  }
  s.layers.push_back(std::move(child));
  s.deltas.push_back(delta);
}

void advance_m_level(ConstructionState& s, int k, const ScheduleEntry& entry) {
  const NormalizedPattern& np = s.normalized[static_cast<std::size_t>(entry.pattern_id)];
  const Layer& parent = s.layers.back();
  const Rational delta_p = s.deltas.back();
  const Rational delta = delta_p / (2 * entry.beta);
  const int m = np.arity(), d = s.d;
  const Rational four_c = 4 * np.c;

  Integer D = lcm(parent.denominator(), den_of(delta));
  D = lcm(D, den_of(delta * (four_c / 2 - Rational(1, 2))));
  D = lcm(D, den_of(delta * Rational(-1, 2)));
  for (int l = 0; l < m; ++l) {
    for (int v = 0; v < d; ++v) D = lcm(D, den_of(delta * four_c * np.lam(l, v)));
  }
  const Integer R = D / parent.denominator();
  const Integer S_c = as_integer(delta * D);
  const Integer S_p = as_integer(delta_p * D);

  std::vector<AxisPlan> plan(static_cast<std::size_t>(m * d));
  for (int l = 0; l < m; ++l) {
    for (int v = 0; v < d; ++v) {
      const Rational scale = delta * four_c * np.lam(l, v);
      const Rational alpha = 1 / (Rational(parent.denominator()) * scale);
      const Rational gamma = delta_p / (2 * scale) - np.shift(l, v) / np.lam(l, v) - Rational(1, 2);
      AxisPlan& a = plan[static_cast<std::size_t>(l * d + v)];
      a.num_coef = alpha.get_num() * gamma.get_den();
      a.num_add = gamma.get_num() * alpha.get_den();
      a.den = alpha.get_den() * gamma.get_den();
      a.G = as_integer(scale * D);
      a.H = as_integer(delta * (four_c * np.shift(l, v) - Rational(1, 2)) * D);
    }
  }

  if (entry.level > k - 2) throw Error(ErrorKind::StructureViolated, "tuple level too close to its M-level");
  const int shift = d * (s.digit_count(k - 1) - s.digit_count(entry.level));
  Layer child(d, parent.size(), D);
  Integer p, lo, z, c;
  for (std::uint64_t i = 0; i < parent.size(); ++i) {
    const std::uint64_t anc = i >> shift;
    int block = -1;
    for (int l = 0; l < m; ++l) {
      if (entry.tuple[static_cast<std::size_t>(l)] == anc) block = l;
    }
    for (int v = 0; v < d; ++v) {
      parent.load(i, v, p);
      lo = p * R;
      if (block < 0) {
        child.store(i, v, lo);
        continue;
      }
      const AxisPlan& a = plan[static_cast<std::size_t>(block * d + v)];
      c = p * a.num_coef + a.num_add;
      mpz_cdiv_q(z.get_mpz_t(), c.get_mpz_t(), a.den.get_mpz_t());
      c = z * a.G + a.H;
      if (c < lo || c + S_c > lo + S_p) {
        throw Error(ErrorKind::PlacementFailure, "lattice cube leaves its parent at level " + std::to_string(k) +
                                                     ", cube " + std::to_string(i));
      }
      child.store(i, v, c);
    }
  }
  s.layers.push_back(std::move(child));
  s.deltas.push_back(delta);
}

}  // namespace

ConstructionState init(int d, std::vector<LinearPattern> patterns, const DimensionFunction& h, EngineOptions options) {
  ConstructionState s = base_state(d, std::move(patterns), h, options);
  Layer root(d, 1, Integer(1));
  for (int v = 0; v < d; ++v) root.store(0, v, Integer(1));
  s.layers.push_back(std::move(root));
  s.deltas.push_back(Rational(1));
  plan_next(s);
  return s;
}

void advance_level(ConstructionState& s) {
  const int k = s.depth() + 1;
  if (k > s.options.level_cap) {
    throw Error(ErrorKind::ScheduleOverflow, "depth " + std::to_string(k) + " exceeds the level cap " +
                                                 std::to_string(s.options.level_cap));
  }
  if (s.pending && s.pending->level_M == k) {
    const ScheduleEntry entry = *s.pending;
    for (std::uint64_t t : entry.tuple) {
      if (t >= s.layers[static_cast<std::size_t>(entry.level)].size()) {
        throw Error(ErrorKind::StructureViolated, "tuple member outside its level");
      }
    }
    advance_m_level(s, k, entry);
    s.schedule.push_back(entry);
    plan_next(s);
  } else {
    advance_dyadic(s, k);
  }
  if (!s.schedule.empty()) {
    const ScheduleParams p = s.params();
    if (!level_condition(s.h, s.sqrt_d, p.betas, k)) {
      throw Error(ErrorKind::MeasureViolated, "ratio condition fails at built level " + std::to_string(k));
    }
  }
}

void build(ConstructionState& s, int depth) {
  if (depth < 0) throw Error(ErrorKind::InvalidArgument, "depth must be non-negative");
  if (depth > s.options.level_cap) {
    throw Error(ErrorKind::ScheduleOverflow, "depth " + std::to_string(depth) + " exceeds the level cap " +
                                                 std::to_string(s.options.level_cap));
  }
  while (s.depth() < depth) advance_level(s);
}

ConstructionState restore(int d, std::vector<LinearPattern> patterns, const DimensionFunction& h,
                          std::vector<ScheduleEntry> schedule, std::vector<Layer> layers, EngineOptions options) {
  ConstructionState s = base_state(d, std::move(patterns), h, options);
  if (layers.empty()) throw Error(ErrorKind::StructureViolated, "tree has no levels");
  const int depth = static_cast<int>(layers.size()) - 1;
  if (depth > s.options.level_cap) s.options.level_cap = depth;

  for (std::size_t j = 0; j < schedule.size(); ++j) {
    const std::optional<ScheduleEntry> expected = plan_entry(s, schedule, j);
    if (!expected || !(*expected == schedule[j])) {
      throw Error(ErrorKind::StructureViolated, "schedule entry " + std::to_string(j + 1) +
                                                    " does not match the deterministic schedule");
    }
    if (schedule[j].level_M > depth) {
      throw Error(ErrorKind::StructureViolated, "schedule entry " + std::to_string(j + 1) + " lies beyond the tree depth");
    }
  }
  s.schedule = std::move(schedule);
  plan_next(s);
  if (s.pending && s.pending->level_M <= depth) {
    throw Error(ErrorKind::StructureViolated, "tree omits schedule entry " + std::to_string(s.pending->index));
  }

  const std::vector<LevelInfo> profile = level_profile(s.params(), depth);
  for (int k = 0; k <= depth; ++k) {
    const Layer& layer = layers[static_cast<std::size_t>(k)];
    if (layer.dimension() != d) throw Error(ErrorKind::DimensionMismatch, "layer dimension differs from d");
    if (Integer(static_cast<unsigned long>(layer.size())) != profile[static_cast<std::size_t>(k)].count) {
      throw Error(ErrorKind::StructureViolated, "level " + std::to_string(k) + " holds " + std::to_string(layer.size()) +
                                                    " cubes, expected " + profile[static_cast<std::size_t>(k)].count.get_str());
    }
    s.deltas.push_back(profile[static_cast<std::size_t>(k)].delta);
  }
  s.layers = std::move(layers);
  return s;
}

// ----- rational placement --------------------------------------------------

LatticePlacement place_on_lattice(const Cube& parent, const NormalizedPattern& np, int block, const Rational& delta,
                                  const SqrtBounds& sqrt_d) {
  const int d = np.dimension();
  if (parent.lower.size() != static_cast<std::size_t>(d)) {
    throw Error(ErrorKind::DimensionMismatch, "cube and pattern dimensions differ");
  }
  if (block < 0 || block >= np.arity()) throw Error(ErrorKind::InvalidArgument, "block index out of range");
  const Rational four_c = 4 * np.c;
  LatticePlacement out;
  out.child.address = parent.address;
  out.child.address.level = parent.address.level + 1;
  out.child.side = delta;
  Rational dist2 = 0;
  for (int v = 0; v < d; ++v) {
    const Rational x = (parent.lower[static_cast<std::size_t>(v)] + parent.side / 2) / delta;
    const Rational t = (x / four_c - np.shift(block, v)) / np.lam(block, v);
    const Integer z = ceil(t - Rational(1, 2));
    const Rational center = four_c * (np.lam(block, v) * z + np.shift(block, v));
    dist2 += (x - center) * (x - center);
    out.z.push_back(z);
    out.child.lower.push_back(delta * (center - Rational(1, 2)));
  }
  const Rational bound = np.max_lambda * 2 * np.c * sqrt_d.hi;
  if (dist2 > bound * bound) throw Error(ErrorKind::PlacementFailure, "lattice point too far from the parent center");
  if (!parent.contains(out.child)) throw Error(ErrorKind::PlacementFailure, "lattice cube leaves its parent");
  return out;
}

std::optional<std::vector<Integer>> lattice_point(const Cube& cube, const NormalizedPattern& np, int block) {
  const int d = np.dimension();
  if (cube.lower.size() != static_cast<std::size_t>(d)) return std::nullopt;
  const Rational four_c = 4 * np.c;
  std::vector<Integer> z;
  for (int v = 0; v < d; ++v) {
    const Rational x = (cube.lower[static_cast<std::size_t>(v)] + cube.side / 2) / cube.side;
    const Rational t = (x / four_c - np.shift(block, v)) / np.lam(block, v);
    if (t.get_den() != 1) return std::nullopt;
    z.push_back(t.get_num());
  }
  return z;
}

}  // namespace lacuna
