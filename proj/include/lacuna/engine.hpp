#pragma once

// Nested cube construction E_0 ⊇ E_1 ⊇ ... in exact rational geometry.
//
// Level k holds N_k closed cubes of side delta_k. A cube's index within its
// level encodes its address: ordinary levels append one base-2^d digit
// (child = parent * 2^d + digit, bit v of the digit selects the upper half
// along axis v); M-levels keep one child per parent at the parent's index.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lacuna/dimfn.hpp"
#include "lacuna/pattern.hpp"
#include "lacuna/rational.hpp"
#include "lacuna/schedule.hpp"

namespace lacuna {

struct CubeAddress {
  std::vector<std::uint32_t> digits;
  int level = 0;

  /// One base-36 character per digit when 2^d <= 36, else '.'-separated decimals.
  std::string to_string(int d) const;
  static CubeAddress parse(std::string_view text, int d, int level);

  friend bool operator==(const CubeAddress&, const CubeAddress&) = default;
};

CubeAddress address_of(std::uint64_t index, int digit_count, int d, int level);
std::uint64_t index_of(const CubeAddress& address, int d);

struct Cube {
  CubeAddress address;
  Point lower;
  Rational side;

  Point center() const;
  bool contains(const Cube& other) const;
};

/// Lower corners of one level, stored as non-negative integer numerators over
/// a common denominator in a flat limb array.
class Layer {
 public:
  Layer() = default;
  Layer(int d, std::uint64_t count, Integer denominator);

  /// Denominator is the lcm of the coordinates' denominators.
  static Layer from_points(int d, std::span<const Point> lowers);

  int dimension() const { return d_; }
  std::uint64_t size() const { return count_; }
  const Integer& denominator() const { return den_; }

  void load(std::uint64_t index, int coord, Integer& out) const;
  Integer numerator(std::uint64_t index, int coord) const;
  /// Throws CapacityExceeded if the value does not fit the slot (negative or > 4 D).
  void store(std::uint64_t index, int coord, const Integer& numerator);

  Rational coord(std::uint64_t index, int coord) const;
  Point lower(std::uint64_t index) const;
  /// Throws InvalidArgument when a coordinate is not a multiple of 1/D.
  void set_lower(std::uint64_t index, std::span<const Rational> lower);

  friend bool operator==(const Layer&, const Layer&) = default;

 private:
  int d_ = 0;
  std::uint64_t count_ = 0;
  Integer den_ = 1;
  Integer cap_ = 4;
  std::size_t limbs_ = 0;
  std::vector<mp_limb_t> data_;
};

struct EngineOptions {
  int level_cap = 64;
  std::uint64_t max_cubes_per_level = std::uint64_t{1} << 27;
};

/// Level cap from LACUNA_LEVEL_CAP when set, else `fallback`.
int level_cap_from_env(int fallback = 64);

struct ConstructionState {
  int d = 1;
  DimensionFunction h;
  std::vector<LinearPattern> patterns;
  std::vector<NormalizedPattern> normalized;
  SqrtBounds sqrt_d;
  EngineOptions options;

  std::vector<Layer> layers;     // layers[k], k = 0..depth
  std::vector<Rational> deltas;  // side length per built level
  std::vector<ScheduleEntry> schedule;  // processed entries (level_M <= depth)
  std::optional<ScheduleEntry> pending;  // next entry, level_M > depth
  bool schedule_exhausted = false;       // no further M-level at or below the cap
  TupleEnumerator enumerator{{2}};

  int depth() const { return static_cast<int>(layers.size()) - 1; }
  ScheduleParams params() const;
  std::vector<LevelInfo> profile() const { return level_profile(params(), depth()); }

  /// Non-M levels in 1..level.
  int digit_count(int level) const;
  std::uint64_t ancestor(int level, std::uint64_t index, int ancestor_level) const;
  /// Processed entry whose M-level is k.
  const ScheduleEntry* entry_at_level(int k) const;
  Cube cube(int level, std::uint64_t index) const;
  std::vector<Point> leaf_centers() const;
};

/// E_0 = [1,2]^d. Validates patterns (>= 1, all of dimension d) and h (same d).
ConstructionState init(int d, std::vector<LinearPattern> patterns, const DimensionFunction& h,
                       EngineOptions options = {});

/// Builds level depth+1: dyadic split, or lattice placement at the next M-level.
void advance_level(ConstructionState& state);

void build(ConstructionState& state, int depth);

/// Rebuilds a state from exported data: replays the enumerator and schedule to
/// validate the entries, then adopts the stored layers as-is.
ConstructionState restore(int d, std::vector<LinearPattern> patterns, const DimensionFunction& h,
                          std::vector<ScheduleEntry> schedule, std::vector<Layer> layers, EngineOptions options = {});

struct LatticePlacement {
  Cube child;
  std::vector<Integer> z;
};

/// Child of side delta centered at delta * 4c * phi^block(z), with z the
/// round-half-down lattice point nearest the rescaled parent center. Asserts
/// the distance bound and exact containment (PlacementFailure).
LatticePlacement place_on_lattice(const Cube& parent, const NormalizedPattern& np, int block, const Rational& delta,
                                  const SqrtBounds& sqrt_d);

/// Recovers z with center/delta = 4c * phi^block(z), or nullopt if the cube is off-lattice.
std::optional<std::vector<Integer>> lattice_point(const Cube& cube, const NormalizedPattern& np, int block);

}  // namespace lacuna
