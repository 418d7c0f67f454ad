#pragma once

// Certificates over a finite-depth construction: per-entry avoidance gaps,
// the mass-distribution lower bound, an exhaustive oracle, and diagnostics.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lacuna/engine.hpp"

namespace lacuna {

// ----- gaps ----------------------------------------------------------------

struct GapOptions {
  std::size_t fold_cap = std::size_t{1} << 24;  // max distinct partial sums kept exactly
  int random_samples = 100;
  std::uint64_t seed = 0x6c6163756e61ULL;
};

/// Lower bound on |psi_normalized| over every point tuple drawn from the
/// children placed for one schedule entry. The original pattern satisfies
/// |psi| = |psi_normalized| / |scale|.
struct GapCertificate {
  ScheduleEntry entry;
  Rational delta;       // delta_{M_i}
  Rational c;
  Rational scale;
  Rational kappa;       // min |sum of lattice keys + 1/2| over child tuples
  Rational min_center;  // 4 c delta kappa, min |psi_normalized(centers)|
  Rational gap;         // min_center - c delta
  Rational threshold;   // c delta
  std::string method;   // "exact", "hull" or "lattice"
  std::vector<std::uint64_t> children;  // placed children per block
  int random_checks = 0;
};

/// Throws EntryNotProcessed when the entry's M-level is not built, GapViolated
/// when a child is off-lattice, outside its tuple member, or the bound fails.
GapCertificate certify_gap(const ConstructionState& state, const ScheduleEntry& entry, const GapOptions& options = {});

std::vector<GapCertificate> certify_gaps(const ConstructionState& state, const GapOptions& options = {});

// ----- measure -------------------------------------------------------------

struct MeasureLevel {
  int k = 0;
  Integer count;   // N_k
  Rational delta;  // delta_k
  bool ok = false;  // 1/N_k <= h(sqrt(d) delta_k), certified with sqrt_d.lo
};

struct MeasureCertificate {
  Integer c1 = 1;
  Integer c2;
  Rational c3_upper;  // c2 (2 sqrt(d) + 3)^d c1 with sqrt_d.hi
  int k0 = 0;
  std::vector<MeasureLevel> per_level;
  Rational lower_bound;  // 1 / c3_upper
  std::string condition;
};

/// Throws EntryNotProcessed when depth < M_1 (or nothing is scheduled) and
/// MeasureViolated when a per-level check fails.
MeasureCertificate certify_measure(const ConstructionState& state);

// ----- structure -----------------------------------------------------------

struct StructureReport {
  int levels = 0;
  std::uint64_t cubes = 0;
  int overlap_sweeps = 0;  // levels whose disjointness was also checked pairwise
};

/// Counts, sides, nesting, exact dyadic positions, lower-corner anchoring,
/// lattice form of placed children (the point nearest the parent center) and
/// disjointness. Throws StructureViolated.
StructureReport verify_structure(const ConstructionState& state, std::uint64_t sweep_cap = std::uint64_t{1} << 16);

// ----- oracle --------------------------------------------------------------

struct OracleOptions {
  Rational tolerance = 0;
  std::uint64_t max_instances = 0;  // 0: unlimited
};

struct OracleResult {
  std::vector<std::vector<std::size_t>> instances;  // point indices in pattern variable order
  std::uint64_t tuples = 0;  // ordered tuples enumerated (with the last block solved)
  bool truncated = false;
};

/// Every ordered m-tuple of distinct points with |psi| <= tolerance. Points
/// must be pairwise distinct (InvalidArgument).
OracleResult brute_oracle(std::span<const Point> points, const LinearPattern& pattern, const OracleOptions& options = {});

/// Processed entry of `pattern_id` whose tuple contains the leaves' level-L
/// ancestors in block order, if any. Leaves are indices at the deepest level.
const ScheduleEntry* covering_entry(const ConstructionState& state, int pattern_id,
                                    std::span<const std::size_t> leaves);

/// Instances among leaves descending from the tuples of processed entries.
OracleResult covered_oracle(const ConstructionState& state, const OracleOptions& options = {});

// ----- diagnostics ---------------------------------------------------------

struct DimensionLevel {
  int k = 0;
  Integer count;
  Rational delta;
  Interval log2_count;  // exact
  Interval log2_inv_delta;
  Interval ratio;
};

/// Per-level log2 N_k / log2(1/delta_k) for k = 1..depth.
std::vector<DimensionLevel> box_dimension_profile(const ConstructionState& state, int bits = 40);

}  // namespace lacuna
