#pragma once

// File formats. Every certified value is written as an exact "p/q" string;
// decimals appear only in the CSV convenience export and in SVG geometry.

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "lacuna/apps.hpp"
#include "lacuna/certify.hpp"
#include "lacuna/engine.hpp"

namespace lacuna::io {

using Json = nlohmann::ordered_json;

std::string read_file(const std::string& path);
/// Writes atomically enough for our purposes: truncates and writes in one go.
void write_file(const std::string& path, const std::string& contents);
Json parse_json(const std::string& text, const std::string& what);

/// Accepts "p/q" strings and JSON integers.
Rational rational_from_json(const Json& j);

// ----- patterns ------------------------------------------------------------

struct PatternFile {
  int d = 1;
  std::vector<LinearPattern> patterns;
};

/// {"d": int, "patterns": [{"m": int, "coeffs": [["p/q", ...] per block]}]}
PatternFile patterns_from_json(const Json& j);
Json patterns_to_json(int d, const std::vector<LinearPattern>& patterns);

// ----- tree ----------------------------------------------------------------

Json entry_to_json(const ConstructionState& state, const ScheduleEntry& entry);

/// Tree file with one cube object per line; byte-identical for identical states.
void write_tree(std::ostream& out, const ConstructionState& state);
std::string tree_to_string(const ConstructionState& state);

/// Rebuilds and validates the state (schedule replay, cube counts, addresses).
ConstructionState tree_from_json(const Json& j, EngineOptions options = {});

/// One JSON object per processed entry.
std::string schedule_log(const ConstructionState& state);

// ----- certificates --------------------------------------------------------

Json gap_to_json(const ConstructionState& state, const GapCertificate& cert);
Json measure_to_json(const MeasureCertificate& cert);

struct OracleRun {
  int pattern_id = 0;
  Rational tolerance;
  std::uint64_t points = 0;
  std::uint64_t tuples = 0;
  std::uint64_t instances = 0;
  std::uint64_t covered_instances = 0;
  std::string scope;  // "leaves" or "covered"
};

Json oracle_run_to_json(const OracleRun& run);

// ----- points --------------------------------------------------------------

/// Header "x0,...,x{d-1}" then one decimal row per leaf center.
std::string leaf_csv(const ConstructionState& state, int digits);
/// One exact "p/q" row per leaf center, comma-separated.
std::string leaf_points(const ConstructionState& state);
/// Rows of comma- or whitespace-separated rationals; a leading non-numeric
/// header row is skipped. Throws ParseError on ragged rows.
std::vector<Point> parse_points(const std::string& text);

// ----- svg -----------------------------------------------------------------

struct SvgOptions {
  int size = 800;    // drawing width in pixels
  int max_levels = 0;  // 0: every level
};

/// Per-level cube outlines; UnsupportedDimension for d > 2.
std::string tree_svg(const ConstructionState& state, const SvgOptions& options = {});

// ----- apps ----------------------------------------------------------------

/// {"kind": ..., "params": [...], "h": "pow:p/q", "depth": n} plus optional
/// "d", "m" (vector_split) and "precision" (differences).
AppSpec app_spec_from_json(const Json& j);
Json difference_report_to_json(const DifferenceReport& report, int digits);

}  // namespace lacuna::io
