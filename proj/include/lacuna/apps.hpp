#pragma once

// Applications: reductions of concrete avoidance problems to pattern lists,
// and a driver that builds and certifies the resulting set.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lacuna/certify.hpp"
#include "lacuna/engine.hpp"
#include "lacuna/pattern.hpp"
#include "lacuna/rational.hpp"

namespace lacuna {

/// Gaussian rational re + im i.
struct Gaussian {
  Rational re;
  Rational im;

  friend Gaussian operator+(const Gaussian& a, const Gaussian& b) { return {a.re + b.re, a.im + b.im}; }
  friend Gaussian operator-(const Gaussian& a, const Gaussian& b) { return {a.re - b.re, a.im - b.im}; }
  friend Gaussian operator*(const Gaussian& a, const Gaussian& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  /// Throws InvalidArgument on division by zero.
  friend Gaussian operator/(const Gaussian& a, const Gaussian& b);
  friend bool operator==(const Gaussian&, const Gaussian&) = default;
};

/// Accepts "a", "bi", "a+bi", "a-bi", "i", "-i" with rational a, b.
Gaussian parse_gaussian(std::string_view text);
std::string to_string(const Gaussian& g);

/// a x - y per a; RejectUnit for a = 1.
std::vector<LinearPattern> quotient_patterns(std::span<const Rational> values);

/// x - alpha y + (alpha - 1) z per alpha; RejectRange unless alpha > 1.
std::vector<LinearPattern> ratio_patterns(std::span<const Rational> values);

/// a x + b y + c z per plane; ZeroPattern for (0, 0, 0).
std::vector<LinearPattern> plane_patterns(std::span<const std::array<Rational, 3>> planes);

/// One scalar pattern per nonzero row of an N x (m d) matrix; AllRowsZero if none.
std::vector<LinearPattern> split_vector_pattern(int d, int m, const std::vector<std::vector<Rational>>& rows);

/// x1 - x2 + x3 - x4 on every axis.
std::vector<LinearPattern> parallelogram_patterns(int d);

/// x1 - x2 - alpha (x3 - x4) on every axis; RejectRange for alpha = 0.
std::vector<LinearPattern> trapezoid_patterns(int d, std::span<const Rational> alphas);

/// (alpha - 1) z - alpha y + x with alpha = (z - x)/(z - y), split into real
/// and imaginary rows over R^2. DegenerateTriplet unless entries are distinct.
std::vector<LinearPattern> complex_triplet_patterns(std::span<const std::array<Gaussian, 3>> triplets);

/// Real (p, -q) and imaginary (q, p) rows of multiplication by p + qi.
std::array<std::array<Rational, 2>, 2> complex_rows(const Gaussian& w);

// ----- differences ---------------------------------------------------------

/// Forbidden difference: a rational value t (quotient target e^t, enclosed) or
/// "ln:a" (exact quotient target a).
struct DifferenceTarget {
  std::string text;
  bool exact = false;
  Rational value;  // t, or a when exact
};

DifferenceTarget parse_difference_target(std::string_view text);

struct QuotientTarget {
  Rational center;  // rational quotient used in the pattern
  Rational radius;  // |e^t - center| <= radius; 0 when exact
};

/// RejectUnit for t = 0 or a = 1; RejectRange for a <= 0.
QuotientTarget quotient_target(const DifferenceTarget& target, int bits);

struct DifferenceReport {
  std::vector<DifferenceTarget> targets;
  std::vector<QuotientTarget> quotients;
  /// Lower bound on |log y - log x - t| over leaf pairs covered by the target's
  /// processed entries; empty when no entry of that target was processed.
  std::vector<std::optional<Rational>> margins;
  std::vector<Interval> points;     // log(leaf centers), enclosures in [0, log 2]
  Rational lipschitz_lo{1, 2};      // |log y - log x| / |y - x| on [1, 2]
  Rational lipschitz_hi{1};
};

// ----- driver --------------------------------------------------------------

enum class AppKind { Quotients, Differences, Planes, Ratios, Parallelogram, Trapezoids, ComplexTriplets, VectorSplit };

AppKind parse_app_kind(std::string_view name);
std::string_view to_string(AppKind kind);

struct AppSpec {
  AppKind kind = AppKind::Quotients;
  std::string h = "pow:1/2";
  int depth = 0;
  int d = 1;  // parallelogram, trapezoids, vector_split
  std::vector<Rational> values;  // quotients, ratios, trapezoids
  std::vector<std::array<Rational, 3>> planes;
  std::vector<std::array<Gaussian, 3>> triplets;
  std::vector<DifferenceTarget> targets;
  int m = 0;  // vector_split
  std::vector<std::vector<Rational>> rows;
  int precision = 64;  // enclosure bits for differences
};

/// Ambient dimension of the app's patterns.
int app_dimension(const AppSpec& spec);
std::vector<LinearPattern> app_patterns(const AppSpec& spec);

struct AppResult {
  ConstructionState state;
  std::vector<GapCertificate> gaps;
  std::optional<MeasureCertificate> measure;  // present once depth >= M_1
  std::optional<DifferenceReport> differences;
};

AppResult run_app(const AppSpec& spec, const EngineOptions& options = {});

}  // namespace lacuna
