#include "lacuna/apps.hpp"

#include <algorithm>

#include "lacuna/bounds.hpp"
#include "lacuna/dimfn.hpp"
#include "lacuna/error.hpp"

namespace lacuna {

// ----- Gaussian rationals --------------------------------------------------

Gaussian operator/(const Gaussian& a, const Gaussian& b) {
  const Rational n = b.re * b.re + b.im * b.im;
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "division by zero");
  return {(a.re * b.re + a.im * b.im) / n, (a.im * b.re - a.re * b.im) / n};
}

Gaussian parse_gaussian(std::string_view text) {
  std::string s;
  for (char ch : text) {
    if (ch != ' ') s.push_back(ch);
  }
  if (s.empty()) throw Error(ErrorKind::ParseError, "empty Gaussian rational");
  if (s.back() != 'i') return {parse_rational(s), 0};
  s.pop_back();
  std::size_t split = std::string::npos;
  for (std::size_t j = s.size(); j-- > 1;) {
    if ((s[j] == '+' || s[j] == '-') && s[j - 1] != 'e' && s[j - 1] != 'E') {
      split = j;
      break;
    }
  }
  const std::string re_text = split == std::string::npos ? "" : s.substr(0, split);
  std::string im_text = split == std::string::npos ? s : s.substr(split);
  if (im_text.empty() || im_text == "+") im_text = "1";
  if (im_text == "-") im_text = "-1";
  if (im_text.front() == '+') im_text.erase(0, 1);
  return {re_text.empty() ? Rational(0) : parse_rational(re_text), parse_rational(im_text)};
}

std::string to_string(const Gaussian& g) {
  if (g.im == 0) return to_string(g.re);
  return to_string(g.re) + (g.im < 0 ? "-" : "+") + to_string(abs(g.im)) + "i";
}

std::array<std::array<Rational, 2>, 2> complex_rows(const Gaussian& w) {
  return {{{w.re, -w.im}, {w.im, w.re}}};
}

// ----- builders ------------------------------------------------------------

std::vector<LinearPattern> quotient_patterns(std::span<const Rational> values) {
  std::vector<LinearPattern> out;
  for (const Rational& a : values) {
    if (a == 1) throw Error(ErrorKind::RejectUnit, "quotient 1 is excluded");
    out.emplace_back(1, 2, std::vector<Rational>{a, Rational(-1)});
  }
  return out;
}

std::vector<LinearPattern> ratio_patterns(std::span<const Rational> values) {
  std::vector<LinearPattern> out;
  for (const Rational& alpha : values) {
    if (alpha <= 1) throw Error(ErrorKind::RejectRange, "ratio " + to_string(alpha) + " is not in (1, oo)");
    out.emplace_back(1, 3, std::vector<Rational>{Rational(1), Rational(-alpha), Rational(alpha - 1)});
  }
  return out;
}

std::vector<LinearPattern> plane_patterns(std::span<const std::array<Rational, 3>> planes) {
  std::vector<LinearPattern> out;
  for (const auto& p : planes) out.emplace_back(1, 3, std::vector<Rational>(p.begin(), p.end()));
  return out;
}

std::vector<LinearPattern> split_vector_pattern(int d, int m, const std::vector<std::vector<Rational>>& rows) {
  if (d < 1 || m < 2) throw Error(ErrorKind::InvalidPattern, "need d >= 1 and m >= 2");
  std::vector<LinearPattern> out;
  for (const std::vector<Rational>& row : rows) {
    if (row.size() != static_cast<std::size_t>(m * d)) {
      throw Error(ErrorKind::InvalidPattern, "row has " + std::to_string(row.size()) + " entries, expected " +
                                                 std::to_string(m * d));
    }
    if (std::all_of(row.begin(), row.end(), [](const Rational& b) { return b == 0; })) continue;
    out.emplace_back(d, m, row);
  }
  if (out.empty()) throw Error(ErrorKind::AllRowsZero, "every component of the vector pattern vanishes");
  return out;
}

namespace {

/// Rows applying block weights w[l] on one axis at a time.
std::vector<std::vector<Rational>> per_axis_rows(int d, const std::vector<Rational>& w) {
  const int m = static_cast<int>(w.size());
  std::vector<std::vector<Rational>> rows;
  for (int axis = 0; axis < d; ++axis) {
    std::vector<Rational> row(static_cast<std::size_t>(m * d), Rational(0));
    for (int l = 0; l < m; ++l) row[static_cast<std::size_t>(l * d + axis)] = w[static_cast<std::size_t>(l)];
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::vector<LinearPattern> parallelogram_patterns(int d) {
  if (d < 1) throw Error(ErrorKind::InvalidArgument, "dimension must be >= 1");
  return split_vector_pattern(d, 4, per_axis_rows(d, {Rational(1), Rational(-1), Rational(1), Rational(-1)}));
}

std::vector<LinearPattern> trapezoid_patterns(int d, std::span<const Rational> alphas) {
  if (d < 1) throw Error(ErrorKind::InvalidArgument, "dimension must be >= 1");
  std::vector<LinearPattern> out;
  for (const Rational& alpha : alphas) {
    if (alpha == 0) throw Error(ErrorKind::RejectRange, "trapezoid proportion must be nonzero");
    for (LinearPattern& p :
         split_vector_pattern(d, 4, per_axis_rows(d, {Rational(1), Rational(-1), Rational(-alpha), alpha}))) {
      out.push_back(std::move(p));
    }
  }
  return out;
}

std::vector<LinearPattern> complex_triplet_patterns(std::span<const std::array<Gaussian, 3>> triplets) {
  std::vector<LinearPattern> out;
  for (const auto& [x, y, z] : triplets) {
    if (x == y || y == z || x == z) throw Error(ErrorKind::DegenerateTriplet, "triplet entries must be distinct");
    const Gaussian alpha = (z - x) / (z - y);
    const std::array<Gaussian, 3> w = {Gaussian{1, 0}, Gaussian{-alpha.re, -alpha.im}, alpha - Gaussian{1, 0}};
    std::vector<std::vector<Rational>> rows(2, std::vector<Rational>(6));
    for (int l = 0; l < 3; ++l) {
      const auto r = complex_rows(w[static_cast<std::size_t>(l)]);
      for (int part = 0; part < 2; ++part) {
        rows[static_cast<std::size_t>(part)][static_cast<std::size_t>(2 * l)] = r[static_cast<std::size_t>(part)][0];
        rows[static_cast<std::size_t>(part)][static_cast<std::size_t>(2 * l + 1)] = r[static_cast<std::size_t>(part)][1];
      }
    }
    for (LinearPattern& p : split_vector_pattern(2, 3, rows)) out.push_back(std::move(p));
  }
  return out;
}

// ----- differences ---------------------------------------------------------

DifferenceTarget parse_difference_target(std::string_view text) {
  DifferenceTarget t;
  t.text = std::string(text);
  if (text.substr(0, 3) == "ln:") {
    t.exact = true;
    t.value = parse_rational(text.substr(3));
  } else {
    t.value = parse_rational(text);
  }
  return t;
}

QuotientTarget quotient_target(const DifferenceTarget& target, int bits) {
  if (target.exact) {
    if (target.value <= 0) throw Error(ErrorKind::RejectRange, "ln:a needs a > 0");
    if (target.value == 1) throw Error(ErrorKind::RejectUnit, "difference 0 is excluded");
    return {target.value, 0};
  }
  if (target.value == 0) throw Error(ErrorKind::RejectUnit, "difference 0 is excluded");
  const Interval e = bounds::exp(target.value, bits);
  const Rational center = round_down((e.lo + e.hi) / 2, bits);
  const Rational radius = std::max(Rational(e.hi - center), Rational(center - e.lo));
  return {center, radius};
}

// ----- driver --------------------------------------------------------------

namespace {

constexpr std::array<std::pair<AppKind, std::string_view>, 8> kKinds = {{
    {AppKind::Quotients, "quotients"},
    {AppKind::Differences, "differences"},
    {AppKind::Planes, "planes"},
    {AppKind::Ratios, "ratios"},
    {AppKind::Parallelogram, "parallelogram"},
    {AppKind::Trapezoids, "trapezoids"},
    {AppKind::ComplexTriplets, "complex_triplets"},
    {AppKind::VectorSplit, "vector_split"},
}};

}  // namespace

AppKind parse_app_kind(std::string_view name) {
  for (const auto& [kind, text] : kKinds) {
    if (text == name) return kind;
  }
  throw Error(ErrorKind::ParseError, "unknown app kind '" + std::string(name) + "'");
}

std::string_view to_string(AppKind kind) {
  for (const auto& [k, text] : kKinds) {
    if (k == kind) return text;
  }
  return "unknown";
}

int app_dimension(const AppSpec& spec) {
  switch (spec.kind) {
    case AppKind::Parallelogram:
    case AppKind::Trapezoids:
    case AppKind::VectorSplit:
      return spec.d;
    case AppKind::ComplexTriplets:
      return 2;
    default:
      return 1;
  }
}

std::vector<LinearPattern> app_patterns(const AppSpec& spec) {
  switch (spec.kind) {
    case AppKind::Quotients:
      return quotient_patterns(spec.values);
    case AppKind::Differences: {
      std::vector<Rational> centers;
      for (const DifferenceTarget& t : spec.targets) centers.push_back(quotient_target(t, spec.precision).center);
      return quotient_patterns(centers);
    }
    case AppKind::Planes:
      return plane_patterns(spec.planes);
    case AppKind::Ratios:
      return ratio_patterns(spec.values);
    case AppKind::Parallelogram:
      return parallelogram_patterns(spec.d);
    case AppKind::Trapezoids:
      return trapezoid_patterns(spec.d, spec.values);
    case AppKind::ComplexTriplets:
      return complex_triplet_patterns(spec.triplets);
    case AppKind::VectorSplit:
      return split_vector_pattern(spec.d, spec.m, spec.rows);
  }
  throw Error(ErrorKind::InvalidArgument, "unknown app kind");
}

namespace {

DifferenceReport difference_report(const AppSpec& spec, const ConstructionState& state,
                                   const std::vector<GapCertificate>& gaps) {
  DifferenceReport report;
  report.targets = spec.targets;
  for (const DifferenceTarget& t : spec.targets) report.quotients.push_back(quotient_target(t, spec.precision));
  report.margins.assign(spec.targets.size(), std::nullopt);

  for (const GapCertificate& g : gaps) {
    const std::size_t id = static_cast<std::size_t>(g.entry.pattern_id);
    const QuotientTarget& q = report.quotients[id];
    // |e^t x - y| >= |a x - y| - |e^t - a| x with x <= 2
    const Rational slack = g.gap / abs(g.scale) - 2 * q.radius;
    if (slack <= 0) {
      throw Error(ErrorKind::EnclosureTooWide, "enclosure of exp(" + report.targets[id].text + ") is wider than the gap of entry " +
                                                   std::to_string(g.entry.index) + "; raise the precision");
    }
    // |y/x - e^t| >= slack/2, and log has slope >= 1/max(2, e^t) between the two
    const Rational top = std::max(Rational(2), Rational(q.center + q.radius));
    const Rational margin = slack / (2 * top);
    if (!report.margins[id] || margin < *report.margins[id]) report.margins[id] = margin;
  }

  const Layer& leaves = state.layers.back();
  const Rational half = state.deltas.back() / 2;
  for (std::uint64_t i = 0; i < leaves.size(); ++i) {
    report.points.push_back(bounds::ln(leaves.coord(i, 0) + half, spec.precision));
  }
  return report;
}

}  // namespace

AppResult run_app(const AppSpec& spec, const EngineOptions& options) {
  const int d = app_dimension(spec);
  const DimensionFunction h = parse_dimfn(spec.h, d);
  AppResult result{init(d, app_patterns(spec), h, options), {}, std::nullopt, std::nullopt};
  build(result.state, spec.depth);
  result.gaps = certify_gaps(result.state);
  if (!result.state.schedule.empty()) result.measure = certify_measure(result.state);
  if (spec.kind == AppKind::Differences) result.differences = difference_report(spec, result.state, result.gaps);
  return result;
}

}  // namespace lacuna
