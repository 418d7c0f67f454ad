#include "lacuna/io.hpp"

#include <fstream>
#include <sstream>

#include "lacuna/bounds.hpp"
#include "lacuna/error.hpp"

namespace lacuna::io {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write '" + path + "'");
  out << contents;
  if (!out) throw Error(ErrorKind::InvalidArgument, "write to '" + path + "' failed");
}

Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::ParseError, what + ": " + e.what());
  }
}

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(ErrorKind::ParseError, std::string("missing field '") + key + "'");
  return j.at(key);
}

int int_field(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number_integer()) throw Error(ErrorKind::ParseError, std::string("field '") + key + "' must be an integer");
  return v.get<int>();
}

std::string string_field(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_string()) throw Error(ErrorKind::ParseError, std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

const Json& array_field(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_array()) throw Error(ErrorKind::ParseError, std::string("field '") + key + "' must be an array");
  return v;
}

Json rational_array(std::span<const Rational> xs) {
  Json a = Json::array();
  for (const Rational& x : xs) a.push_back(to_string(x));
  return a;
}

Json integer_json(const Integer& n) {
  if (n.fits_slong_p()) return Json(n.get_si());
  return Json(n.get_str());
}

Integer integer_from_json(const Json& j) {
  if (j.is_number_integer()) return Integer(j.get<long>());
  if (j.is_string()) {
    const Rational q = parse_rational(j.get<std::string>());
    if (q.get_den() == 1) return q.get_num();
  }
  throw Error(ErrorKind::ParseError, "expected an integer, got " + j.dump());
}

}  // namespace

Rational rational_from_json(const Json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(Integer(j.get<long>()));
  throw Error(ErrorKind::ParseError, "expected a \"p/q\" string, got " + j.dump());
}

// ----- patterns ------------------------------------------------------------

PatternFile patterns_from_json(const Json& j) {
  PatternFile pf;
  pf.d = int_field(j, "d");
  if (pf.d < 1) throw Error(ErrorKind::InvalidPattern, "dimension must be >= 1");
  for (const Json& p : array_field(j, "patterns")) {
    const int m = int_field(p, "m");
    const Json& blocks = array_field(p, "coeffs");
    if (blocks.size() != static_cast<std::size_t>(std::max(m, 0))) {
      throw Error(ErrorKind::InvalidPattern, "expected " + std::to_string(m) + " coefficient blocks");
    }
    std::vector<Rational> coeffs;
    for (const Json& block : blocks) {
      if (!block.is_array() || block.size() != static_cast<std::size_t>(pf.d)) {
        throw Error(ErrorKind::InvalidPattern, "each block needs " + std::to_string(pf.d) + " coefficients");
      }
      for (const Json& b : block) coeffs.push_back(rational_from_json(b));
    }
    pf.patterns.emplace_back(pf.d, m, std::move(coeffs));
  }
  if (pf.patterns.empty()) throw Error(ErrorKind::InvalidArgument, "pattern file lists no patterns");
  return pf;
}

Json patterns_to_json(int d, const std::vector<LinearPattern>& patterns) {
  Json j;
  j["d"] = d;
  Json list = Json::array();
  for (const LinearPattern& p : patterns) {
    Json blocks = Json::array();
    for (int l = 0; l < p.arity(); ++l) {
      blocks.push_back(rational_array(std::span<const Rational>(p.coeffs()).subspan(static_cast<std::size_t>(l * d),
                                                                                   static_cast<std::size_t>(d))));
    }
    list.push_back(Json{{"m", p.arity()}, {"coeffs", std::move(blocks)}});
  }
  j["patterns"] = std::move(list);
  return j;
}

// ----- tree ----------------------------------------------------------------

Json entry_to_json(const ConstructionState& s, const ScheduleEntry& e) {
  Json tuple = Json::array();
  for (std::uint64_t t : e.tuple) tuple.push_back(address_of(t, s.digit_count(e.level), s.d, e.level).to_string(s.d));
  return Json{{"i", e.index},      {"pattern_id", e.pattern_id}, {"level", e.level},
              {"tuple", tuple},    {"M_i", e.level_M},           {"beta_i", integer_json(e.beta)}};
}

void write_tree(std::ostream& out, const ConstructionState& s) {
  const ScheduleParams params = s.params();
  Json betas = Json::array(), levels = Json::array(), schedule = Json::array();
  for (const Integer& b : params.betas) betas.push_back(integer_json(b));
  for (int M : params.levels) levels.push_back(M);
  for (const ScheduleEntry& e : s.schedule) schedule.push_back(entry_to_json(s, e));

  out << "{\n";
  out << "  \"d\": " << s.d << ",\n";
  out << "  \"h\": " << Json(s.h.spec()).dump() << ",\n";
  out << "  \"depth\": " << s.depth() << ",\n";
  out << "  \"betas\": " << betas.dump() << ",\n";
  out << "  \"levels_M\": " << levels.dump() << ",\n";
  out << "  \"patterns\": " << patterns_to_json(s.d, s.patterns)["patterns"].dump() << ",\n";
  out << "  \"schedule\": [";
  for (std::size_t j = 0; j < schedule.size(); ++j) out << (j ? ",\n    " : "\n    ") << schedule[j].dump();
  out << (schedule.empty() ? "],\n" : "\n  ],\n");
  out << "  \"cubes\": {";
  for (int k = 0; k <= s.depth(); ++k) {
    const Layer& layer = s.layers[static_cast<std::size_t>(k)];
    const int digits = s.digit_count(k);
    out << (k ? ",\n" : "\n") << "    \"" << k << "\": [";
    for (std::uint64_t i = 0; i < layer.size(); ++i) {
      out << (i ? ",\n      " : "\n      ") << "{\"addr\":\"" << address_of(i, digits, s.d, k).to_string(s.d)
          << "\",\"lower\":[";
      for (int v = 0; v < s.d; ++v) out << (v ? "," : "") << '"' << to_string(layer.coord(i, v)) << '"';
      out << "]}";
    }
    out << "\n    ]";
  }
  out << "\n  }\n}\n";
}

std::string tree_to_string(const ConstructionState& s) {
  std::ostringstream ss;
  write_tree(ss, s);
  return ss.str();
}

ConstructionState tree_from_json(const Json& j, EngineOptions options) {
  const int d = int_field(j, "d");
  const DimensionFunction h = parse_dimfn(string_field(j, "h"), d);
  const int depth = int_field(j, "depth");
  if (depth < 0) throw Error(ErrorKind::ParseError, "depth must be non-negative");

  std::vector<LinearPattern> patterns;
  if (j.contains("patterns")) {
    patterns = patterns_from_json(Json{{"d", d}, {"patterns", j.at("patterns")}}).patterns;
  } else {
    throw Error(ErrorKind::ParseError, "tree file lacks its patterns");
  }

  // M-levels first: addresses depend on them
  std::vector<int> levels_M;
  for (const Json& M : array_field(j, "levels_M")) levels_M.push_back(M.get<int>());
  const auto digits_at = [&](int level) {
    int m = 0;
    for (int M : levels_M) {
      if (M <= level) ++m;
    }
    return level - m;
  };

  std::vector<ScheduleEntry> schedule;
  for (const Json& e : array_field(j, "schedule")) {
    ScheduleEntry entry;
    entry.index = int_field(e, "i");
    entry.pattern_id = int_field(e, "pattern_id");
    entry.level = int_field(e, "level");
    entry.level_M = int_field(e, "M_i");
    entry.beta = integer_from_json(field(e, "beta_i"));
    for (const Json& a : array_field(e, "tuple")) {
      if (!a.is_string()) throw Error(ErrorKind::ParseError, "tuple addresses must be strings");
      const CubeAddress addr = CubeAddress::parse(a.get<std::string>(), d, entry.level);
      if (static_cast<int>(addr.digits.size()) != digits_at(entry.level)) {
        throw Error(ErrorKind::ParseError, "tuple address '" + a.get<std::string>() + "' has the wrong length");
      }
      entry.tuple.push_back(index_of(addr, d));
    }
    schedule.push_back(std::move(entry));
  }
  const Json& betas = array_field(j, "betas");
  if (betas.size() != schedule.size() || levels_M.size() != schedule.size()) {
    throw Error(ErrorKind::ParseError, "betas, levels_M and schedule disagree in length");
  }
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (integer_from_json(betas[i]) != schedule[i].beta || levels_M[i] != schedule[i].level_M) {
      throw Error(ErrorKind::ParseError, "betas/levels_M disagree with schedule entry " + std::to_string(i + 1));
    }
  }

  const Json& cubes = field(j, "cubes");
  std::vector<Layer> layers;
  for (int k = 0; k <= depth; ++k) {
    const std::string key = std::to_string(k);
    if (!cubes.contains(key) || !cubes.at(key).is_array()) {
      throw Error(ErrorKind::ParseError, "cubes of level " + key + " are missing");
    }
    const Json& list = cubes.at(key);
    const int digits = digits_at(k);
    if (static_cast<std::size_t>(d) * static_cast<std::size_t>(digits) > 40) {
      throw Error(ErrorKind::CapacityExceeded, "level " + key + " is too large to load");
    }
    const std::uint64_t count = std::uint64_t{1} << (d * digits);
    if (list.size() != count) {
      throw Error(ErrorKind::StructureViolated, "level " + key + " holds " + std::to_string(list.size()) +
                                                    " cubes, expected " + std::to_string(count));
    }
    std::vector<Point> lowers(count);
    std::vector<bool> seen(count, false);
    for (const Json& c : list) {
      const CubeAddress addr = CubeAddress::parse(string_field(c, "addr"), d, k);
      if (static_cast<int>(addr.digits.size()) != digits) {
        throw Error(ErrorKind::ParseError, "address '" + string_field(c, "addr") + "' has the wrong length");
      }
      const std::uint64_t idx = index_of(addr, d);
      if (seen[idx]) throw Error(ErrorKind::StructureViolated, "duplicate address at level " + key);
      seen[idx] = true;
      Point p;
      for (const Json& x : array_field(c, "lower")) p.push_back(rational_from_json(x));
      if (p.size() != static_cast<std::size_t>(d)) throw Error(ErrorKind::DimensionMismatch, "lower corner has wrong length");
      for (const Rational& x : p) {
        if (x < 0) throw Error(ErrorKind::StructureViolated, "negative coordinate at level " + key);
      }
      lowers[idx] = std::move(p);
    }
    layers.push_back(Layer::from_points(d, lowers));
  }
  return restore(d, std::move(patterns), h, std::move(schedule), std::move(layers), options);
}

std::string schedule_log(const ConstructionState& s) {
  std::string out;
  for (const ScheduleEntry& e : s.schedule) out += entry_to_json(s, e).dump() + "\n";
  return out;
}

// ----- certificates --------------------------------------------------------

Json gap_to_json(const ConstructionState& s, const GapCertificate& g) {
  Json children = Json::array();
  for (std::uint64_t c : g.children) children.push_back(c);
  return Json{{"entry", entry_to_json(s, g.entry)},
              {"gap", to_string(g.gap)},
              {"threshold", to_string(g.threshold)},
              {"delta", to_string(g.delta)},
              {"c", to_string(g.c)},
              {"scale", to_string(g.scale)},
              {"kappa", to_string(g.kappa)},
              {"min_center", to_string(g.min_center)},
              {"method", g.method},
              {"children", children},
              {"random_checks", g.random_checks}};
}

Json measure_to_json(const MeasureCertificate& m) {
  Json levels = Json::array();
  for (const MeasureLevel& l : m.per_level) {
    levels.push_back(Json{{"k", l.k}, {"N_k", integer_json(l.count)}, {"delta_k", to_string(l.delta)}, {"ok", l.ok}});
  }
  return Json{{"c1", integer_json(m.c1)},         {"c2", integer_json(m.c2)},
              {"c3_upper", to_string(m.c3_upper)}, {"k0", m.k0},
              {"per_level", levels},              {"lower_bound", to_string(m.lower_bound)},
              {"condition", m.condition}};
}

Json oracle_run_to_json(const OracleRun& r) {
  return Json{{"pattern_id", r.pattern_id}, {"scope", r.scope},         {"tolerance", to_string(r.tolerance)},
              {"points", r.points},         {"tuples", r.tuples},       {"instances", r.instances},
              {"covered_instances", r.covered_instances}};
}

// ----- points --------------------------------------------------------------

std::string leaf_csv(const ConstructionState& s, int digits) {
  std::string out;
  for (int v = 0; v < s.d; ++v) out += (v ? ",x" : "x") + std::to_string(v);
  out += "\n";
  for (const Point& p : s.leaf_centers()) {
    for (std::size_t v = 0; v < p.size(); ++v) out += (v ? "," : "") + to_decimal(p[v], digits);
    out += "\n";
  }
  return out;
}

std::string leaf_points(const ConstructionState& s) {
  std::string out;
  for (const Point& p : s.leaf_centers()) {
    for (std::size_t v = 0; v < p.size(); ++v) out += (v ? "," : "") + to_string(p[v]);
    out += "\n";
  }
  return out;
}

std::vector<Point> parse_points(const std::string& text) {
  std::vector<Point> points;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    for (char& ch : line) {
      if (ch == ',' || ch == '\t' || ch == ';' || ch == '\r') ch = ' ';
    }
    std::istringstream fields(line);
    std::string tok;
    Point p;
    try {
      while (fields >> tok) p.push_back(parse_rational(tok));
    } catch (const Error&) {
      if (first) {
        first = false;
        continue;
      }
      throw;
    }
    first = false;
    if (p.empty()) continue;
    if (!points.empty() && p.size() != points.front().size()) {
      throw Error(ErrorKind::ParseError, "ragged point rows");
    }
    points.push_back(std::move(p));
  }
  return points;
}

// ----- svg -----------------------------------------------------------------

std::string tree_svg(const ConstructionState& s, const SvgOptions& options) {
  if (s.d > 2) throw Error(ErrorKind::UnsupportedDimension, "SVG export needs d <= 2");
  const int levels = options.max_levels > 0 ? std::min(options.max_levels, s.depth() + 1) : s.depth() + 1;
  const Rational W = options.size;
  const Rational band = 24;  // d = 1: height per level
  const Rational height = s.d == 1 ? band * levels : W;
  auto num = [](const Rational& x) { return to_decimal(x, 4); };

  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(W) + "\" height=\"" + num(height) +
                    "\" viewBox=\"0 0 " + num(W) + " " + num(height) + "\">\n";
  out += "<rect class=\"frame\" x=\"0\" y=\"0\" width=\"" + num(W) + "\" height=\"" + num(height) +
         "\" fill=\"white\" stroke=\"none\"/>\n";
  for (int k = 0; k < levels; ++k) {
    const Layer& layer = s.layers[static_cast<std::size_t>(k)];
    const Rational side = s.deltas[static_cast<std::size_t>(k)] * W;
    const int shade = 40 + (160 * k) / std::max(1, levels);
    out += "<g class=\"level-" + std::to_string(k) + "\" fill=\"none\" stroke=\"rgb(" + std::to_string(shade) + ",60," +
           std::to_string(220 - shade) + ")\" stroke-width=\"0.5\">\n";
    for (std::uint64_t i = 0; i < layer.size(); ++i) {
      const Rational x = (layer.coord(i, 0) - 1) * W;
      Rational y, h;
      if (s.d == 1) {
        y = band * k + 4;
        h = band - 8;
      } else {
        // y axis points down in SVG
        y = (2 - layer.coord(i, 1)) * W - side;
        h = side;
      }
      out += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(side) + "\" height=\"" + num(h) + "\"/>\n";
    }
    out += "</g>\n";
  }
  out += "</svg>\n";
  return out;
}

// ----- apps ----------------------------------------------------------------

AppSpec app_spec_from_json(const Json& j) {
  AppSpec spec;
  spec.kind = parse_app_kind(string_field(j, "kind"));
  spec.h = string_field(j, "h");
  spec.depth = int_field(j, "depth");
  if (j.contains("d")) spec.d = int_field(j, "d");
  if (j.contains("m")) spec.m = int_field(j, "m");
  if (j.contains("precision")) spec.precision = int_field(j, "precision");
  if (spec.precision < 8) throw Error(ErrorKind::InvalidArgument, "precision must be >= 8");
  const Json params = j.contains("params") ? j.at("params") : Json::array();
  if (!params.is_array()) throw Error(ErrorKind::ParseError, "params must be an array");

  auto triple = [](const Json& t, auto convert) {
    if (!t.is_array() || t.size() != 3) throw Error(ErrorKind::ParseError, "expected a triple, got " + t.dump());
    return std::array{convert(t[0]), convert(t[1]), convert(t[2])};
  };
  auto gaussian = [](const Json& g) {
    if (g.is_string()) return parse_gaussian(g.get<std::string>());
    if (g.is_number_integer()) return Gaussian{Rational(Integer(g.get<long>())), 0};
    if (g.is_array() && g.size() == 2) return Gaussian{rational_from_json(g[0]), rational_from_json(g[1])};
    throw Error(ErrorKind::ParseError, "expected a Gaussian rational, got " + g.dump());
  };

  switch (spec.kind) {
    case AppKind::Quotients:
    case AppKind::Ratios:
    case AppKind::Trapezoids:
      for (const Json& p : params) spec.values.push_back(rational_from_json(p));
      break;
    case AppKind::Differences:
      for (const Json& p : params) {
        spec.targets.push_back(parse_difference_target(p.is_string() ? p.get<std::string>() : p.dump()));
      }
      break;
    case AppKind::Planes:
      for (const Json& p : params) spec.planes.push_back(triple(p, rational_from_json));
      break;
    case AppKind::ComplexTriplets:
      for (const Json& p : params) spec.triplets.push_back(triple(p, gaussian));
      break;
    case AppKind::VectorSplit:
      for (const Json& row : params) {
        if (!row.is_array()) throw Error(ErrorKind::ParseError, "vector_split rows must be arrays");
        std::vector<Rational> r;
        for (const Json& x : row) r.push_back(rational_from_json(x));
        spec.rows.push_back(std::move(r));
      }
      break;
    case AppKind::Parallelogram:
      break;
  }
  return spec;
}

Json difference_report_to_json(const DifferenceReport& r, int digits) {
  Json targets = Json::array();
  for (std::size_t i = 0; i < r.targets.size(); ++i) {
    targets.push_back(Json{{"target", r.targets[i].text},
                           {"quotient", to_string(r.quotients[i].center)},
                           {"radius", to_string(r.quotients[i].radius)},
                           {"margin", r.margins[i] ? Json(to_string(*r.margins[i])) : Json(nullptr)}});
  }
  Json points = Json::array();
  for (const Interval& p : r.points) {
    points.push_back(Json{{"lo", to_string(p.lo)}, {"hi", to_string(p.hi)}, {"approx", to_decimal(p.lo, digits)}});
  }
  return Json{{"targets", targets},
              {"bilipschitz", Json{{"lo", to_string(r.lipschitz_lo)}, {"hi", to_string(r.lipschitz_hi)}}},
              {"points", points}};
}

}  // namespace lacuna::io
