// lacuna: build, certify and export pattern-avoiding nested-cube sets.
//
// Exit codes: 0 success, 1 certification failure or pattern instance found,
// 2 usage or configuration error. Errors go to stderr as
// {"error": {"kind": ..., "message": ...}}.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "lacuna/apps.hpp"
#include "lacuna/certify.hpp"
#include "lacuna/dimfn.hpp"
#include "lacuna/engine.hpp"
#include "lacuna/error.hpp"
#include "lacuna/io.hpp"

namespace {

using lacuna::Error;
using lacuna::ErrorKind;
using lacuna::io::Json;

int report_error(std::string_view kind, const std::string& message, int code) {
  std::cerr << Json{{"error", Json{{"kind", kind}, {"message", message}}}}.dump() << "\n";
  return code;
}

void emit(const std::string& path, const std::string& contents) {
  if (path.empty() || path == "-") {
    std::cout << contents;
  } else {
    lacuna::io::write_file(path, contents);
  }
}

lacuna::EngineOptions engine_options(std::optional<int> level_cap) {
  lacuna::EngineOptions options;
  options.level_cap = level_cap ? *level_cap : lacuna::level_cap_from_env(options.level_cap);
  if (options.level_cap < 0) throw Error(ErrorKind::InvalidArgument, "level cap must be non-negative");
  return options;
}

lacuna::ConstructionState load_tree(const std::string& path, std::optional<int> level_cap) {
  return lacuna::io::tree_from_json(lacuna::io::parse_json(lacuna::io::read_file(path), path), engine_options(level_cap));
}

// ----- build ---------------------------------------------------------------

struct BuildArgs {
  std::string patterns;
  std::string dimfn;
  int depth = 0;
  std::string out;
  std::string schedule_log;
  std::optional<int> level_cap;
};

int cmd_build(const BuildArgs& a) {
  const auto pf = lacuna::io::patterns_from_json(lacuna::io::parse_json(lacuna::io::read_file(a.patterns), a.patterns));
  const auto h = lacuna::parse_dimfn(a.dimfn, pf.d);
  const auto options = engine_options(a.level_cap);
  if (a.depth < 0) throw Error(ErrorKind::InvalidArgument, "depth must be non-negative");
  if (a.depth > options.level_cap) {
    throw Error(ErrorKind::InvalidArgument, "depth " + std::to_string(a.depth) + " exceeds the level cap " +
                                                std::to_string(options.level_cap));
  }
  auto state = lacuna::init(pf.d, pf.patterns, h, options);
  lacuna::build(state, a.depth);
  emit(a.out, lacuna::io::tree_to_string(state));
  if (!a.schedule_log.empty()) lacuna::io::write_file(a.schedule_log, lacuna::io::schedule_log(state));
  return 0;
}

// ----- certify -------------------------------------------------------------

struct CertifyArgs {
  std::string tree;
  std::string mode = "all";
  std::string out;
  bool oracle = false;
  std::optional<int> level_cap;
};

Json oracle_runs(const lacuna::ConstructionState& state) {
  Json runs = Json::array();
  const lacuna::OracleResult r = lacuna::covered_oracle(state);
  lacuna::io::OracleRun run;
  run.pattern_id = -1;
  run.scope = "covered";
  run.points = state.layers.back().size();
  run.tuples = r.tuples;
  run.instances = r.instances.size();
  run.covered_instances = r.instances.size();
  runs.push_back(lacuna::io::oracle_run_to_json(run));
  if (!r.instances.empty()) {
    throw Error(ErrorKind::GapViolated, std::to_string(r.instances.size()) + " pattern instances among covered tuples");
  }
  return runs;
}

int cmd_certify(const CertifyArgs& a) {
  const auto state = load_tree(a.tree, a.level_cap);
  Json cert;
  Json gaps = Json::array();
  if (a.mode == "gap" || a.mode == "all") {
    for (const auto& g : lacuna::certify_gaps(state)) gaps.push_back(lacuna::io::gap_to_json(state, g));
  }
  cert["gaps"] = gaps;
  if (a.mode == "measure" || a.mode == "all") {
    cert["measure"] = lacuna::io::measure_to_json(lacuna::certify_measure(state));
  } else {
    cert["measure"] = nullptr;
  }
  const auto structure = lacuna::verify_structure(state);
  cert["structure"] = Json{{"levels", structure.levels}, {"cubes", structure.cubes},
                           {"overlap_sweeps", structure.overlap_sweeps}};
  cert["covered_entries"] = static_cast<int>(state.schedule.size());
  cert["oracle_runs"] = a.oracle ? oracle_runs(state) : Json::array();
  emit(a.out, cert.dump(2) + "\n");
  return 0;
}

// ----- export --------------------------------------------------------------

struct ExportArgs {
  std::string tree;
  std::string format = "csv";
  std::string out;
  int digits = 12;
  int size = 800;
  int levels = 0;
  std::optional<int> level_cap;
};

int cmd_export(const ExportArgs& a) {
  const auto state = load_tree(a.tree, a.level_cap);
  if (a.format == "csv") {
    emit(a.out, lacuna::io::leaf_csv(state, a.digits));
  } else if (a.format == "points") {
    emit(a.out, lacuna::io::leaf_points(state));
  } else {
    emit(a.out, lacuna::io::tree_svg(state, {a.size, a.levels}));
  }
  return 0;
}

// ----- app -----------------------------------------------------------------

struct AppArgs {
  std::string spec;
  std::string out_dir = ".";
  int digits = 12;
  std::optional<int> level_cap;
};

int cmd_app(const AppArgs& a) {
  const auto spec = lacuna::io::app_spec_from_json(lacuna::io::parse_json(lacuna::io::read_file(a.spec), a.spec));
  const auto options = engine_options(a.level_cap);
  if (spec.depth < 0 || spec.depth > options.level_cap) {
    throw Error(ErrorKind::InvalidArgument, "depth must lie in [0, level cap]");
  }
  const auto result = lacuna::run_app(spec, options);
  const auto& state = result.state;
  std::filesystem::create_directories(a.out_dir);
  const std::filesystem::path dir(a.out_dir);
  lacuna::io::write_file((dir / "patterns.json").string(),
                         lacuna::io::patterns_to_json(state.d, state.patterns).dump(2) + "\n");
  lacuna::io::write_file((dir / "tree.json").string(), lacuna::io::tree_to_string(state));
  lacuna::io::write_file((dir / "schedule.jsonl").string(), lacuna::io::schedule_log(state));
  Json cert;
  Json gaps = Json::array();
  for (const auto& g : result.gaps) gaps.push_back(lacuna::io::gap_to_json(state, g));
  cert["gaps"] = gaps;
  cert["measure"] = result.measure ? lacuna::io::measure_to_json(*result.measure) : Json(nullptr);
  cert["covered_entries"] = static_cast<int>(state.schedule.size());
  cert["oracle_runs"] = Json::array();
  lacuna::io::write_file((dir / "cert.json").string(), cert.dump(2) + "\n");
  if (result.differences) {
    lacuna::io::write_file((dir / "differences.json").string(),
                           lacuna::io::difference_report_to_json(*result.differences, a.digits).dump(2) + "\n");
  }
  std::cout << Json{{"kind", lacuna::to_string(spec.kind)},
                    {"patterns", state.patterns.size()},
                    {"depth", state.depth()},
                    {"leaves", state.layers.back().size()},
                    {"entries", state.schedule.size()},
                    {"out_dir", a.out_dir}}
                   .dump()
            << "\n";
  return 0;
}

// ----- oracle --------------------------------------------------------------

struct OracleArgs {
  std::string points;
  std::string patterns;
  std::string tol = "0";
  std::string tree;
  std::uint64_t max_instances = 1000;
  std::optional<int> level_cap;
};

int cmd_oracle(const OracleArgs& a) {
  const auto points = lacuna::io::parse_points(lacuna::io::read_file(a.points));
  const auto pf = lacuna::io::patterns_from_json(lacuna::io::parse_json(lacuna::io::read_file(a.patterns), a.patterns));
  lacuna::OracleOptions options;
  options.tolerance = lacuna::parse_rational(a.tol);
  options.max_instances = a.tree.empty() ? a.max_instances : 0;

  std::optional<lacuna::ConstructionState> state;
  if (!a.tree.empty()) {
    state = load_tree(a.tree, a.level_cap);
    if (!(state->patterns == pf.patterns)) {
      throw Error(ErrorKind::InvalidArgument, "the tree was built from a different pattern list");
    }
    if (points.size() != state->layers.back().size()) {
      throw Error(ErrorKind::InvalidArgument, "point count differs from the tree's leaf count");
    }
  }

  Json runs = Json::array();
  Json examples = Json::array();
  std::uint64_t failures = 0;
  for (std::size_t p = 0; p < pf.patterns.size(); ++p) {
    const auto r = lacuna::brute_oracle(points, pf.patterns[p], options);
    lacuna::io::OracleRun run;
    run.pattern_id = static_cast<int>(p);
    run.scope = "leaves";
    run.tolerance = options.tolerance;
    run.points = points.size();
    run.tuples = r.tuples;
    run.instances = r.instances.size();
    for (const auto& inst : r.instances) {
      const bool covered = state && lacuna::covering_entry(*state, static_cast<int>(p), inst) != nullptr;
      if (covered) ++run.covered_instances;
      const bool counts = state ? covered : true;
      if (counts) {
        ++failures;
        if (examples.size() < 10) {
          Json tuple = Json::array();
          for (std::size_t idx : inst) {
            Json pt = Json::array();
            for (const auto& x : points[idx]) pt.push_back(lacuna::to_string(x));
            tuple.push_back(pt);
          }
          examples.push_back(Json{{"pattern_id", p}, {"points", tuple}});
        }
      }
    }
    Json j = lacuna::io::oracle_run_to_json(run);
    j["truncated"] = r.truncated;
    runs.push_back(j);
  }
  std::cout << Json{{"oracle_runs", runs}, {"failures", failures}, {"examples", examples}}.dump(2) << "\n";
  return failures ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pattern-avoiding nested-cube sets with exact certificates"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  BuildArgs build;
  auto* b = app.add_subcommand("build", "Build the construction to a given depth");
  b->add_option("patterns", build.patterns, "Pattern file (JSON)")->required()->check(CLI::ExistingFile);
  b->add_option("--dimfn", build.dimfn, "Dimension function, e.g. pow:1/2 or powlog:1/1")->required();
  b->add_option("--depth", build.depth, "Depth to build")->required();
  b->add_option("--out", build.out, "Tree file (default: stdout)");
  b->add_option("--schedule-log", build.schedule_log, "Write processed entries as JSON lines");
  b->add_option("--level-cap", build.level_cap, "Level cap (default: LACUNA_LEVEL_CAP or 64)");

  CertifyArgs certify;
  auto* c = app.add_subcommand("certify", "Certify gaps and the measure lower bound of a tree");
  c->add_option("tree", certify.tree, "Tree file")->required()->check(CLI::ExistingFile);
  c->add_option("--mode", certify.mode, "gap, measure or all")->check(CLI::IsMember({"gap", "measure", "all"}));
  c->add_option("--out", certify.out, "Certificate file (default: stdout)");
  c->add_flag("--oracle", certify.oracle, "Also run the exhaustive oracle over covered tuples");
  c->add_option("--level-cap", certify.level_cap, "Level cap");

  ExportArgs exp;
  auto* e = app.add_subcommand("export", "Export leaf centers or a drawing");
  e->add_option("tree", exp.tree, "Tree file")->required()->check(CLI::ExistingFile);
  e->add_option("--format", exp.format, "svg, csv or points")->check(CLI::IsMember({"svg", "csv", "points"}));
  e->add_option("--out", exp.out, "Output file (default: stdout)");
  e->add_option("--digits", exp.digits, "Fractional digits in CSV")->check(CLI::Range(1, 200));
  e->add_option("--size", exp.size, "SVG width in pixels")->check(CLI::Range(16, 100000));
  e->add_option("--levels", exp.levels, "SVG: draw only the first N levels")->check(CLI::NonNegativeNumber);
  e->add_option("--level-cap", exp.level_cap, "Level cap");

  AppArgs appargs;
  auto* a = app.add_subcommand("app", "Run an application spec");
  a->add_option("spec", appargs.spec, "App spec (JSON)")->required()->check(CLI::ExistingFile);
  a->add_option("--out-dir", appargs.out_dir, "Directory for patterns, tree and certificates");
  a->add_option("--digits", appargs.digits, "Fractional digits for approximate outputs")->check(CLI::Range(1, 200));
  a->add_option("--level-cap", appargs.level_cap, "Level cap");

  OracleArgs oracle;
  auto* o = app.add_subcommand("oracle", "Search points exhaustively for pattern instances");
  o->add_option("points", oracle.points, "Points file (CSV or p/q rows)")->required()->check(CLI::ExistingFile);
  o->add_option("patterns", oracle.patterns, "Pattern file (JSON)")->required()->check(CLI::ExistingFile);
  o->add_option("--tol", oracle.tol, "Tolerance (rational)");
  o->add_option("--tree", oracle.tree, "Count only instances covered by this tree's processed entries")
      ->check(CLI::ExistingFile);
  o->add_option("--max-instances", oracle.max_instances, "Stop after this many instances (without --tree)");
  o->add_option("--level-cap", oracle.level_cap, "Level cap");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::CallForAllHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::Error& ex) {
    return report_error("UsageError", ex.what(), 2);
  }

  try {
    if (*b) return cmd_build(build);
    if (*c) return cmd_certify(certify);
    if (*e) return cmd_export(exp);
    if (*a) return cmd_app(appargs);
    if (*o) return cmd_oracle(oracle);
  } catch (const Error& ex) {
    return report_error(lacuna::to_string(ex.kind()), ex.what(), lacuna::is_certification_failure(ex.kind()) ? 1 : 2);
  } catch (const std::exception& ex) {
    return report_error("InternalError", ex.what(), 2);
  }
  return 2;
}
