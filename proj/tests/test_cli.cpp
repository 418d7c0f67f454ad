#include <gtest/gtest.h>
#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lacuna/io.hpp"

namespace fs = std::filesystem;
using lacuna::io::Json;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

fs::path tmp_dir() {
  const fs::path dir = fs::path(LACUNA_TEST_TMP) / "cli";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path put(const std::string& name, const std::string& contents) {
  const fs::path p = tmp_dir() / name;
  std::ofstream(p) << contents;
  return p;
}

Outcome run(const std::string& args) {
  // per-test capture files, since ctest may run tests in parallel
  const std::string tag = ::testing::UnitTest::GetInstance()->current_test_info()->name();
  const fs::path out = tmp_dir() / (tag + ".out"), err = tmp_dir() / (tag + ".err");
  const std::string cmd = std::string("'") + LACUNA_CLI_PATH + "' " + args + " >'" + out.string() + "' 2>'" +
                          err.string() + "'";
  const int status = std::system(cmd.c_str());
  Outcome r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::string error_kind(const Outcome& r) {
  const Json j = Json::parse(r.err);
  EXPECT_TRUE(j["error"].contains("message"));
  return j["error"]["kind"].get<std::string>();
}

const char* kAp = R"({"d": 1, "patterns": [{"m": 3, "coeffs": [["1"], ["-2"], ["1"]]}]})";

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST(Cli, BuildCertifyExport) {
  const fs::path pats = put("ap.json", kAp), tree = tmp_dir() / "ap_tree.json", log = tmp_dir() / "ap.jsonl";
  Outcome r = run("build " + q(pats) + " --dimfn pow:1/2 --depth 12 --out " + q(tree) + " --schedule-log " + q(log));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(Json::parse(slurp(tree))["levels_M"], Json::parse("[6, 11]"));
  const std::string log_text = slurp(log);
  EXPECT_EQ(std::count(log_text.begin(), log_text.end(), '\n'), 2);

  r = run("certify " + q(tree) + " --oracle");
  ASSERT_EQ(r.code, 0) << r.err;
  const Json cert = Json::parse(r.out);
  EXPECT_EQ(cert["gaps"].size(), 2u);
  EXPECT_EQ(cert["gaps"][0]["gap"], "1/288");
  EXPECT_EQ(cert["measure"]["lower_bound"], "1/10");
  EXPECT_EQ(cert["covered_entries"], 2);
  EXPECT_EQ(cert["oracle_runs"][0]["instances"], 0);

  r = run("certify " + q(tree) + " --mode gap");
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(Json::parse(r.out)["measure"].is_null());

  r = run("export " + q(tree) + " --format csv --digits 4");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 1025);
  r = run("export " + q(tree) + " --format svg --levels 3");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("<svg", 0), 0u);

  const fs::path points = tmp_dir() / "ap_points.txt";
  ASSERT_EQ(run("export " + q(tree) + " --format points --out " + q(points)).code, 0);
  r = run("oracle " + q(points) + " " + q(pats) + " --tree " + q(tree));
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(Json::parse(r.out)["failures"], 0);
}

TEST(Cli, BuildIsByteIdentical) {
  const fs::path pats = put("ap2.json", kAp), a = tmp_dir() / "a.json", b = tmp_dir() / "b.json";
  ASSERT_EQ(run("build " + q(pats) + " --dimfn pow:1/2 --depth 10 --out " + q(a)).code, 0);
  ASSERT_EQ(run("build " + q(pats) + " --dimfn pow:1/2 --depth 10 --out " + q(b)).code, 0);
  EXPECT_EQ(slurp(a), slurp(b));
}

TEST(Cli, OracleFindsAProgression) {
  const fs::path pats = put("ap3.json", kAp), pts = put("three.txt", "1\n5/4\n3/2\n");
  const Outcome r = run("oracle " + q(pts) + " " + q(pats));
  EXPECT_EQ(r.code, 1);
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j["failures"], 2);
  EXPECT_EQ(j["examples"][0]["points"].size(), 3u);
}

TEST(Cli, TamperedTreeFailsCertification) {
  const fs::path pats = put("ap4.json", kAp), tree = tmp_dir() / "tamper.json";
  ASSERT_EQ(run("build " + q(pats) + " --dimfn pow:1/2 --depth 8 --out " + q(tree)).code, 0);
  Json j = Json::parse(slurp(tree));
  j["cubes"]["6"][0]["lower"][0] = "1/1";
  std::ofstream(tree) << j.dump();
  const Outcome r = run("certify " + q(tree));
  EXPECT_EQ(r.code, 1);
  const std::string kind = error_kind(r);
  EXPECT_TRUE(kind == "GapViolated" || kind == "StructureViolated") << kind;
}

TEST(Cli, UsageErrors) {
  const fs::path pats = put("ap5.json", kAp);
  Outcome r = run("build " + q(pats) + " --dimfn pow:2/1 --depth 3");
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(error_kind(r), "RejectNotDominated");
  r = run("build " + q(pats) + " --dimfn cube:1 --depth 3");
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(error_kind(r), "ParseError");
  r = run("build " + q(pats) + " --dimfn pow:1/2 --depth 70");
  EXPECT_EQ(r.code, 2);
  r = run("build " + q(pats) + " --depth 3");
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(error_kind(r), "UsageError");
  r = run("frobnicate");
  EXPECT_EQ(r.code, 2);
  const fs::path bad = put("bad.json", "{\"d\": 1");
  r = run("build " + q(bad) + " --dimfn pow:1/2 --depth 3");
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(error_kind(r), "ParseError");
}

TEST(Cli, LevelCapFromEnvironment) {
  const fs::path pats = put("ap6.json", kAp);
  const Outcome r = run("build " + q(pats) + " --dimfn pow:1/2 --depth 9 --level-cap 8");
  EXPECT_EQ(r.code, 2);
  const std::string cmd = "LACUNA_LEVEL_CAP=5 '" + std::string(LACUNA_CLI_PATH) + "' build " + q(pats) +
                          " --dimfn pow:1/2 --depth 6 >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  EXPECT_EQ(WEXITSTATUS(status), 2);
}

TEST(Cli, AppWritesItsOutputs) {
  const fs::path dir = tmp_dir() / "app_out";
  fs::remove_all(dir);
  const fs::path spec =
      put("diff.json", R"({"kind": "differences", "params": ["ln:2"], "h": "pow:1/2", "depth": 8})");
  Outcome r = run("app " + q(spec) + " --out-dir " + q(dir) + " --digits 6");
  ASSERT_EQ(r.code, 0) << r.err;
  const Json summary = Json::parse(r.out);
  EXPECT_EQ(summary["kind"], "differences");
  EXPECT_EQ(summary["depth"], 8);
  for (const char* f : {"patterns.json", "tree.json", "schedule.jsonl", "cert.json", "differences.json"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  r = run("certify " + q(dir / "tree.json"));
  EXPECT_EQ(r.code, 0) << r.err;

  const fs::path bad = put("unit.json", R"({"kind": "quotients", "params": ["1"], "h": "pow:1/2", "depth": 4})");
  r = run("app " + q(bad) + " --out-dir " + q(dir));
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(error_kind(r), "RejectUnit");
}
