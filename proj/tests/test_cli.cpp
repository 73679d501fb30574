#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "brittle/commands.hpp"
#include "brittle/scenario.hpp"

using namespace brittle;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "brittle-cli-tests" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string scenario(const std::string& name) { return std::string(BRITTLE_SCENARIO_DIR) + "/" + name; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << text;
  return p;
}

struct Run {
  int code = -1;
  std::string err;
  json report;
};

Run run(const std::string& command, const std::string& config, const fs::path& out, int threads = 0) {
  Run r;
  RunOptions o;
  o.out_dir = out.string();
  o.threads = threads;
  std::ostringstream err;
  r.code = run_command(command, config, o, err);
  r.err = err.str();
  if (fs::exists(out / "report.json")) r.report = json::parse(slurp(out / "report.json"));
  return r;
}

TEST(Config, UnknownKeyNamesItsPath) {
  try {
    parse_scenario(R"({"schema_version": 1, "mesh": {"kind": "interval", "length": 1, "elements": 4, "colour": 2}})");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.path(), "mesh.colour");
  }
}

TEST(Config, SyntaxErrorIsAConfigError) {
  EXPECT_THROW(parse_scenario("{\"schema_version\": 1,"), ConfigError);
}

TEST(Config, MissingMeshExitsTwo) {
  const auto dir = scratch("missing_mesh");
  const auto cfg = write_config(dir, R"({"schema_version": 1, "surface": {"kind": "griffith", "G": 1}})");
  const auto r = run("solve", cfg.string(), dir / "out");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("mesh"), std::string::npos);
}

TEST(Config, IncreasingRadiiExitTwo) {
  const auto dir = scratch("radii");
  const auto cfg = write_config(dir, R"({"schema_version": 1,
    "mesh": {"kind": "rect", "width": 1, "height": 1, "resolution": 8},
    "boundary": {"kind": "linear", "gradient": [0, 1]},
    "measures": {"radii": [0.1, 0.2]}})");
  const auto r = run("measures", cfg.string(), dir / "out");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("measures.radii"), std::string::npos);
  EXPECT_NE(r.err.find("decreasing"), std::string::npos);
}

TEST(Config, BlobHashMatchesGit) {
  EXPECT_EQ(git_blob_sha1("hello\n"), "ce013625030ba8dba906f756967f9e9ca394464a");
  EXPECT_EQ(git_blob_sha1(""), "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
}

TEST(Solve, BarThresholdEnergy) {
  const auto r = run("solve", scenario("bar_threshold.json"), scratch("solve_bar"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(r.report["results"]["energy"]["total"].get<double>(), 0.5, 1e-10);
  EXPECT_EQ(r.report["config"]["sha1"].get<std::string>(), git_blob_sha1(slurp(scenario("bar_threshold.json"))));
}

TEST(Solve, PatchTestResiduals) {
  const auto r = run("solve", scenario("patch_test.json"), scratch("solve_patch"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_LE(r.report["results"]["residuals"]["divergence"].get<double>(), 1e-8);
}

TEST(Solve, TipFieldCutIsDeclaredOnTheBoundary) {
  const auto r = run("solve", scenario("crack_verify.json"), scratch("solve_tip"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.report["results"]["boundary_continuity"]["continuous"].get<bool>());
}

TEST(Evolve, BarCsvStepsAboveThreshold) {
  const auto out = scratch("evolve_bar");
  const auto r = run("evolve", scenario("bar_evolve.json"), out);
  ASSERT_EQ(r.code, 0) << r.err;
  ASSERT_TRUE(fs::exists(out / "trajectory_minimal.csv"));
  ASSERT_TRUE(fs::exists(out / "trajectory_equilibrium.csv"));
  EXPECT_TRUE(r.report["results"].contains("divergence"));
  std::istringstream csv(slurp(out / "trajectory_minimal.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line.rfind("t,crack_length,", 0), 0u);
  while (std::getline(csv, line)) {
    std::istringstream row(line);
    std::string t, len;
    std::getline(row, t, ',');
    std::getline(row, len, ',');
    EXPECT_EQ(std::stod(len), std::stod(t) > std::sqrt(2.0) ? 1.0 : 0.0) << line;
  }
}

TEST(Evolve, BelowThresholdCrackColumnIsConstant) {
  const auto dir = scratch("evolve_below");
  const auto cfg = write_config(dir, R"({"schema_version": 1,
    "mesh": {"kind": "interval", "length": 1, "elements": 8},
    "boundary": {"kind": "linear", "gradient": [1, 0]},
    "schedule": {"start": 0.1, "stop": 1.4, "count": 6},
    "search": {"depth": 1}})");
  const auto r = run("evolve", cfg.string(), dir / "out");
  ASSERT_EQ(r.code, 0) << r.err;
  for (const auto& st : r.report["results"]["minimal"]["steps"]) EXPECT_EQ(st["crack_length"].get<double>(), 0.0);
}

TEST(Evolve, OutputIsByteIdenticalAcrossRunsAndThreadCounts) {
  const auto a = scratch("det_a"), b = scratch("det_b");
  ASSERT_EQ(run("evolve", scenario("metastable.json"), a, 1).code, 0);
  ASSERT_EQ(run("evolve", scenario("metastable.json"), b, 4).code, 0);
  for (const char* f : {"trajectory_minimal.csv", "trajectory_equilibrium.csv"}) {
    const auto x = slurp(a / f);
    EXPECT_FALSE(x.empty());
    EXPECT_EQ(x, slurp(b / f)) << f;
  }
}

TEST(Measures, ManufacturedDisk) {
  const auto out = scratch("measures_disk");
  const auto r = run("measures", scenario("disk_measures.json"), out);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto& res = r.report["results"];
  const double exact = kPi / 4;
  for (const auto& c : res["j_contour"]) EXPECT_NEAR(c["value"].get<double>(), exact, 0.02 * exact);
  bool seen_tip = false;
  for (const auto& reg : res["regions"]) {
    if (reg["tips"].empty()) {
      EXPECT_EQ(reg["er_total_variation"]["value"].get<double>(), 0.0);
      EXPECT_EQ(reg["elastic_concentration"]["value"].get<double>(), 0.0);
      EXPECT_EQ(reg["surface_concentration"]["value"].get<double>(), 0.0);
      continue;
    }
    seen_tip = true;
    EXPECT_NEAR(reg["er_total_variation"]["value"].get<double>(), exact, 0.02 * exact);
    EXPECT_NEAR(reg["elastic_concentration"]["value"].get<double>(), exact, 0.05 * exact);
  }
  EXPECT_TRUE(seen_tip);
  EXPECT_TRUE(fs::exists(out / "ce_sweep.csv"));
}

TEST(Verify, BatteryPassesAndSkipsInjectedState) {
  const auto dir = scratch("verify");
  json cfg = json::parse(slurp(scenario("crack_verify.json")));
  cfg["verify"]["inject_non_equilibrium"] = {{"t", 3.0}};
  cfg["verify"]["hypothesis_cases"] = 20;
  const auto path = write_config(dir, cfg.dump());
  const auto r = run("verify", path.string(), dir / "out");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto& res = r.report["results"];
  bool injected = false;
  for (const auto& st : res["battery"]["states"]) {
    if (!st["injected"].get<bool>()) continue;
    injected = true;
    EXPECT_FALSE(st["equilibrium"].get<bool>());
    EXPECT_EQ(st["er_le_ce"]["reason"].get<std::string>(), "precondition: equilibrium required");
    EXPECT_EQ(st["ce_le_cf"]["reason"].get<std::string>(), "precondition: equilibrium required");
  }
  EXPECT_TRUE(injected);
  EXPECT_NEAR(res["cf_normalization"]["ratio"].get<double>(), 2 * kPi, 1e-12);
  EXPECT_TRUE(res["equality_chain"].contains("cf_normalization"));
  EXPECT_TRUE(res["axioms"]["passed"].get<bool>());
}

TEST(Binary, ArgumentErrorsExitTwo) {
  const std::string exe = BRITTLE_LAB_PATH;
  auto status = [](const std::string& cmd) {
    const int s = std::system((cmd + " > /dev/null 2>&1").c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
  };
  EXPECT_EQ(status(exe + " solve"), 2);
  EXPECT_EQ(status(exe + " frobnicate --config x.json"), 2);
  EXPECT_EQ(status(exe + " solve --config /nonexistent/config.json"), 2);
  EXPECT_EQ(status(exe + " --help"), 0);
}

}  // namespace
