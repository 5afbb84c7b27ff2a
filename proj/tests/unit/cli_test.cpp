// Copyright 2026 The semigrav Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "semigrav_cli/scenario.hpp"

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "semigrav/io.hpp"
#include "semigrav/kernel.hpp"

namespace semigrav::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() /
           (std::string("semigrav_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write_config(const json& doc, const std::string& name = "c.json") {
    const fs::path p = dir_ / name;
    std::ofstream(p) << doc.dump(2);
    return p;
  }

  RunResult run_config(const json& doc, const std::string& out = "out") {
    RunOptions o;
    o.config = write_config(doc);
    o.out_dir = dir_ / out;
    o.quiet = true;
    std::ostringstream log;
    return run(o, log);
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
  }

  fs::path dir_;
};

json small_simulation() {
  return {{"name", "t"},
          {"mode", "simulate"},
          {"seed", 4},
          {"parameters",
           {{"lattice", "pair"},
            {"sigma_internal", 0.5},
            {"dt_internal", 0.005},
            {"t_final_internal", 0.2},
            {"n_output", 10}}}};
}

TEST(GitBlobSha1, KnownHashes) {
  EXPECT_EQ(git_blob_sha1(""), "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
  EXPECT_EQ(git_blob_sha1("hello\n"),
            "ce013625030ba8dba906f756967f9e9ca394464a");
}

TEST_F(CliTest, PldScanColumnIsSmearedPotential) {
  const auto r = run_config(
      {{"mode", "pld-scan"},
       {"parameters",
        {{"G_internal", 1.0}, {"sigma_internal", 1.0}, {"grid_points", 128}}}});
  ASSERT_EQ(r.exit_code, kOk) << r.message;
  std::istringstream csv(slurp(dir_ / "out" / "pld_scan.csv"));
  std::string line;
  std::getline(csv, line);
  int rows = 0;
  while (std::getline(csv, line)) {
    const auto f = io::split_csv_row(line);
    const double k = io::parse_double(f[0]);
    const double expected = 4.0 * testing::kPi * std::exp(-k * k) / (k * k);
    if (expected > 1e-280) {
      EXPECT_LT(testing::rel_err(io::parse_double(f[3]), expected), 1e-12);
    }
    ++rows;
  }
  EXPECT_EQ(rows, 128);
}

TEST_F(CliTest, SameSeedGivesIdenticalFiles) {
  const auto a = run_config(small_simulation(), "a");
  const auto b = run_config(small_simulation(), "b");
  ASSERT_EQ(a.exit_code, kOk) << a.message;
  ASSERT_EQ(b.exit_code, kOk) << b.message;
  for (const char* f : {"me_timeseries.csv", "trajectory.csv", "manifest.json"}) {
    EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f)) << f;
  }
  auto other = small_simulation();
  other["seed"] = 5;
  ASSERT_EQ(run_config(other, "c").exit_code, kOk);
  EXPECT_NE(slurp(dir_ / "a" / "trajectory.csv"),
            slurp(dir_ / "c" / "trajectory.csv"));
  EXPECT_EQ(slurp(dir_ / "a" / "me_timeseries.csv"),
            slurp(dir_ / "c" / "me_timeseries.csv"));
}

TEST_F(CliTest, ManifestListsEveryConsumedKeyAndOutput) {
  const auto r = run_config(small_simulation());
  ASSERT_EQ(r.exit_code, kOk) << r.message;
  const json m = json::parse(slurp(r.manifest));
  std::set<std::string> manifest_keys;
  for (const auto& [k, v] : m["parameters"].items()) manifest_keys.insert(k);
  const std::set<std::string> consumed(r.consumed_keys.begin(),
                                       r.consumed_keys.end());
  EXPECT_EQ(manifest_keys, consumed);
  EXPECT_TRUE(manifest_keys.contains("mass_internal"));
  EXPECT_EQ(m["seed"], 4);
  for (const auto& o : m["outputs"]) {
    const std::string content = slurp(dir_ / "out" / o["file"].get<std::string>());
    EXPECT_EQ(o["bytes"], content.size());
    EXPECT_EQ(o["sha1"], git_blob_sha1(content));
  }
  EXPECT_EQ(m["outputs"].size(), 2u);
}

TEST_F(CliTest, CslCurveSlope) {
  const auto r = run_config({{"mode", "csl-curve"}});
  ASSERT_EQ(r.exit_code, kOk) << r.message;
  const json m = json::parse(slurp(r.manifest));
  EXPECT_NEAR(m["results"]["loglog_slope"].get<double>(), -1.0, 1e-9);
}

TEST_F(CliTest, RatesStatusFile) {
  const auto r = run_config(
      {{"mode", "rates"},
       {"parameters",
        {{"distances_internal", {1.0}}, {"sigmas_internal", {0.5}}}}});
  ASSERT_EQ(r.exit_code, kOk) << r.message;
  const json status = json::parse(slurp(dir_ / "out" / "status.json"));
  ASSERT_EQ(status.size(), 3u);
  EXPECT_EQ(status[0]["status"], "excluded_by_decoherence_tests");
  EXPECT_EQ(status[1]["status"], "open_window");
  EXPECT_EQ(status[2]["status"], "constrained_by_gravity_tests");
}

TEST_F(CliTest, ConfigErrors) {
  EXPECT_EQ(run_config({{"mode", "teleport"}}).exit_code, kConfigError);
  EXPECT_EQ(run_config({{"mode", "csl-curve"}, {"colour", "red"}}).exit_code,
            kConfigError);
  EXPECT_EQ(run_config({{"mode", "csl-curve"},
                        {"parameters", {{"sigma_internal", 1.0}}}})
                .exit_code,
            kConfigError);
  EXPECT_EQ(run_config({{"mode", "csl-curve"},
                        {"parameters", {{"n_points", -3}}}})
                .exit_code,
            kConfigError);
  EXPECT_EQ(run_config({{"mode", "csl-curve"},
                        {"parameters", {{"r_min_si", 1e-3}}}})
                .exit_code,
            kConfigError);
  EXPECT_EQ(run_config({{"mode", "simulate"},
                        {"parameters", {{"mollifier", "none"}}}})
                .exit_code,
            kConfigError);
  const fs::path bad = dir_ / "bad.json";
  std::ofstream(bad) << "{ not json";
  RunOptions o;
  o.config = bad;
  o.out_dir = dir_ / "out";
  std::ostringstream log;
  EXPECT_EQ(run(o, log).exit_code, kConfigError);
}

TEST_F(CliTest, MissingConfigIsIoError) {
  RunOptions o;
  o.config = dir_ / "absent.json";
  std::ostringstream log;
  EXPECT_EQ(run(o, log).exit_code, kIoError);
}

TEST_F(CliTest, DomainAndInvariantErrors) {
  const auto domain = run_config(
      {{"mode", "noise-scaling"},
       {"parameters",
        {{"lattice_points", 16},
         {"box_sides", {4, 8}},
         {"window_steps", {1, 2}},
         {"n_blocks", 2}}}});
  EXPECT_EQ(domain.exit_code, kDomainError) << domain.message;
  const auto invariant = run_config(
      {{"mode", "simulate"},
       {"parameters",
        {{"sigma_internal", 0.05},
         {"gamma", "csl"},
         {"gamma_csl_internal", 1e3},
         {"dt_internal", 0.5},
         {"t_final_internal", 50.0}}}});
  EXPECT_EQ(invariant.exit_code, kInvariantViolation) << invariant.message;
}

TEST_F(CliTest, CustomGammaCsv) {
  const auto grid = kernel::default_grid(0.5, 128);
  const auto v = kernel::regularized_newtonian_kernel(
      1.0, kernel::Mollifier(kernel::MollifierKind::gaussian, 0.5), grid);
  {
    std::ofstream out(dir_ / "gamma.csv");
    kernel::write_csv(out, kernel::scaled(v, -2.0));
  }
  auto doc = small_simulation();
  doc["parameters"]["gamma"] = "custom-csv";
  doc["parameters"]["gamma_csv"] = "gamma.csv";
  const auto r = run_config(doc);
  EXPECT_EQ(r.exit_code, kOk) << r.message;
}

TEST_F(CliTest, ExecutableExitCodes) {
  const std::string exe = SEMIGRAV_CLI_PATH;
  const std::string quiet = " > /dev/null 2>&1";
  EXPECT_EQ(WEXITSTATUS(std::system((exe + " constants" + quiet).c_str())), 0);
  EXPECT_EQ(WEXITSTATUS(std::system((exe + quiet).c_str())), kConfigError);
  const fs::path cfg = write_config({{"mode", "csl-curve"}, {"seed", 1}});
  const std::string cmd = exe + " --config " + cfg.string() + " --out " +
                          (dir_ / "exe").string() + " --seed 9 --quiet";
  EXPECT_EQ(WEXITSTATUS(std::system((cmd + quiet).c_str())), 0);
  const json m = json::parse(slurp(dir_ / "exe" / "manifest.json"));
  EXPECT_EQ(m["seed"], 9);
}

TEST(Examples, ShippedConfigsParse) {
  for (const auto& entry : fs::directory_iterator(SEMIGRAV_EXAMPLES_DIR)) {
    if (entry.path().extension() != ".json") continue;
    std::ifstream in(entry.path());
    const json doc = json::parse(in);
    EXPECT_TRUE(std::find(modes().begin(), modes().end(),
                          doc["mode"].get<std::string>()) != modes().end())
        << entry.path();
  }
}

}  // namespace
}  // namespace semigrav::cli
