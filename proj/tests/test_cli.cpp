#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

namespace {
struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(TRIPLEION_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::filesystem::path temp_dir() {
  auto p = std::filesystem::temp_directory_path() / ("tripleion_cli_" + std::to_string(::getpid()));
  std::filesystem::create_directories(p);
  return p;
}
}  // namespace

TEST(Cli, SaddleJson) {
  const auto r = run("saddle --subspace c3v --field 1");
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["V_s"].get<double>(), -7.6673, 1e-3);
  EXPECT_EQ(j["type"], "c3v");
  EXPECT_TRUE(j.contains("format_version"));
  EXPECT_TRUE(j.contains("config"));
}

TEST(Cli, RingSaddle) {
  const auto r = run("saddle --subspace ring --n 14");
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(run("saddle --subspace ring --n 9").code, 0);
}

TEST(Cli, Wannier) {
  const auto r = run("wannier");
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["alpha3"].get<double>(), 2.6228, 1e-3);
  EXPECT_NEAR(j["alpha2"].get<double>(), 3.7043, 1e-3);
}

TEST(Cli, RingScanCsv) {
  const auto r = run("ring-scan --n-max 15");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("N,exists,R_s,Z_s,V_s\n", 0), 0u);
  EXPECT_NE(r.out.find("\n13,1,"), std::string::npos);
  EXPECT_NE(r.out.find("\n14,0,,,\n"), std::string::npos);
}

TEST(Cli, Stability) {
  const auto r = run("stability --subspace c2v --scope full");
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["scope"], "full");
  EXPECT_EQ(j["modes"].size() > 0, true);
}

TEST(Cli, Selftest) { EXPECT_EQ(run("selftest").code, 0); }

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("nonsense").code, 2);
  EXPECT_EQ(run("saddle --subspace c5v").code, 2);
  EXPECT_EQ(run("simulate --set bogus=1").code, 2);
}

TEST(Cli, MalformedConfigIsExitTwo) {
  const auto dir = temp_dir();
  const auto cfg = dir / "bad.cfg";
  std::ofstream(cfg) << "E = -0.5\nn_traj = many\n";
  const auto r = run("simulate --config " + cfg.string());
  EXPECT_EQ(r.code, 2);
  std::filesystem::remove_all(dir);
}

TEST(Cli, SimulateHistogramShapePipeline) {
  const auto dir = temp_dir();
  const auto cfg = dir / "run.cfg";
  const auto results = dir / "results.json";
  const auto hist = dir / "hist.csv";
  std::ofstream(cfg) << "subspace = c3v\nE = -0.5\nt0_frac = 0.4\nn_traj = 40\nseed = 3\n";
  ASSERT_EQ(run("simulate --quiet --threads 2 --config " + cfg.string() + " --out " + results.string()).code, 0);
  const auto j = nlohmann::json::parse(std::ifstream(results));
  EXPECT_EQ(j["outcomes"].size(), 40u);
  EXPECT_EQ(j["config"]["t0_frac"], "0.4");
  EXPECT_EQ(j["config"]["seed"], "3");
  ASSERT_EQ(run("histogram --in " + results.string() + " --out " + hist.string()).code, 0);
  std::ifstream in(hist);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_NE(text.find("bin_center,count,density"), std::string::npos);
  // 40 trajectories are far below the shape statistics threshold.
  EXPECT_EQ(run("shape --in " + hist.string()).code, 1);
  std::filesystem::remove_all(dir);
}

TEST(Cli, EnvironmentOverride) {
  const auto dir = temp_dir();
  const auto results = dir / "r.json";
  const std::string cmd = "env TRIPLEION_N_TRAJ=3 TRIPLEION_SEED=8 " + std::string(TRIPLEION_CLI_PATH) +
                          " simulate --quiet --out " + results.string() + " > /dev/null 2>&1";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  const auto j = nlohmann::json::parse(std::ifstream(results));
  EXPECT_EQ(j["outcomes"].size(), 3u);
  EXPECT_EQ(j["config"]["seed"], "8");
  std::filesystem::remove_all(dir);
}
