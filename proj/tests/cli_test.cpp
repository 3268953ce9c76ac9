// Copyright 2026 The Exemplar Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <json.hpp>

#include <cstdio>
#include <string>
#include <sys/wait.h>

namespace {

const std::string kCli = EXEMPLAR_CLI_BIN;
const std::string kPlugin = EXEMPLAR_PLUGIN_BIN;
const std::string kFixtures = EXEMPLAR_FIXTURE_DIR;

struct Outcome {
  int code = -1;
  std::string output;
};

Outcome run_cli(const std::string& args, bool with_stderr = true) {
  const std::string command = kCli + " " + args + (with_stderr ? " 2>&1" : " 2>/dev/null");
  Outcome out;
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) return out;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) out.output.append(buf, n);
  const int status = pclose(pipe);
  out.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return out;
}

std::string quoted(const std::string& s) { return "'" + s + "'"; }

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

TEST(Cli, RunEasyConverges) {
  const Outcome r = run_cli("run --config " + kFixtures + "/easy --seed 7", false);
  ASSERT_EQ(r.code, 0) << r.output;
  const auto j = nlohmann::json::parse(r.output);
  EXPECT_TRUE(j["converged"].get<bool>());
  EXPECT_EQ(j["model_calls"], 50);
  EXPECT_EQ(j["seed"], 7);
  EXPECT_EQ(j["best"]["latent"].size(), 2u);
}

TEST(Cli, RunIsReproducible) {
  const std::string args = "run --config " + kFixtures + "/multimodal --seed 3";
  auto a = nlohmann::json::parse(run_cli(args, false).output);
  auto b = nlohmann::json::parse(run_cli(args, false).output);
  a.erase("wall_time");
  b.erase("wall_time");
  EXPECT_EQ(a, b);
}

TEST(Cli, BudgetBelowInitialPopulationIsAnError) {
  const Outcome r = run_cli("run --config " + kFixtures + "/easy --max-calls 10");
  EXPECT_EQ(r.code, 1);
  EXPECT_TRUE(contains(r.output, "budget below initial population cost")) << r.output;
}

TEST(Cli, MissingConfig) {
  const Outcome r = run_cli("run --config /no/such/file.conf");
  EXPECT_EQ(r.code, 1);
  EXPECT_TRUE(contains(r.output, "config not found")) << r.output;
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run_cli("run --no-such-flag").code, 1);
  EXPECT_EQ(run_cli("").code, 1);
  EXPECT_EQ(run_cli("run --set bogus=1").code, 1);
  EXPECT_EQ(run_cli("run --method newton").code, 1);
}

TEST(Cli, HelpListsFlags) {
  const Outcome r = run_cli("--help");
  EXPECT_EQ(r.code, 0);
  for (const char* flag : {"--config", "--seed", "--out", "--oracle-cmd", "--generator-cmd",
                           "--trials", "--workers", "--converge-on"})
    EXPECT_TRUE(contains(r.output, flag)) << flag;
}

TEST(Cli, GradientAscentStuckAtSaddle) {
  const Outcome r = run_cli("gd --config " + kFixtures + "/saddle --max-calls 300", false);
  EXPECT_EQ(r.code, 2) << r.output;
  const auto j = nlohmann::json::parse(r.output);
  EXPECT_FALSE(j["converged"].get<bool>());
  EXPECT_EQ(j["model_calls"], 300);
  EXPECT_EQ(j["best"]["latent"], nlohmann::json::array({0.0, 0.0}));
}

TEST(Cli, EsEscapesSaddle) {
  const Outcome r = run_cli("run --config " + kFixtures + "/saddle --seed 1");
  EXPECT_EQ(r.code, 0) << r.output;
}

TEST(Cli, BenchWritesReport) {
  const Outcome r = run_cli("bench --config " + kFixtures + "/easy --trials 3 --workers 2");
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_TRUE(r.output.rfind("method,t,k,alpha,m,s,trials,converged,avg_calls", 0) == 0)
      << r.output;
  EXPECT_TRUE(contains(r.output, "\nes,50,10,0.3,2,0.5,3,3,50.0,")) << r.output;
}

TEST(Cli, SweepRowsFollowAxes) {
  const Outcome r = run_cli("sweep --config " + kFixtures + "/easy --trials 2 --format json" +
                            " --axis k=5,10 --axis alpha=0");
  ASSERT_EQ(r.code, 0) << r.output;
  const auto j = nlohmann::json::parse(r.output);
  ASSERT_EQ(j.size(), 3u);
  EXPECT_EQ(j[0]["k"], 5);
  EXPECT_EQ(j[1]["k"], 10);
  EXPECT_EQ(j[2]["alpha"], 0.0);
}

TEST(Cli, Gradcheck) {
  const Outcome r = run_cli("gradcheck --set fixture=mlp-mlp --samples 20");
  EXPECT_EQ(r.code, 0) << r.output;
  EXPECT_TRUE(contains(r.output, "max relative error")) << r.output;
}

TEST(Cli, PluginTestAcceptsConformingPlugin) {
  const Outcome r = run_cli("plugin-test --oracle-cmd " + quoted(kPlugin + " echo-oracle"));
  EXPECT_EQ(r.code, 0) << r.output;
  EXPECT_TRUE(contains(r.output, "PASS normalization")) << r.output;
  const Outcome g = run_cli("plugin-test --generator-cmd " + quoted(kPlugin + " echo-generator"));
  EXPECT_EQ(g.code, 0) << g.output;
}

TEST(Cli, PluginTestReportsViolations) {
  const Outcome norm =
      run_cli("plugin-test --oracle-cmd " + quoted(kPlugin + " echo-oracle --fault normalization"));
  EXPECT_EQ(norm.code, 1);
  EXPECT_TRUE(contains(norm.output, "normalization violated")) << norm.output;

  const Outcome nondet = run_cli("plugin-test --oracle-cmd " +
                                 quoted(kPlugin + " echo-oracle --fault nondeterministic"));
  EXPECT_EQ(nondet.code, 1);
  EXPECT_TRUE(contains(nondet.output, "determinism violated")) << nondet.output;

  const Outcome rows =
      run_cli("plugin-test --oracle-cmd " + quoted(kPlugin + " echo-oracle --fault row-count"));
  EXPECT_EQ(rows.code, 1);
  EXPECT_TRUE(contains(rows.output, "FAIL row count")) << rows.output;
}

TEST(Cli, RunThroughOraclePlugin) {
  const std::string base = "run --config " + kFixtures + "/multimodal --seed 11";
  auto local = nlohmann::json::parse(run_cli(base, false).output);
  auto remote = nlohmann::json::parse(
      run_cli(base + " --oracle-cmd " + quoted(kPlugin + " oracle --fixture multimodal"), false).output);
  local.erase("wall_time");
  remote.erase("wall_time");
  EXPECT_EQ(local, remote);
}

}  // namespace
