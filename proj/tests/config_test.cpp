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

#include <exemplar/config.hpp>

#include <gtest/gtest.h>

namespace exemplar {
namespace {

const std::string kFixtures = EXEMPLAR_FIXTURE_DIR;

TEST(ExperimentConfig, CanonicalExampleEqualsDefaults) {
  const auto cfg = ExperimentConfig::load(kFixtures + "/exemplar.conf");
  EXPECT_EQ(cfg.es, EsConfig{});
  EXPECT_EQ(cfg.gd, GdConfig{});
  EXPECT_EQ(cfg.method, Method::es);
  EXPECT_EQ(cfg.fixture, "multimodal");
  EXPECT_FALSE(cfg.latent_dim_set);
  EXPECT_TRUE(cfg.sweep.empty());
}

TEST(ExperimentConfig, ParsesFieldsAndComments) {
  const auto cfg = ExperimentConfig::parse(
      "# header\n"
      "t = 30\n"
      "k=5   # trailing comment\n"
      "alpha = 0.7\n"
      "u = 3\n"
      "max_calls = 900\n"
      "converge_on = best\n"
      "method = gd\n"
      "momentum = 0.5\n"
      "start = 1, -1\n"
      "latent_dim = 2\n");
  EXPECT_EQ(cfg.es.t, 30u);
  EXPECT_EQ(cfg.es.k, 5u);
  EXPECT_EQ(cfg.es.alpha, 0.7);
  EXPECT_EQ(cfg.es.u, 3.0);
  EXPECT_EQ(cfg.gd.u, 3.0);
  EXPECT_EQ(cfg.gd.max_calls, 900u);
  EXPECT_EQ(cfg.es.converge_on, ConvergeOn::best);
  EXPECT_EQ(cfg.method, Method::gd);
  EXPECT_EQ(cfg.gd.momentum, 0.5);
  ASSERT_TRUE(cfg.start);
  EXPECT_EQ(cfg.start->size(), 2);
  EXPECT_EQ((*cfg.start)(1), -1.0);
  EXPECT_TRUE(cfg.latent_dim_set);
}

TEST(ExperimentConfig, Errors) {
  EXPECT_THROW(ExperimentConfig::parse("bogus = 1\n"), ConfigError);
  EXPECT_THROW(ExperimentConfig::parse("t = many\n"), ConfigError);
  EXPECT_THROW(ExperimentConfig::parse("t = -3\n"), ConfigError);
  EXPECT_THROW(ExperimentConfig::parse("just words\n"), ConfigError);
  EXPECT_THROW(ExperimentConfig::parse("[other]\n"), ConfigError);
  EXPECT_THROW(ExperimentConfig::parse("fixture = nope\n"), ConfigError);
  EXPECT_THROW(ExperimentConfig::parse("[sweep]\nu = 1, 2\n"), ConfigError);
  EXPECT_THROW(ExperimentConfig::parse("[sweep]\nk = 5, 60\n"), ConfigError);
  try {
    ExperimentConfig::parse("t = 5\n\nwhat = 1\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  try {
    ExperimentConfig::load("/no/such/config");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("config not found"), std::string::npos);
  }
}

TEST(ExperimentConfig, SweepAxesKeepDeclarationOrder) {
  const auto cfg = ExperimentConfig::load(kFixtures + "/sweep.conf");
  ASSERT_EQ(cfg.sweep.size(), 5u);
  EXPECT_EQ(cfg.sweep[0].parameter, "t");
  EXPECT_EQ(cfg.sweep[1].parameter, "k");
  EXPECT_EQ(cfg.sweep[1].values, (std::vector<double>{5, 10, 15, 20}));
  EXPECT_EQ(cfg.sweep[2].parameter, "alpha");
  EXPECT_EQ(cfg.trials, 200u);
}

TEST(ExperimentConfig, Overrides) {
  ExperimentConfig cfg;
  cfg.set_override("k=4");
  cfg.set_override(" s = 0.25 ");
  EXPECT_EQ(cfg.es.k, 4u);
  EXPECT_EQ(cfg.es.s, 0.25);
  EXPECT_THROW(cfg.set_override("k"), ConfigError);
  EXPECT_THROW(cfg.set_override("nope=1"), ConfigError);
}

TEST(ExperimentConfig, RelativeModelPathsResolveAgainstConfigDir) {
  const auto cfg = ExperimentConfig::load(kFixtures + "/model_files.conf");
  EXPECT_EQ(cfg.oracle_model, kFixtures + "/mlp_2x8x3");
  Fixture fx = cfg.make_fixture();
  EXPECT_EQ(fx.generator->latent_dim(), 2u);
  EXPECT_EQ(fx.oracle->num_classes(), 3u);
}

TEST(ExperimentConfig, LatentDimAdoptedFromGenerator) {
  auto cfg = ExperimentConfig::load(kFixtures + "/saddle");
  Fixture fx = cfg.make_fixture();
  cfg.reconcile_latent_dim(*fx.generator);
  EXPECT_EQ(cfg.es.latent_dim, 2u);
  EXPECT_EQ(cfg.gd.latent_dim, 2u);

  cfg.set("latent_dim", "3");
  EXPECT_THROW(cfg.reconcile_latent_dim(*fx.generator), ConfigError);
}

TEST(ExperimentConfig, MissingOracle) {
  ExperimentConfig cfg;
  EXPECT_THROW(cfg.make_fixture(), ConfigError);
}

}  // namespace
}  // namespace exemplar
