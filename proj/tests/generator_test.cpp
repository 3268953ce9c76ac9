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

#include <exemplar/fixtures.hpp>
#include <exemplar/generator.hpp>

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace exemplar {
namespace {

using fixtures::vec;

TEST(IdentityDecode, ReturnsInput) {
  IdentityGenerator gen(2);
  const auto out = gen.decode_batch(Batch{vec({1.0, -2.0})});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0], vec({1.0, -2.0}));
}

TEST(IdentityDecode, EmptyBatch) {
  IdentityGenerator gen(3);
  EXPECT_TRUE(gen.decode_batch(Batch{}).empty());
}

TEST(IdentityDecode, PreservesOrderOfFifty) {
  IdentityGenerator gen(4);
  RandomStream rng = rng_stream(1, 0);
  Batch in;
  for (int i = 0; i < 50; ++i)
    in.push_back(vec({rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5), double(i)}));
  EXPECT_EQ(gen.decode_batch(in), in);
}

TEST(AffineDecode, IdentityWeights) {
  AffineDecoder dec(Matrix::Identity(2, 2), Vector::Zero(2));
  EXPECT_EQ(dec.decode_batch(Batch{vec({0.5, 0.5})})[0], vec({0.5, 0.5}));
}

TEST(AffineDecode, ConstantDecoder) {
  AffineDecoder dec(Matrix::Zero(3, 2), vec({1, 2, 3}));
  EXPECT_EQ(dec.decode_batch(Batch{vec({9, -4})})[0], vec({1, 2, 3}));
}

TEST(AffineDecode, SeededMatchesNaiveMatVec) {
  RandomStream rng = rng_stream(31, 0);
  Matrix w(3, 2);
  Vector b(3);
  for (Eigen::Index r = 0; r < 3; ++r) {
    for (Eigen::Index c = 0; c < 2; ++c) w(r, c) = rng.normal();
    b(r) = rng.normal();
  }
  AffineDecoder dec(w, b);
  const Vector z = vec({0.7, -1.3});
  const Vector got = dec.decode_batch(Batch{z})[0];
  auto want = testing::naive_matvec(w, testing::to_std(z));
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(got(i), want[i] + b(i), 1e-12);
}

TEST(AffineDecode, Errors) {
  AffineDecoder dec(Matrix::Identity(2, 2), Vector::Zero(2));
  EXPECT_THROW(dec.decode_batch(Batch{vec({1, 2, 3})}), ShapeError);
  EXPECT_THROW(AffineDecoder(Matrix::Identity(2, 2), Vector::Zero(3)), ShapeError);
}

TEST(MlpDecode, ZeroWeightsGiveZeros) {
  MlpDecoder dec(Mlp({DenseLayer{Matrix::Zero(5, 3), Vector::Zero(5)},
                      DenseLayer{Matrix::Zero(2, 5), Vector::Zero(2)}},
                     OutputActivation::tanh));
  EXPECT_EQ(dec.decode_batch(Batch{vec({1, -2, 3})})[0], Vector::Zero(2));
}

TEST(MlpDecode, IdentityLayerAtOrigin) {
  MlpDecoder dec(Mlp({DenseLayer{Matrix::Identity(3, 3), Vector::Zero(3)}}, OutputActivation::tanh));
  EXPECT_EQ(dec.decode_batch(Batch{Vector::Zero(3)})[0], Vector::Zero(3));
}

TEST(MlpDecode, FixtureMatchesNaiveOracle) {
  MlpDecoder dec(fixtures::mlp_decoder_4x6x2_network());
  const Vector z = vec({0.3, -1.2, 2.0, 0.05});
  const Vector got = dec.decode_batch(Batch{z})[0];
  const auto want = testing::naive_forward(dec.network().layers(), testing::to_std(z), "tanh");
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(got(i), want[i], 1e-12);
  EXPECT_LT(got.cwiseAbs().maxCoeff(), 1.0);
}

TEST(MlpDecode, Errors) {
  MlpDecoder dec(fixtures::mlp_decoder_4x6x2_network());
  EXPECT_THROW(dec.decode_batch(Batch{vec({1, 2})}), ShapeError);
  EXPECT_THROW(MlpDecoder(fixtures::mlp_2x8x3_network()), ConfigError);
}

// The saddle decoder folds each axis: even in z_i, derivative zero at 0.
TEST(SaddleDecoder, EvenFoldWithFlatOrigin) {
  MlpDecoder dec(fixtures::saddle_decoder_network());
  for (double a : {0.5, 1.0, 3.0}) {
    const Vector plus = dec.decode(vec({a, -a}));
    const Vector minus = dec.decode(vec({-a, a}));
    EXPECT_EQ(plus, minus);
  }
  EXPECT_EQ(dec.jacobian(vec({0, 0})), Matrix::Zero(2, 2));
}

TEST(GeneratorProperties, OutputLengthEqualsInputLength) {
  std::vector<std::unique_ptr<Generator>> gens;
  gens.push_back(std::make_unique<IdentityGenerator>(4));
  gens.push_back(std::make_unique<AffineDecoder>(fixtures::affine_4x2()));
  gens.push_back(std::make_unique<MlpDecoder>(fixtures::mlp_decoder_4x6x2_network()));
  RandomStream rng = rng_stream(2, 0);
  for (auto& g : gens) {
    for (std::size_t n : {0u, 1u, 13u}) {
      Batch in(n, Vector(4));
      for (auto& z : in)
        for (Eigen::Index j = 0; j < 4; ++j) z(j) = rng.uniform(-5, 5);
      const Batch out = g->decode_batch(in);
      EXPECT_EQ(out.size(), n);
      EXPECT_EQ(g->decode_batch(in), out);
    }
  }
}

}  // namespace
}  // namespace exemplar
