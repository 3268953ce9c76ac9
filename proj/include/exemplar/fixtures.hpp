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

#ifndef EXEMPLAR_FIXTURES_HPP
#define EXEMPLAR_FIXTURES_HPP

#include <exemplar/generator.hpp>
#include <exemplar/mlp.hpp>
#include <exemplar/oracle.hpp>
#include <exemplar/rng.hpp>

#include <memory>
#include <string>
#include <vector>

namespace exemplar {

/// A deterministic (generator, oracle) pair defining a fitness landscape.
struct Fixture {
  std::unique_ptr<Generator> generator;
  std::unique_ptr<Oracle> oracle;
};

namespace fixtures {

inline Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

/// Target class 0 wins everywhere in the default box: the only competitor
/// sits a thousand units away.
inline Fixture easy() {
  return {std::make_unique<IdentityGenerator>(2),
          std::make_unique<CentroidSoftmaxModel>(
              std::vector<Vector>{vec({0, 0}), vec({1000, 1000})}, 1.0)};
}

/// Identity generator over a 4-d latent box and a 3-centroid softmax. The
/// p_0 >= 0.95 region is a wedge towards the (+u, +u, +u, +u) corner that a
/// uniform initial population rarely reaches, so the population has to
/// drift there.
inline CentroidSoftmaxModel multimodal_oracle() {
  return CentroidSoftmaxModel(
      {vec({2.5, 2.5, 2.5, 2.5}), vec({0, 0, 0, 0}), vec({3, -3, 3, -3})}, 20.0);
}

inline Fixture multimodal() {
  return {std::make_unique<IdentityGenerator>(4),
          std::make_unique<CentroidSoftmaxModel>(multimodal_oracle())};
}

/// 2 -> 4 -> 2 tanh decoder that folds each latent axis symmetrically:
/// sample_i = tanh(tanh(z_i - 2) - tanh(z_i + 2)), an even function of z_i
/// with its minimum at z_i = 0 and derivative exactly zero there.
inline Mlp saddle_decoder_network() {
  DenseLayer hidden{Matrix(4, 2), vec({-2, 2, -2, 2})};
  hidden.weight << 1, 0,
                   1, 0,
                   0, 1,
                   0, 1;
  DenseLayer out{Matrix(2, 4), vec({0, 0})};
  out.weight << 1, -1, 0, 0,
                0, 0, 1, -1;
  return Mlp({hidden, out}, OutputActivation::tanh);
}

/// The origin of latent space is a saddle of p_0 with exactly zero gradient:
/// moving along z_0 raises p_0 (away from the non-target centroid at
/// (-1, -1)), moving along z_1 lowers it (towards the non-target centroid at
/// (0, 0)). Target region: |z_0| large, z_1 near 0.
inline CentroidSoftmaxModel saddle_oracle() {
  return CentroidSoftmaxModel({vec({0, -1}), vec({-1, -1}), vec({0, 0})}, 0.2);
}

inline Fixture saddle() {
  return {std::make_unique<MlpDecoder>(saddle_decoder_network()),
          std::make_unique<CentroidSoftmaxModel>(saddle_oracle())};
}

namespace detail {

inline DenseLayer random_layer(std::size_t in, std::size_t out, double weight_scale,
                               double bias_scale, RandomStream& rng) {
  DenseLayer layer{Matrix(out, in), Vector(out)};
  for (std::size_t r = 0; r < out; ++r)
    for (std::size_t c = 0; c < in; ++c) layer.weight(r, c) = weight_scale * rng.normal();
  for (std::size_t r = 0; r < out; ++r) layer.bias(r) = bias_scale * rng.normal();
  return layer;
}

}  // namespace detail

/// Seeded 2 -> 8 -> 3 softmax classifier; also shipped as the model file
/// fixtures/mlp_2x8x3.
inline Mlp mlp_2x8x3_network() {
  RandomStream rng = rng_stream(0x6d6c70, 0);
  auto l0 = detail::random_layer(2, 8, 1.0, 0.5, rng);
  auto l1 = detail::random_layer(8, 3, 1.0, 0.5, rng);
  return Mlp({l0, l1}, OutputActivation::softmax);
}

/// Seeded 4 -> 2 affine decoder.
inline AffineDecoder affine_4x2() {
  RandomStream rng = rng_stream(0xaff1e, 0);
  auto layer = detail::random_layer(4, 2, 0.25, 0.25, rng);
  return AffineDecoder(layer.weight, layer.bias);
}

/// Seeded 4 -> 6 -> 2 tanh decoder.
inline Mlp mlp_decoder_4x6x2_network() {
  RandomStream rng = rng_stream(0xdec0de, 0);
  auto l0 = detail::random_layer(4, 6, 0.7, 0.3, rng);
  auto l1 = detail::random_layer(6, 2, 0.7, 0.3, rng);
  return Mlp({l0, l1}, OutputActivation::tanh);
}

/// Three seeded centroids in the 2-d sample space of the decoders above.
inline CentroidSoftmaxModel centroid_2d() {
  RandomStream rng = rng_stream(0xce27, 0);
  std::vector<Vector> centroids;
  for (int c = 0; c < 3; ++c) centroids.push_back(vec({rng.uniform(-1, 1), rng.uniform(-1, 1)}));
  return CentroidSoftmaxModel(std::move(centroids), 1.0);
}

inline Fixture affine_centroid() {
  return {std::make_unique<AffineDecoder>(affine_4x2()),
          std::make_unique<CentroidSoftmaxModel>(centroid_2d())};
}
inline Fixture affine_mlp() {
  return {std::make_unique<AffineDecoder>(affine_4x2()),
          std::make_unique<ToyMlpModel>(mlp_2x8x3_network())};
}
inline Fixture mlp_centroid() {
  return {std::make_unique<MlpDecoder>(mlp_decoder_4x6x2_network()),
          std::make_unique<CentroidSoftmaxModel>(centroid_2d())};
}
inline Fixture mlp_mlp() {
  return {std::make_unique<MlpDecoder>(mlp_decoder_4x6x2_network()),
          std::make_unique<ToyMlpModel>(mlp_2x8x3_network())};
}

/// Names accepted by by_name().
inline std::vector<std::string> names() {
  return {"easy",           "multimodal", "saddle",       "affine-centroid",
          "affine-mlp",     "mlp-centroid", "mlp-mlp"};
}

/// The four glass-box (differentiable generator, differentiable oracle)
/// combinations.
inline std::vector<std::string> differentiable_names() {
  return {"affine-centroid", "affine-mlp", "mlp-centroid", "mlp-mlp"};
}

inline Fixture by_name(const std::string& name) {
  if (name == "easy") return easy();
  if (name == "multimodal") return multimodal();
  if (name == "saddle") return saddle();
  if (name == "affine-centroid") return affine_centroid();
  if (name == "affine-mlp") return affine_mlp();
  if (name == "mlp-centroid") return mlp_centroid();
  if (name == "mlp-mlp") return mlp_mlp();
  throw ConfigError("unknown fixture '" + name + "'");
}

}  // namespace fixtures
}  // namespace exemplar

#endif  // EXEMPLAR_FIXTURES_HPP
