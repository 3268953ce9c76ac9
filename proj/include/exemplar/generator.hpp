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

#ifndef EXEMPLAR_GENERATOR_HPP
#define EXEMPLAR_GENERATOR_HPP

#include <exemplar/core.hpp>
#include <exemplar/mlp.hpp>

#include <span>
#include <string>
#include <vector>

namespace exemplar {

/// Decoder G from latent space to sample space. Deterministic, order
/// preserving, one output per input.
class Generator {
 public:
  virtual ~Generator() = default;
  virtual std::size_t latent_dim() const = 0;
  virtual std::size_t sample_dim() const = 0;
  virtual Batch decode_batch(std::span<const Vector> latents) = 0;
};

/// Glass-box access to a generator for the gradient baseline.
class DifferentiableGenerator {
 public:
  virtual ~DifferentiableGenerator() = default;
  virtual Vector decode(const Vector& z) const = 0;
  /// d decode(z) / dz, shape sample_dim x latent_dim.
  virtual Matrix jacobian(const Vector& z) const = 0;
};

namespace detail {

inline void check_latent_width(const Vector& z, std::size_t expected) {
  if (static_cast<std::size_t>(z.size()) != expected)
    throw ShapeError("latent dimension " + std::to_string(z.size()) + " ≠ generator latent_dim " +
                     std::to_string(expected));
}

}  // namespace detail

/// Sample space is latent space.
class IdentityGenerator final : public Generator, public DifferentiableGenerator {
 public:
  explicit IdentityGenerator(std::size_t dim) : dim_(dim) {
    if (dim_ == 0) throw ShapeError("identity generator needs dim >= 1");
  }

  std::size_t latent_dim() const override { return dim_; }
  std::size_t sample_dim() const override { return dim_; }

  Batch decode_batch(std::span<const Vector> latents) override {
    for (const auto& z : latents) detail::check_latent_width(z, dim_);
    return Batch(latents.begin(), latents.end());
  }

  Vector decode(const Vector& z) const override {
    detail::check_latent_width(z, dim_);
    return z;
  }
  Matrix jacobian(const Vector& z) const override {
    detail::check_latent_width(z, dim_);
    return Matrix::Identity(dim_, dim_);
  }

 private:
  std::size_t dim_;
};

/// x = weight * z + bias.
class AffineDecoder final : public Generator, public DifferentiableGenerator {
 public:
  AffineDecoder(Matrix weight, Vector bias) : weight_(std::move(weight)), bias_(std::move(bias)) {
    if (weight_.rows() == 0 || weight_.cols() == 0) throw ShapeError("affine decoder is empty");
    if (bias_.size() != weight_.rows())
      throw ShapeError("affine decoder bias width " + std::to_string(bias_.size()) +
                       " ≠ weight rows " + std::to_string(weight_.rows()));
    if (!weight_.allFinite() || !bias_.allFinite())
      throw DomainError("affine decoder has non-finite entries");
  }

  std::size_t latent_dim() const override { return weight_.cols(); }
  std::size_t sample_dim() const override { return weight_.rows(); }
  const Matrix& weight() const { return weight_; }
  const Vector& bias() const { return bias_; }

  Batch decode_batch(std::span<const Vector> latents) override {
    Batch out;
    out.reserve(latents.size());
    for (const auto& z : latents) out.push_back(decode(z));
    return out;
  }

  Vector decode(const Vector& z) const override {
    detail::check_latent_width(z, latent_dim());
    return weight_ * z + bias_;
  }
  Matrix jacobian(const Vector& z) const override {
    detail::check_latent_width(z, latent_dim());
    return weight_;
  }

 private:
  Matrix weight_;
  Vector bias_;
};

/// MLP decoder: tanh hidden layers; output activation from the model file
/// (tanh by default, giving samples in (-1, 1)).
class MlpDecoder final : public Generator, public DifferentiableGenerator {
 public:
  explicit MlpDecoder(Mlp net) : net_(std::move(net)) {
    if (net_.output_activation() == OutputActivation::softmax)
      throw ConfigError("an MLP decoder needs a tanh or linear output layer");
  }

  std::size_t latent_dim() const override { return net_.input_width(); }
  std::size_t sample_dim() const override { return net_.output_width(); }
  const Mlp& network() const { return net_; }

  Batch decode_batch(std::span<const Vector> latents) override {
    Batch out;
    out.reserve(latents.size());
    for (const auto& z : latents) out.push_back(net_.forward(z));
    return out;
  }

  Vector decode(const Vector& z) const override { return net_.forward(z); }
  Matrix jacobian(const Vector& z) const override { return net_.jacobian(z); }

 private:
  Mlp net_;
};

/// Pass-through wrapper counting decode calls.
class CountingGenerator final : public Generator {
 public:
  explicit CountingGenerator(Generator& inner) : inner_(inner) {}

  std::size_t latent_dim() const override { return inner_.latent_dim(); }
  std::size_t sample_dim() const override { return inner_.sample_dim(); }

  Batch decode_batch(std::span<const Vector> latents) override {
    ++batch_calls_;
    sample_calls_ += latents.size();
    return inner_.decode_batch(latents);
  }

  std::size_t batch_calls() const { return batch_calls_; }
  std::size_t sample_calls() const { return sample_calls_; }

 private:
  Generator& inner_;
  std::size_t batch_calls_ = 0;
  std::size_t sample_calls_ = 0;
};

}  // namespace exemplar

#endif  // EXEMPLAR_GENERATOR_HPP
