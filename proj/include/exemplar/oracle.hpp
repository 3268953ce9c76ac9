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

#ifndef EXEMPLAR_ORACLE_HPP
#define EXEMPLAR_ORACLE_HPP

#include <exemplar/core.hpp>
#include <exemplar/mlp.hpp>

#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace exemplar {

/// Class probabilities for one sample; entries in [0, 1] summing to 1.
using ProbabilityRow = Vector;

/// Throws if `row` is not a probability distribution over `num_classes`
/// classes to within `tol`.
inline void check_probability_row(const ProbabilityRow& row, std::size_t num_classes, double tol) {
  if (static_cast<std::size_t>(row.size()) != num_classes)
    throw ShapeError("probability row has " + std::to_string(row.size()) + " entries, expected " +
                     std::to_string(num_classes));
  for (Eigen::Index i = 0; i < row.size(); ++i)
    if (!(row(i) >= -tol && row(i) <= 1.0 + tol))
      throw DomainError("probability " + std::to_string(row(i)) + " outside [0, 1]");
  if (!(std::abs(row.sum() - 1.0) <= tol))
    throw DomainError("normalization violated: row sums to " + std::to_string(row.sum()));
}

/// Black-box classifier: maps a batch of samples to class probabilities.
/// Implementations must be deterministic and preserve batch order.
class Oracle {
 public:
  virtual ~Oracle() = default;
  virtual std::size_t num_classes() const = 0;
  virtual std::size_t sample_dim() const = 0;
  virtual std::vector<ProbabilityRow> predict_batch(std::span<const Vector> samples) = 0;
};

/// Glass-box access to an oracle: the target-class probability together
/// with its gradient with respect to the sample.
class DifferentiableOracle {
 public:
  virtual ~DifferentiableOracle() = default;
  virtual std::pair<double, Vector> probability_gradient(const Vector& x,
                                                         std::size_t target) const = 0;
};

/// Softmax over negative squared distances to one centroid per class:
/// p_c(x) = exp(-|x - mu_c|^2 / tau) / sum_j exp(-|x - mu_j|^2 / tau).
class CentroidSoftmaxModel final : public Oracle, public DifferentiableOracle {
 public:
  CentroidSoftmaxModel(std::vector<Vector> centroids, double tau)
      : centroids_(std::move(centroids)), tau_(tau) {
    if (centroids_.empty()) throw ShapeError("centroid model needs at least one centroid");
    if (!(tau_ > 0.0) || !std::isfinite(tau_)) throw ConfigError("tau must be > 0");
    for (const auto& c : centroids_) {
      if (c.size() != centroids_.front().size() || c.size() == 0)
        throw ShapeError("all centroids must share one positive dimension");
      if (!c.allFinite()) throw DomainError("centroid has non-finite components");
    }
  }

  std::size_t num_classes() const override { return centroids_.size(); }
  std::size_t sample_dim() const override { return centroids_.front().size(); }
  const std::vector<Vector>& centroids() const { return centroids_; }
  double tau() const { return tau_; }

  ProbabilityRow predict(const Vector& x) const { return softmax(logits(x)); }

  std::vector<ProbabilityRow> predict_batch(std::span<const Vector> samples) override {
    std::vector<ProbabilityRow> rows;
    rows.reserve(samples.size());
    for (const auto& x : samples) rows.push_back(predict(x));
    return rows;
  }

  // d p_t / dx = p_t * (g_t - sum_j p_j g_j),  g_j = -2 (x - mu_j) / tau.
  std::pair<double, Vector> probability_gradient(const Vector& x,
                                                 std::size_t target) const override {
    check_target(target);
    const ProbabilityRow p = predict(x);
    Vector mean_pull = Vector::Zero(x.size());
    for (std::size_t j = 0; j < centroids_.size(); ++j) mean_pull += p(j) * (x - centroids_[j]);
    Vector grad = (-2.0 / tau_) * p(target) * ((x - centroids_[target]) - mean_pull);
    return {p(target), std::move(grad)};
  }

 private:
  Vector logits(const Vector& x) const {
    if (static_cast<std::size_t>(x.size()) != sample_dim())
      throw ShapeError("sample dimension " + std::to_string(x.size()) +
                       " ≠ centroid dimension " + std::to_string(sample_dim()));
    Vector l(centroids_.size());
    for (std::size_t j = 0; j < centroids_.size(); ++j)
      l(j) = -(x - centroids_[j]).squaredNorm() / tau_;
    return l;
  }

  void check_target(std::size_t target) const {
    if (target >= num_classes())
      throw ConfigError("target class " + std::to_string(target) + " out of range");
  }

  std::vector<Vector> centroids_;
  double tau_;
};

/// MLP classifier with tanh hidden layers and a softmax output.
class ToyMlpModel final : public Oracle, public DifferentiableOracle {
 public:
  explicit ToyMlpModel(Mlp net) : net_(std::move(net)) {
    if (net_.output_activation() != OutputActivation::softmax)
      throw ConfigError("an MLP oracle needs a softmax output layer");
  }

  std::size_t num_classes() const override { return net_.output_width(); }
  std::size_t sample_dim() const override { return net_.input_width(); }
  const Mlp& network() const { return net_; }

  std::vector<ProbabilityRow> predict_batch(std::span<const Vector> samples) override {
    std::vector<ProbabilityRow> rows;
    rows.reserve(samples.size());
    for (const auto& x : samples) rows.push_back(net_.forward(x));
    return rows;
  }

  std::pair<double, Vector> probability_gradient(const Vector& x,
                                                 std::size_t target) const override {
    if (target >= num_classes())
      throw ConfigError("target class " + std::to_string(target) + " out of range");
    const Vector p = net_.forward(x);
    return {p(target), net_.jacobian(x).row(target).transpose()};
  }

 private:
  Mlp net_;
};

/// Pass-through wrapper counting batch calls and individual sample
/// evaluations.
class CountingOracle final : public Oracle {
 public:
  explicit CountingOracle(Oracle& inner) : inner_(inner) {}

  std::size_t num_classes() const override { return inner_.num_classes(); }
  std::size_t sample_dim() const override { return inner_.sample_dim(); }

  std::vector<ProbabilityRow> predict_batch(std::span<const Vector> samples) override {
    ++batch_calls_;
    sample_calls_ += samples.size();
    return inner_.predict_batch(samples);
  }

  std::size_t batch_calls() const { return batch_calls_; }
  std::size_t sample_calls() const { return sample_calls_; }

 private:
  Oracle& inner_;
  std::size_t batch_calls_ = 0;
  std::size_t sample_calls_ = 0;
};

}  // namespace exemplar

#endif  // EXEMPLAR_ORACLE_HPP
