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

#ifndef EXEMPLAR_GD_HPP
#define EXEMPLAR_GD_HPP

#include <exemplar/core.hpp>
#include <exemplar/generator.hpp>
#include <exemplar/oracle.hpp>
#include <exemplar/rng.hpp>

#include <algorithm>
#include <functional>
#include <optional>
#include <string>

namespace exemplar {

/// Fitness p_target(G(z)) together with its gradient with respect to z.
class DifferentiableModel {
 public:
  virtual ~DifferentiableModel() = default;
  virtual std::size_t latent_dim() const = 0;
  virtual std::pair<double, Vector> value_and_gradient(const Vector& z,
                                                       std::size_t target) const = 0;
};

/// Chain rule through a glass-box generator and classifier:
/// grad = J_G(z)^T * grad_x p_target(x) at x = G(z).
inline std::pair<double, Vector> composite_gradient(const DifferentiableGenerator& gen,
                                                    const DifferentiableOracle& oracle,
                                                    const Vector& z, std::size_t target) {
  const Vector x = gen.decode(z);
  auto [p, grad_x] = oracle.probability_gradient(x, target);
  return {p, gen.jacobian(z).transpose() * grad_x};
}

/// Glass-box view of a (generator, oracle) pair. Both must offer analytic
/// derivatives; subprocess plugins do not.
class CompositeModel final : public DifferentiableModel {
 public:
  CompositeModel(const Generator& gen, const Oracle& oracle)
      : gen_(dynamic_cast<const DifferentiableGenerator*>(&gen)),
        oracle_(dynamic_cast<const DifferentiableOracle*>(&oracle)),
        latent_dim_(gen.latent_dim()) {
    if (!gen_) throw CapabilityError("generator is not differentiable (glass-box access required)");
    if (!oracle_) throw CapabilityError("oracle is not differentiable (glass-box access required)");
    if (gen.sample_dim() != oracle.sample_dim())
      throw ShapeError("oracle sample_dim " + std::to_string(oracle.sample_dim()) +
                       " ≠ generator sample_dim " + std::to_string(gen.sample_dim()));
  }

  std::size_t latent_dim() const override { return latent_dim_; }

  std::pair<double, Vector> value_and_gradient(const Vector& z,
                                               std::size_t target) const override {
    return composite_gradient(*gen_, *oracle_, z, target);
  }

 private:
  const DifferentiableGenerator* gen_;
  const DifferentiableOracle* oracle_;
  std::size_t latent_dim_;
};

/// Central differences: (f(z + h e_i) - f(z - h e_i)) / 2h per coordinate.
inline Vector finite_diff_gradient(const std::function<double(const Vector&)>& f, const Vector& z,
                                   double h) {
  if (!(h > 0.0)) throw ConfigError("finite difference step h must be > 0");
  Vector grad(z.size());
  Vector probe = z;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    probe(i) = z(i) + h;
    const double up = f(probe);
    probe(i) = z(i) - h;
    const double down = f(probe);
    probe(i) = z(i);
    grad(i) = (up - down) / (2.0 * h);
  }
  return grad;
}

/// Gradient ascent with heavy-ball momentum on p_target(G(z)):
///   v' = momentum * v + learning_rate * grad,  z' = clamp(z + v', u).
/// One model call per value_and_gradient evaluation; `generations` in the
/// result equals the number of calls. Without `start`, the initial point is
/// drawn uniformly from the box using `rng`. `observe` sees every evaluated
/// point.
inline RunResult run_gd(const GdConfig& config, const DifferentiableModel& model,
                        const std::optional<Vector>& start, RandomStream& rng,
                        const std::function<void(const Specimen&)>& observe = nullptr) {
  const GdConfig cfg = validate_config(config);
  if (model.latent_dim() != cfg.latent_dim)
    throw ShapeError("model latent_dim " + std::to_string(model.latent_dim()) +
                     " ≠ configured latent_dim " + std::to_string(cfg.latent_dim));
  detail::Stopwatch clock;

  Vector z(cfg.latent_dim);
  if (start) {
    if (static_cast<std::size_t>(start->size()) != cfg.latent_dim)
      throw ShapeError("start point has dimension " + std::to_string(start->size()));
    z = clamp_latent(*start, cfg.u);
  } else {
    for (std::size_t j = 0; j < cfg.latent_dim; ++j) z(j) = rng.uniform(-cfg.u, cfg.u);
  }
  Vector v = Vector::Zero(cfg.latent_dim);

  RunResult result;
  Specimen current;
  while (true) {
    auto [fitness, grad] = model.value_and_gradient(z, cfg.target_class);
    ++result.model_calls;
    current = Specimen{z, v, std::clamp(fitness, 0.0, 1.0)};
    if (observe) observe(current);
    if (!result.best_specimen.fitness || *current.fitness > *result.best_specimen.fitness)
      result.best_specimen = current;
    if (*current.fitness >= cfg.threshold) {
      result.converged = true;
      break;
    }
    if (result.model_calls >= cfg.max_calls) break;
    v = cfg.momentum * v + cfg.learning_rate * grad;
    z = clamp_latent(z + v, cfg.u);
  }

  result.generations = result.model_calls;
  result.final_elite = {current};
  result.wall_time = clock.seconds();
  return result;
}

}  // namespace exemplar

#endif  // EXEMPLAR_GD_HPP
