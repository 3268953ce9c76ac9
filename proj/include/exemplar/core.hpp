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

#ifndef EXEMPLAR_CORE_HPP
#define EXEMPLAR_CORE_HPP

#include <Eigen/Core>

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace exemplar {

/// Real vector used for latent codes, velocities, samples and probability
/// rows alike.
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A batch is an ordered list of vectors; every model preserves its order.
using Batch = std::vector<Vector>;

/// Raised when a configuration violates one of its invariants.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when vectors or models have incompatible shapes.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised for non-finite inputs where finite values are required.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when an operation needs a capability (e.g. analytic gradients)
/// that a component does not offer.
class CapabilityError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Which population members must clear the threshold for a run to count as
/// converged.
enum class ConvergeOn { elite, best };

inline const char* to_string(ConvergeOn c) {
  return c == ConvergeOn::elite ? "elite" : "best";
}

inline ConvergeOn parse_converge_on(const std::string& s) {
  if (s == "elite") return ConvergeOn::elite;
  if (s == "best") return ConvergeOn::best;
  throw ConfigError("converge_on must be 'best' or 'elite', got '" + s + "'");
}

/// Hyperparameters of the evolutionary strategy. Defaults are the published
/// setting (t=50, k=10, u=5, m=2, s=0.5, alpha=0.3).
struct EsConfig {
  std::size_t t = 50;          ///< initial population size
  std::size_t k = 10;          ///< elite size
  double u = 5.0;              ///< latent box half-width
  std::size_t m = 2;           ///< mutations per elite specimen
  double s = 0.5;              ///< mutation standard deviation
  double alpha = 0.3;          ///< momentum rate
  double threshold = 0.95;     ///< target-class confidence for convergence
  std::size_t max_calls = 5000;
  std::size_t latent_dim = 4;
  std::size_t target_class = 0;
  ConvergeOn converge_on = ConvergeOn::elite;

  bool operator==(const EsConfig&) const = default;
};

/// Hyperparameters of the gradient-ascent-with-momentum baseline.
struct GdConfig {
  double learning_rate = 0.1;
  double momentum = 0.9;
  double u = 5.0;
  double threshold = 0.95;
  std::size_t max_calls = 5000;
  std::size_t latent_dim = 4;
  std::size_t target_class = 0;

  bool operator==(const GdConfig&) const = default;
};

/// Checks every EsConfig invariant and returns the config unchanged.
/// The error message names the first violated constraint.
inline EsConfig validate_config(const EsConfig& cfg) {
  if (cfg.t < 1) throw ConfigError("t must be at least 1");
  if (cfg.k < 1) throw ConfigError("k must be at least 1");
  if (cfg.k > cfg.t) throw ConfigError("k must not exceed t");
  if (cfg.m < 1) throw ConfigError("m must be at least 1");
  if (cfg.latent_dim < 1) throw ConfigError("latent_dim must be at least 1");
  if (!(cfg.u > 0.0) || !std::isfinite(cfg.u)) throw ConfigError("u must be > 0");
  if (!(cfg.s > 0.0) || !std::isfinite(cfg.s)) throw ConfigError("s must be > 0");
  if (!(cfg.alpha >= 0.0)) throw ConfigError("alpha must be >= 0");
  if (!(cfg.alpha < 1.0)) throw ConfigError("alpha must be < 1");
  if (!(cfg.threshold > 0.0 && cfg.threshold < 1.0))
    throw ConfigError("threshold must lie in (0, 1)");
  if (cfg.max_calls < 1) throw ConfigError("max_calls must be at least 1");
  if (cfg.max_calls < cfg.t)
    throw ConfigError("budget below initial population cost (max_calls " +
                      std::to_string(cfg.max_calls) + " < t " + std::to_string(cfg.t) + ")");
  return cfg;
}

inline GdConfig validate_config(const GdConfig& cfg) {
  if (!(cfg.learning_rate > 0.0) || !std::isfinite(cfg.learning_rate))
    throw ConfigError("learning_rate must be > 0");
  if (!(cfg.momentum >= 0.0)) throw ConfigError("momentum must be >= 0");
  if (!(cfg.momentum < 1.0)) throw ConfigError("momentum must be < 1");
  if (!(cfg.u > 0.0) || !std::isfinite(cfg.u)) throw ConfigError("u must be > 0");
  if (!(cfg.threshold > 0.0 && cfg.threshold < 1.0))
    throw ConfigError("threshold must lie in (0, 1)");
  if (cfg.max_calls < 1) throw ConfigError("max_calls must be at least 1");
  if (cfg.latent_dim < 1) throw ConfigError("latent_dim must be at least 1");
  return cfg;
}

/// Componentwise projection onto the box [-u, u]^d.
inline Vector clamp_latent(const Vector& z, double u) {
  if (!z.allFinite()) throw DomainError("clamp_latent: latent vector has non-finite components");
  if (!(u > 0.0)) throw DomainError("clamp_latent: u must be > 0");
  return z.cwiseMax(-u).cwiseMin(u);
}

/// Unit of evolution: a latent position, its velocity and cached fitness.
struct Specimen {
  Vector latent;
  Vector velocity;
  std::optional<double> fitness;

  static Specimen at(Vector z) {
    Specimen s;
    s.velocity = Vector::Zero(z.size());
    s.latent = std::move(z);
    return s;
  }

  bool scored() const { return fitness.has_value(); }

  bool operator==(const Specimen& o) const {
    return latent.size() == o.latent.size() && latent == o.latent &&
           velocity.size() == o.velocity.size() && velocity == o.velocity &&
           fitness == o.fitness;
  }
};

/// Outcome of one optimization run. Every field except wall_time is a
/// deterministic function of (config, seed, fixture).
struct RunResult {
  bool converged = false;
  std::size_t model_calls = 0;
  std::size_t generations = 0;
  double wall_time = 0.0;  ///< seconds
  Specimen best_specimen;
  std::vector<Specimen> final_elite;

  /// Equality on everything but wall_time.
  bool same_outcome(const RunResult& o) const {
    return converged == o.converged && model_calls == o.model_calls &&
           generations == o.generations && best_specimen == o.best_specimen &&
           final_elite == o.final_elite;
  }
};

namespace detail {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

}  // namespace exemplar

#endif  // EXEMPLAR_CORE_HPP
