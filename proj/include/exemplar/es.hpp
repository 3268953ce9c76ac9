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

#ifndef EXEMPLAR_ES_HPP
#define EXEMPLAR_ES_HPP

#include <exemplar/core.hpp>
#include <exemplar/generator.hpp>
#include <exemplar/oracle.hpp>
#include <exemplar/rng.hpp>

#include <algorithm>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

namespace exemplar {

/// Evolutionary strategy over latent space with per-specimen momentum.
///
/// Each generation keeps the k fittest specimens (the elite) and adds m
/// offspring per elite. An offspring's velocity is v' = alpha * v + eps with
/// eps ~ N(0, s^2 I), and its position is clamp(z + v', u). Fitness is the
/// oracle's probability for the target class and is cached, so elites are
/// never re-evaluated. With alpha = 0 this is a plain Gaussian-mutation ES.
///
/// Population layout after a step: elite (descending fitness) followed by
/// offspring in (elite index, mutation index) order.

enum class EsVariant {
  momentum,  ///< v' = alpha * v + eps
  plain,     ///< z' = clamp(z + eps), velocity stays zero
};

struct EsState {
  std::vector<Specimen> population;
  std::size_t generation = 0;
  std::size_t model_calls = 0;
  bool converged = false;

  bool operator==(const EsState&) const = default;
};

/// t specimens drawn uniformly from [-u, u]^d with zero velocity. Draw order:
/// specimen-major, component-minor.
inline EsState init_population(const EsConfig& cfg, RandomStream& rng) {
  validate_config(cfg);
  EsState state;
  state.population.reserve(cfg.t);
  for (std::size_t i = 0; i < cfg.t; ++i) {
    Vector z(cfg.latent_dim);
    for (std::size_t j = 0; j < cfg.latent_dim; ++j) z(j) = rng.uniform(-cfg.u, cfg.u);
    state.population.push_back(Specimen::at(std::move(z)));
  }
  return state;
}

/// Scores every unscored specimen with one generator call and one oracle
/// call. Already-scored specimens are left alone.
inline EsState evaluate_unscored(EsState state, Generator& gen, Oracle& oracle,
                                 const EsConfig& cfg) {
  if (gen.latent_dim() != cfg.latent_dim)
    throw ShapeError("generator latent_dim " + std::to_string(gen.latent_dim()) +
                     " ≠ configured latent_dim " + std::to_string(cfg.latent_dim));
  if (oracle.sample_dim() != gen.sample_dim())
    throw ShapeError("oracle sample_dim " + std::to_string(oracle.sample_dim()) +
                     " ≠ generator sample_dim " + std::to_string(gen.sample_dim()));
  if (cfg.target_class >= oracle.num_classes())
    throw ConfigError("target class " + std::to_string(cfg.target_class) +
                      " out of range for oracle with " + std::to_string(oracle.num_classes()) +
                      " classes");

  std::vector<std::size_t> pending;
  Batch latents;
  for (std::size_t i = 0; i < state.population.size(); ++i) {
    if (!state.population[i].scored()) {
      pending.push_back(i);
      latents.push_back(state.population[i].latent);
    }
  }
  if (pending.empty()) return state;

  const Batch samples = gen.decode_batch(latents);
  if (samples.size() != latents.size()) throw ShapeError("generator returned wrong batch size");
  const auto rows = oracle.predict_batch(samples);
  if (rows.size() != samples.size()) throw ShapeError("oracle returned wrong batch size");

  for (std::size_t n = 0; n < pending.size(); ++n) {
    const double p = rows[n](static_cast<Eigen::Index>(cfg.target_class));
    state.population[pending[n]].fitness = std::clamp(p, 0.0, 1.0);
  }
  state.model_calls += pending.size();
  return state;
}

/// Indices of the k fittest specimens, descending by fitness; ties go to the
/// lower index.
inline std::vector<std::size_t> elite_indices(const std::vector<Specimen>& population,
                                              std::size_t k) {
  if (k > population.size())
    throw ConfigError("k = " + std::to_string(k) + " exceeds population size " +
                      std::to_string(population.size()));
  for (std::size_t i = 0; i < population.size(); ++i)
    if (!population[i].scored())
      throw std::logic_error("select_elite: specimen " + std::to_string(i) + " is unscored");
  std::vector<std::size_t> order(population.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return *population[a].fitness > *population[b].fitness;
  });
  order.resize(k);
  return order;
}

inline std::vector<Specimen> select_elite(const std::vector<Specimen>& population, std::size_t k) {
  std::vector<Specimen> elite;
  elite.reserve(k);
  for (std::size_t i : elite_indices(population, k)) elite.push_back(population[i]);
  return elite;
}

/// One offspring of `parent`. Draws latent_dim Gaussians from `rng`.
inline Specimen mutate_specimen(const Specimen& parent, const EsConfig& cfg, RandomStream& rng,
                                EsVariant variant = EsVariant::momentum) {
  Vector eps(parent.latent.size());
  for (Eigen::Index j = 0; j < eps.size(); ++j) eps(j) = cfg.s * rng.normal();
  Specimen child;
  if (variant == EsVariant::momentum) {
    child.velocity = cfg.alpha * parent.velocity + eps;
    child.latent = clamp_latent(parent.latent + child.velocity, cfg.u);
  } else {
    child.velocity = Vector::Zero(parent.latent.size());
    child.latent = clamp_latent(parent.latent + eps, cfg.u);
  }
  return child;
}

/// Elitist selection, k*m mutations, one batched evaluation of the offspring.
inline EsState es_step(EsState state, Generator& gen, Oracle& oracle, const EsConfig& cfg,
                       RandomStream& rng, EsVariant variant = EsVariant::momentum) {
  EsState next;
  next.population = select_elite(state.population, cfg.k);
  next.population.reserve(cfg.k + cfg.k * cfg.m);
  for (std::size_t e = 0; e < cfg.k; ++e)
    for (std::size_t i = 0; i < cfg.m; ++i)
      next.population.push_back(mutate_specimen(next.population[e], cfg, rng, variant));
  next.generation = state.generation + 1;
  next.model_calls = state.model_calls;
  next = evaluate_unscored(std::move(next), gen, oracle, cfg);
  return next;
}

/// True iff the elite (or only the best specimen, with ConvergeOn::best)
/// has fitness >= threshold.
inline bool check_convergence(const EsState& state, const EsConfig& cfg) {
  const std::size_t k = cfg.converge_on == ConvergeOn::best
                            ? std::size_t{1}
                            : std::min(cfg.k, state.population.size());
  for (std::size_t i : elite_indices(state.population, k))
    if (!(*state.population[i].fitness >= cfg.threshold)) return false;
  return true;
}

/// Observer invoked with the scored population after initialization and
/// after every generation.
using EsObserver = std::function<void(const EsState&)>;

inline RunResult run_es(const EsConfig& config, Generator& gen, Oracle& oracle, RandomStream& rng,
                        EsVariant variant = EsVariant::momentum,
                        const EsObserver& observe = nullptr) {
  const EsConfig cfg = validate_config(config);
  detail::Stopwatch clock;

  EsState state = evaluate_unscored(init_population(cfg, rng), gen, oracle, cfg);
  if (observe) observe(state);

  // Elites are carried over, so the best of the initial population or of any
  // offspring batch is the best ever observed. First occurrence wins ties.
  auto track_best = [](const EsState& s, Specimen& best) {
    for (const auto& spec : s.population)
      if (!best.fitness || *spec.fitness > *best.fitness) best = spec;
  };
  Specimen best;
  track_best(state, best);

  while (true) {
    state.converged = check_convergence(state, cfg);
    if (state.converged || state.model_calls >= cfg.max_calls) break;
    state = es_step(std::move(state), gen, oracle, cfg, rng, variant);
    track_best(state, best);
    if (observe) observe(state);
  }

  RunResult result;
  result.converged = state.converged;
  result.model_calls = state.model_calls;
  result.generations = state.generation;
  result.best_specimen = std::move(best);
  result.final_elite = select_elite(state.population, cfg.k);
  result.wall_time = clock.seconds();
  return result;
}

}  // namespace exemplar

#endif  // EXEMPLAR_ES_HPP
