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

#ifndef EXEMPLAR_RNG_HPP
#define EXEMPLAR_RNG_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace exemplar {

/// SplitMix64 finalizer (Stafford variant 13).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Counter-based random stream.
///
/// Splitting scheme: a stream is identified by a 64-bit key derived from
/// (master_seed, trial_index) as
///
///     key = mix64(mix64(master_seed) ^ mix64(trial_index + 0x9E3779B97F4A7C15))
///
/// and the n-th raw draw (n = 0, 1, ...) is
///
///     draw(n) = mix64(key + (n + 1) * 0x9E3779B97F4A7C15)
///
/// so each stream is a SplitMix64 sequence started at its own key. Uniform
/// reals take the top 53 bits of a draw; Gaussians use Box-Muller on two
/// uniforms and hand out both outputs in order (cosine branch first). The
/// scheme is fully specified here and uses no standard-library
/// distributions, so runs are bit-reproducible across platforms.
///
/// Satisfies UniformRandomBitGenerator.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t key = 0) : key_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    ++counter_;
    return mix64(key_ + counter_ * kGamma);
  }

  /// Uniform on [0, 1).
  double uniform01() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform on [lo, hi].
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform01(); }

  /// Standard normal.
  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // (0, 1] keeps the logarithm finite.
    const double u1 = static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53;
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t position() const noexcept { return counter_; }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Independent reproducible stream for one trial of a benchmark.
inline RandomStream rng_stream(std::uint64_t master_seed, std::uint64_t trial_index) {
  constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
  return RandomStream(mix64(mix64(master_seed) ^ mix64(trial_index + kGamma)));
}

}  // namespace exemplar

#endif  // EXEMPLAR_RNG_HPP
