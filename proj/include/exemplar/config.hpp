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

#ifndef EXEMPLAR_CONFIG_HPP
#define EXEMPLAR_CONFIG_HPP

// Experiment configuration files.
//
//   # comment
//   key = value
//   ...
//   [sweep]
//   k = 5, 10, 20
//
// Keys outside [sweep] set single fields (see ExperimentConfig::set). Keys
// inside [sweep] list the values of one axis of a one-axis-at-a-time sweep;
// axes keep their declaration order. Relative paths are resolved against the
// directory of the config file.

#include <exemplar/core.hpp>
#include <exemplar/fixtures.hpp>
#include <exemplar/mlp.hpp>
#include <exemplar/plugin.hpp>

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace exemplar {

enum class Method { es, es_no_momentum, gd };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::es: return "es";
    case Method::es_no_momentum: return "es-no-momentum";
    case Method::gd: return "gd";
  }
  return "?";
}

inline Method parse_method(const std::string& s) {
  if (s == "es") return Method::es;
  if (s == "es-no-momentum") return Method::es_no_momentum;
  if (s == "gd") return Method::gd;
  throw ConfigError("method must be one of es, es-no-momentum, gd; got '" + s + "'");
}

/// One axis of a sweep: a parameter name (t, k, alpha, m or s) and its values.
struct SweepAxis {
  std::string parameter;
  std::vector<double> values;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_real(const std::string& key, const std::string& value) {
  double v = 0.0;
  const std::string t = trim(value);
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size() || !std::isfinite(v))
    throw ConfigError("invalid value for '" + key + "': '" + value + "' is not a number");
  return v;
}

inline std::uint64_t parse_count(const std::string& key, const std::string& value) {
  std::uint64_t v = 0;
  const std::string t = trim(value);
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size())
    throw ConfigError("invalid value for '" + key + "': '" + value +
                      "' is not a non-negative integer");
  return v;
}

inline std::vector<double> parse_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_real(key, item));
  if (out.empty()) throw ConfigError("empty list for '" + key + "'");
  return out;
}

}  // namespace detail

/// Everything a CLI invocation needs: algorithm settings, the landscape
/// (builtin fixture, model files or plugin commands) and run controls.
struct ExperimentConfig {
  Method method = Method::es;
  EsConfig es;
  GdConfig gd;
  std::string fixture;          ///< builtin fixture name
  std::string oracle_model;     ///< softmax MLP model file
  std::string generator_model;  ///< tanh/linear MLP model file
  std::string oracle_cmd;
  std::string generator_cmd;
  std::uint64_t seed = 0;
  std::size_t trials = 1;
  std::size_t workers = 1;
  std::optional<Vector> start;  ///< gradient-ascent start; random when unset
  std::vector<SweepAxis> sweep;
  bool latent_dim_set = false;
  std::filesystem::path base_dir = ".";

  /// Keys accepted by set().
  static const std::vector<std::string>& keys() {
    static const std::vector<std::string> k = {
        "method",  "t",           "k",          "u",          "m",
        "s",       "alpha",       "threshold",  "max_calls",  "latent_dim",
        "target_class", "converge_on", "learning_rate", "momentum", "fixture",
        "oracle_model", "generator_model", "oracle_cmd", "generator_cmd", "seed",
        "trials",  "workers",     "start"};
    return k;
  }

  /// Assigns one field from its textual value. Shared keys (u, threshold,
  /// max_calls, latent_dim, target_class) apply to both algorithms.
  void set(const std::string& raw_key, const std::string& raw_value) {
    using namespace detail;
    const std::string key = trim(raw_key);
    const std::string value = trim(raw_value);
    auto count = [&] { return static_cast<std::size_t>(parse_count(key, value)); };
    auto real = [&] { return parse_real(key, value); };

    if (key == "method") method = parse_method(value);
    else if (key == "t") es.t = count();
    else if (key == "k") es.k = count();
    else if (key == "m") es.m = count();
    else if (key == "s") es.s = real();
    else if (key == "alpha") es.alpha = real();
    else if (key == "u") es.u = gd.u = real();
    else if (key == "threshold") es.threshold = gd.threshold = real();
    else if (key == "max_calls") es.max_calls = gd.max_calls = count();
    else if (key == "latent_dim") {
      es.latent_dim = gd.latent_dim = count();
      latent_dim_set = true;
    } else if (key == "target_class") es.target_class = gd.target_class = count();
    else if (key == "converge_on") es.converge_on = parse_converge_on(value);
    else if (key == "learning_rate") gd.learning_rate = real();
    else if (key == "momentum") gd.momentum = real();
    else if (key == "fixture") {
      fixtures::by_name(value);  // validates the name
      fixture = value;
    } else if (key == "oracle_model") oracle_model = resolve(value);
    else if (key == "generator_model") generator_model = resolve(value);
    else if (key == "oracle_cmd") oracle_cmd = value;
    else if (key == "generator_cmd") generator_cmd = value;
    else if (key == "seed") seed = parse_count(key, value);
    else if (key == "trials") trials = count();
    else if (key == "workers") workers = count();
    else if (key == "start") {
      const auto xs = parse_list(key, value);
      start = Vector::Map(xs.data(), static_cast<Eigen::Index>(xs.size()));
    } else
      throw ConfigError("unknown key '" + key + "'");
  }

  /// Parses "key=value" as used by command-line overrides.
  void set_override(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
      throw ConfigError("override '" + assignment + "' is not of the form key=value");
    set(assignment.substr(0, eq), assignment.substr(eq + 1));
  }

  void add_sweep_axis(const std::string& raw_key, const std::string& value) {
    const std::string key = detail::trim(raw_key);
    if (key != "t" && key != "k" && key != "alpha" && key != "m" && key != "s")
      throw ConfigError("sweep axis must be one of t, k, alpha, m, s; got '" + key + "'");
    SweepAxis axis{key, detail::parse_list(key, value)};
    for (double v : axis.values) {
      EsConfig probe = es;
      apply_axis(probe, key, v);
      validate_config(probe);
    }
    sweep.push_back(std::move(axis));
  }

  /// Sets the named sweep parameter on `cfg`.
  static void apply_axis(EsConfig& cfg, const std::string& parameter, double value) {
    auto as_count = [&] {
      if (value < 0 || value != std::floor(value))
        throw ConfigError("sweep value " + std::to_string(value) + " for '" + parameter +
                          "' must be a non-negative integer");
      return static_cast<std::size_t>(value);
    };
    if (parameter == "t") cfg.t = as_count();
    else if (parameter == "k") cfg.k = as_count();
    else if (parameter == "m") cfg.m = as_count();
    else if (parameter == "alpha") cfg.alpha = value;
    else if (parameter == "s") cfg.s = value;
    else throw ConfigError("unknown sweep parameter '" + parameter + "'");
  }

  static ExperimentConfig parse(const std::string& text,
                                const std::filesystem::path& base_dir = ".") {
    ExperimentConfig cfg;
    cfg.base_dir = base_dir;
    std::istringstream in(text);
    std::string line;
    std::string section;
    std::vector<std::pair<std::string, std::string>> sweep_lines;
    for (int lineno = 1; std::getline(in, line); ++lineno) {
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      line = detail::trim(line);
      if (line.empty()) continue;
      try {
        if (line.front() == '[') {
          if (line.back() != ']') throw ConfigError("malformed section header");
          section = detail::trim(line.substr(1, line.size() - 2));
          if (section != "sweep") throw ConfigError("unknown section '" + section + "'");
          continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("expected 'key = value'");
        if (section == "sweep")
          sweep_lines.emplace_back(line.substr(0, eq), line.substr(eq + 1));
        else
          cfg.set(line.substr(0, eq), line.substr(eq + 1));
      } catch (const ConfigError& e) {
        throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
      }
    }
    // Axes are validated against the finished base config.
    for (const auto& [k, v] : sweep_lines) cfg.add_sweep_axis(k, v);
    return cfg;
  }

  static ExperimentConfig load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config not found: " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse(text.str(), path.parent_path().empty() ? "." : path.parent_path());
  }

  /// Builds a fresh (generator, oracle) pair. Precedence per side: plugin
  /// command, model file, builtin fixture; a missing generator defaults to
  /// identity over latent_dim.
  Fixture make_fixture() const {
    Fixture builtin;
    if (!fixture.empty()) builtin = fixtures::by_name(fixture);
    Fixture out;
    if (!generator_cmd.empty())
      out.generator = std::make_unique<SubprocessGenerator>(generator_cmd);
    else if (!generator_model.empty())
      out.generator = std::make_unique<MlpDecoder>(load_mlp(generator_model));
    else if (builtin.generator)
      out.generator = std::move(builtin.generator);
    else
      out.generator = std::make_unique<IdentityGenerator>(es.latent_dim);

    if (!oracle_cmd.empty())
      out.oracle = std::make_unique<SubprocessOracle>(oracle_cmd);
    else if (!oracle_model.empty())
      out.oracle = std::make_unique<ToyMlpModel>(load_mlp(oracle_model));
    else if (builtin.oracle)
      out.oracle = std::move(builtin.oracle);
    else
      throw ConfigError("no oracle configured (set fixture, oracle_model or oracle_cmd)");
    return out;
  }

  /// Adopts the generator's latent dimension unless latent_dim was set
  /// explicitly, then checks it matches.
  void reconcile_latent_dim(const Generator& gen) {
    if (!latent_dim_set) es.latent_dim = gd.latent_dim = gen.latent_dim();
    if (es.latent_dim != gen.latent_dim())
      throw ConfigError("latent_dim " + std::to_string(es.latent_dim) +
                        " ≠ generator latent_dim " + std::to_string(gen.latent_dim()));
  }

 private:
  std::string resolve(const std::string& p) const {
    const std::filesystem::path path(p);
    return path.is_absolute() ? p : (base_dir / path).lexically_normal().string();
  }
};

}  // namespace exemplar

#endif  // EXEMPLAR_CONFIG_HPP
