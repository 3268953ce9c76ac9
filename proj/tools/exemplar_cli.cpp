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

// Command-line front end.
//
// Exit status: 0 success (run converged), 2 run completed without
// converging, 1 error.

#include <exemplar/exemplar.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace exemplar;
using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNotConverged = 2;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string oracle_cmd;
  std::string generator_cmd;
  std::optional<std::size_t> trials;
  std::optional<std::size_t> workers;
  std::string converge_on;
  std::optional<std::size_t> max_calls;
  std::vector<std::string> overrides;
  std::string method;
  std::string format = "csv";
  std::vector<std::string> axes;
  std::size_t samples = 100;
  double step = 1e-5;
  double tolerance = 1e-5;
};

ExperimentConfig load_config(const Options& opt) {
  ExperimentConfig cfg =
      opt.config.empty() ? ExperimentConfig{} : ExperimentConfig::load(opt.config);
  for (const auto& o : opt.overrides) cfg.set_override(o);
  if (opt.seed) cfg.seed = *opt.seed;
  if (!opt.oracle_cmd.empty()) cfg.oracle_cmd = opt.oracle_cmd;
  if (!opt.generator_cmd.empty()) cfg.generator_cmd = opt.generator_cmd;
  if (opt.trials) cfg.set("trials", std::to_string(*opt.trials));
  if (opt.workers) cfg.set("workers", std::to_string(*opt.workers));
  if (!opt.converge_on.empty()) cfg.set("converge_on", opt.converge_on);
  if (opt.max_calls) cfg.set("max_calls", std::to_string(*opt.max_calls));
  if (!opt.method.empty()) cfg.set("method", opt.method);
  for (const auto& a : opt.axes) {
    const auto eq = a.find('=');
    if (eq == std::string::npos) throw ConfigError("--axis expects NAME=V1,V2,...; got '" + a + "'");
    cfg.add_sweep_axis(a.substr(0, eq), a.substr(eq + 1));
  }
  return cfg;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write output file '" + path + "'");
  out << text;
  if (!out) throw std::runtime_error("failed writing output file '" + path + "'");
}

ordered_json to_json(const Vector& v) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

ordered_json to_json(const Specimen& s) {
  ordered_json j;
  j["latent"] = to_json(s.latent);
  j["velocity"] = to_json(s.velocity);
  j["fitness"] = s.fitness ? ordered_json(*s.fitness) : ordered_json(nullptr);
  return j;
}

ordered_json config_json(const ExperimentConfig& cfg) {
  ordered_json c;
  c["method"] = to_string(cfg.method);
  if (cfg.method == Method::gd) {
    c["learning_rate"] = cfg.gd.learning_rate;
    c["momentum"] = cfg.gd.momentum;
    c["u"] = cfg.gd.u;
    c["threshold"] = cfg.gd.threshold;
    c["max_calls"] = cfg.gd.max_calls;
    c["latent_dim"] = cfg.gd.latent_dim;
    c["target_class"] = cfg.gd.target_class;
  } else {
    c["t"] = cfg.es.t;
    c["k"] = cfg.es.k;
    c["u"] = cfg.es.u;
    c["m"] = cfg.es.m;
    c["s"] = cfg.es.s;
    c["alpha"] = cfg.es.alpha;
    c["threshold"] = cfg.es.threshold;
    c["max_calls"] = cfg.es.max_calls;
    c["latent_dim"] = cfg.es.latent_dim;
    c["target_class"] = cfg.es.target_class;
    c["converge_on"] = to_string(cfg.es.converge_on);
  }
  return c;
}

int cmd_run(const Options& opt, bool force_gd) {
  ExperimentConfig cfg = load_config(opt);
  if (force_gd) cfg.method = Method::gd;
  Fixture fx = cfg.make_fixture();
  cfg.reconcile_latent_dim(*fx.generator);

  TrialSpec spec{cfg.method, cfg.es, cfg.gd, cfg.start};
  // A single run uses stream 0 of the master seed, like trial 0 of a bench.
  const RunResult r = run_single_trial(spec, fx, cfg.seed, 0);

  ordered_json j;
  j["method"] = to_string(cfg.method);
  j["seed"] = cfg.seed;
  j["converged"] = r.converged;
  j["model_calls"] = r.model_calls;
  j["generations"] = r.generations;
  j["wall_time"] = r.wall_time;
  j["config"] = config_json(cfg);
  ordered_json best = to_json(r.best_specimen);
  const Vector latent = r.best_specimen.latent;
  best["sample"] = to_json(fx.generator->decode_batch(std::span<const Vector>(&latent, 1)).at(0));
  j["best"] = std::move(best);
  ordered_json elite = ordered_json::array();
  for (const auto& s : r.final_elite) elite.push_back(to_json(s));
  j["final_elite"] = std::move(elite);
  emit(j.dump(2) + "\n", opt.out);

  std::cerr << (r.converged ? "converged" : "not converged") << " after " << r.model_calls
            << " model calls (" << r.generations << " generations)\n";
  return r.converged ? kExitOk : kExitNotConverged;
}

FixtureFactory factory_for(const ExperimentConfig& cfg) {
  return [cfg] { return cfg.make_fixture(); };
}

int cmd_bench(const Options& opt) {
  ExperimentConfig cfg = load_config(opt);
  {
    Fixture probe = cfg.make_fixture();
    cfg.reconcile_latent_dim(*probe.generator);
  }
  TrialSpec spec{cfg.method, cfg.es, cfg.gd, cfg.start};
  const BenchStats stats = run_trials(spec, factory_for(cfg), cfg.trials, cfg.seed, cfg.workers);
  emit(render_report(std::span<const BenchStats>(&stats, 1), parse_report_format(opt.format)),
       opt.out);
  return kExitOk;
}

int cmd_sweep(const Options& opt) {
  ExperimentConfig cfg = load_config(opt);
  if (cfg.sweep.empty()) throw ConfigError("no sweep axes (add a [sweep] section or --axis)");
  if (cfg.method == Method::gd) throw ConfigError("sweeps vary ES parameters; method must be es");
  {
    Fixture probe = cfg.make_fixture();
    cfg.reconcile_latent_dim(*probe.generator);
  }
  SweepSpec spec{TrialSpec{cfg.method, cfg.es, cfg.gd, cfg.start}, cfg.sweep};
  const auto rows = run_sweep(spec, factory_for(cfg), cfg.trials, cfg.seed, cfg.workers);
  std::vector<BenchStats> stats;
  for (const auto& r : rows) stats.push_back(r.stats);
  emit(render_report(stats, parse_report_format(opt.format)), opt.out);
  return kExitOk;
}

int cmd_gradcheck(const Options& opt) {
  ExperimentConfig cfg = load_config(opt);
  Fixture fx = cfg.make_fixture();
  cfg.reconcile_latent_dim(*fx.generator);
  CompositeModel model(*fx.generator, *fx.oracle);
  RandomStream rng = rng_stream(cfg.seed, 0);
  double worst = 0.0;
  for (std::size_t i = 0; i < opt.samples; ++i) {
    Vector z(cfg.gd.latent_dim);
    for (Eigen::Index j = 0; j < z.size(); ++j) z(j) = rng.uniform(-cfg.gd.u, cfg.gd.u);
    const auto analytic = model.value_and_gradient(z, cfg.gd.target_class).second;
    const auto numeric = finite_diff_gradient(
        [&](const Vector& q) { return model.value_and_gradient(q, cfg.gd.target_class).first; }, z,
        opt.step);
    const double scale = std::max(analytic.norm(), numeric.norm());
    const double rel = scale > 0.0 ? (analytic - numeric).norm() / scale : 0.0;
    worst = std::max(worst, rel);
  }
  char line[160];
  std::snprintf(line, sizeof line, "gradcheck: %zu points, h=%g, max relative error %.3e (tolerance %g)\n",
                opt.samples, opt.step, worst, opt.tolerance);
  emit(line, opt.out);
  return worst <= opt.tolerance ? kExitOk : kExitError;
}

int cmd_plugin_test(const Options& opt) {
  const bool is_oracle = !opt.oracle_cmd.empty();
  if (is_oracle == !opt.generator_cmd.empty())
    throw ConfigError("plugin-test needs exactly one of --oracle-cmd or --generator-cmd");
  const std::string command = is_oracle ? opt.oracle_cmd : opt.generator_cmd;
  std::string report;
  auto pass = [&](const std::string& clause, const std::string& detail) {
    report += "PASS " + clause + (detail.empty() ? "" : ": " + detail) + "\n";
  };
  auto fail = [&](const std::string& clause, const std::string& detail) {
    report += "FAIL " + clause + ": " + detail + "\n";
    emit(report, opt.out);
    return kExitError;
  };

  std::optional<PluginChannel> channel;
  std::size_t in_dim = 0, out_dim = 0;
  try {
    channel.emplace(command, is_oracle ? "oracle" : "generator");
    in_dim = wire::positive_field(channel->hello(), is_oracle ? "sample_dim" : "latent_dim");
    out_dim = wire::positive_field(channel->hello(), is_oracle ? "num_classes" : "sample_dim");
  } catch (const std::exception& e) {
    return fail("handshake", e.what());
  }
  pass("handshake", channel->hello().dump());

  RandomStream rng = rng_stream(opt.seed.value_or(0), 0);
  Batch probe(5, Vector(in_dim));
  for (auto& v : probe)
    for (Eigen::Index j = 0; j < v.size(); ++j) v(j) = rng.uniform(-1.0, 1.0);

  auto ask = [&](const Batch& batch) {
    const auto reply =
        is_oracle
            ? channel->request({{"type", "predict"}, {"samples", wire::encode_batch(batch)}}, "probs")
            : channel->request({{"type", "decode"}, {"latents", wire::encode_batch(batch)}},
                               "samples");
    const char* key = is_oracle ? "rows" : "samples";
    if (!reply.contains(key)) throw ProtocolError(std::string("reply has no ") + key);
    return wire::decode_batch(reply[key], key);
  };

  Batch first;
  try {
    first = ask(probe);
  } catch (const std::exception& e) {
    return fail("response", e.what());
  }
  if (first.size() != probe.size())
    return fail("row count", "row count mismatch: sent " + std::to_string(probe.size()) +
                                 ", got " + std::to_string(first.size()));
  pass("row count", std::to_string(first.size()) + " rows for " + std::to_string(probe.size()) +
                        " inputs");
  for (std::size_t i = 0; i < first.size(); ++i)
    if (static_cast<std::size_t>(first[i].size()) != out_dim)
      return fail("row width", "row " + std::to_string(i) + " has " +
                                   std::to_string(first[i].size()) + " entries, expected " +
                                   std::to_string(out_dim));
  pass("row width", std::to_string(out_dim));
  if (is_oracle) {
    for (std::size_t i = 0; i < first.size(); ++i) {
      try {
        check_probability_row(first[i], out_dim, kWireTolerance);
      } catch (const std::exception& e) {
        return fail("normalization", "normalization violated on row " + std::to_string(i) +
                                         " (" + e.what() + ")");
      }
    }
    pass("normalization", "rows sum to 1 within 1e-6");
  }

  Batch second;
  try {
    second = ask(probe);
  } catch (const std::exception& e) {
    return fail("determinism", e.what());
  }
  for (std::size_t i = 0; i < first.size(); ++i)
    if (second.size() != first.size() || second[i].size() != first[i].size() ||
        second[i] != first[i])
      return fail("determinism", "determinism violated: repeated request changed row " +
                                     std::to_string(i));
  pass("determinism", "repeated request answered identically");

  Batch reversed(probe.rbegin(), probe.rend());
  Batch third;
  try {
    third = ask(reversed);
  } catch (const std::exception& e) {
    return fail("order", e.what());
  }
  for (std::size_t i = 0; i < first.size(); ++i)
    if (third.size() != first.size() || third[first.size() - 1 - i] != first[i])
      return fail("order", "order preservation violated at row " + std::to_string(i));
  pass("order", "permuted batch gave permuted rows");

  emit(report + "plugin conforms to protocol version " +
           std::to_string(kPluginProtocolVersion) + "\n",
       opt.out);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exemplar synthesis by latent-space evolutionary search"};
  app.require_subcommand(1);
  app.fallthrough();
  Options opt;

  app.add_option("--config", opt.config, "Configuration file");
  app.add_option("--seed", opt.seed, "Master random seed");
  app.add_option("--out", opt.out, "Output file (default: standard output)");
  app.add_option("--oracle-cmd", opt.oracle_cmd, "Launch command of an oracle plugin");
  app.add_option("--generator-cmd", opt.generator_cmd, "Launch command of a generator plugin");
  app.add_option("--trials", opt.trials, "Number of trials (bench, sweep)");
  app.add_option("--workers", opt.workers, "Parallel workers (bench, sweep)");
  app.add_option("--converge-on", opt.converge_on, "Convergence criterion")
      ->check(CLI::IsMember({"best", "elite"}));
  app.add_option("--max-calls", opt.max_calls, "Model call budget (same as --set max_calls=N)");
  app.add_option("--set", opt.overrides, "Override a config field, key=value (repeatable)");
  app.add_option("--method", opt.method, "Method")
      ->check(CLI::IsMember({"es", "es-no-momentum", "gd"}));
  app.add_option("--format", opt.format, "Report format")->check(CLI::IsMember({"csv", "json"}));

  auto* run = app.add_subcommand("run", "Synthesize one exemplar (method from config, default es)");
  auto* gd = app.add_subcommand("gd", "Synthesize one exemplar with gradient ascent + momentum");
  auto* bench = app.add_subcommand("bench", "Run repeated seeded trials and report statistics");
  auto* sweep = app.add_subcommand("sweep", "One-axis-at-a-time hyperparameter sweep");
  sweep->add_option("--axis", opt.axes, "Sweep axis NAME=V1,V2,... (repeatable)");
  auto* gradcheck =
      app.add_subcommand("gradcheck", "Compare analytic gradients with finite differences");
  gradcheck->add_option("--samples", opt.samples, "Number of random latent points");
  gradcheck->add_option("--step", opt.step, "Finite-difference step")->check(CLI::PositiveNumber);
  gradcheck->add_option("--tolerance", opt.tolerance, "Maximum relative error");
  auto* plugin_test =
      app.add_subcommand("plugin-test", "Check a plugin's conformance to the wire protocol");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*run) return cmd_run(opt, false);
    if (*gd) return cmd_run(opt, true);
    if (*bench) return cmd_bench(opt);
    if (*sweep) return cmd_sweep(opt);
    if (*gradcheck) return cmd_gradcheck(opt);
    if (*plugin_test) return cmd_plugin_test(opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
