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

#ifndef EXEMPLAR_BENCH_HPP
#define EXEMPLAR_BENCH_HPP

#include <exemplar/config.hpp>
#include <exemplar/es.hpp>
#include <exemplar/gd.hpp>
#include <exemplar/rng.hpp>

#include <json.hpp>

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <mutex>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace exemplar {

/// Builds a fresh fixture. Called once per worker thread, so each worker
/// owns its own models (and plugin child processes).
using FixtureFactory = std::function<Fixture()>;

/// What a batch of trials runs.
struct TrialSpec {
  Method method = Method::es;
  EsConfig es;
  GdConfig gd;
  std::optional<Vector> gd_start;  ///< fixed start for gd; random per trial otherwise
};

struct TrialRecord {
  std::size_t trial = 0;
  std::uint64_t stream_key = 0;
  bool converged = false;
  std::size_t calls = 0;
  double time = 0.0;

  bool same_outcome(const TrialRecord& o) const {
    return trial == o.trial && stream_key == o.stream_key && converged == o.converged &&
           calls == o.calls;
  }
};

struct BenchStats {
  Method method = Method::es;
  EsConfig es;
  GdConfig gd;
  std::size_t trials = 0;
  std::size_t converged_count = 0;
  double avg_calls = 0.0;                 ///< over all trials
  std::optional<double> avg_calls_converged;  ///< over converged trials only
  double avg_time = 0.0;
  std::vector<TrialRecord> records;

  std::string label() const { return to_string(method); }

  /// Equality on everything but timing.
  bool same_outcome(const BenchStats& o) const {
    if (method != o.method || !(es == o.es) || !(gd == o.gd) || trials != o.trials ||
        converged_count != o.converged_count || avg_calls != o.avg_calls ||
        avg_calls_converged != o.avg_calls_converged || records.size() != o.records.size())
      return false;
    for (std::size_t i = 0; i < records.size(); ++i)
      if (!records[i].same_outcome(o.records[i])) return false;
    return true;
  }
};

/// Recomputes aggregates from per-trial records, in trial order.
inline BenchStats aggregate(const TrialSpec& spec, std::vector<TrialRecord> records) {
  BenchStats stats;
  stats.method = spec.method;
  stats.es = spec.es;
  stats.gd = spec.gd;
  stats.trials = records.size();
  double calls = 0.0, converged_calls = 0.0, time = 0.0;
  for (const auto& r : records) {
    calls += static_cast<double>(r.calls);
    time += r.time;
    if (r.converged) {
      ++stats.converged_count;
      converged_calls += static_cast<double>(r.calls);
    }
  }
  if (!records.empty()) {
    stats.avg_calls = calls / static_cast<double>(records.size());
    stats.avg_time = time / static_cast<double>(records.size());
  }
  if (stats.converged_count > 0)
    stats.avg_calls_converged = converged_calls / static_cast<double>(stats.converged_count);
  stats.records = std::move(records);
  return stats;
}

/// A trial failed; `partial` holds the trials that completed before it.
class TrialError : public std::runtime_error {
 public:
  TrialError(std::size_t trial, const std::string& what, BenchStats partial)
      : std::runtime_error("trial " + std::to_string(trial) + " failed: " + what),
        failed_trial(trial),
        partial(std::move(partial)) {}

  std::size_t failed_trial;
  BenchStats partial;  ///< completed trials preceding the failure, flagged incomplete
};

/// Runs one trial with stream rng_stream(master_seed, trial).
inline RunResult run_single_trial(const TrialSpec& spec, Fixture& fx, std::uint64_t master_seed,
                                  std::size_t trial) {
  RandomStream rng = rng_stream(master_seed, trial);
  switch (spec.method) {
    case Method::es: return run_es(spec.es, *fx.generator, *fx.oracle, rng, EsVariant::momentum);
    case Method::es_no_momentum:
      return run_es(spec.es, *fx.generator, *fx.oracle, rng, EsVariant::plain);
    case Method::gd: {
      CompositeModel model(*fx.generator, *fx.oracle);
      return run_gd(spec.gd, model, spec.gd_start, rng);
    }
  }
  throw std::logic_error("unknown method");
}

/// n independent runs; aggregates are reduced in trial order, so results do
/// not depend on `workers`.
inline BenchStats run_trials(const TrialSpec& spec, const FixtureFactory& factory, std::size_t n,
                             std::uint64_t master_seed, std::size_t workers = 1) {
  if (n < 1) throw ConfigError("trial count must be at least 1");
  if (spec.method == Method::gd)
    validate_config(spec.gd);
  else
    validate_config(spec.es);
  workers = std::clamp<std::size_t>(workers, 1, n);

  std::vector<std::optional<TrialRecord>> slots(n);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::mutex error_mutex;
  std::optional<std::pair<std::size_t, std::string>> first_error;

  auto record_error = [&](std::size_t trial, const std::string& what) {
    std::lock_guard lock(error_mutex);
    if (!first_error || trial < first_error->first) first_error.emplace(trial, what);
    abort = true;
  };

  auto worker = [&] {
    Fixture fx;
    try {
      fx = factory();
    } catch (const std::exception& e) {
      record_error(next.load(), std::string("fixture construction: ") + e.what());
      return;
    }
    while (!abort) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        const RunResult r = run_single_trial(spec, fx, master_seed, i);
        slots[i] = TrialRecord{i, rng_stream(master_seed, i).key(), r.converged, r.model_calls,
                               r.wall_time};
      } catch (const std::exception& e) {
        record_error(i, e.what());
        return;
      }
    }
  };

  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  if (first_error) {
    std::vector<TrialRecord> done;
    for (std::size_t i = 0; i < first_error->first && i < n && slots[i]; ++i)
      done.push_back(*slots[i]);
    throw TrialError(first_error->first, first_error->second, aggregate(spec, std::move(done)));
  }
  std::vector<TrialRecord> records;
  records.reserve(n);
  for (auto& s : slots) records.push_back(*s);
  return aggregate(spec, std::move(records));
}

/// Base configuration plus one-axis-at-a-time parameter grid.
struct SweepSpec {
  TrialSpec base;
  std::vector<SweepAxis> axes;
};

struct SweepRow {
  std::string parameter;
  double value = 0.0;
  BenchStats stats;
};

/// One row per (axis, value) in declaration order; every row uses the same
/// master seed.
inline std::vector<SweepRow> run_sweep(const SweepSpec& spec, const FixtureFactory& factory,
                                       std::size_t n, std::uint64_t master_seed,
                                       std::size_t workers = 1) {
  for (const auto& axis : spec.axes) {
    if (axis.values.empty()) throw ConfigError("sweep axis '" + axis.parameter + "' is empty");
    for (double v : axis.values) {
      EsConfig probe = spec.base.es;
      ExperimentConfig::apply_axis(probe, axis.parameter, v);
      validate_config(probe);
    }
  }
  std::vector<SweepRow> rows;
  for (const auto& axis : spec.axes) {
    for (double v : axis.values) {
      TrialSpec point = spec.base;
      ExperimentConfig::apply_axis(point.es, axis.parameter, v);
      rows.push_back({axis.parameter, v, run_trials(point, factory, n, master_seed, workers)});
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Reports

enum class ReportFormat { csv, json };

inline ReportFormat parse_report_format(const std::string& s) {
  if (s == "csv") return ReportFormat::csv;
  if (s == "json") return ReportFormat::json;
  throw ConfigError("report format must be csv or json; got '" + s + "'");
}

/// Fixed column order of every report.
inline const std::vector<std::string>& report_columns() {
  static const std::vector<std::string> cols = {
      "method", "t",         "k",         "alpha",    "m",        "s",
      "trials", "converged", "avg_calls", "avg_time", "avg_calls_converged"};
  return cols;
}

namespace detail {

inline std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline std::string shortest(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // Prefer the shortest representation that reads back exactly.
  for (int p = 1; p <= 17; ++p) {
    char probe[64];
    std::snprintf(probe, sizeof probe, "%.*g", p, v);
    if (std::strtod(probe, nullptr) == v) return probe;
  }
  return buf;
}

// ES hyperparameter cells are blank for the gradient baseline.
inline std::vector<std::string> report_cells(const BenchStats& s) {
  const bool es = s.method != Method::gd;
  return {s.label(),
          es ? std::to_string(s.es.t) : "",
          es ? std::to_string(s.es.k) : "",
          es ? shortest(s.method == Method::es_no_momentum ? 0.0 : s.es.alpha) : "",
          es ? std::to_string(s.es.m) : "",
          es ? shortest(s.es.s) : "",
          std::to_string(s.trials),
          std::to_string(s.converged_count),
          fixed(s.avg_calls, 1),
          fixed(s.avg_time, 2),
          s.avg_calls_converged ? fixed(*s.avg_calls_converged, 1) : ""};
}

}  // namespace detail

/// Renders stats as CSV (header + one row per entry) or as a JSON array of
/// objects with the same keys in the same order.
inline std::string render_report(std::span<const BenchStats> stats, ReportFormat format) {
  const auto& cols = report_columns();
  if (format == ReportFormat::csv) {
    std::string out;
    for (std::size_t c = 0; c < cols.size(); ++c) out += (c ? "," : "") + cols[c];
    out += '\n';
    for (const auto& s : stats) {
      const auto cells = detail::report_cells(s);
      for (std::size_t c = 0; c < cells.size(); ++c) out += (c ? "," : "") + cells[c];
      out += '\n';
    }
    return out;
  }
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& s : stats) {
    const auto cells = detail::report_cells(s);
    nlohmann::ordered_json row;
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (c == 0) row[cols[c]] = cells[c];
      else if (cells[c].empty()) row[cols[c]] = nullptr;
      else row[cols[c]] = nlohmann::ordered_json::parse(cells[c]);
    }
    rows.push_back(std::move(row));
  }
  return rows.dump(2) + "\n";
}

inline void write_report(std::span<const BenchStats> stats, const std::string& path,
                         ReportFormat format) {
  if (stats.empty()) throw ConfigError("nothing to report");
  const std::string text = render_report(stats, format);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write report '" + path + "'");
  out << text;
  out.flush();
  if (!out) throw std::runtime_error("failed writing report '" + path + "'");
}

/// Parses a CSV report back into rows of named cells.
inline std::vector<std::vector<std::pair<std::string, std::string>>> parse_report_csv(
    const std::string& text) {
  std::istringstream in(text);
  std::string line;
  auto split = [](const std::string& l) {
    std::vector<std::string> cells;
    std::stringstream ss(l);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!l.empty() && l.back() == ',') cells.emplace_back();
    return cells;
  };
  if (!std::getline(in, line)) throw ParseError("empty report");
  const auto header = split(line);
  if (header != report_columns()) throw ParseError("unexpected report header: " + line);
  std::vector<std::vector<std::pair<std::string, std::string>>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) throw ParseError("ragged report row: " + line);
    std::vector<std::pair<std::string, std::string>> row;
    for (std::size_t c = 0; c < cells.size(); ++c) row.emplace_back(header[c], cells[c]);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace exemplar

#endif  // EXEMPLAR_BENCH_HPP
