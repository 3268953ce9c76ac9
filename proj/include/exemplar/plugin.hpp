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

#ifndef EXEMPLAR_PLUGIN_HPP
#define EXEMPLAR_PLUGIN_HPP

// Subprocess plugins: an external process acting as oracle or generator,
// driven over newline-delimited JSON on its stdin/stdout.
//
//   parent -> {"type":"hello","protocol":1}
//   child  -> {"type":"hello","role":"oracle","num_classes":C,"sample_dim":D}
//          or {"type":"hello","role":"generator","latent_dim":L,"sample_dim":D}
//   parent -> {"type":"predict","samples":[[...],...]}   (oracle)
//   child  -> {"type":"probs","rows":[[...],...]}
//   parent -> {"type":"decode","latents":[[...],...]}    (generator)
//   child  -> {"type":"samples","samples":[[...],...]}
//   child  -> {"type":"error","message":"..."}           (any time)
//
// One message per line, UTF-8. Numbers are written with round-trip
// precision, so a batch crossing the boundary arrives bit-identical.

#include <exemplar/core.hpp>
#include <exemplar/generator.hpp>
#include <exemplar/oracle.hpp>

#include <json.hpp>

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <mutex>
#include <span>
#include <string>
#include <vector>

extern char** environ;

namespace exemplar {

/// Any failure talking to a plugin process.
class PluginError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The plugin answered, but not in conformance with the protocol.
class ProtocolError : public PluginError {
 public:
  using PluginError::PluginError;
};

inline constexpr int kPluginProtocolVersion = 1;
inline constexpr double kWireTolerance = 1e-6;

/// Plugin reply timeout: EXEMPLAR_PLUGIN_TIMEOUT_SECS if set, else 30 s.
inline double plugin_timeout_seconds() {
  if (const char* env = std::getenv("EXEMPLAR_PLUGIN_TIMEOUT_SECS")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && *end == '\0' && v > 0.0) return v;
    throw ConfigError(std::string("EXEMPLAR_PLUGIN_TIMEOUT_SECS must be a positive number, got '") +
                      env + "'");
  }
  return 30.0;
}

/// A child process launched through /bin/sh with pipes on stdin, stdout and
/// stderr. Owns the process: the destructor closes stdin and reaps it,
/// killing it if it does not exit promptly.
class ChildProcess {
 public:
  explicit ChildProcess(std::string command, double timeout_seconds = plugin_timeout_seconds())
      : command_(std::move(command)), timeout_(timeout_seconds) {
    static std::once_flag ignore_sigpipe;
    std::call_once(ignore_sigpipe, [] { ::signal(SIGPIPE, SIG_IGN); });

    int in[2], out[2], err[2];
    if (::pipe2(in, O_CLOEXEC) != 0) throw_errno("pipe");
    if (::pipe2(out, O_CLOEXEC) != 0) {
      close_pair(in);
      throw_errno("pipe");
    }
    if (::pipe2(err, O_CLOEXEC) != 0) {
      close_pair(in);
      close_pair(out);
      throw_errno("pipe");
    }

    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, in[0], STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&actions, out[1], STDOUT_FILENO);
    posix_spawn_file_actions_adddup2(&actions, err[1], STDERR_FILENO);

    std::string sh = "/bin/sh", flag = "-c";
    char* argv[] = {sh.data(), flag.data(), command_.data(), nullptr};
    const int rc = ::posix_spawn(&pid_, "/bin/sh", &actions, nullptr, argv, environ);
    posix_spawn_file_actions_destroy(&actions);
    ::close(in[0]);
    ::close(out[1]);
    ::close(err[1]);
    stdin_ = in[1];
    stdout_ = out[0];
    stderr_ = err[0];
    if (rc != 0) {
      pid_ = -1;
      close_fds();
      throw PluginError("cannot launch plugin '" + command_ + "': " + std::strerror(rc));
    }
  }

  ChildProcess(const ChildProcess&) = delete;
  ChildProcess& operator=(const ChildProcess&) = delete;

  ~ChildProcess() { terminate(); }

  const std::string& command() const { return command_; }
  double timeout() const { return timeout_; }

  void write_line(const std::string& line) {
    std::string data = line;
    data += '\n';
    std::size_t done = 0;
    while (done < data.size()) {
      const ssize_t n = ::write(stdin_, data.data() + done, data.size() - done);
      if (n < 0) {
        if (errno == EINTR) continue;
        fail("plugin stopped reading its input (" + std::string(std::strerror(errno)) + ")");
      }
      done += static_cast<std::size_t>(n);
    }
  }

  /// Next line from the child's stdout, without the newline.
  std::string read_line() {
    using clock = std::chrono::steady_clock;
    const auto deadline = clock::now() + std::chrono::duration<double>(timeout_);
    while (true) {
      if (const auto pos = out_buffer_.find('\n'); pos != std::string::npos) {
        std::string line = out_buffer_.substr(0, pos);
        out_buffer_.erase(0, pos + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
      }
      const auto remaining =
          std::chrono::duration_cast<std::chrono::milliseconds>(deadline - clock::now()).count();
      if (remaining <= 0)
        fail("timed out after " + std::to_string(timeout_) + " s waiting for plugin reply");

      pollfd fds[2] = {{stdout_, POLLIN, 0}, {stderr_, POLLIN, 0}};
      const nfds_t nfds = stderr_ >= 0 ? 2 : 1;
      const int ready = ::poll(fds, nfds, static_cast<int>(std::min<long long>(remaining, 1000)));
      if (ready < 0) {
        if (errno == EINTR) continue;
        fail(std::string("poll failed: ") + std::strerror(errno));
      }
      if (nfds == 2 && (fds[1].revents & (POLLIN | POLLHUP))) drain_stderr();
      if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
        char buf[65536];
        const ssize_t n = ::read(stdout_, buf, sizeof buf);
        if (n < 0 && errno != EINTR) fail(std::string("read failed: ") + std::strerror(errno));
        if (n == 0) fail("plugin exited unexpectedly");
        if (n > 0) out_buffer_.append(buf, static_cast<std::size_t>(n));
      }
    }
  }

  /// Whatever the child has written to stderr so far (bounded).
  std::string diagnostics() {
    drain_stderr();
    return err_buffer_;
  }

  /// Closes the child's stdin and reaps it. Idempotent.
  void terminate() {
    if (stdin_ >= 0) {
      ::close(stdin_);
      stdin_ = -1;
    }
    if (pid_ > 0) {
      int status = 0;
      for (int i = 0; i < 50; ++i) {
        if (::waitpid(pid_, &status, WNOHANG) != 0) {
          pid_ = -1;
          break;
        }
        ::usleep(2000);
      }
      if (pid_ > 0) {
        ::kill(pid_, SIGKILL);
        ::waitpid(pid_, &status, 0);
        pid_ = -1;
      }
    }
    close_fds();
  }

 private:
  static constexpr std::size_t kMaxDiagnostics = 16384;

  [[noreturn]] static void throw_errno(const char* what) {
    throw PluginError(std::string(what) + ": " + std::strerror(errno));
  }

  static void close_pair(int fds[2]) {
    ::close(fds[0]);
    ::close(fds[1]);
  }

  void close_fds() {
    for (int* fd : {&stdin_, &stdout_, &stderr_}) {
      if (*fd >= 0) ::close(*fd);
      *fd = -1;
    }
  }

  void drain_stderr() {
    while (stderr_ >= 0) {
      pollfd p{stderr_, POLLIN, 0};
      if (::poll(&p, 1, 0) <= 0 || !(p.revents & (POLLIN | POLLHUP))) return;
      char buf[4096];
      const ssize_t n = ::read(stderr_, buf, sizeof buf);
      if (n <= 0) {
        ::close(stderr_);
        stderr_ = -1;
        return;
      }
      if (err_buffer_.size() < kMaxDiagnostics)
        err_buffer_.append(buf, std::min(static_cast<std::size_t>(n),
                                         kMaxDiagnostics - err_buffer_.size()));
    }
  }

  [[noreturn]] void fail(const std::string& what) {
    // Give a dying child a moment to flush its last words.
    ::usleep(20000);
    std::string msg = "plugin '" + command_ + "': " + what;
    const std::string diag = diagnostics();
    if (!diag.empty()) msg += "; stderr: " + diag;
    throw PluginError(msg);
  }

  std::string command_;
  double timeout_;
  pid_t pid_ = -1;
  int stdin_ = -1;
  int stdout_ = -1;
  int stderr_ = -1;
  std::string out_buffer_;
  std::string err_buffer_;
};

namespace wire {

using nlohmann::json;

inline json encode_batch(std::span<const Vector> batch) {
  json rows = json::array();
  for (const auto& v : batch) {
    json row = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) row.push_back(v(i));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Batch decode_batch(const json& rows, const char* what) {
  if (!rows.is_array()) throw ProtocolError(std::string(what) + " must be an array");
  Batch out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    if (!row.is_array()) throw ProtocolError(std::string(what) + " entries must be arrays");
    Vector v(row.size());
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (!row[i].is_number()) throw ProtocolError(std::string(what) + " contains a non-number");
      v(static_cast<Eigen::Index>(i)) = row[i].get<double>();
    }
    out.push_back(std::move(v));
  }
  return out;
}

inline json parse_message(const std::string& line) {
  json msg = json::parse(line, nullptr, false);
  if (msg.is_discarded() || !msg.is_object())
    throw ProtocolError("malformed message: " + line.substr(0, 200));
  if (!msg.contains("type") || !msg["type"].is_string())
    throw ProtocolError("message has no type: " + line.substr(0, 200));
  return msg;
}

inline std::size_t positive_field(const json& msg, const char* key) {
  if (!msg.contains(key) || !msg[key].is_number_integer() || msg[key].get<long long>() < 1)
    throw ProtocolError(std::string("hello is missing a positive integer '") + key + "'");
  return msg[key].get<std::size_t>();
}

}  // namespace wire

/// Request/response channel to one plugin child. One request in flight at a
/// time.
class PluginChannel {
 public:
  PluginChannel(std::string command, std::string expected_role,
                double timeout_seconds = plugin_timeout_seconds())
      : child_(std::move(command), timeout_seconds), role_(std::move(expected_role)) {
    hello_ = request({{"type", "hello"}, {"protocol", kPluginProtocolVersion}}, "hello");
    if (!hello_.contains("role") || hello_["role"] != role_)
      throw ProtocolError("plugin role mismatch: expected '" + role_ + "', got " +
                          (hello_.contains("role") ? hello_["role"].dump() : "none"));
  }

  const nlohmann::json& hello() const { return hello_; }
  const std::string& command() const { return child_.command(); }

  /// Sends `msg` and returns the reply, which must have type `reply_type`.
  nlohmann::json request(const nlohmann::json& msg, const std::string& reply_type) {
    child_.write_line(msg.dump());
    nlohmann::json reply = wire::parse_message(child_.read_line());
    const std::string type = reply["type"];
    if (type == "error")
      throw PluginError("plugin reported error: " +
                        (reply.contains("message") ? reply["message"].dump() : "(no message)"));
    if (type != reply_type)
      throw ProtocolError("expected '" + reply_type + "' reply, got '" + type + "'");
    return reply;
  }

 private:
  ChildProcess child_;
  std::string role_;
  nlohmann::json hello_;
};

/// Oracle living in a child process.
class SubprocessOracle final : public Oracle {
 public:
  explicit SubprocessOracle(std::string command, double timeout_seconds = plugin_timeout_seconds())
      : channel_(std::move(command), "oracle", timeout_seconds),
        num_classes_(wire::positive_field(channel_.hello(), "num_classes")),
        sample_dim_(wire::positive_field(channel_.hello(), "sample_dim")) {}

  std::size_t num_classes() const override { return num_classes_; }
  std::size_t sample_dim() const override { return sample_dim_; }

  std::vector<ProbabilityRow> predict_batch(std::span<const Vector> samples) override {
    for (const auto& x : samples)
      if (static_cast<std::size_t>(x.size()) != sample_dim_)
        throw ShapeError("sample dimension " + std::to_string(x.size()) +
                         " ≠ plugin sample_dim " + std::to_string(sample_dim_));
    const auto reply =
        channel_.request({{"type", "predict"}, {"samples", wire::encode_batch(samples)}}, "probs");
    if (!reply.contains("rows")) throw ProtocolError("probs reply has no rows");
    Batch rows = wire::decode_batch(reply["rows"], "rows");
    if (rows.size() != samples.size())
      throw ProtocolError("row count mismatch: sent " + std::to_string(samples.size()) +
                          " samples, got " + std::to_string(rows.size()) + " rows");
    for (std::size_t i = 0; i < rows.size(); ++i) {
      try {
        check_probability_row(rows[i], num_classes_, kWireTolerance);
      } catch (const std::exception& e) {
        throw ProtocolError("row " + std::to_string(i) + ": " + e.what());
      }
    }
    return rows;
  }

 private:
  PluginChannel channel_;
  std::size_t num_classes_;
  std::size_t sample_dim_;
};

/// Generator living in a child process.
class SubprocessGenerator final : public Generator {
 public:
  explicit SubprocessGenerator(std::string command,
                               double timeout_seconds = plugin_timeout_seconds())
      : channel_(std::move(command), "generator", timeout_seconds),
        latent_dim_(wire::positive_field(channel_.hello(), "latent_dim")),
        sample_dim_(wire::positive_field(channel_.hello(), "sample_dim")) {}

  std::size_t latent_dim() const override { return latent_dim_; }
  std::size_t sample_dim() const override { return sample_dim_; }

  Batch decode_batch(std::span<const Vector> latents) override {
    for (const auto& z : latents) detail::check_latent_width(z, latent_dim_);
    const auto reply = channel_.request(
        {{"type", "decode"}, {"latents", wire::encode_batch(latents)}}, "samples");
    if (!reply.contains("samples")) throw ProtocolError("samples reply has no samples");
    Batch out = wire::decode_batch(reply["samples"], "samples");
    if (out.size() != latents.size())
      throw ProtocolError("row count mismatch: sent " + std::to_string(latents.size()) +
                          " latents, got " + std::to_string(out.size()) + " samples");
    for (const auto& x : out)
      if (static_cast<std::size_t>(x.size()) != sample_dim_)
        throw ProtocolError("sample width " + std::to_string(x.size()) + " ≠ announced sample_dim " +
                            std::to_string(sample_dim_));
    return out;
  }

 private:
  PluginChannel channel_;
  std::size_t latent_dim_;
  std::size_t sample_dim_;
};

/// Serves an in-process oracle or generator over the plugin protocol until
/// `in` reaches end of file. Exactly one of `oracle` / `gen` must be set.
/// Returns a process exit status.
inline int serve_plugin(Oracle* oracle, Generator* gen, std::istream& in, std::ostream& out) {
  using nlohmann::json;
  auto send = [&](const json& msg) { out << msg.dump() << '\n' << std::flush; };
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      const json msg = wire::parse_message(line);
      const std::string type = msg["type"];
      if (type == "hello") {
        if (oracle)
          send({{"type", "hello"}, {"role", "oracle"}, {"num_classes", oracle->num_classes()},
                {"sample_dim", oracle->sample_dim()}});
        else
          send({{"type", "hello"}, {"role", "generator"}, {"latent_dim", gen->latent_dim()},
                {"sample_dim", gen->sample_dim()}});
      } else if (type == "predict" && oracle) {
        const Batch samples = wire::decode_batch(msg.at("samples"), "samples");
        send({{"type", "probs"}, {"rows", wire::encode_batch(oracle->predict_batch(samples))}});
      } else if (type == "decode" && gen) {
        const Batch latents = wire::decode_batch(msg.at("latents"), "latents");
        send({{"type", "samples"}, {"samples", wire::encode_batch(gen->decode_batch(latents))}});
      } else {
        send({{"type", "error"}, {"message", "unsupported message type '" + type + "'"}});
      }
    } catch (const std::exception& e) {
      send({{"type", "error"}, {"message", e.what()}});
    }
  }
  return 0;
}

}  // namespace exemplar

#endif  // EXEMPLAR_PLUGIN_HPP
