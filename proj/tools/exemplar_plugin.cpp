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

// Reference plugin process. Serves a builtin fixture's oracle or generator,
// a model file, or an "echo" model over the plugin protocol. The --fault
// modes deliberately break one protocol clause each, for conformance tests.

#include <exemplar/fixtures.hpp>
#include <exemplar/mlp.hpp>
#include <exemplar/plugin.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <string>
#include <thread>

namespace {

using namespace exemplar;

/// Oracle whose probabilities are softmax(sample); num_classes = sample_dim.
class EchoOracle final : public Oracle {
 public:
  explicit EchoOracle(std::size_t dim) : dim_(dim) {}
  std::size_t num_classes() const override { return dim_; }
  std::size_t sample_dim() const override { return dim_; }
  std::vector<ProbabilityRow> predict_batch(std::span<const Vector> samples) override {
    std::vector<ProbabilityRow> rows;
    for (const auto& x : samples) rows.push_back(softmax(x));
    return rows;
  }

 private:
  std::size_t dim_;
};

enum class Fault { none, row_count, normalization, nondeterministic, crash, hang, garbage, error };

Fault parse_fault(const std::string& s) {
  if (s == "none") return Fault::none;
  if (s == "row-count") return Fault::row_count;
  if (s == "normalization") return Fault::normalization;
  if (s == "nondeterministic") return Fault::nondeterministic;
  if (s == "crash") return Fault::crash;
  if (s == "hang") return Fault::hang;
  if (s == "garbage") return Fault::garbage;
  if (s == "error") return Fault::error;
  throw std::invalid_argument("unknown fault '" + s + "'");
}

// Serves the protocol with the requested fault injected into replies to
// predict/decode requests.
int serve_faulty(Oracle* oracle, Generator* gen, Fault fault) {
  if (fault == Fault::none) return serve_plugin(oracle, gen, std::cin, std::cout);
  using nlohmann::json;
  std::string line;
  int requests = 0;
  while (std::getline(std::cin, line)) {
    const json msg = json::parse(line, nullptr, false);
    if (msg.is_discarded()) continue;
    if (msg.value("type", "") == "hello") {
      if (oracle)
        std::cout << json{{"type", "hello"}, {"role", "oracle"},
                          {"num_classes", oracle->num_classes()},
                          {"sample_dim", oracle->sample_dim()}}
                         .dump()
                  << std::endl;
      else
        std::cout << json{{"type", "hello"}, {"role", "generator"},
                          {"latent_dim", gen->latent_dim()}, {"sample_dim", gen->sample_dim()}}
                         .dump()
                  << std::endl;
      continue;
    }
    ++requests;
    const bool is_oracle = oracle != nullptr;
    Batch in = wire::decode_batch(msg.at(is_oracle ? "samples" : "latents"), "batch");
    Batch out;
    if (is_oracle) {
      for (auto& r : oracle->predict_batch(in)) out.push_back(std::move(r));
    } else {
      out = gen->decode_batch(in);
    }
    switch (fault) {
      case Fault::row_count:
        if (!out.empty()) out.pop_back();
        break;
      case Fault::normalization:
        for (auto& r : out) r *= 1.2;
        break;
      case Fault::nondeterministic:
        for (auto& r : out) {
          if (is_oracle && r.size() >= 2) {
            const double shift = 0.01 * requests;
            r(0) = std::max(0.0, r(0) - shift);
            r(1) = 1.0 - (r.sum() - r(1));
          } else {
            r.array() += 0.01 * requests;
          }
        }
        break;
      case Fault::crash:
        std::cerr << "exemplar-plugin: simulated crash" << std::endl;
        std::exit(3);
      case Fault::hang:
        std::this_thread::sleep_for(std::chrono::hours(1));
        break;
      case Fault::garbage:
        std::cout << "this is not json" << std::endl;
        continue;
      case Fault::error:
        std::cout << json{{"type", "error"}, {"message", "simulated failure"}}.dump() << std::endl;
        continue;
      case Fault::none: break;
    }
    std::cout << json{{"type", is_oracle ? "probs" : "samples"},
                      {is_oracle ? "rows" : "samples", wire::encode_batch(out)}}
                     .dump()
              << std::endl;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reference oracle/generator plugin for the exemplar toolkit"};
  app.require_subcommand(1);

  std::string fixture, model, fault_name = "none";
  std::size_t dim = 3;

  auto* oracle_cmd = app.add_subcommand("oracle", "Serve an oracle (fixture or softmax MLP file)");
  auto* generator_cmd =
      app.add_subcommand("generator", "Serve a generator (fixture or tanh/linear MLP file)");
  auto* echo_oracle = app.add_subcommand("echo-oracle", "Serve probabilities softmax(sample)");
  auto* echo_generator = app.add_subcommand("echo-generator", "Serve the identity decoder");
  for (auto* sub : {oracle_cmd, generator_cmd}) {
    auto* f = sub->add_option("--fixture", fixture, "Builtin fixture name");
    auto* m = sub->add_option("--model", model, "MLP model file");
    f->excludes(m);
  }
  for (auto* sub : {echo_oracle, echo_generator})
    sub->add_option("--dim", dim, "Sample dimension")->check(CLI::PositiveNumber);
  for (auto* sub : {oracle_cmd, generator_cmd, echo_oracle, echo_generator})
    sub->add_option("--fault", fault_name,
                    "Inject a protocol fault: none|row-count|normalization|nondeterministic|"
                    "crash|hang|garbage|error");

  CLI11_PARSE(app, argc, argv);

  try {
    const Fault fault = parse_fault(fault_name);
    std::unique_ptr<Oracle> oracle;
    std::unique_ptr<Generator> gen;
    if (*oracle_cmd) {
      if (!model.empty()) oracle = std::make_unique<ToyMlpModel>(load_mlp(model));
      else if (!fixture.empty()) oracle = fixtures::by_name(fixture).oracle;
      else throw std::invalid_argument("oracle needs --fixture or --model");
    } else if (*generator_cmd) {
      if (!model.empty()) gen = std::make_unique<MlpDecoder>(load_mlp(model));
      else if (!fixture.empty()) gen = fixtures::by_name(fixture).generator;
      else throw std::invalid_argument("generator needs --fixture or --model");
    } else if (*echo_oracle) {
      oracle = std::make_unique<EchoOracle>(dim);
    } else {
      gen = std::make_unique<IdentityGenerator>(dim);
    }
    return serve_faulty(oracle.get(), gen.get(), fault);
  } catch (const std::exception& e) {
    std::cerr << "exemplar-plugin: " << e.what() << std::endl;
    return 1;
  }
}
