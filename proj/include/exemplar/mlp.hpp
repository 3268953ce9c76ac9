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

#ifndef EXEMPLAR_MLP_HPP
#define EXEMPLAR_MLP_HPP

#include <exemplar/core.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace exemplar {

/// Raised when a model file cannot be parsed.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OutputActivation { softmax, tanh, linear };

inline const char* to_string(OutputActivation a) {
  switch (a) {
    case OutputActivation::softmax: return "softmax";
    case OutputActivation::tanh: return "tanh";
    case OutputActivation::linear: return "linear";
  }
  return "?";
}

inline OutputActivation parse_output_activation(const std::string& s) {
  if (s == "softmax") return OutputActivation::softmax;
  if (s == "tanh") return OutputActivation::tanh;
  if (s == "linear") return OutputActivation::linear;
  throw ParseError("unknown output activation '" + s + "'");
}

/// Numerically stable softmax (max-subtraction).
inline Vector softmax(const Vector& logits) {
  const double top = logits.maxCoeff();
  Vector e = (logits.array() - top).exp().matrix();
  return e / e.sum();
}

struct DenseLayer {
  Matrix weight;  ///< out x in
  Vector bias;    ///< out

  std::size_t in() const { return static_cast<std::size_t>(weight.cols()); }
  std::size_t out() const { return static_cast<std::size_t>(weight.rows()); }
};

/// Fully connected network: tanh on hidden layers, a tagged activation on the
/// output layer. Shared by the MLP oracle (softmax output) and the MLP
/// decoder (tanh output).
class Mlp {
 public:
  Mlp() = default;

  Mlp(std::vector<DenseLayer> layers, OutputActivation output)
      : layers_(std::move(layers)), output_(output) {
    check_chain();
  }

  const std::vector<DenseLayer>& layers() const { return layers_; }
  OutputActivation output_activation() const { return output_; }
  std::size_t input_width() const { return layers_.front().in(); }
  std::size_t output_width() const { return layers_.back().out(); }

  Vector forward(const Vector& x) const {
    check_input(x);
    Vector h = x;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      Vector a = layers_[l].weight * h + layers_[l].bias;
      h = l + 1 < layers_.size() ? Vector(a.array().tanh().matrix()) : apply_output(a);
    }
    return h;
  }

  /// Jacobian d forward(x) / dx, shape output_width x input_width.
  Matrix jacobian(const Vector& x) const {
    check_input(x);
    Matrix jac = Matrix::Identity(x.size(), x.size());
    Vector h = x;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      Vector a = layers_[l].weight * h + layers_[l].bias;
      jac = layers_[l].weight * jac;
      if (l + 1 < layers_.size()) {
        h = a.array().tanh().matrix();
        jac = (1.0 - h.array().square()).matrix().asDiagonal() * jac;
      } else {
        h = apply_output(a);
        jac = output_jacobian(h) * jac;
      }
    }
    return jac;
  }

  /// Canonical text serialization; load_mlp(save) reproduces the model and
  /// save(load(canonical)) is byte-identical.
  std::string serialize() const {
    std::string out = "exemplar-mlp 1\noutput ";
    out += to_string(output_);
    out += "\nlayers " + std::to_string(layers_.size()) + "\n";
    for (const auto& layer : layers_) {
      out += "layer " + std::to_string(layer.in()) + " " + std::to_string(layer.out()) + "\n";
      for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
        for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) {
          if (c) out += ' ';
          out += format_real(layer.weight(r, c));
        }
        out += '\n';
      }
      for (Eigen::Index r = 0; r < layer.bias.size(); ++r) {
        if (r) out += ' ';
        out += format_real(layer.bias(r));
      }
      out += '\n';
    }
    return out;
  }

  static Mlp parse(const std::string& text) {
    std::istringstream in(text);
    auto expect = [&](const char* word) {
      std::string tok;
      if (!(in >> tok) || tok != word)
        throw ParseError(std::string("expected '") + word + "', got '" + tok + "'");
    };
    auto read_count = [&](const char* what) {
      long long v = -1;
      if (!(in >> v) || v < 1) throw ParseError(std::string("invalid ") + what);
      return static_cast<std::size_t>(v);
    };
    auto read_real = [&](const char* what) {
      std::string tok;
      if (!(in >> tok)) throw ParseError(std::string("unexpected end of file reading ") + what);
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc{} || ptr != tok.data() + tok.size() || !std::isfinite(v))
        throw ParseError(std::string("invalid number '") + tok + "' in " + what);
      return v;
    };

    expect("exemplar-mlp");
    if (read_count("format version") != 1) throw ParseError("unsupported format version");
    expect("output");
    std::string act;
    in >> act;
    const OutputActivation output = parse_output_activation(act);
    expect("layers");
    const std::size_t n = read_count("layer count");
    std::vector<DenseLayer> layers;
    layers.reserve(n);
    for (std::size_t l = 0; l < n; ++l) {
      expect("layer");
      const std::size_t width_in = read_count("layer input width");
      const std::size_t width_out = read_count("layer output width");
      DenseLayer layer{Matrix(width_out, width_in), Vector(width_out)};
      for (std::size_t r = 0; r < width_out; ++r)
        for (std::size_t c = 0; c < width_in; ++c) layer.weight(r, c) = read_real("weights");
      for (std::size_t r = 0; r < width_out; ++r) layer.bias(r) = read_real("bias");
      layers.push_back(std::move(layer));
    }
    std::string trailing;
    if (in >> trailing) throw ParseError("trailing content after last layer: '" + trailing + "'");
    return Mlp(std::move(layers), output);
  }

 private:
  static std::string format_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }

  void check_chain() const {
    if (layers_.empty()) throw ShapeError("model has no layers");
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      const auto& layer = layers_[l];
      if (layer.in() == 0 || layer.out() == 0)
        throw ShapeError("layer " + std::to_string(l) + " has zero width");
      if (static_cast<std::size_t>(layer.bias.size()) != layer.out())
        throw ShapeError("layer " + std::to_string(l) + " bias width " +
                         std::to_string(layer.bias.size()) + " ≠ output width " +
                         std::to_string(layer.out()));
      if (l > 0 && layer.in() != layers_[l - 1].out())
        throw ShapeError("layer " + std::to_string(l) + " input width " +
                         std::to_string(layer.in()) + " ≠ previous output width " +
                         std::to_string(layers_[l - 1].out()));
    }
  }

  void check_input(const Vector& x) const {
    if (static_cast<std::size_t>(x.size()) != input_width())
      throw ShapeError("input width " + std::to_string(x.size()) + " ≠ model input width " +
                       std::to_string(input_width()));
  }

  Vector apply_output(const Vector& a) const {
    switch (output_) {
      case OutputActivation::softmax: return softmax(a);
      case OutputActivation::tanh: return a.array().tanh().matrix();
      case OutputActivation::linear: return a;
    }
    return a;
  }

  // d output / d pre-activation, given the output values.
  Matrix output_jacobian(const Vector& y) const {
    switch (output_) {
      case OutputActivation::softmax: {
        Matrix j = -y * y.transpose();
        j.diagonal() += y;
        return j;
      }
      case OutputActivation::tanh: return (1.0 - y.array().square()).matrix().asDiagonal();
      case OutputActivation::linear: return Matrix::Identity(y.size(), y.size());
    }
    return Matrix();
  }

  std::vector<DenseLayer> layers_;
  OutputActivation output_ = OutputActivation::softmax;
};

inline Mlp load_mlp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open model file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return Mlp::parse(text.str());
}

inline void save_mlp(const Mlp& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write model file '" + path + "'");
  out << model.serialize();
  if (!out) throw std::runtime_error("failed writing model file '" + path + "'");
}

}  // namespace exemplar

#endif  // EXEMPLAR_MLP_HPP
