/*
 * Copyright 2026 The gncsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "gncsim/objective.hpp"
#include "gncsim/vec.hpp"

namespace gncsim {

/// Input/hidden/output sizes of a softmax cross-entropy classifier. An empty
/// hidden list is multinomial logistic regression; otherwise a tanh MLP with
/// one or two hidden layers.
struct ClassifierShape {
  std::size_t features = 0;
  std::vector<std::size_t> hidden;
  std::size_t classes = 0;
};

/// Softmax cross-entropy classifier over rows laid out as
/// [features..., class label]. Parameters are flattened layer by layer,
/// weight matrix (row-major, out x in) then bias.
class SoftmaxClassifier final : public Objective {
 public:
  explicit SoftmaxClassifier(ClassifierShape shape)
      : shape_(std::move(shape)) {
    if (shape_.features == 0 || shape_.classes < 2) {
      throw std::invalid_argument(
          "SoftmaxClassifier: need features >= 1 and classes >= 2");
    }
    if (shape_.hidden.size() > 2) {
      throw std::invalid_argument(
          "SoftmaxClassifier: at most two hidden layers");
    }
    std::size_t in = shape_.features;
    std::size_t offset = 0;
    std::size_t index = 0;
    for (const std::size_t h : shape_.hidden) {
      if (h == 0) {
        throw std::invalid_argument("SoftmaxClassifier: empty hidden layer");
      }
      layers_.push_back(Layer{offset, offset + h * in, in, h, index++});
      offset += h * in + h;
      in = h;
    }
    layers_.push_back(
        Layer{offset, offset + shape_.classes * in, in, shape_.classes,
              index});
    offset += shape_.classes * in + shape_.classes;
    dim_ = offset;
    partition_ = std::make_shared<PartitionSet>(build_filters(),
                                                build_layers());
  }

  std::string_view family() const override {
    return shape_.hidden.empty() ? "logistic" : "mlp";
  }
  std::size_t param_dim() const override { return dim_; }
  std::shared_ptr<const PartitionSet> partition() const override {
    return partition_;
  }
  const ClassifierShape& shape() const { return shape_; }

  double loss(const Dataset& data, const Batch& batch,
              const ParamVector& x) const override {
    check_batch(data, batch, x);
    check_rows(data);
    Scratch s = make_scratch();
    double acc = 0.0;
    for (const std::size_t idx : batch.indices) {
      acc += example_loss(data.row(idx), x.values, s);
    }
    return acc / static_cast<double>(batch.indices.size());
  }

  std::vector<double> grad(const Dataset& data, const Batch& batch,
                           const ParamVector& x) const override {
    check_batch(data, batch, x);
    check_rows(data);
    Scratch s = make_scratch();
    std::vector<double> g(dim_, 0.0);
    for (const std::size_t idx : batch.indices) {
      example_grad(data.row(idx), x.values, s, g);
    }
    scale(g, 1.0 / static_cast<double>(batch.indices.size()));
    return g;
  }

  /// Per-layer uniform init on [-1/sqrt(fan_in), +1/sqrt(fan_in)].
  ParamVector init_params(Rng& rng) const override {
    std::vector<double> v(dim_);
    for (const Layer& layer : layers_) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(layer.in));
      for (std::size_t i = layer.w_begin; i < layer.w_begin + layer.weights();
           ++i) {
        v[i] = bound * (2.0 * rng.uniform() - 1.0);
      }
      for (std::size_t i = layer.b_begin; i < layer.b_begin + layer.out; ++i) {
        v[i] = bound * (2.0 * rng.uniform() - 1.0);
      }
    }
    return ParamVector(std::move(v), partition_);
  }

  std::optional<double> accuracy(const Dataset& data,
                                 const ParamVector& x) const override {
    check_rows(data);
    if (data.n == 0) {
      return std::nullopt;
    }
    Scratch s = make_scratch();
    std::size_t hits = 0;
    for (std::size_t i = 0; i < data.n; ++i) {
      const auto row = data.row(i);
      forward(row, x.values, s);
      const auto& logits = s.post.back();
      std::size_t arg = 0;
      for (std::size_t c = 1; c < logits.size(); ++c) {
        if (logits[c] > logits[arg]) {
          arg = c;
        }
      }
      hits += arg == label_of(row);
    }
    return static_cast<double>(hits) / static_cast<double>(data.n);
  }

 private:
  struct Layer {
    std::size_t w_begin = 0;
    std::size_t b_begin = 0;
    std::size_t in = 0;
    std::size_t out = 0;
    std::size_t index = 0;

    std::size_t weights() const { return in * out; }
  };

  struct Scratch {
    std::vector<std::vector<double>> post;   // activations per layer
    std::vector<std::vector<double>> delta;  // backprop buffers
    std::vector<double> prob;
  };

  Scratch make_scratch() const {
    Scratch s;
    for (const Layer& layer : layers_) {
      s.post.emplace_back(layer.out);
      s.delta.emplace_back(layer.out);
    }
    s.prob.resize(shape_.classes);
    return s;
  }

  void check_rows(const Dataset& data) const {
    if (data.width != shape_.features + 1) {
      throw std::invalid_argument(
          "SoftmaxClassifier: row width != features + 1");
    }
  }

  std::size_t label_of(std::span<const double> row) const {
    const double raw = row[shape_.features];
    const auto label = static_cast<long long>(raw);
    if (raw != static_cast<double>(label) || label < 0 ||
        static_cast<std::size_t>(label) >= shape_.classes) {
      throw std::invalid_argument("SoftmaxClassifier: bad class label");
    }
    return static_cast<std::size_t>(label);
  }

  void forward(std::span<const double> row, std::span<const double> p,
               Scratch& s) const {
    std::span<const double> input = row.first(shape_.features);
    for (std::size_t li = 0; li < layers_.size(); ++li) {
      const Layer& layer = layers_[li];
      auto& out = s.post[li];
      for (std::size_t r = 0; r < layer.out; ++r) {
        double acc = p[layer.b_begin + r];
        const std::size_t w_row = layer.w_begin + r * layer.in;
        for (std::size_t c = 0; c < layer.in; ++c) {
          acc += p[w_row + c] * input[c];
        }
        out[r] = li + 1 < layers_.size() ? std::tanh(acc) : acc;
      }
      input = out;
    }
  }

  /// log-sum-exp of the logits, and softmax probabilities as a side effect.
  double softmax(const std::vector<double>& logits,
                 std::vector<double>& prob) const {
    double m = logits[0];
    for (const double v : logits) {
      m = std::max(m, v);
    }
    double acc = 0.0;
    for (std::size_t c = 0; c < logits.size(); ++c) {
      prob[c] = std::exp(logits[c] - m);
      acc += prob[c];
    }
    for (double& v : prob) {
      v /= acc;
    }
    return m + std::log(acc);
  }

  double example_loss(std::span<const double> row, std::span<const double> p,
                      Scratch& s) const {
    forward(row, p, s);
    const double lse = softmax(s.post.back(), s.prob);
    return lse - s.post.back()[label_of(row)];
  }

  void example_grad(std::span<const double> row, std::span<const double> p,
                    Scratch& s, std::span<double> g) const {
    forward(row, p, s);
    softmax(s.post.back(), s.prob);
    const std::size_t last = layers_.size() - 1;
    auto& dout = s.delta[last];
    for (std::size_t c = 0; c < shape_.classes; ++c) {
      dout[c] = s.prob[c];
    }
    dout[label_of(row)] -= 1.0;

    for (std::size_t li = layers_.size(); li-- > 0;) {
      const Layer& layer = layers_[li];
      const std::span<const double> input =
          li == 0 ? row.first(shape_.features)
                  : std::span<const double>(s.post[li - 1]);
      const auto& d = s.delta[li];
      for (std::size_t r = 0; r < layer.out; ++r) {
        const std::size_t w_row = layer.w_begin + r * layer.in;
        for (std::size_t c = 0; c < layer.in; ++c) {
          g[w_row + c] += d[r] * input[c];
        }
        g[layer.b_begin + r] += d[r];
      }
      if (li == 0) {
        break;
      }
      // delta through tanh: (W^T d) * (1 - a^2)
      auto& dprev = s.delta[li - 1];
      for (std::size_t c = 0; c < layer.in; ++c) {
        double acc = 0.0;
        for (std::size_t r = 0; r < layer.out; ++r) {
          acc += p[layer.w_begin + r * layer.in + c] * d[r];
        }
        const double a = s.post[li - 1][c];
        dprev[c] = acc * (1.0 - a * a);
      }
    }
  }

  FilterPartition build_filters() const {
    std::vector<ParamGroup> groups;
    for (const Layer& layer : layers_) {
      const std::string base = "l" + std::to_string(layer.index);
      for (std::size_t r = 0; r < layer.out; ++r) {
        groups.push_back(ParamGroup{base + ".W.f" + std::to_string(r),
                                    layer.w_begin + r * layer.in,
                                    layer.w_begin + (r + 1) * layer.in});
      }
      groups.push_back(
          ParamGroup{base + ".b", layer.b_begin, layer.b_begin + layer.out});
    }
    return FilterPartition(Grouping::per_filter, std::move(groups));
  }

  FilterPartition build_layers() const {
    std::vector<ParamGroup> groups;
    for (const Layer& layer : layers_) {
      const std::string base = "l" + std::to_string(layer.index);
      groups.push_back(ParamGroup{base + ".W", layer.w_begin,
                                  layer.w_begin + layer.weights()});
      groups.push_back(
          ParamGroup{base + ".b", layer.b_begin, layer.b_begin + layer.out});
    }
    return FilterPartition(Grouping::per_layer, std::move(groups));
  }

  ClassifierShape shape_;
  std::vector<Layer> layers_;
  std::size_t dim_ = 0;
  std::shared_ptr<const PartitionSet> partition_;
};

}  // namespace gncsim
