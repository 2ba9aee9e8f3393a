// Copyright 2026 The shufflesgd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "layers.h"

#include <cmath>

#include <fmt/format.h>

#include "shufflesgd/common/errors.h"

namespace shufflesgd::nn::detail {

namespace {

class LinearLayer final : public Layer {
 public:
  LinearLayer(const LinearSpec& spec, std::size_t offset)
      : in_(spec.inDim), out_(spec.outDim), offset_(offset) {}

  Tensor forward(const Tensor& input, std::span<const double> params) override {
    if (input.cols() != in_) {
      throw ShapeError(fmt::format("Linear({},{}) got input width {}", in_, out_, input.cols()));
    }
    input_ = input;
    const double* w = params.data() + offset_;  // [out][in]
    const double* b = w + in_ * out_;
    std::size_t batch = input.rows();
    Tensor y = Tensor::zeros({batch, out_});
    for (std::size_t r = 0; r < batch; ++r) {
      for (std::size_t o = 0; o < out_; ++o) {
        double acc = b[o];
        for (std::size_t i = 0; i < in_; ++i) acc += w[o * in_ + i] * input.at(r, i);
        y.at(r, o) = acc;
      }
    }
    return y;
  }

  Tensor backward(const Tensor& gy, std::span<const double> params,
                  std::span<double> grad) override {
    const double* w = params.data() + offset_;
    double* gw = grad.data() + offset_;
    double* gb = gw + in_ * out_;
    std::size_t batch = gy.rows();
    Tensor gx = Tensor::zeros({batch, in_});
    for (std::size_t r = 0; r < batch; ++r) {
      for (std::size_t o = 0; o < out_; ++o) {
        double g = gy.at(r, o);
        gb[o] += g;
        for (std::size_t i = 0; i < in_; ++i) {
          gw[o * in_ + i] += g * input_.at(r, i);
          gx.at(r, i) += g * w[o * in_ + i];
        }
      }
    }
    return gx;
  }

 private:
  std::size_t in_, out_, offset_;
  Tensor input_;
};

class ReluLayer final : public Layer {
 public:
  Tensor forward(const Tensor& input, std::span<const double>) override {
    input_ = input;
    Tensor y = input;
    for (double& v : y.data()) v = v > 0.0 ? v : 0.0;
    return y;
  }

  Tensor backward(const Tensor& gy, std::span<const double>, std::span<double>) override {
    Tensor gx = gy;
    auto x = input_.data();
    auto g = gx.data();
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!(x[i] > 0.0)) g[i] = 0.0;
    }
    return gx;
  }

 private:
  Tensor input_;
};

class SigmoidLayer final : public Layer {
 public:
  Tensor forward(const Tensor& input, std::span<const double>) override {
    Tensor y = input;
    for (double& v : y.data()) {
      // Split by sign so exp() never overflows.
      if (v >= 0.0) {
        v = 1.0 / (1.0 + std::exp(-v));
      } else {
        double e = std::exp(v);
        v = e / (1.0 + e);
      }
    }
    output_ = y;
    return y;
  }

  Tensor backward(const Tensor& gy, std::span<const double>, std::span<double>) override {
    Tensor gx = gy;
    auto y = output_.data();
    auto g = gx.data();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] *= y[i] * (1.0 - y[i]);
    return gx;
  }

 private:
  Tensor output_;
};

class EmbeddingLayer final : public Layer {
 public:
  EmbeddingLayer(const EmbeddingSpec& spec, std::size_t offset) : spec_(spec), offset_(offset) {}

  Tensor forward(const Tensor& input, std::span<const double> params) override {
    if (input.cols() != spec_.numFields) {
      throw ShapeError(fmt::format("Embedding expects {} id columns, got {}", spec_.numFields,
                                   input.cols()));
    }
    std::size_t batch = input.rows();
    ids_.assign(batch * spec_.numFields, 0);
    for (std::size_t r = 0; r < batch; ++r) {
      for (std::size_t f = 0; f < spec_.numFields; ++f) {
        double v = input.at(r, f);
        if (!(v >= 0.0) || v >= static_cast<double>(spec_.vocabSize) || std::floor(v) != v) {
          throw InvalidArgument(fmt::format("Embedding: {} is not an id in [0, {})", v,
                                            spec_.vocabSize));
        }
        ids_[r * spec_.numFields + f] = static_cast<std::size_t>(v);
      }
    }
    const double* table = params.data() + offset_;
    std::size_t dim = spec_.embedDim;
    Tensor y = Tensor::zeros({batch, spec_.numFields * dim});
    for (std::size_t r = 0; r < batch; ++r) {
      for (std::size_t f = 0; f < spec_.numFields; ++f) {
        const double* row = table + ids_[r * spec_.numFields + f] * dim;
        for (std::size_t d = 0; d < dim; ++d) y.at(r, f * dim + d) = row[d];
      }
    }
    batch_ = batch;
    return y;
  }

  Tensor backward(const Tensor& gy, std::span<const double>, std::span<double> grad) override {
    double* table = grad.data() + offset_;
    std::size_t dim = spec_.embedDim;
    for (std::size_t r = 0; r < batch_; ++r) {
      for (std::size_t f = 0; f < spec_.numFields; ++f) {
        double* row = table + ids_[r * spec_.numFields + f] * dim;
        for (std::size_t d = 0; d < dim; ++d) row[d] += gy.at(r, f * dim + d);
      }
    }
    // Ids carry no gradient.
    return Tensor::zeros({batch_, spec_.numFields});
  }

 private:
  EmbeddingSpec spec_;
  std::size_t offset_;
  std::size_t batch_ = 0;
  std::vector<std::size_t> ids_;
};

class ConcatLayer final : public Layer {
 public:
  explicit ConcatLayer(std::vector<std::unique_ptr<Layer>> branches)
      : branches_(std::move(branches)) {}

  Tensor forward(const Tensor& input, std::span<const double> params) override {
    std::vector<Tensor> outs;
    std::size_t width = 0;
    for (auto& b : branches_) {
      outs.push_back(b->forward(input, params));
      width += outs.back().cols();
    }
    std::size_t batch = input.rows();
    Tensor y = Tensor::zeros({batch, width});
    widths_.clear();
    std::size_t col = 0;
    for (const Tensor& o : outs) {
      for (std::size_t r = 0; r < batch; ++r) {
        for (std::size_t c = 0; c < o.cols(); ++c) y.at(r, col + c) = o.at(r, c);
      }
      widths_.push_back(o.cols());
      col += o.cols();
    }
    inputShape_ = input.shape();
    return y;
  }

  Tensor backward(const Tensor& gy, std::span<const double> params,
                  std::span<double> grad) override {
    Tensor gx = Tensor::zeros(inputShape_);
    std::size_t batch = gy.rows();
    std::size_t col = 0;
    for (std::size_t k = 0; k < branches_.size(); ++k) {
      Tensor part = Tensor::zeros({batch, widths_[k]});
      for (std::size_t r = 0; r < batch; ++r) {
        for (std::size_t c = 0; c < widths_[k]; ++c) part.at(r, c) = gy.at(r, col + c);
      }
      col += widths_[k];
      Tensor g = branches_[k]->backward(part, params, grad);
      auto dst = gx.data();
      auto src = g.data();
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
    }
    return gx;
  }

 private:
  std::vector<std::unique_ptr<Layer>> branches_;
  std::vector<std::size_t> widths_;
  std::vector<std::size_t> inputShape_;
};

class SequentialLayer final : public Layer {
 public:
  explicit SequentialLayer(std::vector<std::unique_ptr<Layer>> layers)
      : layers_(std::move(layers)) {}

  Tensor forward(const Tensor& input, std::span<const double> params) override {
    Tensor x = input;
    for (auto& l : layers_) x = l->forward(x, params);
    return x;
  }

  Tensor backward(const Tensor& gy, std::span<const double> params,
                  std::span<double> grad) override {
    Tensor g = gy;
    for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) {
      g = (*it)->backward(g, params, grad);
    }
    return g;
  }

 private:
  std::vector<std::unique_ptr<Layer>> layers_;
};

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

std::unique_ptr<Layer> buildLayer(const LayerSpec& spec, std::size_t& offset) {
  return std::visit(
      Overloaded{
          [&](const LinearSpec& l) -> std::unique_ptr<Layer> {
            auto layer = std::make_unique<LinearLayer>(l, offset);
            offset += l.inDim * l.outDim + l.outDim;
            return layer;
          },
          [&](const ReluSpec&) -> std::unique_ptr<Layer> { return std::make_unique<ReluLayer>(); },
          [&](const SigmoidSpec&) -> std::unique_ptr<Layer> {
            return std::make_unique<SigmoidLayer>();
          },
          [&](const EmbeddingSpec& e) -> std::unique_ptr<Layer> {
            auto layer = std::make_unique<EmbeddingLayer>(e, offset);
            offset += e.vocabSize * e.embedDim;
            return layer;
          },
          [&](const ConcatSpec& c) -> std::unique_ptr<Layer> {
            std::vector<std::unique_ptr<Layer>> branches;
            for (const auto& b : c.branches) branches.push_back(buildLayer(b, offset));
            return std::make_unique<ConcatLayer>(std::move(branches));
          },
          [&](const SequentialSpec& s) -> std::unique_ptr<Layer> {
            std::vector<std::unique_ptr<Layer>> layers;
            for (const auto& l : s.layers) layers.push_back(buildLayer(l, offset));
            return std::make_unique<SequentialLayer>(std::move(layers));
          },
      },
      spec.node);
}

}  // namespace shufflesgd::nn::detail
