// Copyright 2026 The arcnn Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "arcnn/model.hpp"

#include <cstring>

#include <fmt/format.h>

#include "arcnn/error.hpp"

namespace arcnn {

template <typename T>
Network<T> Network<T>::make(const netspec::ArchSpec& spec, T slope) {
  spec.validate();
  Network net;
  net.spec = spec;
  for (int i = 0; i < spec.depth(); ++i) {
    const auto& l = spec.layers[i];
    net.layers.push_back(nn::ConvParams<T>::make(
        spec.in_channels(i), l.filters, l.size, spec.layer_stride(i),
        spec.pad(i), spec.is_transposed(i)));
    if (i + 1 < spec.depth()) {
      net.activations.push_back({std::vector<T>(l.filters, slope)});
    }
  }
  return net;
}

template <typename T>
void Network<T>::validate() const {
  spec.validate();
  if (depth() != spec.depth()) {
    throw ShapeError(fmt::format("network has {} layers but '{}' needs {}",
                                 depth(), spec.notation(), spec.depth()));
  }
  if (static_cast<int>(activations.size()) != depth() - 1) {
    throw ShapeError(fmt::format("network has {} PReLU layers, expected {}",
                                 activations.size(), depth() - 1));
  }
  for (int i = 0; i < depth(); ++i) {
    const auto& p = layers[i];
    p.validate();
    const auto& l = spec.layers[i];
    if (p.in_channels() != spec.in_channels(i) || p.out_channels() != l.filters ||
        p.filter() != l.size || p.stride != spec.layer_stride(i) ||
        p.pad != spec.pad(i) || p.transposed != spec.is_transposed(i)) {
      throw ShapeError(fmt::format("layer {} parameters do not match '{}'",
                                   i + 1, spec.notation()));
    }
    if (i + 1 < depth() &&
        static_cast<int>(activations[i].slopes.size()) != l.filters) {
      throw ShapeError(fmt::format("layer {} has {} slopes for {} channels",
                                   i + 1, activations[i].slopes.size(),
                                   l.filters));
    }
  }
}

namespace {

template <typename B, typename Net>
std::vector<B> network_blocks(Net& net) {
  std::vector<B> out;
  for (int i = 0; i < net.depth(); ++i) {
    out.push_back({i, ParamKind::kWeights, net.layers[i].weights.data()});
    out.push_back({i, ParamKind::kBiases, std::span(net.layers[i].biases)});
    if (i + 1 < net.depth()) {
      out.push_back({i, ParamKind::kSlopes, std::span(net.activations[i].slopes)});
    }
  }
  return out;
}

template <typename B, typename Grads>
std::vector<B> grad_blocks(Grads& g) {
  std::vector<B> out;
  const int d = static_cast<int>(g.weights.size());
  for (int i = 0; i < d; ++i) {
    out.push_back({i, ParamKind::kWeights, g.weights[i].data()});
    out.push_back({i, ParamKind::kBiases, std::span(g.biases[i])});
    if (i + 1 < d) out.push_back({i, ParamKind::kSlopes, std::span(g.slopes[i])});
  }
  return out;
}

}  // namespace

template <typename T>
std::vector<ParamBlock<T>> Network<T>::blocks() {
  return network_blocks<ParamBlock<T>>(*this);
}
template <typename T>
std::vector<ParamBlock<const T>> Network<T>::blocks() const {
  return network_blocks<ParamBlock<const T>>(*this);
}
template <typename T>
std::vector<ParamBlock<T>> NetGrads<T>::blocks() {
  return grad_blocks<ParamBlock<T>>(*this);
}
template <typename T>
std::vector<ParamBlock<const T>> NetGrads<T>::blocks() const {
  return grad_blocks<ParamBlock<const T>>(*this);
}

template <typename T>
std::uint64_t parameter_digest(const Network<T>& net) {
  // FNV-1a over the raw bytes.
  std::uint64_t h = 14695981039346656037ull;
  for (const auto& b : net.blocks()) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(b.values.data());
    for (std::size_t i = 0; i < b.values.size_bytes(); ++i) {
      h = (h ^ bytes[i]) * 1099511628211ull;
    }
  }
  return h;
}

template <typename T>
Tensor<T> net_forward(const Network<T>& net, const Tensor<T>& input,
                      ForwardCache<T>* cache) {
  net.validate();
  const Shape& s = input.shape();
  if (input.empty()) throw ShapeError("network input is empty");
  if (s.c != net.spec.input_channels) {
    throw ShapeError(fmt::format("network input has {} channels but '{}' expects {}",
                                 s.c, net.spec.notation(), net.spec.input_channels));
  }
  const int f1 = net.spec.layers[0].size;
  if (s.h < f1 || s.w < f1) {
    throw ShapeError(fmt::format(
        "network input {}x{} is smaller than the first {}x{} filter", s.h, s.w,
        f1, f1));
  }
  if (cache) {
    cache->inputs.clear();
    cache->pre.clear();
    cache->digest = parameter_digest(net);
  }
  Tensor<T> x = input;
  for (int i = 0; i < net.depth(); ++i) {
    Tensor<T> y = nn::layer_forward(x, net.layers[i]);
    if (cache) cache->inputs.push_back(std::move(x));
    if (i + 1 < net.depth()) {
      x = nn::prelu_forward(y, net.activations[i]);
      if (cache) cache->pre.push_back(std::move(y));
    } else {
      x = std::move(y);
    }
  }
  if (cache) cache->output_shape = x.shape();
  return x;
}

template <typename T>
NetGrads<T> net_backward(const Network<T>& net, const ForwardCache<T>& cache,
                         const Tensor<T>& grad_out, bool need_input_grad) {
  const int d = net.depth();
  if (static_cast<int>(cache.inputs.size()) != d ||
      static_cast<int>(cache.pre.size()) != d - 1) {
    throw ShapeError("forward cache does not match this network");
  }
  if (cache.digest != parameter_digest(net)) {
    throw ShapeError("forward cache is stale: parameters changed since forward");
  }
  if (grad_out.shape() != cache.output_shape) {
    throw ShapeError(fmt::format("output gradient has shape {}, output was {}",
                                 to_string(grad_out.shape()),
                                 to_string(cache.output_shape)));
  }
  NetGrads<T> g;
  g.weights.resize(d);
  g.biases.resize(d);
  g.slopes.resize(d - 1);
  Tensor<T> go = grad_out;
  for (int i = d - 1; i >= 0; --i) {
    if (i + 1 < d) {
      auto pg = nn::prelu_backward(cache.pre[i], net.activations[i], go);
      g.slopes[i] = std::move(pg.slopes);
      go = std::move(pg.input);
    }
    const bool want_input = i > 0 || need_input_grad;
    auto cg = nn::layer_backward(cache.inputs[i], net.layers[i], go, want_input);
    g.weights[i] = std::move(cg.weights);
    g.biases[i] = std::move(cg.biases);
    if (want_input) go = std::move(cg.input);
  }
  if (need_input_grad) g.input = std::move(go);
  return g;
}

#define ARCNN_INSTANTIATE(T)                                                 \
  template struct Network<T>;                                                \
  template struct NetGrads<T>;                                               \
  template std::uint64_t parameter_digest(const Network<T>&);                \
  template Tensor<T> net_forward(const Network<T>&, const Tensor<T>&,        \
                                 ForwardCache<T>*);                          \
  template NetGrads<T> net_backward(const Network<T>&, const ForwardCache<T>&, \
                                    const Tensor<T>&, bool);

ARCNN_INSTANTIATE(float)
ARCNN_INSTANTIATE(double)

#undef ARCNN_INSTANTIATE

}  // namespace arcnn
