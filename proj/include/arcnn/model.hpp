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

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "arcnn/netspec.hpp"
#include "arcnn/nn/conv.hpp"
#include "arcnn/nn/prelu.hpp"
#include "arcnn/tensor.hpp"

namespace arcnn {

enum class ParamKind { kWeights, kBiases, kSlopes };

/// One contiguous parameter (or gradient) array. Blocks are enumerated layer
/// by layer in weights, biases, slopes order; the last layer has no slopes.
template <typename T>
struct ParamBlock {
  int layer;
  ParamKind kind;
  std::span<T> values;
};

/// A PReLU follows every layer except the last.
template <typename T>
struct Network {
  netspec::ArchSpec spec;
  std::vector<nn::ConvParams<T>> layers;
  std::vector<nn::PReLUParams<T>> activations;  // depth() - 1 entries
  std::uint64_t iteration = 0;

  /// Zero weights and biases, slopes set to `slope`.
  static Network make(const netspec::ArchSpec& spec, T slope = T(0.25));

  int depth() const { return static_cast<int>(layers.size()); }
  void validate() const;

  std::vector<ParamBlock<T>> blocks();
  std::vector<ParamBlock<const T>> blocks() const;

  template <typename U>
  Network<U> cast() const {
    Network<U> out{spec, {}, {}, iteration};
    for (const auto& l : layers) out.layers.push_back(l.template cast<U>());
    for (const auto& a : activations) {
      out.activations.push_back(a.template cast<U>());
    }
    return out;
  }
};

template <typename T>
struct NetGrads {
  std::vector<Tensor<T>> weights;
  std::vector<std::vector<T>> biases;
  std::vector<std::vector<T>> slopes;
  Tensor<T> input;  // empty unless requested

  /// Same order and sizes as Network::blocks().
  std::vector<ParamBlock<T>> blocks();
  std::vector<ParamBlock<const T>> blocks() const;
};

template <typename T>
struct ForwardCache {
  std::vector<Tensor<T>> inputs;  // input of every layer
  std::vector<Tensor<T>> pre;     // pre-activation of every hidden layer
  Shape output_shape{};
  std::uint64_t digest = 0;       // parameters seen by the forward pass
};

/// Runs the network. The input needs n_0 channels and at least f_1 pixels
/// per axis. When `cache` is non-null it receives what net_backward needs.
template <typename T>
Tensor<T> net_forward(const Network<T>& net, const Tensor<T>& input,
                      ForwardCache<T>* cache = nullptr);

/// Gradients of <grad_out, output> w.r.t. every parameter. Throws ShapeError
/// when the cache does not belong to this network's current parameters.
template <typename T>
NetGrads<T> net_backward(const Network<T>& net, const ForwardCache<T>& cache,
                         const Tensor<T>& grad_out,
                         bool need_input_grad = false);

/// Fingerprint of every parameter value, used to reject stale caches.
template <typename T>
std::uint64_t parameter_digest(const Network<T>& net);

}  // namespace arcnn
