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

// Strided 2-D convolution and its adjoint (transposed convolution).
//
// Filters are applied as cross-correlation: out[o][y][x] = b[o] +
// sum_{c,i,j} w[o][c][i][j] * in[c][y*s - p + i][x*s - p + j], with zero
// padding outside the input.
//
// A transposed layer stores its weights as (n_in, n_out, f, f), so a conv
// layer and a transposed layer built from the same weight tensor are exact
// adjoints of each other. The transposed layer's padding p crops p pixels
// from every border of the scattered output.

#pragma once

#include <vector>

#include "arcnn/tensor.hpp"

namespace arcnn::nn {

/// Output extent of a convolution along one axis: floor((n + 2p - f) / s) + 1.
int conv_output_extent(int n, int f, int stride, int pad);
/// Output extent of a transposed convolution: s * (n - 1) + f - 2p.
int deconv_output_extent(int n, int f, int stride, int pad);

template <typename T>
struct ConvParams {
  Tensor<T> weights;
  std::vector<T> biases;
  int stride = 1;
  int pad = 0;
  bool transposed = false;

  /// Zero-initialized parameters.
  static ConvParams make(int n_in, int n_out, int f, int stride, int pad,
                         bool transposed);

  int in_channels() const {
    return transposed ? weights.shape().n : weights.shape().c;
  }
  int out_channels() const {
    return transposed ? weights.shape().c : weights.shape().n;
  }
  int filter() const { return weights.shape().h; }

  /// Throws ShapeError when the fields are mutually inconsistent.
  void validate() const;

  template <typename U>
  ConvParams<U> cast() const {
    return ConvParams<U>{weights.template cast<U>(),
                         std::vector<U>(biases.begin(), biases.end()), stride,
                         pad, transposed};
  }
};

template <typename T>
struct ConvGrads {
  Tensor<T> input;  // empty when not requested
  Tensor<T> weights;
  std::vector<T> biases;
};

template <typename T>
Tensor<T> conv_forward(const Tensor<T>& input, const ConvParams<T>& params);

template <typename T>
ConvGrads<T> conv_backward(const Tensor<T>& input, const ConvParams<T>& params,
                           const Tensor<T>& grad_out,
                           bool need_input_grad = true);

template <typename T>
Tensor<T> deconv_forward(const Tensor<T>& input, const ConvParams<T>& params);

template <typename T>
ConvGrads<T> deconv_backward(const Tensor<T>& input,
                             const ConvParams<T>& params,
                             const Tensor<T>& grad_out,
                             bool need_input_grad = true);

/// Dispatches on params.transposed.
template <typename T>
Tensor<T> layer_forward(const Tensor<T>& input, const ConvParams<T>& params) {
  return params.transposed ? deconv_forward(input, params)
                           : conv_forward(input, params);
}

template <typename T>
ConvGrads<T> layer_backward(const Tensor<T>& input, const ConvParams<T>& params,
                            const Tensor<T>& grad_out,
                            bool need_input_grad = true) {
  return params.transposed
             ? deconv_backward(input, params, grad_out, need_input_grad)
             : conv_backward(input, params, grad_out, need_input_grad);
}

}  // namespace arcnn::nn
