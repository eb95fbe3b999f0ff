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

#include "arcnn/nn/prelu.hpp"

#include <cmath>

#include <fmt/format.h>

#include "arcnn/error.hpp"
#include "arcnn/simd/kernels.hpp"

namespace arcnn::nn {
namespace {

template <typename T>
void check_slopes(const Tensor<T>& input, const PReLUParams<T>& params) {
  if (static_cast<int>(params.slopes.size()) != input.shape().c) {
    throw ShapeError(fmt::format("PReLU has {} slopes for a {}-channel input",
                                 params.slopes.size(), input.shape().c));
  }
  for (T a : params.slopes) {
    if (!std::isfinite(a)) throw ShapeError("PReLU slope is not finite");
  }
}

}  // namespace

template <typename T>
Tensor<T> prelu_forward(const Tensor<T>& input, const PReLUParams<T>& params) {
  check_slopes(input, params);
  const Shape& s = input.shape();
  Tensor<T> out(s);
  for (int n = 0; n < s.n; ++n) {
    for (int c = 0; c < s.c; ++c) {
      auto x = input.plane(n, c);
      simd::prelu_forward(x.data(), x.size(), params.slopes[c],
                          out.plane(n, c).data());
    }
  }
  return out;
}

template <typename T>
PReLUGrads<T> prelu_backward(const Tensor<T>& input,
                             const PReLUParams<T>& params,
                             const Tensor<T>& grad_out) {
  check_slopes(input, params);
  if (grad_out.shape() != input.shape()) {
    throw ShapeError(fmt::format("PReLU gradient has shape {}, input is {}",
                                 to_string(grad_out.shape()),
                                 to_string(input.shape())));
  }
  const Shape& s = input.shape();
  PReLUGrads<T> grads{Tensor<T>(s), std::vector<T>(s.c, T(0))};
  std::vector<double> slope_acc(s.c, 0.0);
  for (int n = 0; n < s.n; ++n) {
    for (int c = 0; c < s.c; ++c) {
      auto x = input.plane(n, c);
      slope_acc[c] += simd::prelu_backward(x.data(), grad_out.plane(n, c).data(),
                                           x.size(), params.slopes[c],
                                           grads.input.plane(n, c).data());
    }
  }
  for (int c = 0; c < s.c; ++c) grads.slopes[c] = static_cast<T>(slope_acc[c]);
  return grads;
}

template Tensor<float> prelu_forward(const Tensor<float>&,
                                     const PReLUParams<float>&);
template Tensor<double> prelu_forward(const Tensor<double>&,
                                      const PReLUParams<double>&);
template PReLUGrads<float> prelu_backward(const Tensor<float>&,
                                          const PReLUParams<float>&,
                                          const Tensor<float>&);
template PReLUGrads<double> prelu_backward(const Tensor<double>&,
                                           const PReLUParams<double>&,
                                           const Tensor<double>&);

}  // namespace arcnn::nn
