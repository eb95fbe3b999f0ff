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

#include <vector>

#include "arcnn/tensor.hpp"

namespace arcnn::nn {

/// One learnable negative-part slope per channel. All-zero slopes give ReLU.
template <typename T>
struct PReLUParams {
  std::vector<T> slopes;

  template <typename U>
  PReLUParams<U> cast() const {
    return PReLUParams<U>{std::vector<U>(slopes.begin(), slopes.end())};
  }
};

template <typename T>
struct PReLUGrads {
  Tensor<T> input;
  std::vector<T> slopes;
};

/// y = max(x, 0) + a_c * min(x, 0), with a_c shared over a channel's plane.
template <typename T>
Tensor<T> prelu_forward(const Tensor<T>& input, const PReLUParams<T>& params);

/// The derivative at x == 0 is taken from the positive branch.
template <typename T>
PReLUGrads<T> prelu_backward(const Tensor<T>& input,
                             const PReLUParams<T>& params,
                             const Tensor<T>& grad_out);

}  // namespace arcnn::nn
