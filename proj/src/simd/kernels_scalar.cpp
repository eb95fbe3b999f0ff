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

#include <algorithm>

#include "arcnn/simd/kernels.hpp"

namespace arcnn::simd::scalar {

template <typename T>
void gemm(Op ta, Op tb, int m, int n, int k, T alpha, const T* a, int lda,
          const T* b, int ldb, T beta, T* c, int ldc) {
  for (int i = 0; i < m; ++i) {
    T* row = c + static_cast<std::ptrdiff_t>(i) * ldc;
    if (beta == T(0)) {
      std::fill(row, row + n, T(0));
    } else if (beta != T(1)) {
      for (int j = 0; j < n; ++j) row[j] *= beta;
    }
  }
  if (alpha == T(0) || k == 0) return;

  for (int i = 0; i < m; ++i) {
    T* row = c + static_cast<std::ptrdiff_t>(i) * ldc;
    for (int p = 0; p < k; ++p) {
      const T aip = alpha * (ta == Op::kNoTrans
                                 ? a[static_cast<std::ptrdiff_t>(i) * lda + p]
                                 : a[static_cast<std::ptrdiff_t>(p) * lda + i]);
      if (tb == Op::kNoTrans) {
        const T* brow = b + static_cast<std::ptrdiff_t>(p) * ldb;
        for (int j = 0; j < n; ++j) row[j] += aip * brow[j];
      } else {
        for (int j = 0; j < n; ++j) {
          row[j] += aip * b[static_cast<std::ptrdiff_t>(j) * ldb + p];
        }
      }
    }
  }
}

template <typename T>
void prelu_forward(const T* x, std::size_t n, T slope, T* y) {
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = std::max(x[i], T(0)) + slope * std::min(x[i], T(0));
  }
}

template <typename T>
double prelu_backward(const T* x, const T* g, std::size_t n, T slope, T* gx) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i] < T(0)) {
      gx[i] = g[i] * slope;
      acc += static_cast<double>(g[i]) * static_cast<double>(x[i]);
    } else {
      gx[i] = g[i];
    }
  }
  return acc;
}

template <typename T>
void momentum_step(T* p, T* v, const T* g, std::size_t n, T momentum, T lr) {
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = momentum * v[i] - lr * g[i];
    p[i] += v[i];
  }
}

template void gemm<float>(Op, Op, int, int, int, float, const float*, int,
                          const float*, int, float, float*, int);
template void gemm<double>(Op, Op, int, int, int, double, const double*, int,
                           const double*, int, double, double*, int);
template void prelu_forward<float>(const float*, std::size_t, float, float*);
template void prelu_forward<double>(const double*, std::size_t, double,
                                    double*);
template double prelu_backward<float>(const float*, const float*, std::size_t,
                                      float, float*);
template double prelu_backward<double>(const double*, const double*,
                                       std::size_t, double, double*);
template void momentum_step<float>(float*, float*, const float*, std::size_t,
                                   float, float);
template void momentum_step<double>(double*, double*, const double*,
                                    std::size_t, double, double);

}  // namespace arcnn::simd::scalar
