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

// Inner-loop arithmetic kernels.
//
// Every kernel has a portable scalar reference in `simd::scalar`. Where the
// build and the CPU allow it, an AVX2/FMA variant in `simd::avx2` replaces
// it for single precision. The entry points in `simd::` dispatch on the
// active ISA, which defaults to the best one detected at startup and can be
// forced with the ARCNN_ISA environment variable ("scalar" or "avx2") or
// set_active_isa(). Double precision always runs the scalar reference.

#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

namespace arcnn::simd {

enum class Isa { kScalar, kAvx2 };

enum class Op { kNoTrans, kTrans };

std::string_view isa_name(Isa isa);
std::optional<Isa> parse_isa(std::string_view name);

/// Best ISA compiled in and supported by this CPU.
Isa detected_isa();
bool isa_supported(Isa isa);

Isa active_isa();
/// Throws ConfigError when `isa` is not supported here.
void set_active_isa(Isa isa);

/// RAII override of the active ISA, restoring the previous one on exit.
class ScopedIsa {
 public:
  explicit ScopedIsa(Isa isa) : previous_(active_isa()) { set_active_isa(isa); }
  ~ScopedIsa() { set_active_isa(previous_); }
  ScopedIsa(const ScopedIsa&) = delete;
  ScopedIsa& operator=(const ScopedIsa&) = delete;

 private:
  Isa previous_;
};

// Row-major C(m x n) = alpha * op(A)(m x k) * op(B)(k x n) + beta * C.
// op(A) = A when ta == kNoTrans (A is m x k with row stride lda), otherwise
// A is k x m and read transposed. Same for B. beta == 0 overwrites C without
// reading it.
void gemm(Op ta, Op tb, int m, int n, int k, float alpha, const float* a,
          int lda, const float* b, int ldb, float beta, float* c, int ldc);
void gemm(Op ta, Op tb, int m, int n, int k, double alpha, const double* a,
          int lda, const double* b, int ldb, double beta, double* c, int ldc);

// y = max(x, 0) + slope * min(x, 0)
void prelu_forward(const float* x, std::size_t n, float slope, float* y);
void prelu_forward(const double* x, std::size_t n, double slope, double* y);

// gx = g * (x >= 0 ? 1 : slope); returns sum over x < 0 of g * x.
double prelu_backward(const float* x, const float* g, std::size_t n,
                      float slope, float* gx);
double prelu_backward(const double* x, const double* g, std::size_t n,
                      double slope, double* gx);

// v = momentum * v - lr * g; p = p + v
void momentum_step(float* p, float* v, const float* g, std::size_t n,
                   float momentum, float lr);
void momentum_step(double* p, double* v, const double* g, std::size_t n,
                   double momentum, double lr);

namespace scalar {

template <typename T>
void gemm(Op ta, Op tb, int m, int n, int k, T alpha, const T* a, int lda,
          const T* b, int ldb, T beta, T* c, int ldc);
template <typename T>
void prelu_forward(const T* x, std::size_t n, T slope, T* y);
template <typename T>
double prelu_backward(const T* x, const T* g, std::size_t n, T slope, T* gx);
template <typename T>
void momentum_step(T* p, T* v, const T* g, std::size_t n, T momentum, T lr);

}  // namespace scalar

#if defined(ARCNN_HAVE_AVX2)
namespace avx2 {

void gemm(Op ta, Op tb, int m, int n, int k, float alpha, const float* a,
          int lda, const float* b, int ldb, float beta, float* c, int ldc);
void prelu_forward(const float* x, std::size_t n, float slope, float* y);
double prelu_backward(const float* x, const float* g, std::size_t n,
                      float slope, float* gx);
void momentum_step(float* p, float* v, const float* g, std::size_t n,
                   float momentum, float lr);

}  // namespace avx2
#endif

}  // namespace arcnn::simd
