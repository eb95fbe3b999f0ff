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

#include <atomic>
#include <cstdlib>

#include <fmt/format.h>

#include "arcnn/error.hpp"
#include "arcnn/simd/kernels.hpp"

namespace arcnn::simd {
namespace {

struct FloatKernels {
  void (*gemm)(Op, Op, int, int, int, float, const float*, int, const float*,
               int, float, float*, int);
  void (*prelu_forward)(const float*, std::size_t, float, float*);
  double (*prelu_backward)(const float*, const float*, std::size_t, float,
                           float*);
  void (*momentum_step)(float*, float*, const float*, std::size_t, float,
                        float);
};

constexpr FloatKernels kScalarKernels{
    &scalar::gemm<float>, &scalar::prelu_forward<float>,
    &scalar::prelu_backward<float>, &scalar::momentum_step<float>};

#if defined(ARCNN_HAVE_AVX2)
constexpr FloatKernels kAvx2Kernels{&avx2::gemm, &avx2::prelu_forward,
                                    &avx2::prelu_backward,
                                    &avx2::momentum_step};
#endif

const FloatKernels& kernels_for(Isa isa) {
#if defined(ARCNN_HAVE_AVX2)
  if (isa == Isa::kAvx2) return kAvx2Kernels;
#endif
  (void)isa;
  return kScalarKernels;
}

Isa initial_isa() {
  Isa isa = detected_isa();
  if (const char* env = std::getenv("ARCNN_ISA")) {
    if (auto requested = parse_isa(env); requested && isa_supported(*requested)) {
      isa = *requested;
    }
  }
  return isa;
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

const FloatKernels& current() { return kernels_for(active().load()); }

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
  }
  return "unknown";
}

std::optional<Isa> parse_isa(std::string_view name) {
  if (name == "scalar") return Isa::kScalar;
  if (name == "avx2") return Isa::kAvx2;
  return std::nullopt;
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(ARCNN_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

Isa detected_isa() {
  return isa_supported(Isa::kAvx2) ? Isa::kAvx2 : Isa::kScalar;
}

Isa active_isa() { return active().load(); }

void set_active_isa(Isa isa) {
  if (!isa_supported(isa)) {
    throw ConfigError(
        fmt::format("ISA '{}' is not available on this build/CPU", isa_name(isa)));
  }
  active().store(isa);
}

void gemm(Op ta, Op tb, int m, int n, int k, float alpha, const float* a,
          int lda, const float* b, int ldb, float beta, float* c, int ldc) {
  current().gemm(ta, tb, m, n, k, alpha, a, lda, b, ldb, beta, c, ldc);
}

void gemm(Op ta, Op tb, int m, int n, int k, double alpha, const double* a,
          int lda, const double* b, int ldb, double beta, double* c, int ldc) {
  scalar::gemm<double>(ta, tb, m, n, k, alpha, a, lda, b, ldb, beta, c, ldc);
}

void prelu_forward(const float* x, std::size_t n, float slope, float* y) {
  current().prelu_forward(x, n, slope, y);
}

void prelu_forward(const double* x, std::size_t n, double slope, double* y) {
  scalar::prelu_forward<double>(x, n, slope, y);
}

double prelu_backward(const float* x, const float* g, std::size_t n,
                      float slope, float* gx) {
  return current().prelu_backward(x, g, n, slope, gx);
}

double prelu_backward(const double* x, const double* g, std::size_t n,
                      double slope, double* gx) {
  return scalar::prelu_backward<double>(x, g, n, slope, gx);
}

void momentum_step(float* p, float* v, const float* g, std::size_t n,
                   float momentum, float lr) {
  current().momentum_step(p, v, g, n, momentum, lr);
}

void momentum_step(double* p, double* v, const double* g, std::size_t n,
                   double momentum, double lr) {
  scalar::momentum_step<double>(p, v, g, n, momentum, lr);
}

}  // namespace arcnn::simd
