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

// AVX2/FMA kernels. This translation unit is compiled with -mavx2 -mfma and
// must only be entered after the dispatcher has checked CPU support.

#include <immintrin.h>

#include <algorithm>
#include <vector>

#include "arcnn/simd/kernels.hpp"

namespace arcnn::simd::avx2 {
namespace {

// Register block: 4 rows of A against 24 columns of B (12 accumulators).
constexpr int kMr = 4;
constexpr int kNr = 24;
// Cache blocks: a kc x 24 B panel stays in L1, an mc x kc A block in L2.
constexpr int kKc = 256;
constexpr int kMc = 128;
constexpr int kNc = 3072;

void pack_a(Op ta, const float* a, int lda, int i0, int mc, int p0, int kc,
            float alpha, float* buf) {
  for (int ir = 0; ir < mc; ir += kMr) {
    const int rows = std::min(kMr, mc - ir);
    float* dst = buf + static_cast<std::ptrdiff_t>(ir) * kc;
    if (ta == Op::kNoTrans) {
      for (int r = 0; r < kMr; ++r) {
        if (r < rows) {
          const float* src =
              a + static_cast<std::ptrdiff_t>(i0 + ir + r) * lda + p0;
          for (int p = 0; p < kc; ++p) dst[p * kMr + r] = alpha * src[p];
        } else {
          for (int p = 0; p < kc; ++p) dst[p * kMr + r] = 0.0f;
        }
      }
    } else {
      for (int p = 0; p < kc; ++p) {
        const float* src =
            a + static_cast<std::ptrdiff_t>(p0 + p) * lda + i0 + ir;
        int r = 0;
        for (; r < rows; ++r) dst[p * kMr + r] = alpha * src[r];
        for (; r < kMr; ++r) dst[p * kMr + r] = 0.0f;
      }
    }
  }
}

void pack_b(Op tb, const float* b, int ldb, int p0, int kc, int j0, int nc,
            float* buf) {
  for (int jr = 0; jr < nc; jr += kNr) {
    const int cols = std::min(kNr, nc - jr);
    float* dst = buf + static_cast<std::ptrdiff_t>(jr) * kc;
    if (tb == Op::kNoTrans) {
      for (int p = 0; p < kc; ++p) {
        const float* src =
            b + static_cast<std::ptrdiff_t>(p0 + p) * ldb + j0 + jr;
        float* d = dst + p * kNr;
        if (cols == kNr) {
          _mm256_storeu_ps(d, _mm256_loadu_ps(src));
          _mm256_storeu_ps(d + 8, _mm256_loadu_ps(src + 8));
          _mm256_storeu_ps(d + 16, _mm256_loadu_ps(src + 16));
        } else {
          int c = 0;
          for (; c < cols; ++c) d[c] = src[c];
          for (; c < kNr; ++c) d[c] = 0.0f;
        }
      }
    } else {
      for (int c = 0; c < kNr; ++c) {
        if (c < cols) {
          const float* src =
              b + static_cast<std::ptrdiff_t>(j0 + jr + c) * ldb + p0;
          for (int p = 0; p < kc; ++p) dst[p * kNr + c] = src[p];
        } else {
          for (int p = 0; p < kc; ++p) dst[p * kNr + c] = 0.0f;
        }
      }
    }
  }
}

// C[0:4, 0:24] += A_panel * B_panel over kc steps.
inline void micro_kernel(int kc, const float* a, const float* b, float* c,
                         int ldc) {
  __m256 c00 = _mm256_setzero_ps(), c01 = _mm256_setzero_ps(),
         c02 = _mm256_setzero_ps();
  __m256 c10 = _mm256_setzero_ps(), c11 = _mm256_setzero_ps(),
         c12 = _mm256_setzero_ps();
  __m256 c20 = _mm256_setzero_ps(), c21 = _mm256_setzero_ps(),
         c22 = _mm256_setzero_ps();
  __m256 c30 = _mm256_setzero_ps(), c31 = _mm256_setzero_ps(),
         c32 = _mm256_setzero_ps();
  for (int p = 0; p < kc; ++p) {
    const __m256 b0 = _mm256_loadu_ps(b);
    const __m256 b1 = _mm256_loadu_ps(b + 8);
    const __m256 b2 = _mm256_loadu_ps(b + 16);
    __m256 av = _mm256_broadcast_ss(a);
    c00 = _mm256_fmadd_ps(av, b0, c00);
    c01 = _mm256_fmadd_ps(av, b1, c01);
    c02 = _mm256_fmadd_ps(av, b2, c02);
    av = _mm256_broadcast_ss(a + 1);
    c10 = _mm256_fmadd_ps(av, b0, c10);
    c11 = _mm256_fmadd_ps(av, b1, c11);
    c12 = _mm256_fmadd_ps(av, b2, c12);
    av = _mm256_broadcast_ss(a + 2);
    c20 = _mm256_fmadd_ps(av, b0, c20);
    c21 = _mm256_fmadd_ps(av, b1, c21);
    c22 = _mm256_fmadd_ps(av, b2, c22);
    av = _mm256_broadcast_ss(a + 3);
    c30 = _mm256_fmadd_ps(av, b0, c30);
    c31 = _mm256_fmadd_ps(av, b1, c31);
    c32 = _mm256_fmadd_ps(av, b2, c32);
    a += kMr;
    b += kNr;
  }
  auto accumulate = [](float* row, __m256 x0, __m256 x1, __m256 x2) {
    _mm256_storeu_ps(row, _mm256_add_ps(_mm256_loadu_ps(row), x0));
    _mm256_storeu_ps(row + 8, _mm256_add_ps(_mm256_loadu_ps(row + 8), x1));
    _mm256_storeu_ps(row + 16, _mm256_add_ps(_mm256_loadu_ps(row + 16), x2));
  };
  accumulate(c, c00, c01, c02);
  accumulate(c + ldc, c10, c11, c12);
  accumulate(c + 2 * ldc, c20, c21, c22);
  accumulate(c + 3 * ldc, c30, c31, c32);
}

double hsum(__m256 v) {
  __m128 lo = _mm256_castps256_ps128(v);
  __m128 hi = _mm256_extractf128_ps(v, 1);
  __m128d a = _mm_add_pd(_mm_cvtps_pd(lo), _mm_cvtps_pd(_mm_movehl_ps(lo, lo)));
  __m128d b = _mm_add_pd(_mm_cvtps_pd(hi), _mm_cvtps_pd(_mm_movehl_ps(hi, hi)));
  __m128d s = _mm_add_pd(a, b);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

void gemm(Op ta, Op tb, int m, int n, int k, float alpha, const float* a,
          int lda, const float* b, int ldb, float beta, float* c, int ldc) {
  for (int i = 0; i < m; ++i) {
    float* row = c + static_cast<std::ptrdiff_t>(i) * ldc;
    if (beta == 0.0f) {
      std::fill(row, row + n, 0.0f);
    } else if (beta != 1.0f) {
      for (int j = 0; j < n; ++j) row[j] *= beta;
    }
  }
  if (alpha == 0.0f || k == 0 || m == 0 || n == 0) return;

  thread_local std::vector<float> a_buf;
  thread_local std::vector<float> b_buf;
  a_buf.resize(static_cast<std::size_t>(kMc) * kKc);
  b_buf.resize(static_cast<std::size_t>(kNc) * kKc);
  alignas(32) float edge[kMr * kNr];

  for (int jc = 0; jc < n; jc += kNc) {
    const int nc = std::min(kNc, n - jc);
    for (int pc = 0; pc < k; pc += kKc) {
      const int kc = std::min(kKc, k - pc);
      pack_b(tb, b, ldb, pc, kc, jc, nc, b_buf.data());
      for (int ic = 0; ic < m; ic += kMc) {
        const int mc = std::min(kMc, m - ic);
        pack_a(ta, a, lda, ic, mc, pc, kc, alpha, a_buf.data());
        for (int jr = 0; jr < nc; jr += kNr) {
          const int cols = std::min(kNr, nc - jr);
          const float* bp = b_buf.data() + static_cast<std::ptrdiff_t>(jr) * kc;
          for (int ir = 0; ir < mc; ir += kMr) {
            const int rows = std::min(kMr, mc - ir);
            const float* ap =
                a_buf.data() + static_cast<std::ptrdiff_t>(ir) * kc;
            float* cp = c + static_cast<std::ptrdiff_t>(ic + ir) * ldc + jc + jr;
            if (rows == kMr && cols == kNr) {
              micro_kernel(kc, ap, bp, cp, ldc);
            } else {
              std::fill(std::begin(edge), std::end(edge), 0.0f);
              micro_kernel(kc, ap, bp, edge, kNr);
              for (int r = 0; r < rows; ++r) {
                for (int j = 0; j < cols; ++j) {
                  cp[static_cast<std::ptrdiff_t>(r) * ldc + j] +=
                      edge[r * kNr + j];
                }
              }
            }
          }
        }
      }
    }
  }
}

void prelu_forward(const float* x, std::size_t n, float slope, float* y) {
  const __m256 zero = _mm256_setzero_ps();
  const __m256 a = _mm256_set1_ps(slope);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 v = _mm256_loadu_ps(x + i);
    const __m256 r = _mm256_add_ps(
        _mm256_max_ps(v, zero), _mm256_mul_ps(a, _mm256_min_ps(v, zero)));
    _mm256_storeu_ps(y + i, r);
  }
  for (; i < n; ++i) {
    y[i] = std::max(x[i], 0.0f) + slope * std::min(x[i], 0.0f);
  }
}

double prelu_backward(const float* x, const float* g, std::size_t n,
                      float slope, float* gx) {
  const __m256 zero = _mm256_setzero_ps();
  const __m256 one = _mm256_set1_ps(1.0f);
  const __m256 a = _mm256_set1_ps(slope);
  __m256 acc = _mm256_setzero_ps();
  std::size_t i = 0;
  double total = 0.0;
  for (; i + 8 <= n; i += 8) {
    const __m256 xv = _mm256_loadu_ps(x + i);
    const __m256 gv = _mm256_loadu_ps(g + i);
    const __m256 neg = _mm256_cmp_ps(xv, zero, _CMP_LT_OQ);
    _mm256_storeu_ps(gx + i, _mm256_mul_ps(gv, _mm256_blendv_ps(one, a, neg)));
    acc = _mm256_add_ps(acc, _mm256_and_ps(neg, _mm256_mul_ps(gv, xv)));
    // Flush the float lanes periodically so long planes keep double accuracy.
    if ((i & 1023) == 1016) {
      total += hsum(acc);
      acc = _mm256_setzero_ps();
    }
  }
  total += hsum(acc);
  for (; i < n; ++i) {
    if (x[i] < 0.0f) {
      gx[i] = g[i] * slope;
      total += static_cast<double>(g[i]) * static_cast<double>(x[i]);
    } else {
      gx[i] = g[i];
    }
  }
  return total;
}

void momentum_step(float* p, float* v, const float* g, std::size_t n,
                   float momentum, float lr) {
  const __m256 mu = _mm256_set1_ps(momentum);
  const __m256 eta = _mm256_set1_ps(lr);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 vv = _mm256_sub_ps(_mm256_mul_ps(mu, _mm256_loadu_ps(v + i)),
                                    _mm256_mul_ps(eta, _mm256_loadu_ps(g + i)));
    _mm256_storeu_ps(v + i, vv);
    _mm256_storeu_ps(p + i, _mm256_add_ps(_mm256_loadu_ps(p + i), vv));
  }
  for (; i < n; ++i) {
    const float t = momentum * v[i];
    const float u = lr * g[i];
    v[i] = t - u;
    p[i] += v[i];
  }
}

}  // namespace arcnn::simd::avx2
