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

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <tuple>
#include <vector>

#include "arcnn/model.hpp"
#include "arcnn/simd/kernels.hpp"
#include "support/oracles.hpp"

namespace arcnn {
namespace {

using simd::Isa;
using simd::Op;

std::vector<float> random_vec(std::size_t n, std::mt19937_64& rng) {
  std::vector<float> v(n);
  testing::fill_uniform(std::span<float>(v), rng);
  return v;
}

TEST(Dispatch, ParsesIsaNames) {
  EXPECT_EQ(simd::parse_isa("scalar"), Isa::kScalar);
  EXPECT_EQ(simd::parse_isa("avx2"), Isa::kAvx2);
  EXPECT_FALSE(simd::parse_isa("neon").has_value());
  EXPECT_EQ(simd::isa_name(Isa::kScalar), "scalar");
  EXPECT_TRUE(simd::isa_supported(Isa::kScalar));
}

TEST(Dispatch, ScopedIsaRestores) {
  const Isa before = simd::active_isa();
  {
    simd::ScopedIsa s(Isa::kScalar);
    EXPECT_EQ(simd::active_isa(), Isa::kScalar);
  }
  EXPECT_EQ(simd::active_isa(), before);
}

TEST(ScalarGemm, MatchesNaiveProductForAllTransposes) {
  std::mt19937_64 rng(3);
  const int m = 5, n = 7, k = 4;
  for (Op ta : {Op::kNoTrans, Op::kTrans}) {
    for (Op tb : {Op::kNoTrans, Op::kTrans}) {
      const auto a = random_vec(m * k, rng), b = random_vec(k * n, rng);
      auto c = random_vec(m * n, rng);
      const auto c0 = c;
      const int lda = ta == Op::kNoTrans ? k : m;
      const int ldb = tb == Op::kNoTrans ? n : k;
      simd::scalar::gemm<float>(ta, tb, m, n, k, 2.0f, a.data(), lda, b.data(), ldb, 0.5f,
                                c.data(), n);
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) {
          double acc = 0;
          for (int p = 0; p < k; ++p) {
            const float av = ta == Op::kNoTrans ? a[i * lda + p] : a[p * lda + i];
            const float bv = tb == Op::kNoTrans ? b[p * ldb + j] : b[j * ldb + p];
            acc += static_cast<double>(av) * bv;
          }
          EXPECT_NEAR(c[i * n + j], 2.0 * acc + 0.5 * c0[i * n + j], 1e-5);
        }
      }
    }
  }
}

TEST(ScalarGemm, BetaZeroIgnoresGarbage) {
  std::vector<float> a{1, 2}, b{3, 4};
  std::vector<float> c{std::nanf("")};
  simd::scalar::gemm<float>(Op::kNoTrans, Op::kNoTrans, 1, 1, 2, 1.0f, a.data(), 2, b.data(), 1,
                            0.0f, c.data(), 1);
  EXPECT_FLOAT_EQ(c[0], 11.0f);
}

#if defined(ARCNN_HAVE_AVX2)

class Avx2Equivalence : public ::testing::Test {
 protected:
  void SetUp() override {
    if (!simd::isa_supported(Isa::kAvx2)) GTEST_SKIP() << "CPU lacks AVX2/FMA";
  }
};

// Shapes cover micro-kernel edges (4 x 24 tiles), the KC/MC/NC blocking
// boundaries and degenerate sizes.
class Avx2Gemm : public Avx2Equivalence,
                 public ::testing::WithParamInterface<std::tuple<int, int, int>> {};

TEST_P(Avx2Gemm, MatchesScalarWithinRoundoff) {
  const auto [m, n, k] = GetParam();
  std::mt19937_64 rng(static_cast<std::uint64_t>(m * 131 + n * 7 + k));
  for (Op ta : {Op::kNoTrans, Op::kTrans}) {
    for (Op tb : {Op::kNoTrans, Op::kTrans}) {
      for (float beta : {0.0f, 1.0f, -0.5f}) {
        const auto a = random_vec(static_cast<std::size_t>(m) * k, rng);
        const auto b = random_vec(static_cast<std::size_t>(k) * n, rng);
        const auto c0 = random_vec(static_cast<std::size_t>(m) * n, rng);
        auto cs = c0, cv = c0;
        const int lda = ta == Op::kNoTrans ? k : m;
        const int ldb = tb == Op::kNoTrans ? n : k;
        simd::scalar::gemm<float>(ta, tb, m, n, k, 1.5f, a.data(), lda, b.data(), ldb, beta,
                                  cs.data(), n);
        simd::avx2::gemm(ta, tb, m, n, k, 1.5f, a.data(), lda, b.data(), ldb, beta, cv.data(),
                         n);
        for (int i = 0; i < m; ++i) {
          for (int j = 0; j < n; ++j) {
            double bound = std::abs(beta * c0[i * n + j]);
            for (int p = 0; p < k; ++p) {
              const float av = ta == Op::kNoTrans ? a[i * lda + p] : a[p * lda + i];
              const float bv = tb == Op::kNoTrans ? b[p * ldb + j] : b[j * ldb + p];
              bound += 1.5 * std::abs(av * bv);
            }
            ASSERT_NEAR(cv[i * n + j], cs[i * n + j], 1e-6 * (bound + 1.0) * std::sqrt(k + 1.0))
                << "m=" << m << " n=" << n << " k=" << k << " at " << i << "," << j;
          }
        }
      }
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Shapes, Avx2Gemm,
                         ::testing::Values(std::make_tuple(1, 1, 1), std::make_tuple(3, 5, 2),
                                           std::make_tuple(4, 24, 8), std::make_tuple(5, 25, 9),
                                           std::make_tuple(16, 576, 81),
                                           std::make_tuple(33, 70, 300),
                                           std::make_tuple(130, 49, 257),
                                           std::make_tuple(8, 3100, 17)));

TEST_F(Avx2Equivalence, PreluForwardIsBitIdentical) {
  std::mt19937_64 rng(11);
  for (std::size_t n : {1u, 7u, 8u, 9u, 1000u, 4099u}) {
    const auto x = random_vec(n, rng);
    std::vector<float> ys(n), yv(n);
    simd::scalar::prelu_forward<float>(x.data(), n, 0.25f, ys.data());
    simd::avx2::prelu_forward(x.data(), n, 0.25f, yv.data());
    EXPECT_EQ(ys, yv) << "n=" << n;
  }
}

TEST_F(Avx2Equivalence, PreluBackwardMatches) {
  std::mt19937_64 rng(12);
  for (std::size_t n : {1u, 15u, 16u, 17u, 5000u}) {
    const auto x = random_vec(n, rng), g = random_vec(n, rng);
    std::vector<float> gs(n), gv(n);
    const double ss = simd::scalar::prelu_backward<float>(x.data(), g.data(), n, 0.1f, gs.data());
    const double sv = simd::avx2::prelu_backward(x.data(), g.data(), n, 0.1f, gv.data());
    EXPECT_EQ(gs, gv) << "n=" << n;
    EXPECT_NEAR(ss, sv, 1e-5 * (1.0 + std::abs(ss)) * std::sqrt(static_cast<double>(n)));
  }
}

TEST_F(Avx2Equivalence, PreluZeroTakesPositiveBranch) {
  const std::vector<float> x{0.0f, -0.0f}, g{1.0f, 1.0f};
  std::vector<float> gx(2);
  const double ds = simd::avx2::prelu_backward(x.data(), g.data(), 2, 0.3f, gx.data());
  EXPECT_EQ(gx[0], 1.0f);
  EXPECT_EQ(gx[1], 1.0f);
  EXPECT_EQ(ds, 0.0);
}

TEST_F(Avx2Equivalence, MomentumStepIsBitIdentical) {
  std::mt19937_64 rng(13);
  for (std::size_t n : {1u, 8u, 13u, 1024u, 1031u}) {
    auto p = random_vec(n, rng), v = random_vec(n, rng);
    const auto g = random_vec(n, rng);
    auto p2 = p, v2 = v;
    simd::scalar::momentum_step<float>(p.data(), v.data(), g.data(), n, 0.9f, 5e-4f);
    simd::avx2::momentum_step(p2.data(), v2.data(), g.data(), n, 0.9f, 5e-4f);
    EXPECT_EQ(p, p2);
    EXPECT_EQ(v, v2);
  }
}

TEST_F(Avx2Equivalence, NetworkForwardAndBackwardAgree) {
  std::mt19937_64 rng(14);
  auto spec = netspec::parse_arch("16(9)-8(1)-8(5)-16(1)-1[9]-s2");
  auto net = Network<float>::make(spec);
  testing::randomize(net, rng, 0.2);
  const auto x = testing::random_tensor<float>(Shape{3, 1, 30, 27}, rng, 0.0, 1.0);

  ForwardCache<float> cs, cv;
  Tensor<float> ys, yv;
  NetGrads<float> gs, gv;
  {
    simd::ScopedIsa isa(Isa::kScalar);
    ys = net_forward(net, x, &cs);
    gs = net_backward(net, cs, ys, true);
  }
  {
    simd::ScopedIsa isa(Isa::kAvx2);
    yv = net_forward(net, x, &cv);
    gv = net_backward(net, cv, ys, true);
  }
  ASSERT_EQ(ys.shape(), yv.shape());
  double worst = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    worst = std::max(worst, std::abs(double(ys.ptr()[i]) - yv.ptr()[i]));
    scale = std::max(scale, std::abs(double(ys.ptr()[i])));
  }
  EXPECT_LE(worst, 1e-5 * (1.0 + scale));
  const auto bs = gs.blocks(), bv = gv.blocks();
  for (std::size_t b = 0; b < bs.size(); ++b) {
    double w = 0.0, s = 0.0;
    for (std::size_t i = 0; i < bs[b].values.size(); ++i) {
      w = std::max(w, std::abs(double(bs[b].values[i]) - bv[b].values[i]));
      s = std::max(s, std::abs(double(bs[b].values[i])));
    }
    EXPECT_LE(w, 1e-4 * (1.0 + s)) << "block " << b;
  }
}

#endif  // ARCNN_HAVE_AVX2

}  // namespace
}  // namespace arcnn
