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

// Independent reference implementations used as test oracles. These are
// written straight from the defining sums with no shared code paths.

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "arcnn/model.hpp"
#include "arcnn/nn/conv.hpp"
#include "arcnn/tensor.hpp"

namespace arcnn::testing {

template <typename T>
void fill_uniform(std::span<T> v, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  for (T& x : v) x = static_cast<T>(u(rng));
}

template <typename T>
Tensor<T> random_tensor(Shape s, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  Tensor<T> t(s);
  fill_uniform(t.data(), rng, lo, hi);
  return t;
}

template <typename T>
nn::ConvParams<T> random_layer(int n_in, int n_out, int f, int stride, int pad,
                               bool transposed, std::mt19937_64& rng) {
  auto p = nn::ConvParams<T>::make(n_in, n_out, f, stride, pad, transposed);
  fill_uniform(p.weights.data(), rng);
  fill_uniform(std::span<T>(p.biases), rng);
  return p;
}

/// out[o][y][x] = b[o] + sum w[o][c][i][j] in[c][y s - p + i][x s - p + j].
template <typename T>
Tensor<double> direct_conv(const Tensor<T>& in, const nn::ConvParams<T>& p) {
  const Shape s = in.shape();
  const int f = p.filter(), st = p.stride, pad = p.pad, co = p.out_channels();
  const int oh = (s.h + 2 * pad - f) / st + 1, ow = (s.w + 2 * pad - f) / st + 1;
  Tensor<double> out(Shape{s.n, co, oh, ow});
  for (int n = 0; n < s.n; ++n)
    for (int o = 0; o < co; ++o)
      for (int y = 0; y < oh; ++y)
        for (int x = 0; x < ow; ++x) {
          double acc = p.biases[o];
          for (int c = 0; c < s.c; ++c)
            for (int i = 0; i < f; ++i)
              for (int j = 0; j < f; ++j) {
                const int iy = y * st - pad + i, ix = x * st - pad + j;
                if (iy < 0 || ix < 0 || iy >= s.h || ix >= s.w) continue;
                acc += static_cast<double>(p.weights.at(o, c, i, j)) * in.at(n, c, iy, ix);
              }
          out.at(n, o, y, x) = acc;
        }
  return out;
}

/// Scatter form: in[c][y][x] w[c][o][i][j] lands on out[o][y s - p + i][x s - p + j].
template <typename T>
Tensor<double> direct_deconv(const Tensor<T>& in, const nn::ConvParams<T>& p) {
  const Shape s = in.shape();
  const int f = p.filter(), st = p.stride, pad = p.pad, co = p.out_channels();
  const int oh = st * (s.h - 1) + f - 2 * pad, ow = st * (s.w - 1) + f - 2 * pad;
  Tensor<double> out(Shape{s.n, co, oh, ow});
  for (int n = 0; n < s.n; ++n) {
    for (int o = 0; o < co; ++o)
      for (int y = 0; y < oh; ++y)
        for (int x = 0; x < ow; ++x) out.at(n, o, y, x) = p.biases[o];
    for (int c = 0; c < s.c; ++c)
      for (int y = 0; y < s.h; ++y)
        for (int x = 0; x < s.w; ++x)
          for (int o = 0; o < co; ++o)
            for (int i = 0; i < f; ++i)
              for (int j = 0; j < f; ++j) {
                const int oy = y * st - pad + i, ox = x * st - pad + j;
                if (oy < 0 || ox < 0 || oy >= oh || ox >= ow) continue;
                out.at(n, o, oy, ox) +=
                    static_cast<double>(p.weights.at(c, o, i, j)) * in.at(n, c, y, x);
              }
  }
  return out;
}

template <typename T>
double max_abs_diff(const Tensor<T>& a, const Tensor<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(static_cast<double>(a.ptr()[i]) - b.ptr()[i]));
  }
  return m;
}

/// Random weights, biases and slopes (slopes in [0, 0.5]) for a network.
template <typename T>
void randomize(Network<T>& net, std::mt19937_64& rng, double scale = 0.5) {
  for (auto& l : net.layers) {
    fill_uniform(l.weights.data(), rng, -scale, scale);
    fill_uniform(std::span<T>(l.biases), rng, -0.1, 0.1);
  }
  for (auto& a : net.activations) fill_uniform(std::span<T>(a.slopes), rng, 0.0, 0.5);
}

struct GradCheckResult {
  long checked = 0;
  long skipped = 0;  // every step size crossed a PReLU kink
  long failures = 0;
  double max_rel = 0.0;  // over entries whose magnitude exceeds the floor
  double max_abs = 0.0;
  std::string worst;
};

/// Compares analytic against central-difference gradients.
///
/// `eval` returns the loss at the current parameter values and a signature
/// of the sign pattern of every pre-activation. When the signature at x + h
/// or x - h differs from the one at x, the step crossed a PReLU kink and is
/// retried with h / 10, down to 1e-9.
///
/// Pass rule: |a - n| <= rel_tol * max(|a|, |n|) or |a - n| <= abs_floor.
struct LossEval {
  double loss;
  std::uint64_t signature;
};

inline GradCheckResult check_gradient(const std::vector<double*>& params,
                                      const std::vector<double>& analytic,
                                      const std::function<LossEval()>& eval,
                                      double rel_tol = 1e-5, double abs_floor = 1e-9) {
  GradCheckResult r;
  const std::uint64_t base = eval().signature;
  for (std::size_t k = 0; k < params.size(); ++k) {
    double* p = params[k];
    const double orig = *p;
    bool done = false;
    for (double h = 1e-5; h >= 1e-9 && !done; h /= 10) {
      *p = orig + h;
      const LossEval fp = eval();
      *p = orig - h;
      const LossEval fm = eval();
      *p = orig;
      if (fp.signature != base || fm.signature != base) continue;
      const double num = (fp.loss - fm.loss) / (2 * h);
      const double a = analytic[k];
      const double diff = std::abs(a - num);
      const double scale = std::max(std::abs(a), std::abs(num));
      const double rel = scale > 0 ? diff / scale : 0.0;
      ++r.checked;
      if (!(diff <= rel_tol * scale || diff <= abs_floor)) {
        ++r.failures;
        if (rel > r.max_rel) {
          r.worst = "param " + std::to_string(k) + ": analytic " + std::to_string(a) +
                    " numeric " + std::to_string(num);
        }
      }
      r.max_abs = std::max(r.max_abs, diff);
      if (scale > abs_floor) r.max_rel = std::max(r.max_rel, rel);
      done = true;
    }
    if (!done) ++r.skipped;
  }
  return r;
}

/// Sign signature of a forward cache's pre-activations (FNV over sign bits).
template <typename T>
std::uint64_t sign_signature(const ForwardCache<T>& cache) {
  std::uint64_t h = 1469598103934665603ull;
  for (const auto& t : cache.pre) {
    for (T v : t.data()) h = (h ^ static_cast<std::uint64_t>(v < 0)) * 1099511628211ull;
  }
  return h;
}

struct NetGradCheck {
  GradCheckResult params;
  GradCheckResult input;
};

/// End-to-end check of net_backward on L = <r, net(x)> with random x and r.
inline NetGradCheck check_network_gradients(Network<double>& net, Shape input_shape,
                                            std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Tensor<double> x = random_tensor<double>(input_shape, rng);
  ForwardCache<double> cache;
  const Tensor<double> y = net_forward(net, x, &cache);
  const Tensor<double> r = random_tensor<double>(y.shape(), rng);
  const NetGrads<double> g = net_backward(net, cache, r, true);

  auto eval = [&]() {
    ForwardCache<double> c;
    const Tensor<double> out = net_forward(net, x, &c);
    return LossEval{dot(out, r), sign_signature(c)};
  };

  NetGradCheck res;
  std::vector<double*> ptrs;
  std::vector<double> analytic;
  auto pb = net.blocks();
  const auto gb = g.blocks();
  for (std::size_t b = 0; b < pb.size(); ++b) {
    for (std::size_t i = 0; i < pb[b].values.size(); ++i) {
      ptrs.push_back(&pb[b].values[i]);
      analytic.push_back(gb[b].values[i]);
    }
  }
  res.params = check_gradient(ptrs, analytic, eval);

  ptrs.clear();
  analytic.clear();
  for (std::size_t i = 0; i < x.size(); ++i) {
    ptrs.push_back(x.ptr() + i);
    analytic.push_back(g.input.ptr()[i]);
  }
  res.input = check_gradient(ptrs, analytic, eval);
  return res;
}

}  // namespace arcnn::testing
