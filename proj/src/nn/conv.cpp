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

#include "arcnn/nn/conv.hpp"

#include <algorithm>
#include <cstring>

#include <fmt/format.h>

#include "arcnn/error.hpp"
#include "arcnn/simd/kernels.hpp"

namespace arcnn::nn {

using simd::Op;

int conv_output_extent(int n, int f, int stride, int pad) {
  return (n + 2 * pad - f) / stride + 1;
}

int deconv_output_extent(int n, int f, int stride, int pad) {
  return stride * (n - 1) + f - 2 * pad;
}

namespace {

// The im2col/col2im pair maps between an "image" side (channels planes of
// img_h x img_w, zero padded by pad) and a "column" side of col_h x col_w
// filter positions taken with the given stride. A column matrix holds
// channels * f * f rows and one column per position.
struct Geometry {
  int channels;
  int img_h, img_w;
  int f, stride, pad;
  int col_h, col_w;

  int rows() const { return channels * f * f; }
};

// Column buffers are tiled over column-side rows so large images never
// materialize the full matrix.
constexpr std::size_t kMaxColumnValues = std::size_t{1} << 21;

int rows_per_tile(const Geometry& g) {
  const std::size_t per_row = static_cast<std::size_t>(g.rows()) * g.col_w;
  const auto rows = static_cast<int>(kMaxColumnValues / std::max<std::size_t>(per_row, 1));
  return std::clamp(rows, 1, g.col_h);
}

// [lo, hi) range of column-side x whose tap kj lands inside the image.
std::pair<int, int> valid_span(const Geometry& g, int kj) {
  const int offset = g.pad - kj;  // ix = x * s - offset
  const int lo = offset <= 0 ? 0 : (offset + g.stride - 1) / g.stride;
  const int last = g.img_w - 1 + offset;
  const int hi = last < 0 ? 0 : std::min(g.col_w, last / g.stride + 1);
  return {std::min(lo, hi), hi};
}

template <typename T>
void im2col(const T* img, const Geometry& g, int r0, int r1, T* col) {
  const int tile = (r1 - r0) * g.col_w;
  for (int c = 0; c < g.channels; ++c) {
    const T* plane = img + static_cast<std::ptrdiff_t>(c) * g.img_h * g.img_w;
    for (int ki = 0; ki < g.f; ++ki) {
      for (int kj = 0; kj < g.f; ++kj) {
        T* dst = col + static_cast<std::ptrdiff_t>((c * g.f + ki) * g.f + kj) * tile;
        const auto [lo, hi] = valid_span(g, kj);
        for (int y = r0; y < r1; ++y) {
          T* d = dst + static_cast<std::ptrdiff_t>(y - r0) * g.col_w;
          const int iy = y * g.stride - g.pad + ki;
          if (iy < 0 || iy >= g.img_h) {
            std::fill(d, d + g.col_w, T(0));
            continue;
          }
          std::fill(d, d + lo, T(0));
          std::fill(d + hi, d + g.col_w, T(0));
          const T* src = plane + static_cast<std::ptrdiff_t>(iy) * g.img_w + kj - g.pad;
          if (g.stride == 1) {
            std::copy(src + lo, src + hi, d + lo);
          } else {
            for (int x = lo; x < hi; ++x) d[x] = src[x * g.stride];
          }
        }
      }
    }
  }
}

template <typename T>
void col2im(const T* col, const Geometry& g, int r0, int r1, T* img) {
  const int tile = (r1 - r0) * g.col_w;
  for (int c = 0; c < g.channels; ++c) {
    T* plane = img + static_cast<std::ptrdiff_t>(c) * g.img_h * g.img_w;
    for (int ki = 0; ki < g.f; ++ki) {
      for (int kj = 0; kj < g.f; ++kj) {
        const T* src = col + static_cast<std::ptrdiff_t>((c * g.f + ki) * g.f + kj) * tile;
        const auto [lo, hi] = valid_span(g, kj);
        for (int y = r0; y < r1; ++y) {
          const int iy = y * g.stride - g.pad + ki;
          if (iy < 0 || iy >= g.img_h) continue;
          const T* s = src + static_cast<std::ptrdiff_t>(y - r0) * g.col_w;
          T* d = plane + static_cast<std::ptrdiff_t>(iy) * g.img_w + kj - g.pad;
          if (g.stride == 1) {
            for (int x = lo; x < hi; ++x) d[x] += s[x];
          } else {
            for (int x = lo; x < hi; ++x) d[x * g.stride] += s[x];
          }
        }
      }
    }
  }
}

template <typename T, int Slot>
std::vector<T>& workspace(std::size_t n) {
  thread_local std::vector<T> buf;
  if (buf.size() < n) buf.resize(n);
  return buf;
}

bool is_pointwise(int f, int stride, int pad) {
  return f == 1 && stride == 1 && pad == 0;
}

template <typename T>
void add_bias(Tensor<T>& out, const std::vector<T>& biases) {
  const Shape& s = out.shape();
  for (int n = 0; n < s.n; ++n) {
    for (int c = 0; c < s.c; ++c) {
      auto plane = out.plane(n, c);
      const T b = biases[c];
      for (auto& v : plane) v += b;
    }
  }
}

template <typename T>
std::vector<T> bias_grad(const Tensor<T>& grad_out) {
  const Shape& s = grad_out.shape();
  std::vector<double> acc(s.c, 0.0);
  for (int n = 0; n < s.n; ++n) {
    for (int c = 0; c < s.c; ++c) {
      for (T v : grad_out.plane(n, c)) acc[c] += v;
    }
  }
  return std::vector<T>(acc.begin(), acc.end());
}

template <typename T>
void check_grad_shape(const Tensor<T>& grad_out, const Shape& expected,
                      const char* what) {
  if (grad_out.shape() != expected) {
    throw ShapeError(fmt::format("{} gradient has shape {}, expected {}", what,
                                 to_string(grad_out.shape()),
                                 to_string(expected)));
  }
}

template <typename T>
Shape conv_out_shape(const Tensor<T>& input, const ConvParams<T>& p,
                     const char* what) {
  p.validate();
  const Shape& s = input.shape();
  if (s.c != p.in_channels()) {
    throw ShapeError(fmt::format(
        "{} input has {} channels but the layer expects {}", what, s.c,
        p.in_channels()));
  }
  if (p.transposed) {
    const int h = deconv_output_extent(s.h, p.filter(), p.stride, p.pad);
    const int w = deconv_output_extent(s.w, p.filter(), p.stride, p.pad);
    if (h < 1 || w < 1) {
      throw ShapeError(fmt::format(
          "{} of a {}x{} input with f={} s={} p={} has non-positive output size",
          what, s.h, s.w, p.filter(), p.stride, p.pad));
    }
    return Shape{s.n, p.out_channels(), h, w};
  }
  if (s.h + 2 * p.pad < p.filter() || s.w + 2 * p.pad < p.filter()) {
    throw ShapeError(fmt::format("{} input {}x{} is smaller than the {}x{} filter "
                                 "with pad {}",
                                 what, s.h, s.w, p.filter(), p.filter(), p.pad));
  }
  return Shape{s.n, p.out_channels(),
               conv_output_extent(s.h, p.filter(), p.stride, p.pad),
               conv_output_extent(s.w, p.filter(), p.stride, p.pad)};
}

}  // namespace

template <typename T>
ConvParams<T> ConvParams<T>::make(int n_in, int n_out, int f, int stride,
                                  int pad, bool transposed) {
  const Shape ws = transposed ? Shape{n_in, n_out, f, f} : Shape{n_out, n_in, f, f};
  ConvParams p{Tensor<T>(ws), std::vector<T>(n_out, T(0)), stride, pad,
               transposed};
  p.validate();
  return p;
}

template <typename T>
void ConvParams<T>::validate() const {
  const Shape& s = weights.shape();
  if (weights.empty() || s.h != s.w) {
    throw ShapeError(fmt::format("layer weights must be square filters, got {}",
                                 to_string(s)));
  }
  if (static_cast<int>(biases.size()) != out_channels()) {
    throw ShapeError(fmt::format("layer has {} output channels but {} biases",
                                 out_channels(), biases.size()));
  }
  if (stride < 1 || pad < 0) {
    throw ShapeError(fmt::format("invalid stride {} / pad {}", stride, pad));
  }
}

template <typename T>
Tensor<T> conv_forward(const Tensor<T>& input, const ConvParams<T>& params) {
  if (params.transposed) throw ShapeError("conv_forward given transposed params");
  const Shape os = conv_out_shape(input, params, "conv");
  const Shape& is = input.shape();
  Tensor<T> out(os);
  add_bias(out, params.biases);

  const int f = params.filter();
  const int ci = is.c;
  const int co = os.c;
  const int in_plane = is.h * is.w;
  const int out_plane = os.h * os.w;
  const T* w = params.weights.ptr();

  if (is_pointwise(f, params.stride, params.pad)) {
    for (int n = 0; n < is.n; ++n) {
      simd::gemm(Op::kNoTrans, Op::kNoTrans, co, in_plane, ci, T(1), w, ci,
                 input.sample(n).data(), in_plane, T(1), out.sample(n).data(),
                 out_plane);
    }
    return out;
  }

  const Geometry g{ci, is.h, is.w, f, params.stride, params.pad, os.h, os.w};
  const int k = g.rows();
  const int tile_rows = rows_per_tile(g);
  auto& col = workspace<T, 0>(static_cast<std::size_t>(k) * tile_rows * os.w);
  for (int n = 0; n < is.n; ++n) {
    const T* x = input.sample(n).data();
    T* o = out.sample(n).data();
    for (int r0 = 0; r0 < os.h; r0 += tile_rows) {
      const int r1 = std::min(os.h, r0 + tile_rows);
      const int cols = (r1 - r0) * os.w;
      im2col(x, g, r0, r1, col.data());
      simd::gemm(Op::kNoTrans, Op::kNoTrans, co, cols, k, T(1), w, k,
                 col.data(), cols, T(1), o + r0 * os.w, out_plane);
    }
  }
  return out;
}

template <typename T>
ConvGrads<T> conv_backward(const Tensor<T>& input, const ConvParams<T>& params,
                           const Tensor<T>& grad_out, bool need_input_grad) {
  if (params.transposed) throw ShapeError("conv_backward given transposed params");
  const Shape os = conv_out_shape(input, params, "conv");
  check_grad_shape(grad_out, os, "conv output");
  const Shape& is = input.shape();

  ConvGrads<T> grads;
  grads.weights = Tensor<T>(params.weights.shape());
  grads.biases = bias_grad(grad_out);
  if (need_input_grad) grads.input = Tensor<T>(is);

  const int f = params.filter();
  const int ci = is.c;
  const int co = os.c;
  const int in_plane = is.h * is.w;
  const int out_plane = os.h * os.w;
  const T* w = params.weights.ptr();
  T* gw = grads.weights.ptr();

  if (is_pointwise(f, params.stride, params.pad)) {
    for (int n = 0; n < is.n; ++n) {
      const T* go = grad_out.sample(n).data();
      simd::gemm(Op::kNoTrans, Op::kTrans, co, ci, in_plane, T(1), go,
                 out_plane, input.sample(n).data(), in_plane, T(1), gw, ci);
      if (need_input_grad) {
        simd::gemm(Op::kTrans, Op::kNoTrans, ci, in_plane, co, T(1), w, ci, go,
                   out_plane, T(0), grads.input.sample(n).data(), in_plane);
      }
    }
    return grads;
  }

  const Geometry g{ci, is.h, is.w, f, params.stride, params.pad, os.h, os.w};
  const int k = g.rows();
  const int tile_rows = rows_per_tile(g);
  const std::size_t tile_values = static_cast<std::size_t>(k) * tile_rows * os.w;
  auto& col = workspace<T, 0>(tile_values);
  auto& dcol = workspace<T, 1>(tile_values);
  for (int n = 0; n < is.n; ++n) {
    const T* x = input.sample(n).data();
    const T* go = grad_out.sample(n).data();
    for (int r0 = 0; r0 < os.h; r0 += tile_rows) {
      const int r1 = std::min(os.h, r0 + tile_rows);
      const int cols = (r1 - r0) * os.w;
      im2col(x, g, r0, r1, col.data());
      simd::gemm(Op::kNoTrans, Op::kTrans, co, k, cols, T(1), go + r0 * os.w,
                 out_plane, col.data(), cols, T(1), gw, k);
      if (need_input_grad) {
        simd::gemm(Op::kTrans, Op::kNoTrans, k, cols, co, T(1), w, k,
                   go + r0 * os.w, out_plane, T(0), dcol.data(), cols);
        col2im(dcol.data(), g, r0, r1, grads.input.sample(n).data());
      }
    }
  }
  return grads;
}

template <typename T>
Tensor<T> deconv_forward(const Tensor<T>& input, const ConvParams<T>& params) {
  if (!params.transposed) throw ShapeError("deconv_forward given conv params");
  const Shape os = conv_out_shape(input, params, "deconv");
  const Shape& is = input.shape();
  Tensor<T> out(os);

  const int f = params.filter();
  const int ci = is.c;
  const int co = os.c;
  const int in_plane = is.h * is.w;
  const T* w = params.weights.ptr();

  if (is_pointwise(f, params.stride, params.pad)) {
    for (int n = 0; n < is.n; ++n) {
      simd::gemm(Op::kTrans, Op::kNoTrans, co, in_plane, ci, T(1), w, co,
                 input.sample(n).data(), in_plane, T(0), out.sample(n).data(),
                 in_plane);
    }
    add_bias(out, params.biases);
    return out;
  }

  const Geometry g{co, os.h, os.w, f, params.stride, params.pad, is.h, is.w};
  const int k = g.rows();
  const int tile_rows = rows_per_tile(g);
  auto& col = workspace<T, 0>(static_cast<std::size_t>(k) * tile_rows * is.w);
  for (int n = 0; n < is.n; ++n) {
    const T* x = input.sample(n).data();
    T* o = out.sample(n).data();
    for (int r0 = 0; r0 < is.h; r0 += tile_rows) {
      const int r1 = std::min(is.h, r0 + tile_rows);
      const int cols = (r1 - r0) * is.w;
      simd::gemm(Op::kTrans, Op::kNoTrans, k, cols, ci, T(1), w, k,
                 x + r0 * is.w, in_plane, T(0), col.data(), cols);
      col2im(col.data(), g, r0, r1, o);
    }
  }
  add_bias(out, params.biases);
  return out;
}

template <typename T>
ConvGrads<T> deconv_backward(const Tensor<T>& input,
                             const ConvParams<T>& params,
                             const Tensor<T>& grad_out, bool need_input_grad) {
  if (!params.transposed) throw ShapeError("deconv_backward given conv params");
  const Shape os = conv_out_shape(input, params, "deconv");
  check_grad_shape(grad_out, os, "deconv output");
  const Shape& is = input.shape();

  ConvGrads<T> grads;
  grads.weights = Tensor<T>(params.weights.shape());
  grads.biases = bias_grad(grad_out);
  if (need_input_grad) grads.input = Tensor<T>(is);

  const int f = params.filter();
  const int ci = is.c;
  const int co = os.c;
  const int in_plane = is.h * is.w;
  const int out_plane = os.h * os.w;
  const T* w = params.weights.ptr();
  T* gw = grads.weights.ptr();

  if (is_pointwise(f, params.stride, params.pad)) {
    for (int n = 0; n < is.n; ++n) {
      const T* go = grad_out.sample(n).data();
      simd::gemm(Op::kNoTrans, Op::kTrans, ci, co, in_plane, T(1),
                 input.sample(n).data(), in_plane, go, out_plane, T(1), gw, co);
      if (need_input_grad) {
        simd::gemm(Op::kNoTrans, Op::kNoTrans, ci, in_plane, co, T(1), w, co,
                   go, out_plane, T(0), grads.input.sample(n).data(), in_plane);
      }
    }
    return grads;
  }

  const Geometry g{co, os.h, os.w, f, params.stride, params.pad, is.h, is.w};
  const int k = g.rows();
  const int tile_rows = rows_per_tile(g);
  auto& col = workspace<T, 0>(static_cast<std::size_t>(k) * tile_rows * is.w);
  for (int n = 0; n < is.n; ++n) {
    const T* x = input.sample(n).data();
    const T* go = grad_out.sample(n).data();
    for (int r0 = 0; r0 < is.h; r0 += tile_rows) {
      const int r1 = std::min(is.h, r0 + tile_rows);
      const int cols = (r1 - r0) * is.w;
      im2col(go, g, r0, r1, col.data());
      simd::gemm(Op::kNoTrans, Op::kTrans, ci, k, cols, T(1), x + r0 * is.w,
                 in_plane, col.data(), cols, T(1), gw, k);
      if (need_input_grad) {
        simd::gemm(Op::kNoTrans, Op::kNoTrans, ci, cols, k, T(1), w, k,
                   col.data(), cols, T(0),
                   grads.input.sample(n).data() + r0 * is.w, in_plane);
      }
    }
  }
  return grads;
}

#define ARCNN_INSTANTIATE(T)                                                   \
  template struct ConvParams<T>;                                               \
  template Tensor<T> conv_forward(const Tensor<T>&, const ConvParams<T>&);     \
  template ConvGrads<T> conv_backward(const Tensor<T>&, const ConvParams<T>&,  \
                                      const Tensor<T>&, bool);                 \
  template Tensor<T> deconv_forward(const Tensor<T>&, const ConvParams<T>&);   \
  template ConvGrads<T> deconv_backward(const Tensor<T>&,                      \
                                        const ConvParams<T>&,                  \
                                        const Tensor<T>&, bool);

ARCNN_INSTANTIATE(float)
ARCNN_INSTANTIATE(double)

#undef ARCNN_INSTANTIATE

}  // namespace arcnn::nn
