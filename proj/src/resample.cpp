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

#include "arcnn/resample.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "arcnn/error.hpp"

namespace arcnn {

double cubic_kernel(double x) {
  const double a = std::abs(x);
  if (a <= 1.0) return 1.5 * a * a * a - 2.5 * a * a + 1.0;
  if (a < 2.0) return -0.5 * a * a * a + 2.5 * a * a - 4.0 * a + 2.0;
  return 0.0;
}

namespace {

// Taps for one output index along an axis.
struct Taps {
  std::vector<int> index;     // flattened, `width` per output
  std::vector<double> weight;
  int width = 0;
};

int mirror(int i, int n) {
  // Symmetric extension: ... 1 0 | 0 1 ... n-1 | n-1 n-2 ...
  const int period = 2 * n;
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - 1 - i;
}

Taps make_taps(int in, int out) {
  const double scale = static_cast<double>(out) / in;
  const double stretch = scale < 1.0 ? 1.0 / scale : 1.0;
  Taps t;
  t.width = static_cast<int>(std::ceil(4.0 * stretch)) + 2;
  t.index.resize(static_cast<std::size_t>(out) * t.width);
  t.weight.resize(t.index.size());
  for (int o = 0; o < out; ++o) {
    const double center = (o + 0.5) / scale - 0.5;
    const int first = static_cast<int>(std::floor(center - 2.0 * stretch));
    double sum = 0.0;
    for (int k = 0; k < t.width; ++k) {
      const int i = first + k;
      const double wgt = cubic_kernel((center - i) / stretch);
      t.index[o * t.width + k] = mirror(i, in);
      t.weight[o * t.width + k] = wgt;
      sum += wgt;
    }
    for (int k = 0; k < t.width; ++k) t.weight[o * t.width + k] /= sum;
  }
  return t;
}

}  // namespace

GrayImage resize_bicubic(const GrayImage& img, int out_h, int out_w) {
  if (out_h < 1 || out_w < 1) {
    throw ShapeError(fmt::format("resize target {}x{} is empty", out_h, out_w));
  }
  if (out_h == img.h && out_w == img.w) return img;
  const Taps th = make_taps(img.h, out_h);
  const Taps tw = make_taps(img.w, out_w);

  // Rows first, then columns.
  std::vector<double> mid(static_cast<std::size_t>(img.h) * out_w);
  for (int y = 0; y < img.h; ++y) {
    const double* row = img.samples.data() + static_cast<std::size_t>(y) * img.w;
    for (int x = 0; x < out_w; ++x) {
      double acc = 0.0;
      for (int k = 0; k < tw.width; ++k) {
        acc += tw.weight[x * tw.width + k] * row[tw.index[x * tw.width + k]];
      }
      mid[static_cast<std::size_t>(y) * out_w + x] = acc;
    }
  }
  GrayImage out(out_h, out_w);
  for (int y = 0; y < out_h; ++y) {
    for (int x = 0; x < out_w; ++x) {
      double acc = 0.0;
      for (int k = 0; k < th.width; ++k) {
        acc += th.weight[y * th.width + k] *
               mid[static_cast<std::size_t>(th.index[y * th.width + k]) * out_w + x];
      }
      out.at(y, x) = std::clamp(acc, 0.0, 255.0);
    }
  }
  return out;
}

GrayImage rescale_bicubic(const GrayImage& img, double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    throw ConfigError(fmt::format("rescale factor {} must be positive", factor));
  }
  const int h = static_cast<int>(std::lround(img.h * factor));
  const int w = static_cast<int>(std::lround(img.w * factor));
  if (h < 1 || w < 1) {
    throw ShapeError(fmt::format("rescaling {}x{} by {} leaves no pixels", img.h,
                                 img.w, factor));
  }
  return resize_bicubic(img, h, w);
}

}  // namespace arcnn
