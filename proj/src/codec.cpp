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

#include "arcnn/codec.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "arcnn/error.hpp"
#include "arcnn/resample.hpp"

namespace arcnn {

void DegradeConfig::validate() const {
  if (quality < 1 || quality > 100) {
    throw ConfigError(fmt::format("JPEG quality {} outside 1..100", quality));
  }
  if (rescale_factor &&
      (!std::isfinite(*rescale_factor) || *rescale_factor <= 0.0 || *rescale_factor > 1.0)) {
    throw ConfigError(fmt::format("rescale factor {} outside (0, 1]", *rescale_factor));
  }
}

const std::array<int, 64>& base_luma_table() {
  static const std::array<int, 64> kTable = {
      16, 11, 10, 16, 24,  40,  51,  61,   //
      12, 12, 14, 19, 26,  58,  60,  55,   //
      14, 13, 16, 24, 40,  57,  69,  56,   //
      14, 17, 22, 29, 51,  87,  80,  62,   //
      18, 22, 37, 56, 68,  109, 103, 77,   //
      24, 35, 55, 64, 81,  104, 113, 92,   //
      49, 64, 78, 87, 103, 121, 120, 101,  //
      72, 92, 95, 98, 112, 100, 103, 99};
  return kTable;
}

std::array<int, 64> quant_table(int quality) {
  if (quality < 1 || quality > 100) {
    throw ConfigError(fmt::format("JPEG quality {} outside 1..100", quality));
  }
  const long scale = quality < 50 ? 5000 / quality : 200 - 2 * quality;
  std::array<int, 64> out{};
  for (int i = 0; i < 64; ++i) {
    const long v = (base_luma_table()[i] * scale + 50) / 100;
    out[i] = static_cast<int>(std::clamp(v, 1L, 255L));
  }
  return out;
}

namespace {

// basis[u][x] = c(u) cos((2x + 1) u pi / 16), c(0) = sqrt(1/8), else sqrt(2/8).
const std::array<std::array<double, 8>, 8>& dct_basis() {
  static const auto kBasis = [] {
    std::array<std::array<double, 8>, 8> b{};
    for (int u = 0; u < 8; ++u) {
      const double c = u == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
      for (int x = 0; x < 8; ++x) {
        b[u][x] = c * std::cos((2 * x + 1) * u * std::numbers::pi / 16.0);
      }
    }
    return b;
  }();
  return kBasis;
}

}  // namespace

Block dct8x8(const Block& in) {
  const auto& b = dct_basis();
  Block tmp{}, out{};
  for (int y = 0; y < 8; ++y) {
    for (int u = 0; u < 8; ++u) {
      double acc = 0.0;
      for (int x = 0; x < 8; ++x) acc += b[u][x] * in[y * 8 + x];
      tmp[y * 8 + u] = acc;
    }
  }
  for (int v = 0; v < 8; ++v) {
    for (int u = 0; u < 8; ++u) {
      double acc = 0.0;
      for (int y = 0; y < 8; ++y) acc += b[v][y] * tmp[y * 8 + u];
      out[v * 8 + u] = acc;
    }
  }
  return out;
}

Block idct8x8(const Block& coeffs) {
  const auto& b = dct_basis();
  Block tmp{}, out{};
  for (int v = 0; v < 8; ++v) {
    for (int x = 0; x < 8; ++x) {
      double acc = 0.0;
      for (int u = 0; u < 8; ++u) acc += b[u][x] * coeffs[v * 8 + u];
      tmp[v * 8 + x] = acc;
    }
  }
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) {
      double acc = 0.0;
      for (int v = 0; v < 8; ++v) acc += b[v][y] * tmp[v * 8 + x];
      out[y * 8 + x] = acc;
    }
  }
  return out;
}

double quantize_coefficient(double c, int q) {
  // std::round rounds halves away from zero.
  return std::round(c / q) * q;
}

GrayImage jpeg_degrade(const GrayImage& img, const DegradeConfig& cfg) {
  cfg.validate();
  if (img.h < 1 || img.w < 1) throw ShapeError("cannot degrade an empty image");
  const auto table = quant_table(cfg.quality);
  const int ph = (img.h + 7) / 8 * 8;
  const int pw = (img.w + 7) / 8 * 8;

  GrayImage out(img.h, img.w);
  for (int by = 0; by < ph; by += 8) {
    for (int bx = 0; bx < pw; bx += 8) {
      Block block{};
      for (int y = 0; y < 8; ++y) {
        const int sy = std::min(by + y, img.h - 1);
        for (int x = 0; x < 8; ++x) {
          const int sx = std::min(bx + x, img.w - 1);
          block[y * 8 + x] = img.at(sy, sx) - 128.0;
        }
      }
      Block coeffs = dct8x8(block);
      if (cfg.quantize) {
        for (int i = 0; i < 64; ++i) coeffs[i] = quantize_coefficient(coeffs[i], table[i]);
      }
      const Block rec = idct8x8(coeffs);
      for (int y = 0; y < 8 && by + y < img.h; ++y) {
        for (int x = 0; x < 8 && bx + x < img.w; ++x) {
          double v = rec[y * 8 + x] + 128.0;
          if (cfg.round_output) v = std::round(v);
          out.at(by + y, bx + x) = std::clamp(v, 0.0, 255.0);
        }
      }
    }
  }
  return out;
}

GrayImage rescale_degrade(const GrayImage& img, const DegradeConfig& cfg) {
  cfg.validate();
  const double factor = cfg.rescale_factor.value_or(1.0);
  GrayImage scaled = factor == 1.0 ? img : rescale_bicubic(img, factor);
  if (scaled.h < 8 || scaled.w < 8) {
    throw ShapeError(fmt::format("rescaled image {}x{} is smaller than one 8x8 block",
                                 scaled.h, scaled.w));
  }
  return jpeg_degrade(scaled, cfg);
}

}  // namespace arcnn
