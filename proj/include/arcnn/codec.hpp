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

// JPEG-style luminance degradation: 8x8 block DCT, quantize/dequantize with
// the quality-scaled standard luminance table, inverse DCT. No entropy
// coding, no chroma.

#pragma once

#include <array>
#include <optional>

#include "arcnn/image.hpp"

namespace arcnn {

struct DegradeConfig {
  int quality = 10;                       // 1..100
  std::optional<double> rescale_factor;   // (0, 1], applied before coding
  bool quantize = true;                   // false: DCT round trip only
  bool round_output = true;               // snap decoded samples to 0..255 levels

  void validate() const;  // throws ConfigError
};

using Block = std::array<double, 64>;

/// Standard luminance table in row-major (not zigzag) order.
const std::array<int, 64>& base_luma_table();
/// Table entry = clamp(floor((Q * scale + 50) / 100), 1, 255) with
/// scale = 5000 / q for q < 50, else 200 - 2q.
std::array<int, 64> quant_table(int quality);

/// Orthonormal 2-D DCT-II and its inverse on a row-major 8x8 block.
Block dct8x8(const Block& in);
Block idct8x8(const Block& coeffs);

/// Round half away from zero of c / q, times q.
double quantize_coefficient(double c, int q);

GrayImage jpeg_degrade(const GrayImage& img, const DegradeConfig& cfg);

/// Bicubic downscale by cfg.rescale_factor (1 when unset), then
/// jpeg_degrade. Throws ShapeError when the rescaled image is below 8x8.
GrayImage rescale_degrade(const GrayImage& img, const DegradeConfig& cfg);

}  // namespace arcnn
