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

#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "arcnn/tensor.hpp"

namespace arcnn {

/// Single-channel image with real samples on the 0..255 scale, row-major.
struct GrayImage {
  int h = 0;
  int w = 0;
  std::vector<double> samples;

  GrayImage() = default;
  GrayImage(int h, int w, double fill = 0.0);
  GrayImage(int h, int w, std::vector<double> samples);

  double& at(int y, int x) { return samples[static_cast<std::size_t>(y) * w + x]; }
  double at(int y, int x) const {
    return samples[static_cast<std::size_t>(y) * w + x];
  }
  std::size_t size() const { return samples.size(); }

  void clamp();  // to [0, 255]
  bool in_range() const;

  friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

struct RgbImage {
  int h = 0;
  int w = 0;
  std::vector<std::array<double, 3>> pixels;
};

/// BT.601 luma: 0.299 R + 0.587 G + 0.114 B, clamped to [0, 255].
GrayImage to_luminance(const RgbImage& rgb);

/// Reads binary P5 (gray) or P6 (RGB, converted to luminance). Sample
/// values are rescaled to 0..255 when maxval differs.
GrayImage read_pgm(const std::filesystem::path& path);
/// Writes an 8-bit P5 file; samples are rounded and clamped. A non-empty
/// comment becomes a "# ..." header line.
void write_pgm(const GrayImage& img, const std::filesystem::path& path,
               const std::string& comment = {});

/// Clockwise rotation by quarter turns (any integer, taken mod 4).
GrayImage rotate90(const GrayImage& img, int quarter_turns);
GrayImage crop(const GrayImage& img, int y, int x, int h, int w);

/// Network-side pixel value: samples / 255 - 0.5, so 0..255 maps to
/// [-0.5, 0.5].
inline constexpr double kPixelOffset = 0.5;
inline double to_unit(double sample) { return sample / 255.0 - kPixelOffset; }
inline double from_unit(double u) { return (u + kPixelOffset) * 255.0; }

/// to_unit() of every sample as a (1, 1, h, w) tensor, and back (clamped).
template <typename T>
Tensor<T> to_tensor(const GrayImage& img);
template <typename T>
GrayImage from_tensor(const Tensor<T>& t, int n = 0);

/// Round every sample to the nearest integer level.
GrayImage quantize8(const GrayImage& img);

}  // namespace arcnn
