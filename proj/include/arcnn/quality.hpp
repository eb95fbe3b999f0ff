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

#include <string>

#include "arcnn/image.hpp"

namespace arcnn {

inline constexpr double kPsnrTextCap = 99.99;

double mse(const GrayImage& ref, const GrayImage& test);

/// 10 log10(255^2 / MSE); +infinity for identical images.
double psnr(const GrayImage& ref, const GrayImage& test);

/// Mean SSIM over every 8x8 window (stride 1), uniform weights, population
/// statistics, C1 = (0.01 * 255)^2, C2 = (0.03 * 255)^2.
double ssim(const GrayImage& ref, const GrayImage& test);

/// Blocking-effect factor of a single image (block size 8).
struct BlockingStats {
  double d_b = 0;    // mean squared step across block boundaries
  double d_c = 0;    // mean squared step elsewhere
  double eta = 0;
  double bef = 0;
};
BlockingStats blocking_stats(const GrayImage& img);
double bef(const GrayImage& img);

/// 10 log10(255^2 / (MSE + BEF(test))).
double psnr_b(const GrayImage& ref, const GrayImage& test);

struct QualityReport {
  double psnr = 0;
  double ssim = 0;
  double psnr_b = 0;
};

QualityReport evaluate(const GrayImage& ref, const GrayImage& test);

/// Upper-left h x w crop of ref, used when a strided network returns an
/// image s - 1 pixels smaller than its input.
GrayImage align_reference(const GrayImage& ref, int h, int w);

/// Fixed two-decimal text with +infinity shown as 99.99.
std::string format_db(double db);

}  // namespace arcnn
