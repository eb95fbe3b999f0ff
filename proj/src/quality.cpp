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

#include "arcnn/quality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "arcnn/error.hpp"

namespace arcnn {
namespace {

constexpr double kPeak2 = 255.0 * 255.0;
constexpr int kBlock = 8;

void require_same_size(const GrayImage& a, const GrayImage& b, const char* what) {
  if (a.h != b.h || a.w != b.w) {
    throw ShapeError(fmt::format("{}: image sizes differ ({}x{} vs {}x{})", what, a.h,
                                 a.w, b.h, b.w));
  }
}

double to_db(double err) {
  if (err <= 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(kPeak2 / err);
}

}  // namespace

double mse(const GrayImage& ref, const GrayImage& test) {
  require_same_size(ref, test, "mse");
  double acc = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const double d = ref.samples[i] - test.samples[i];
    acc += d * d;
  }
  return acc / static_cast<double>(ref.size());
}

double psnr(const GrayImage& ref, const GrayImage& test) { return to_db(mse(ref, test)); }

double ssim(const GrayImage& ref, const GrayImage& test) {
  require_same_size(ref, test, "ssim");
  if (ref.h < kBlock || ref.w < kBlock) {
    throw ShapeError(fmt::format("ssim needs at least 8x8 pixels, got {}x{}", ref.h, ref.w));
  }
  constexpr double c1 = (0.01 * 255) * (0.01 * 255);
  constexpr double c2 = (0.03 * 255) * (0.03 * 255);
  constexpr double n = kBlock * kBlock;

  // Per-column sums over the 8 rows of the current window band; each window
  // is then a sum of 8 adjacent column sums.
  const int w = ref.w;
  std::vector<double> sx(w), sy(w), sxx(w), syy(w), sxy(w);
  double total = 0.0;
  long windows = 0;
  for (int top = 0; top + kBlock <= ref.h; ++top) {
    for (int x = 0; x < w; ++x) {
      sx[x] = sy[x] = sxx[x] = syy[x] = sxy[x] = 0.0;
      for (int r = top; r < top + kBlock; ++r) {
        const double a = ref.at(r, x), b = test.at(r, x);
        sx[x] += a;
        sy[x] += b;
        sxx[x] += a * a;
        syy[x] += b * b;
        sxy[x] += a * b;
      }
    }
    for (int left = 0; left + kBlock <= w; ++left) {
      double a = 0, b = 0, aa = 0, bb = 0, ab = 0;
      for (int x = left; x < left + kBlock; ++x) {
        a += sx[x];
        b += sy[x];
        aa += sxx[x];
        bb += syy[x];
        ab += sxy[x];
      }
      const double mx = a / n, my = b / n;
      const double vx = std::max(aa / n - mx * mx, 0.0);
      const double vy = std::max(bb / n - my * my, 0.0);
      const double cxy = ab / n - mx * my;
      total += ((2 * mx * my + c1) * (2 * cxy + c2)) /
               ((mx * mx + my * my + c1) * (vx + vy + c2));
      ++windows;
    }
  }
  return total / static_cast<double>(windows);
}

BlockingStats blocking_stats(const GrayImage& img) {
  if (img.h < kBlock || img.w < kBlock) {
    throw ShapeError(fmt::format("blocking factor needs at least 8x8 pixels, got {}x{}",
                                 img.h, img.w));
  }
  double boundary = 0.0, inner = 0.0;
  long n_boundary = 0, n_inner = 0;
  // Horizontal neighbours (x, x + 1) straddle a boundary when x + 1 is a
  // multiple of 8; vertical likewise.
  for (int y = 0; y < img.h; ++y) {
    for (int x = 0; x + 1 < img.w; ++x) {
      const double d = img.at(y, x) - img.at(y, x + 1);
      if ((x + 1) % kBlock == 0) {
        boundary += d * d;
        ++n_boundary;
      } else {
        inner += d * d;
        ++n_inner;
      }
    }
  }
  for (int y = 0; y + 1 < img.h; ++y) {
    for (int x = 0; x < img.w; ++x) {
      const double d = img.at(y, x) - img.at(y + 1, x);
      if ((y + 1) % kBlock == 0) {
        boundary += d * d;
        ++n_boundary;
      } else {
        inner += d * d;
        ++n_inner;
      }
    }
  }
  BlockingStats s;
  s.d_b = n_boundary ? boundary / n_boundary : 0.0;
  s.d_c = n_inner ? inner / n_inner : 0.0;
  if (s.d_b > s.d_c) {
    s.eta = std::log2(static_cast<double>(kBlock)) /
            std::log2(static_cast<double>(std::min(img.h, img.w)));
    s.bef = s.eta * (s.d_b - s.d_c);
  }
  return s;
}

double bef(const GrayImage& img) { return blocking_stats(img).bef; }

double psnr_b(const GrayImage& ref, const GrayImage& test) {
  require_same_size(ref, test, "psnr_b");
  return to_db(mse(ref, test) + bef(test));
}

QualityReport evaluate(const GrayImage& ref, const GrayImage& test) {
  return {psnr(ref, test), ssim(ref, test), psnr_b(ref, test)};
}

GrayImage align_reference(const GrayImage& ref, int h, int w) {
  if (h == ref.h && w == ref.w) return ref;
  return crop(ref, 0, 0, h, w);
}

std::string format_db(double db) {
  return fmt::format("{:.2f}", std::isinf(db) && db > 0 ? kPsnrTextCap : db);
}

}  // namespace arcnn
