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

#include "arcnn/image.hpp"

namespace arcnn {

/// Catmull-Rom cubic (a = -0.5).
double cubic_kernel(double x);

/// Separable bicubic resize with pixel-center alignment and symmetric edge
/// extension. When shrinking, the kernel is stretched by 1/scale so it also
/// low-pass filters. Output samples are clamped to [0, 255].
GrayImage resize_bicubic(const GrayImage& img, int out_h, int out_w);

/// Output size round(h * factor) x round(w * factor). Throws ConfigError for
/// factor <= 0 and ShapeError when a side would round to zero.
GrayImage rescale_bicubic(const GrayImage& img, double factor);

}  // namespace arcnn
