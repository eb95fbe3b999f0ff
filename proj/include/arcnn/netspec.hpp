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

// Hourglass architecture notation.
//
//   64(9)-32(1)-32(7)x2-64(1)-1[9]-s2
//
// Each segment is `n(f)` for a convolution with n filters of size f x f or
// `n[f]` for a transposed convolution. A segment may carry an `xM` (or `×M`)
// suffix that repeats it M times. An optional trailing `-sK` sets the stride
// K used by the first convolution and the final transposed convolution;
// every other layer runs at stride 1. All layers zero-pad by (f - 1) / 2.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace arcnn::netspec {

enum class LayerKind { kConv, kDeconv };

struct LayerSpec {
  int filters = 1;
  int size = 1;
  LayerKind kind = LayerKind::kConv;

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

struct ArchSpec {
  std::vector<LayerSpec> layers;  // repeats already expanded
  int stride = 1;
  int input_channels = 1;

  int depth() const { return static_cast<int>(layers.size()); }
  int in_channels(int layer) const {
    return layer == 0 ? input_channels : layers[layer - 1].filters;
  }
  int pad(int layer) const { return (layers[layer].size - 1) / 2; }
  int layer_stride(int layer) const;
  bool is_transposed(int layer) const {
    return layers[layer].kind == LayerKind::kDeconv;
  }

  /// Canonical notation with repeats expanded, e.g. "64(9)-32(7)-16(1)-1(5)".
  std::string notation() const;

  /// Throws ParseError on a structurally invalid spec.
  void validate() const;

  friend bool operator==(const ArchSpec&, const ArchSpec&) = default;
};

ArchSpec parse_arch(std::string_view text);

struct ParamCounts {
  std::vector<std::int64_t> per_layer;  // n_{i-1} * n_i * f_i^2
  std::int64_t total = 0;               // weights only
  std::int64_t biases = 0;
  std::int64_t slopes = 0;

  std::int64_t all() const { return total + biases + slopes; }
};

ParamCounts count_params(const ArchSpec& spec);

struct Extent {
  int h = 0;
  int w = 0;

  friend bool operator==(const Extent&, const Extent&) = default;
};

/// Spatial size of every layer's output for an h x w input.
std::vector<Extent> layer_extents(const ArchSpec& spec, Extent input);
Extent output_extent(const ArchSpec& spec, Extent input);

struct OpCounts {
  std::vector<std::int64_t> per_layer;
  std::int64_t total = 0;
};

/// Multiply-accumulate count of one forward pass. Convolutions are charged
/// per output position and transposed convolutions per input position.
OpCounts count_ops(const ArchSpec& spec, Extent input);

/// Inclusive pixel rectangle.
struct Rect {
  int y0 = 0, x0 = 0, y1 = -1, x1 = -1;

  int height() const { return y1 - y0 + 1; }
  int width() const { return x1 - x0 + 1; }
  bool contains(int y, int x) const {
    return y >= y0 && y <= y1 && x >= x0 && x <= x1;
  }
  friend bool operator==(const Rect&, const Rect&) = default;
};

/// Input pixels that can influence output pixel (y, x). Without `input` the
/// rectangle is unbounded by the image; with it, every intermediate range is
/// clipped to the feature map it indexes.
Rect receptive_field(const ArchSpec& spec, int y, int x,
                     std::optional<Extent> input = std::nullopt);

// Reference totals quoted for the baseline and accelerated networks. The
// quoted accelerated total is not what count_params yields for the quoted
// notation; acceleration_report() shows both.
inline constexpr std::string_view kArcnnNotation = "64(9)-32(7)-16(1)-1(5)";
inline constexpr std::string_view kFastArcnnNotation =
    "64(9)-32(1)-32(7)-64(1)-1[9]-s2";
inline constexpr std::int64_t kQuotedArcnnParams = 106448;
inline constexpr std::int64_t kQuotedFastArcnnParams = 56496;
inline constexpr int kQuotedFastStride = 2;

struct AccelerationReport {
  double quoted_ratio = 0;  // 106448 / 56496 * 2^2

  std::string base_notation;
  std::string fast_notation;
  std::int64_t base_params = 0;
  std::int64_t fast_params = 0;
  int stride = 1;
  double formula_ratio = 0;  // base_params / fast_params * s^2

  Extent size;
  std::int64_t base_ops = 0;
  std::int64_t fast_ops = 0;
  double op_model_ratio = 0;  // base_ops / fast_ops

  /// The pair is the quoted baseline/accelerated pair and the formula total
  /// disagrees with the quoted one.
  bool quoted_discrepancy = false;
};

AccelerationReport acceleration_report(const ArchSpec& base,
                                       const ArchSpec& fast, Extent size);

}  // namespace arcnn::netspec
