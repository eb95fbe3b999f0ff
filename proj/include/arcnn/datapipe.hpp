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
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "arcnn/codec.hpp"
#include "arcnn/image.hpp"
#include "arcnn/tensor.hpp"

namespace arcnn {

inline constexpr std::array<double, 4> kAugmentScales = {0.9, 0.8, 0.7, 0.6};
inline constexpr int kPatchSize = 24;
inline constexpr int kPatchStride = 20;

/// {original, 4 downscales} x {0, 90, 180, 270 degrees}: 20 variants, scale
/// major. Variants smaller than min_side in either axis are dropped and a
/// message is appended to `warnings` when given.
std::vector<GrayImage> augment(const GrayImage& img, int min_side = kPatchSize,
                               std::vector<std::string>* warnings = nullptr);

/// floor((dim - size) / stride) + 1, or 0 when dim < size.
int grid_count(int dim, int size = kPatchSize, int stride = kPatchStride);

/// Row-major grid of size x size crops at multiples of stride.
std::vector<GrayImage> extract_subimages(const GrayImage& img, int size = kPatchSize,
                                         int stride = kPatchStride);

struct SamplePair {
  GrayImage input;   // degraded, patch x patch
  GrayImage target;  // clean upper-left (patch - s + 1)^2 crop
};

/// Training pairs as contiguous float arrays on the 0..1 scale.
struct PairSet {
  int input_size = kPatchSize;
  int target_size = kPatchSize;
  int net_stride = 1;
  std::vector<float> inputs;   // count x input_size^2
  std::vector<float> targets;  // count x target_size^2

  std::size_t size() const {
    return inputs.size() / (static_cast<std::size_t>(input_size) * input_size);
  }
  void append(const GrayImage& input, const GrayImage& target);
  SamplePair pair(std::size_t i) const;

  /// Stacks the listed pairs into (k, 1, size, size) tensors.
  Tensor<float> input_batch(const std::vector<std::size_t>& idx) const;
  Tensor<float> target_batch(const std::vector<std::size_t>& idx) const;

  friend bool operator==(const PairSet&, const PairSet&) = default;
};

struct PairOptions {
  DegradeConfig degrade;
  int net_stride = 1;
  int patch = kPatchSize;
  int patch_stride = kPatchStride;
  bool augment = false;
};

/// Degrades each (optionally augmented) clean image whole, then cuts aligned
/// sub-images from clean and degraded copies. Order: image, variant, grid.
PairSet build_pairs(const std::vector<GrayImage>& clean, const PairOptions& opt,
                    std::vector<std::string>* warnings = nullptr);

/// Permutation of 0..n-1 for the given epoch; a pure function of its inputs.
std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed, std::uint64_t epoch);

/// One path per line; blank lines and '#' comments skipped; relative paths
/// are resolved against the manifest's directory.
std::vector<std::filesystem::path> read_manifest(const std::filesystem::path& path);

// Pair cache: "ARCP", u32 version, u32 input size, u32 target size,
// u32 net stride, u64 count, then f32 inputs and f32 targets (little-endian,
// to_unit() scale).
inline constexpr std::uint32_t kPairBlobVersion = 2;
void save_pairs(const PairSet& pairs, const std::filesystem::path& path);
PairSet load_pairs(const std::filesystem::path& path);

}  // namespace arcnn
