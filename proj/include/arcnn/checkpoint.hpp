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

// Checkpoint file layout, all integers little-endian:
//
//   "ARCN"                 4-byte magic
//   u32 version            currently 1
//   u32 length, bytes      canonical architecture notation (UTF-8)
//   u64 iteration          backprop counter
//   per layer:             f32 weights, f32 biases, f32 slopes (hidden only)
//
// Weights are stored in memory order: (n_out, n_in, f, f) for convolutions
// and (n_in, n_out, f, f) for the transposed output layer. Array lengths
// follow from the notation, which assumes a single input channel.

#pragma once

#include <cstdint>
#include <filesystem>

#include "arcnn/model.hpp"

namespace arcnn {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Throws Error when the file cannot be written and ConfigError for networks
/// with more than one input channel.
void save_checkpoint(const Network<float>& net, const std::filesystem::path& path);

/// Throws FormatError with a specific diagnostic for bad magic, unsupported
/// version, truncation, or trailing data.
Network<float> load_checkpoint(const std::filesystem::path& path);

}  // namespace arcnn
