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

// Subcommands of the `arcnn` tool. Each cmd_* writes data (CSV, tables) to
// `out` and diagnostics to `err`, and throws arcnn::Error on failure.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace arcnn::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Parses argv and dispatches. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

struct DegradeArgs {
  std::filesystem::path in, out;
  int quality = 10;
  std::optional<double> rescale;
};
void cmd_degrade(const DegradeArgs& a, std::ostream& out, std::ostream& err);

struct BuildDatasetArgs {
  std::filesystem::path manifest, out;
  int quality = 10;
  int stride = 1;  // stride of the network the pairs are for
  bool augment = false;
  int patch = 24;
  int patch_stride = 20;
};
void cmd_build_dataset(const BuildDatasetArgs& a, std::ostream& out, std::ostream& err);

struct TrainArgs {
  std::string arch;
  std::filesystem::path data, val, out_dir;
  std::optional<std::filesystem::path> config;
  std::optional<std::filesystem::path> transfer_from;
  std::vector<int> copy_layers;
  std::vector<int> freeze;  // layer indices, each also in copy_layers
  bool copy_slopes = true;
  std::optional<std::uint64_t> seed;
};
void cmd_train(const TrainArgs& a, std::ostream& out, std::ostream& err);

struct RestoreArgs {
  std::filesystem::path model, in, out;
};
void cmd_restore(const RestoreArgs& a, std::ostream& out, std::ostream& err);

struct EvalArgs {
  std::filesystem::path ref_dir, test_dir;
};
void cmd_eval(const EvalArgs& a, std::ostream& out, std::ostream& err);

struct BenchArgs {
  std::string arch_a, arch_b;
  int size = 512;
  int repeats = 3;
  std::uint64_t seed = 1;
};
struct BenchResult {
  double seconds_a = 0, seconds_b = 0;  // medians
  double measured_ratio = 0;            // a / b
  double op_model_ratio = 0;
};
BenchResult cmd_bench(const BenchArgs& a, std::ostream& out, std::ostream& err);

struct InspectArgs {
  std::optional<std::string> arch;
  std::optional<std::string> against;  // acceleration report vs this arch
  bool acceleration = false;
  int size = 512;
};
void cmd_inspect(const InspectArgs& a, std::ostream& out, std::ostream& err);

}  // namespace arcnn::cli
