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

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "arcnn/cli.hpp"
#include "arcnn/error.hpp"
#include "arcnn/simd/kernels.hpp"

namespace arcnn::cli {

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Compression artifact reduction with convolutional networks", "arcnn"};
  app.require_subcommand(1);
  std::string isa;
  app.add_option("--isa", isa, "Kernel set: scalar or avx2 (default: best available)");

  DegradeArgs degrade;
  auto* c_degrade = app.add_subcommand("degrade", "JPEG-degrade one image and report quality");
  c_degrade->add_option("--in", degrade.in, "Input PGM/PPM")->required()->check(CLI::ExistingFile);
  c_degrade->add_option("--out", degrade.out, "Output PGM")->required();
  c_degrade->add_option("--quality,-q", degrade.quality, "Quality 1..100")
      ->check(CLI::Range(1, 100));
  c_degrade->add_option("--rescale", degrade.rescale, "Bicubic downscale factor in (0, 1]");

  BuildDatasetArgs build;
  auto* c_build = app.add_subcommand("build-dataset", "Cut degraded/clean training pairs");
  c_build->add_option("--manifest", build.manifest, "Text file listing clean images")
      ->required()
      ->check(CLI::ExistingFile);
  c_build->add_option("--out", build.out, "Pair file to write")->required();
  c_build->add_option("--quality,-q", build.quality, "Quality 1..100")->check(CLI::Range(1, 100));
  c_build->add_option("--stride", build.stride, "Stride of the target network")
      ->check(CLI::PositiveNumber);
  c_build->add_flag("--augment", build.augment, "Add 4 scales x 4 rotations per image");
  c_build->add_option("--patch", build.patch, "Sub-image size")->check(CLI::PositiveNumber);
  c_build->add_option("--patch-stride", build.patch_stride, "Sub-image grid step")
      ->check(CLI::PositiveNumber);

  TrainArgs train;
  std::string copy_layers, freeze;
  bool no_copy_slopes = false;
  auto* c_train = app.add_subcommand("train", "Train a network with SGD");
  c_train->add_option("--arch", train.arch, "Architecture notation")->required();
  c_train->add_option("--data", train.data, "Training pair file")->required()->check(CLI::ExistingFile);
  c_train->add_option("--val", train.val, "Validation pair file")->required()->check(CLI::ExistingFile);
  c_train->add_option("--out-dir", train.out_dir, "Directory for checkpoints and log")->required();
  c_train->add_option("--config", train.config, "JSON training config")->check(CLI::ExistingFile);
  auto* o_from = c_train->add_option("--transfer-from", train.transfer_from,
                                     "Checkpoint to copy layers from")
                     ->check(CLI::ExistingFile);
  c_train->add_option("--copy-layers", copy_layers, "Comma-separated 1-based layers")
      ->needs(o_from);
  c_train->add_option("--freeze", freeze, "Comma-separated copied layers to freeze")
      ->needs(o_from);
  c_train->add_flag("--no-copy-slopes", no_copy_slopes, "Leave transferred PReLU slopes fresh");
  c_train->add_option("--seed", train.seed, "Overrides the config seed");

  RestoreArgs restore;
  auto* c_restore = app.add_subcommand("restore", "Run a trained network on an image");
  c_restore->add_option("--model", restore.model, "Checkpoint")->required()->check(CLI::ExistingFile);
  c_restore->add_option("--in", restore.in, "Degraded PGM/PPM")->required()->check(CLI::ExistingFile);
  c_restore->add_option("--out", restore.out, "Restored PGM")->required();

  EvalArgs eval;
  auto* c_eval = app.add_subcommand("eval", "PSNR / SSIM / PSNR-B of matching files");
  c_eval->add_option("--ref-dir", eval.ref_dir, "Reference images")->required()->check(CLI::ExistingDirectory);
  c_eval->add_option("--test-dir", eval.test_dir, "Images to score")->required()->check(CLI::ExistingDirectory);

  BenchArgs bench;
  auto* c_bench = app.add_subcommand("bench", "Time two architectures on a random image");
  c_bench->add_option("--arch-a", bench.arch_a, "First architecture")->required();
  c_bench->add_option("--arch-b", bench.arch_b, "Second architecture")->required();
  c_bench->add_option("--size", bench.size, "Square image side")->check(CLI::PositiveNumber);
  c_bench->add_option("--repeats", bench.repeats, "Timed runs per network")->check(CLI::PositiveNumber);
  c_bench->add_option("--seed", bench.seed, "Image and weight seed");

  InspectArgs inspect;
  auto* c_inspect = app.add_subcommand("inspect", "Parameter and operation counts");
  c_inspect->add_option("--arch", inspect.arch, "Architecture notation");
  c_inspect->add_option("--against", inspect.against, "Accelerated architecture to compare");
  c_inspect->add_flag("--acceleration", inspect.acceleration,
                      "Acceleration report (defaults to the reference pair)");
  c_inspect->add_option("--size", inspect.size, "Square input side for op counts")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  auto parse_list = [](const std::string& text, const char* flag) {
    std::vector<int> v;
    if (text.empty()) return v;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        v.push_back(std::stoi(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw ConfigError(fmt::format("{}: '{}' is not a layer number", flag, item));
      }
    }
    return v;
  };

  try {
    if (!isa.empty()) {
      const auto parsed = simd::parse_isa(isa);
      if (!parsed || !simd::isa_supported(*parsed)) {
        throw ConfigError(fmt::format("--isa {} is not available on this machine", isa));
      }
      simd::set_active_isa(*parsed);
    }
    if (*c_degrade) {
      cmd_degrade(degrade, out, err);
    } else if (*c_build) {
      cmd_build_dataset(build, out, err);
    } else if (*c_train) {
      train.copy_layers = parse_list(copy_layers, "--copy-layers");
      train.freeze = parse_list(freeze, "--freeze");
      train.copy_slopes = !no_copy_slopes;
      cmd_train(train, out, err);
    } else if (*c_restore) {
      cmd_restore(restore, out, err);
    } else if (*c_eval) {
      cmd_eval(eval, out, err);
    } else if (*c_bench) {
      cmd_bench(bench, out, err);
    } else if (*c_inspect) {
      cmd_inspect(inspect, out, err);
    }
  } catch (const ConfigError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitUsage;
  } catch (const ParseError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace arcnn::cli
