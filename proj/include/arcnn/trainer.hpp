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

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "arcnn/datapipe.hpp"
#include "arcnn/model.hpp"

namespace arcnn {

enum class InitScheme { kGaussian, kHe };

struct TrainConfig {
  int batch_size = 128;
  double lr_last = 5e-5;
  double lr_rest = 5e-4;
  std::optional<double> lr_slopes;  // defaults to lr_rest
  double momentum = 0.9;
  double init_std = 0.001;
  InitScheme init = InitScheme::kGaussian;
  std::int64_t max_backprops = 128 * 1000;
  std::int64_t validation_interval = 128 * 100;  // in backprops
  std::uint64_t seed = 1;

  double slope_lr() const { return lr_slopes.value_or(lr_rest); }
  std::int64_t steps() const {
    return (max_backprops + batch_size - 1) / batch_size;
  }
  void validate() const;  // throws ConfigError
};

/// JSON object whose keys mirror the TrainConfig fields ("init" is
/// "gaussian" or "he"). Unknown keys are rejected.
TrainConfig parse_train_config(std::string_view json_text);
TrainConfig load_train_config(const std::filesystem::path& path);

/// Weights ~ N(0, std^2), biases 0, slopes 0.25.
template <typename T>
void init_gaussian(Network<T>& net, double std, std::uint64_t seed);

/// Weights ~ N(0, 2 / fan_in) for hidden layers; fan_in of a stride-s
/// transposed layer is n_in f^2 / s^2. The output layer gets N(0, last_std^2)
/// when given, else N(0, 1 / fan_in).
template <typename T>
void init_he(Network<T>& net, std::uint64_t seed,
             std::optional<double> last_std = std::nullopt);

void init_network(Network<float>& net, const TrainConfig& cfg);

struct TransferPlan {
  Network<float> source;
  std::vector<int> copy_layers;  // 1-based
  bool copy_slopes = true;
  std::vector<bool> freeze;      // parallel to copy_layers; missing = false
};

/// Initializes `target` per cfg, then overwrites the listed layers with the
/// source's. Returns the per-layer frozen mask. Throws ShapeError naming the
/// layer and both shapes on mismatch.
std::vector<bool> transfer_init(Network<float>& target, const TransferPlan& plan,
                                const TrainConfig& cfg);

template <typename T>
struct Loss {
  double value = 0;
  Tensor<T> grad;
};

/// Mean over the batch of per-sample squared-error sums, and its gradient.
template <typename T>
Loss<T> mse_loss(const Tensor<T>& pred, const Tensor<T>& target);

/// Momentum buffers, one per parameter block.
template <typename T>
struct Velocity {
  std::vector<std::vector<T>> blocks;

  static Velocity zeros_like(const Network<T>& net);
};

/// v <- momentum v - lr g; p <- p + v. The output layer's weights and biases
/// use lr_last, slopes use slope_lr(), everything else lr_rest. Layers with
/// frozen[i] set are skipped.
template <typename T>
void sgd_step(Network<T>& net, const NetGrads<T>& grads, Velocity<T>& velocity,
              const TrainConfig& cfg, const std::vector<bool>& frozen = {});

struct LogRow {
  std::int64_t backprops = 0;
  double train_loss = 0;
  double val_psnr = 0;
};

struct TrainOptions {
  std::vector<bool> frozen;
  std::optional<std::filesystem::path> final_checkpoint;
  std::optional<std::filesystem::path> best_checkpoint;
  std::optional<std::filesystem::path> log_csv;
  std::function<void(const LogRow&)> on_log;
};

struct TrainResult {
  Network<float> final_net;
  Network<float> best_net;
  double best_val_psnr = 0;
  std::vector<LogRow> log;
  bool aborted = false;
  std::string diagnostic;
};

/// PSNR in dB of net outputs (clamped to [0, 1]) against targets, from the
/// MSE pooled over every pixel of every pair.
double validation_psnr(const Network<float>& net, const PairSet& pairs,
                       int batch_size = 128);

/// Mini-batch SGD for cfg.steps() steps. Logs a row at 0 backprops, every
/// validation_interval backprops, and at the end. A non-finite loss aborts
/// and leaves the last good parameters in final_net.
TrainResult train(Network<float> net, const PairSet& train_pairs,
                  const PairSet& val_pairs, const TrainConfig& cfg,
                  const TrainOptions& opt = {});

void write_log_csv(const std::vector<LogRow>& log, const std::filesystem::path& path);

}  // namespace arcnn
