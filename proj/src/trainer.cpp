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

#include "arcnn/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "arcnn/checkpoint.hpp"
#include "arcnn/error.hpp"
#include "arcnn/simd/kernels.hpp"

namespace arcnn {

void TrainConfig::validate() const {
  if (batch_size < 1) throw ConfigError(fmt::format("batch_size {} must be >= 1", batch_size));
  auto rate = [](const char* name, double v) {
    if (!std::isfinite(v) || v < 0.0) {
      throw ConfigError(fmt::format("{} {} must be a finite non-negative rate", name, v));
    }
  };
  rate("lr_last", lr_last);
  rate("lr_rest", lr_rest);
  if (lr_slopes) rate("lr_slopes", *lr_slopes);
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw ConfigError(fmt::format("momentum {} outside [0, 1)", momentum));
  }
  if (!std::isfinite(init_std) || init_std < 0.0) {
    throw ConfigError(fmt::format("init_std {} must be >= 0", init_std));
  }
  if (max_backprops < 0) throw ConfigError("max_backprops must be >= 0");
  if (validation_interval < 1) throw ConfigError("validation_interval must be >= 1");
}

TrainConfig parse_train_config(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(fmt::format("training config is not valid JSON: {}", e.what()));
  }
  if (!j.is_object()) throw ConfigError("training config must be a JSON object");
  TrainConfig cfg;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "batch_size") {
        cfg.batch_size = v.get<int>();
      } else if (key == "lr_last") {
        cfg.lr_last = v.get<double>();
      } else if (key == "lr_rest") {
        cfg.lr_rest = v.get<double>();
      } else if (key == "lr_slopes") {
        if (!v.is_null()) cfg.lr_slopes = v.get<double>();
      } else if (key == "momentum") {
        cfg.momentum = v.get<double>();
      } else if (key == "init_std") {
        cfg.init_std = v.get<double>();
      } else if (key == "init") {
        const auto s = v.get<std::string>();
        if (s == "gaussian") {
          cfg.init = InitScheme::kGaussian;
        } else if (s == "he") {
          cfg.init = InitScheme::kHe;
        } else {
          throw ConfigError(fmt::format("unknown init scheme '{}'", s));
        }
      } else if (key == "max_backprops") {
        cfg.max_backprops = v.get<std::int64_t>();
      } else if (key == "validation_interval") {
        cfg.validation_interval = v.get<std::int64_t>();
      } else if (key == "seed") {
        cfg.seed = v.get<std::uint64_t>();
      } else {
        throw ConfigError(fmt::format("unknown training config key '{}'", key));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("bad training config value: {}", e.what()));
  }
  cfg.validate();
  return cfg;
}

TrainConfig load_train_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error(fmt::format("cannot open config '{}'", path.string()));
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_train_config(ss.str());
}

namespace {

template <typename T>
void fill_normal(std::span<T> values, double std, std::mt19937_64& rng) {
  if (std == 0.0) {
    std::fill(values.begin(), values.end(), T(0));
    return;
  }
  std::normal_distribution<double> dist(0.0, std);
  for (T& v : values) v = static_cast<T>(dist(rng));
}

template <typename T>
void reset_non_weights(Network<T>& net) {
  for (auto& l : net.layers) std::fill(l.biases.begin(), l.biases.end(), T(0));
  for (auto& a : net.activations) std::fill(a.slopes.begin(), a.slopes.end(), T(0.25));
}

}  // namespace

template <typename T>
void init_gaussian(Network<T>& net, double std, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (auto& l : net.layers) fill_normal(l.weights.data(), std, rng);
  reset_non_weights(net);
}

template <typename T>
void init_he(Network<T>& net, std::uint64_t seed, std::optional<double> last_std) {
  std::mt19937_64 rng(seed);
  for (int i = 0; i < net.depth(); ++i) {
    auto& l = net.layers[i];
    double fan_in = static_cast<double>(l.in_channels()) * l.filter() * l.filter();
    if (l.transposed) fan_in /= static_cast<double>(l.stride) * l.stride;
    const bool last = i + 1 == net.depth();
    const double std = last && last_std ? *last_std : std::sqrt((last ? 1.0 : 2.0) / fan_in);
    fill_normal(l.weights.data(), std, rng);
  }
  reset_non_weights(net);
}

void init_network(Network<float>& net, const TrainConfig& cfg) {
  if (cfg.init == InitScheme::kHe) {
    // A small output layer keeps the first steps stable on narrow nets.
    init_he(net, cfg.seed, cfg.init_std);
  } else {
    init_gaussian(net, cfg.init_std, cfg.seed);
  }
}

std::vector<bool> transfer_init(Network<float>& target, const TransferPlan& plan,
                                const TrainConfig& cfg) {
  target.validate();
  plan.source.validate();
  init_network(target, cfg);
  std::vector<bool> frozen(target.depth(), false);
  for (std::size_t k = 0; k < plan.copy_layers.size(); ++k) {
    const int li = plan.copy_layers[k];
    if (li < 1 || li > target.depth() || li > plan.source.depth()) {
      throw ShapeError(fmt::format(
          "transfer layer {} out of range (source has {}, target has {} layers)", li,
          plan.source.depth(), target.depth()));
    }
    const auto& src = plan.source.layers[li - 1];
    auto& dst = target.layers[li - 1];
    if (src.weights.shape() != dst.weights.shape() || src.stride != dst.stride ||
        src.transposed != dst.transposed) {
      throw ShapeError(fmt::format(
          "transfer layer {}: source weights {} (stride {}{}) vs target {} (stride {}{})",
          li, to_string(src.weights.shape()), src.stride, src.transposed ? ", transposed" : "",
          to_string(dst.weights.shape()), dst.stride, dst.transposed ? ", transposed" : ""));
    }
    dst.weights = src.weights;
    dst.biases = src.biases;
    const bool src_hidden = li < plan.source.depth();
    const bool dst_hidden = li < target.depth();
    if (plan.copy_slopes && src_hidden && dst_hidden) {
      target.activations[li - 1] = plan.source.activations[li - 1];
    }
    if (k < plan.freeze.size() && plan.freeze[k]) frozen[li - 1] = true;
  }
  return frozen;
}

template <typename T>
Loss<T> mse_loss(const Tensor<T>& pred, const Tensor<T>& target) {
  if (pred.shape() != target.shape()) {
    throw ShapeError(fmt::format("prediction {} vs target {}", to_string(pred.shape()),
                                 to_string(target.shape())));
  }
  const int batch = pred.shape().n;
  Loss<T> out{0.0, Tensor<T>(pred.shape())};
  const T scale = T(2) / static_cast<T>(batch);
  double acc = 0.0;
  const T* p = pred.ptr();
  const T* t = target.ptr();
  T* g = out.grad.ptr();
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const T d = p[i] - t[i];
    acc += static_cast<double>(d) * d;
    g[i] = scale * d;
  }
  out.value = acc / batch;
  return out;
}

template <typename T>
Velocity<T> Velocity<T>::zeros_like(const Network<T>& net) {
  Velocity v;
  for (const auto& b : net.blocks()) v.blocks.emplace_back(b.values.size(), T(0));
  return v;
}

template <typename T>
void sgd_step(Network<T>& net, const NetGrads<T>& grads, Velocity<T>& velocity,
              const TrainConfig& cfg, const std::vector<bool>& frozen) {
  auto params = net.blocks();
  const auto g = grads.blocks();
  if (g.size() != params.size() || velocity.blocks.size() != params.size()) {
    throw ShapeError("gradient or velocity layout does not match the network");
  }
  const int last = net.depth() - 1;
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& p = params[i];
    if (g[i].values.size() != p.values.size() ||
        velocity.blocks[i].size() != p.values.size()) {
      throw ShapeError(fmt::format("layer {} gradient size mismatch", p.layer + 1));
    }
    if (p.layer < static_cast<int>(frozen.size()) && frozen[p.layer]) continue;
    double lr = cfg.lr_rest;
    if (p.kind == ParamKind::kSlopes) {
      lr = cfg.slope_lr();
    } else if (p.layer == last) {
      lr = cfg.lr_last;
    }
    simd::momentum_step(p.values.data(), velocity.blocks[i].data(), g[i].values.data(),
                        p.values.size(), static_cast<T>(cfg.momentum), static_cast<T>(lr));
  }
}

double validation_psnr(const Network<float>& net, const PairSet& pairs, int batch_size) {
  if (pairs.size() == 0) return std::numeric_limits<double>::quiet_NaN();
  double sq = 0.0;
  std::size_t count = 0;
  for (std::size_t start = 0; start < pairs.size(); start += batch_size) {
    std::vector<std::size_t> idx;
    for (std::size_t i = start; i < std::min(pairs.size(), start + batch_size); ++i) {
      idx.push_back(i);
    }
    const Tensor<float> out = net_forward(net, pairs.input_batch(idx));
    const Tensor<float> tgt = pairs.target_batch(idx);
    if (out.shape() != tgt.shape()) {
      throw ShapeError(fmt::format("network output {} does not match targets {}",
                                   to_string(out.shape()), to_string(tgt.shape())));
    }
    for (std::size_t k = 0; k < out.size(); ++k) {
      const double d = std::clamp(static_cast<double>(out.ptr()[k]), -kPixelOffset, 1.0 - kPixelOffset) -
                       tgt.ptr()[k];
      sq += d * d;
    }
    count += out.size();
  }
  const double m = sq / static_cast<double>(count);
  return m > 0.0 ? 10.0 * std::log10(1.0 / m) : std::numeric_limits<double>::infinity();
}

void write_log_csv(const std::vector<LogRow>& log, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw Error(fmt::format("cannot open '{}' for writing", path.string()));
  f << "backprops,train_loss,val_psnr\n";
  for (const auto& r : log) {
    f << fmt::format("{},{:.9g},{:.6f}\n", r.backprops, r.train_loss, r.val_psnr);
  }
  if (!f) throw Error(fmt::format("failed writing '{}'", path.string()));
}

namespace {

bool all_finite(const Network<float>& net) {
  for (const auto& b : net.blocks()) {
    for (float v : b.values) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

}  // namespace

TrainResult train(Network<float> net, const PairSet& train_pairs, const PairSet& val_pairs,
                  const TrainConfig& cfg, const TrainOptions& opt) {
  cfg.validate();
  net.validate();
  if (train_pairs.size() == 0) throw ConfigError("no training pairs");
  const auto out_ext = netspec::output_extent(
      net.spec, {train_pairs.input_size, train_pairs.input_size});
  if (out_ext.h != train_pairs.target_size || out_ext.w != train_pairs.target_size) {
    throw ShapeError(fmt::format(
        "'{}' maps {}x{} inputs to {}x{} but targets are {}x{}", net.spec.notation(),
        train_pairs.input_size, train_pairs.input_size, out_ext.h, out_ext.w,
        train_pairs.target_size, train_pairs.target_size));
  }
  if (val_pairs.size() > 0 && (val_pairs.input_size != train_pairs.input_size ||
                               val_pairs.target_size != train_pairs.target_size)) {
    throw ShapeError("validation pairs differ in size from training pairs");
  }

  TrainResult res;
  Velocity<float> velocity = Velocity<float>::zeros_like(net);
  Network<float> last_good = net;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto validate_now = [&] {
    return val_pairs.size() > 0 ? validation_psnr(net, val_pairs, cfg.batch_size) : nan;
  };
  auto emit = [&](LogRow row) {
    res.log.push_back(row);
    if (opt.on_log) opt.on_log(row);
    if (row.val_psnr > res.best_val_psnr) {
      res.best_val_psnr = row.val_psnr;
      res.best_net = net;
    }
  };
  res.best_net = net;
  res.best_val_psnr = -std::numeric_limits<double>::infinity();

  double initial_val = validate_now();
  std::uint64_t epoch = 0;
  std::vector<std::size_t> order = epoch_order(train_pairs.size(), cfg.seed, epoch);
  std::size_t cursor = 0;
  std::int64_t backprops = 0;
  std::int64_t next_log = cfg.validation_interval;
  double loss_sum = 0.0;
  std::int64_t loss_steps = 0;

  if (cfg.max_backprops == 0) {
    emit({0, nan, initial_val});
  }
  while (backprops < cfg.max_backprops) {
    const auto take = static_cast<std::size_t>(
        std::min<std::int64_t>(cfg.batch_size, cfg.max_backprops - backprops));
    std::vector<std::size_t> idx;
    idx.reserve(take);
    while (idx.size() < take) {
      if (cursor == order.size()) {
        order = epoch_order(train_pairs.size(), cfg.seed, ++epoch);
        cursor = 0;
      }
      idx.push_back(order[cursor++]);
    }
    ForwardCache<float> cache;
    const Tensor<float> pred = net_forward(net, train_pairs.input_batch(idx), &cache);
    const Loss<float> loss = mse_loss(pred, train_pairs.target_batch(idx));
    if (!std::isfinite(loss.value)) {
      res.aborted = true;
      res.diagnostic = fmt::format(
          "non-finite training loss at {} backprops; keeping the last good parameters",
          backprops);
      net = last_good;
      break;
    }
    if (backprops == 0) emit({0, loss.value, initial_val});
    last_good = net;
    const NetGrads<float> grads = net_backward(net, cache, loss.grad);
    sgd_step(net, grads, velocity, cfg, opt.frozen);
    if (!all_finite(net)) {
      res.aborted = true;
      res.diagnostic = fmt::format(
          "non-finite parameters after the step at {} backprops; keeping the last good "
          "parameters",
          backprops);
      net = last_good;
      break;
    }
    net.iteration += static_cast<std::uint64_t>(take);
    backprops += static_cast<std::int64_t>(take);
    loss_sum += loss.value;
    ++loss_steps;
    if (backprops >= next_log || backprops == cfg.max_backprops) {
      emit({backprops, loss_sum / static_cast<double>(loss_steps), validate_now()});
      loss_sum = 0.0;
      loss_steps = 0;
      while (next_log <= backprops) next_log += cfg.validation_interval;
    }
  }

  res.final_net = net;
  if (val_pairs.size() == 0) res.best_net = net;
  if (opt.final_checkpoint) save_checkpoint(res.final_net, *opt.final_checkpoint);
  if (opt.best_checkpoint) save_checkpoint(res.best_net, *opt.best_checkpoint);
  if (opt.log_csv) write_log_csv(res.log, *opt.log_csv);
  return res;
}

template void init_gaussian(Network<float>&, double, std::uint64_t);
template void init_gaussian(Network<double>&, double, std::uint64_t);
template void init_he(Network<float>&, std::uint64_t, std::optional<double>);
template void init_he(Network<double>&, std::uint64_t, std::optional<double>);
template Loss<float> mse_loss(const Tensor<float>&, const Tensor<float>&);
template Loss<double> mse_loss(const Tensor<double>&, const Tensor<double>&);
template struct Velocity<float>;
template struct Velocity<double>;
template void sgd_step(Network<float>&, const NetGrads<float>&, Velocity<float>&,
                       const TrainConfig&, const std::vector<bool>&);
template void sgd_step(Network<double>&, const NetGrads<double>&, Velocity<double>&,
                       const TrainConfig&, const std::vector<bool>&);

}  // namespace arcnn
