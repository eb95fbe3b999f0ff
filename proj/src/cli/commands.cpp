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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <random>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "arcnn/checkpoint.hpp"
#include "arcnn/cli.hpp"
#include "arcnn/codec.hpp"
#include "arcnn/datapipe.hpp"
#include "arcnn/error.hpp"
#include "arcnn/quality.hpp"
#include "arcnn/resample.hpp"
#include "arcnn/trainer.hpp"

namespace arcnn::cli {
namespace fs = std::filesystem;

namespace {

std::string report_row(const std::string& name, const QualityReport& r) {
  return fmt::format("{},{},{:.4f},{}\n", name, format_db(r.psnr), r.ssim,
                     format_db(r.psnr_b));
}

constexpr const char* kReportHeader = "path,psnr,ssim,psnr_b\n";

}  // namespace

void cmd_degrade(const DegradeArgs& a, std::ostream& out, std::ostream&) {
  DegradeConfig cfg;
  cfg.quality = a.quality;
  cfg.rescale_factor = a.rescale;
  cfg.validate();
  const GrayImage img = read_pgm(a.in);
  const GrayImage degraded = rescale_degrade(img, cfg);
  write_pgm(degraded, a.out);
  // With rescaling, the reference is the rescaled image before coding.
  const GrayImage ref =
      a.rescale && *a.rescale != 1.0 ? rescale_bicubic(img, *a.rescale) : img;
  out << kReportHeader << report_row(a.out.string(), evaluate(ref, degraded));
}

void cmd_build_dataset(const BuildDatasetArgs& a, std::ostream& out, std::ostream& err) {
  PairOptions opt;
  opt.degrade.quality = a.quality;
  opt.net_stride = a.stride;
  opt.patch = a.patch;
  opt.patch_stride = a.patch_stride;
  opt.augment = a.augment;
  std::vector<GrayImage> images;
  for (const auto& p : read_manifest(a.manifest)) images.push_back(read_pgm(p));
  if (images.empty()) throw ConfigError(fmt::format("manifest '{}' lists no images", a.manifest.string()));
  std::vector<std::string> warnings;
  const PairSet pairs = build_pairs(images, opt, &warnings);
  for (const auto& w : warnings) fmt::print(err, "warning: {}\n", w);
  save_pairs(pairs, a.out);
  out << "images,pairs,input_size,target_size\n"
      << fmt::format("{},{},{},{}\n", images.size(), pairs.size(), pairs.input_size,
                     pairs.target_size);
}

void cmd_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  TrainConfig cfg = a.config ? load_train_config(*a.config) : TrainConfig{};
  if (a.seed) cfg.seed = *a.seed;
  cfg.validate();
  const auto spec = netspec::parse_arch(a.arch);
  for (int f : a.freeze) {
    if (std::find(a.copy_layers.begin(), a.copy_layers.end(), f) == a.copy_layers.end()) {
      throw ConfigError(fmt::format("--freeze layer {} is not in --copy-layers", f));
    }
  }
  if (!a.copy_layers.empty() && !a.transfer_from) {
    throw ConfigError("--copy-layers needs --transfer-from");
  }

  auto net = Network<float>::make(spec);
  TrainOptions opt;
  if (a.transfer_from) {
    TransferPlan plan{load_checkpoint(*a.transfer_from), a.copy_layers, a.copy_slopes, {}};
    for (int l : a.copy_layers) {
      plan.freeze.push_back(std::find(a.freeze.begin(), a.freeze.end(), l) != a.freeze.end());
    }
    opt.frozen = transfer_init(net, plan, cfg);
  } else {
    init_network(net, cfg);
  }

  const PairSet train_pairs = load_pairs(a.data);
  const PairSet val_pairs = load_pairs(a.val);
  fs::create_directories(a.out_dir);
  opt.final_checkpoint = a.out_dir / "final.ckpt";
  opt.best_checkpoint = a.out_dir / "best.ckpt";
  opt.log_csv = a.out_dir / "log.csv";
  out << "backprops,train_loss,val_psnr\n";
  opt.on_log = [&](const LogRow& r) {
    out << fmt::format("{},{:.9g},{:.6f}\n", r.backprops, r.train_loss, r.val_psnr);
    out.flush();
  };
  const TrainResult res = train(std::move(net), train_pairs, val_pairs, cfg, opt);
  if (res.aborted) throw Error(res.diagnostic);
  fmt::print(err, "best validation PSNR {:.4f} dB; checkpoints in {}\n", res.best_val_psnr,
             a.out_dir.string());
}

void cmd_restore(const RestoreArgs& a, std::ostream& out, std::ostream&) {
  const Network<float> net = load_checkpoint(a.model);
  const GrayImage img = read_pgm(a.in);
  const int f1 = net.spec.layers[0].size;
  if (img.h < f1 || img.w < f1) {
    throw ShapeError(fmt::format("image {}x{} is smaller than the {}x{} first-layer field",
                                 img.h, img.w, f1, f1));
  }
  const GrayImage restored = from_tensor(net_forward(net, to_tensor<float>(img)));
  const int s = net.spec.stride;
  write_pgm(restored, a.out,
            fmt::format("restored by {}; output is {} px smaller per axis (stride {})",
                        net.spec.notation(), s - 1, s));
  out << "path,height,width\n" << fmt::format("{},{},{}\n", a.out.string(), restored.h, restored.w);
}

namespace {

std::map<std::string, fs::path> list_images(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(fmt::format("'{}' is not a directory", dir.string()));
  std::map<std::string, fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto ext = e.path().extension().string();
    if (e.is_regular_file() && (ext == ".pgm" || ext == ".ppm")) {
      files[e.path().filename().string()] = e.path();
    }
  }
  return files;
}

}  // namespace

void cmd_eval(const EvalArgs& a, std::ostream& out, std::ostream&) {
  const auto refs = list_images(a.ref_dir);
  const auto tests = list_images(a.test_dir);
  std::vector<std::string> unmatched;
  for (const auto& [name, _] : refs) {
    if (!tests.contains(name)) unmatched.push_back(name + " (missing in test dir)");
  }
  for (const auto& [name, _] : tests) {
    if (!refs.contains(name)) unmatched.push_back(name + " (missing in reference dir)");
  }
  if (!unmatched.empty()) {
    throw Error(fmt::format("unmatched files: {}", fmt::join(unmatched, ", ")));
  }
  if (refs.empty()) throw Error(fmt::format("no images in '{}'", a.ref_dir.string()));

  auto capped = [](double db) { return std::isinf(db) && db > 0 ? kPsnrTextCap : db; };
  double sum_psnr = 0, sum_ssim = 0, sum_psnr_b = 0;
  out << kReportHeader;
  for (const auto& [name, ref_path] : refs) {
    const GrayImage test = read_pgm(tests.at(name));
    const GrayImage ref = align_reference(read_pgm(ref_path), test.h, test.w);
    const QualityReport r = evaluate(ref, test);
    out << report_row(name, r);
    sum_psnr += capped(r.psnr);
    sum_ssim += r.ssim;
    sum_psnr_b += capped(r.psnr_b);
  }
  const double n = static_cast<double>(refs.size());
  out << report_row("average", {sum_psnr / n, sum_ssim / n, sum_psnr_b / n});
}

BenchResult cmd_bench(const BenchArgs& a, std::ostream& out, std::ostream&) {
  if (a.size < 1 || a.repeats < 1) throw ConfigError("--size and --repeats must be >= 1");
  const auto spec_a = netspec::parse_arch(a.arch_a);
  const auto spec_b = netspec::parse_arch(a.arch_b);

  GrayImage img(a.size, a.size);
  std::mt19937_64 rng(a.seed);
  std::uniform_real_distribution<double> u(0.0, 255.0);
  for (double& v : img.samples) v = u(rng);
  const Tensor<float> input = to_tensor<float>(img);

  auto time_net = [&](const netspec::ArchSpec& spec) {
    auto net = Network<float>::make(spec);
    init_he(net, a.seed);
    net_forward(net, input);  // warm-up: workspace allocation, page faults
    std::vector<double> secs;
    for (int r = 0; r < a.repeats; ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      net_forward(net, input);
      secs.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    std::sort(secs.begin(), secs.end());
    return secs[secs.size() / 2];
  };

  BenchResult res;
  res.seconds_a = time_net(spec_a);
  res.seconds_b = time_net(spec_b);
  res.measured_ratio = res.seconds_a / res.seconds_b;
  const netspec::Extent ext{a.size, a.size};
  const auto ops_a = netspec::count_ops(spec_a, ext).total;
  const auto ops_b = netspec::count_ops(spec_b, ext).total;
  res.op_model_ratio = static_cast<double>(ops_a) / static_cast<double>(ops_b);

  out << "arch,params,macs,median_ms\n";
  out << fmt::format("{},{},{},{:.3f}\n", spec_a.notation(), netspec::count_params(spec_a).total,
                     ops_a, res.seconds_a * 1e3);
  out << fmt::format("{},{},{},{:.3f}\n", spec_b.notation(), netspec::count_params(spec_b).total,
                     ops_b, res.seconds_b * 1e3);
  out << fmt::format("measured_speedup,{:.3f}\nop_model_speedup,{:.3f}\n", res.measured_ratio,
                     res.op_model_ratio);
  return res;
}

void cmd_inspect(const InspectArgs& a, std::ostream& out, std::ostream&) {
  if (a.size < 1) throw ConfigError("--size must be >= 1");
  const netspec::Extent ext{a.size, a.size};
  if (a.arch) {
    const auto spec = netspec::parse_arch(*a.arch);
    const auto params = netspec::count_params(spec);
    const auto ops = netspec::count_ops(spec, ext);
    const double pixels = static_cast<double>(a.size) * a.size;
    out << fmt::format("# {}\n", spec.notation());
    out << "layer,kind,n_in,n_out,f,stride,params,macs_per_pixel\n";
    for (int i = 0; i < spec.depth(); ++i) {
      const auto& l = spec.layers[i];
      out << fmt::format("{},{},{},{},{},{},{},{:.2f}\n", i + 1,
                         spec.is_transposed(i) ? "deconv" : "conv", spec.in_channels(i),
                         l.filters, l.size, spec.layer_stride(i), params.per_layer[i],
                         static_cast<double>(ops.per_layer[i]) / pixels);
    }
    out << fmt::format("total,,,,,,{},{:.2f}\n", params.total,
                       static_cast<double>(ops.total) / pixels);
    out << fmt::format("biases,{}\nslopes,{}\nall_parameters,{}\n", params.biases,
                       params.slopes, params.all());
    const auto out_ext = netspec::output_extent(spec, ext);
    const auto rf = netspec::receptive_field(spec, 0, 0);
    out << fmt::format("output_size,{}x{}\nreceptive_field,{}x{}\n", out_ext.h, out_ext.w,
                       rf.height(), rf.width());
  }
  if (a.acceleration || a.against) {
    const auto base = netspec::parse_arch(a.arch ? *a.arch : std::string(netspec::kArcnnNotation));
    const auto fast = netspec::parse_arch(a.against ? *a.against
                                                    : std::string(netspec::kFastArcnnNotation));
    const auto r = netspec::acceleration_report(base, fast, ext);
    out << "acceleration,base_params,fast_params,stride,ratio,note\n";
    out << fmt::format("quoted,{},{},{},{:.1f},quoted reference totals\n",
                       netspec::kQuotedArcnnParams, netspec::kQuotedFastArcnnParams,
                       netspec::kQuotedFastStride, r.quoted_ratio);
    out << fmt::format("formula,{},{},{},{:.3f},{}\n", r.base_params, r.fast_params, r.stride,
                       r.formula_ratio,
                       r.quoted_discrepancy
                           ? fmt::format("KNOWN DISCREPANCY: formula total {} differs from "
                                         "quoted {}",
                                         r.fast_params, netspec::kQuotedFastArcnnParams)
                           : std::string("formula totals"));
    out << fmt::format("op_model_{}x{},{},{},{},{:.3f},per-layer MAC counts\n", ext.h, ext.w,
                       r.base_ops, r.fast_ops, r.stride, r.op_model_ratio);
  }
  if (!a.arch && !a.acceleration && !a.against) {
    throw ConfigError("inspect needs --arch, --against or --acceleration");
  }
}

}  // namespace arcnn::cli
