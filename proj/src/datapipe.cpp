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

#include "arcnn/datapipe.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "arcnn/error.hpp"
#include "arcnn/codec.hpp"
#include "arcnn/resample.hpp"

namespace arcnn {

std::vector<GrayImage> augment(const GrayImage& img, int min_side,
                               std::vector<std::string>* warnings) {
  std::vector<GrayImage> out;
  for (int si = 0; si <= static_cast<int>(kAugmentScales.size()); ++si) {
    const double factor = si == 0 ? 1.0 : kAugmentScales[si - 1];
    const int h = static_cast<int>(std::lround(img.h * factor));
    const int w = static_cast<int>(std::lround(img.w * factor));
    if (h < min_side || w < min_side) {
      if (warnings) {
        warnings->push_back(fmt::format(
            "dropping {}x{} variant at scale {} (below {}x{})", h, w, factor,
            min_side, min_side));
      }
      continue;
    }
    const GrayImage scaled = si == 0 ? img : resize_bicubic(img, h, w);
    for (int r = 0; r < 4; ++r) out.push_back(rotate90(scaled, r));
  }
  return out;
}

int grid_count(int dim, int size, int stride) {
  if (size < 1 || stride < 1) {
    throw ConfigError(fmt::format("bad sub-image size {} / stride {}", size, stride));
  }
  return dim < size ? 0 : (dim - size) / stride + 1;
}

std::vector<GrayImage> extract_subimages(const GrayImage& img, int size, int stride) {
  const int ny = grid_count(img.h, size, stride);
  const int nx = grid_count(img.w, size, stride);
  std::vector<GrayImage> out;
  out.reserve(static_cast<std::size_t>(ny) * nx);
  for (int gy = 0; gy < ny; ++gy) {
    for (int gx = 0; gx < nx; ++gx) {
      out.push_back(crop(img, gy * stride, gx * stride, size, size));
    }
  }
  return out;
}

void PairSet::append(const GrayImage& input, const GrayImage& target) {
  if (input.h != input_size || input.w != input_size || target.h != target_size ||
      target.w != target_size) {
    throw ShapeError(fmt::format("pair {}x{} -> {}x{} does not fit a {} -> {} set",
                                 input.h, input.w, target.h, target.w, input_size,
                                 target_size));
  }
  for (double v : input.samples) inputs.push_back(static_cast<float>(to_unit(v)));
  for (double v : target.samples) targets.push_back(static_cast<float>(to_unit(v)));
}

SamplePair PairSet::pair(std::size_t i) const {
  if (i >= size()) throw ShapeError(fmt::format("pair {} out of {}", i, size()));
  const std::size_t ni = static_cast<std::size_t>(input_size) * input_size;
  const std::size_t nt = static_cast<std::size_t>(target_size) * target_size;
  SamplePair p{GrayImage(input_size, input_size), GrayImage(target_size, target_size)};
  for (std::size_t k = 0; k < ni; ++k) p.input.samples[k] = from_unit(inputs[i * ni + k]);
  for (std::size_t k = 0; k < nt; ++k) p.target.samples[k] = from_unit(targets[i * nt + k]);
  return p;
}

namespace {

Tensor<float> gather(const std::vector<float>& src, int side,
                     const std::vector<std::size_t>& idx) {
  const std::size_t n = static_cast<std::size_t>(side) * side;
  Tensor<float> t(Shape{static_cast<int>(idx.size()), 1, side, side});
  for (std::size_t b = 0; b < idx.size(); ++b) {
    std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(idx[b] * n), n,
                t.ptr() + b * n);
  }
  return t;
}

}  // namespace

Tensor<float> PairSet::input_batch(const std::vector<std::size_t>& idx) const {
  return gather(inputs, input_size, idx);
}

Tensor<float> PairSet::target_batch(const std::vector<std::size_t>& idx) const {
  return gather(targets, target_size, idx);
}

PairSet build_pairs(const std::vector<GrayImage>& clean, const PairOptions& opt,
                    std::vector<std::string>* warnings) {
  opt.degrade.validate();
  if (opt.net_stride < 1 || opt.net_stride > opt.patch) {
    throw ConfigError(fmt::format("network stride {} does not fit {}-pixel patches",
                                  opt.net_stride, opt.patch));
  }
  if (opt.degrade.rescale_factor.value_or(1.0) != 1.0) {
    throw ConfigError("pair building degrades at full size; rescale_factor must be 1");
  }
  PairSet set;
  set.input_size = opt.patch;
  set.target_size = opt.patch - opt.net_stride + 1;
  set.net_stride = opt.net_stride;
  for (const GrayImage& img : clean) {
    std::vector<GrayImage> variants;
    if (opt.augment) {
      variants = augment(img, opt.patch, warnings);
    } else {
      variants.push_back(img);
    }
    for (const GrayImage& v : variants) {
      if (v.h < opt.patch || v.w < opt.patch) continue;
      const GrayImage degraded = jpeg_degrade(v, opt.degrade);
      const auto ins = extract_subimages(degraded, opt.patch, opt.patch_stride);
      const auto tgts = extract_subimages(v, opt.patch, opt.patch_stride);
      for (std::size_t k = 0; k < ins.size(); ++k) {
        set.append(ins[k], crop(tgts[k], 0, 0, set.target_size, set.target_size));
      }
    }
  }
  return set;
}

std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed,
                                     std::uint64_t epoch) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(epoch), static_cast<std::uint32_t>(epoch >> 32)};
  std::mt19937_64 rng(seq);
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

std::vector<std::filesystem::path> read_manifest(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error(fmt::format("cannot open manifest '{}'", path.string()));
  const auto base = path.parent_path();
  std::vector<std::filesystem::path> out;
  std::string line;
  while (std::getline(f, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    std::filesystem::path p(line.substr(first, last - first + 1));
    out.push_back(p.is_absolute() ? p : base / p);
  }
  return out;
}

namespace {

constexpr char kPairMagic[4] = {'A', 'R', 'C', 'P'};

template <typename U>
void put(std::ofstream& f, U v) {
  f.write(reinterpret_cast<const char*>(&v), sizeof(U));
}

}  // namespace

void save_pairs(const PairSet& pairs, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(fmt::format("cannot open '{}' for writing", path.string()));
  f.write(kPairMagic, 4);
  put<std::uint32_t>(f, kPairBlobVersion);
  put<std::uint32_t>(f, static_cast<std::uint32_t>(pairs.input_size));
  put<std::uint32_t>(f, static_cast<std::uint32_t>(pairs.target_size));
  put<std::uint32_t>(f, static_cast<std::uint32_t>(pairs.net_stride));
  put<std::uint64_t>(f, pairs.size());
  f.write(reinterpret_cast<const char*>(pairs.inputs.data()),
          static_cast<std::streamsize>(pairs.inputs.size() * sizeof(float)));
  f.write(reinterpret_cast<const char*>(pairs.targets.data()),
          static_cast<std::streamsize>(pairs.targets.size() * sizeof(float)));
  if (!f) throw Error(fmt::format("failed writing '{}'", path.string()));
}

PairSet load_pairs(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(fmt::format("cannot open pair file '{}'", path.string()));
  const std::string bytes((std::istreambuf_iterator<char>(f)),
                          std::istreambuf_iterator<char>());
  constexpr std::size_t kHeader = 4 + 4 * 4 + 8;
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kPairMagic, 4) != 0) {
    throw FormatError(fmt::format("'{}' is not a pair file (bad magic)", path.string()));
  }
  if (bytes.size() < kHeader) throw FormatError("corrupt pair file: truncated header");
  std::uint32_t hdr[4];
  std::uint64_t count;
  std::memcpy(hdr, bytes.data() + 4, sizeof hdr);
  std::memcpy(&count, bytes.data() + 20, sizeof count);
  if (hdr[0] != kPairBlobVersion) {
    throw FormatError(fmt::format("unsupported pair file version {}", hdr[0]));
  }
  PairSet set;
  set.input_size = static_cast<int>(hdr[1]);
  set.target_size = static_cast<int>(hdr[2]);
  set.net_stride = static_cast<int>(hdr[3]);
  if (set.input_size < 1 || set.target_size < 1 || set.target_size > set.input_size ||
      set.net_stride != set.input_size - set.target_size + 1) {
    throw FormatError("corrupt pair file: inconsistent sizes");
  }
  const std::size_t ni = count * set.input_size * set.input_size;
  const std::size_t nt = count * set.target_size * set.target_size;
  const std::size_t need = kHeader + (ni + nt) * sizeof(float);
  if (bytes.size() != need) {
    throw FormatError(fmt::format("corrupt pair file: {} bytes, expected {}",
                                  bytes.size(), need));
  }
  set.inputs.resize(ni);
  set.targets.resize(nt);
  std::memcpy(set.inputs.data(), bytes.data() + kHeader, ni * sizeof(float));
  std::memcpy(set.targets.data(), bytes.data() + kHeader + ni * sizeof(float),
              nt * sizeof(float));
  return set;
}

}  // namespace arcnn
