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

#include "arcnn/netspec.hpp"

#include <algorithm>
#include <regex>

#include <fmt/format.h>

#include "arcnn/error.hpp"
#include "arcnn/nn/conv.hpp"

namespace arcnn::netspec {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_segments(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto dash = text.find('-', start);
    out.emplace_back(trim(text.substr(start, dash - start)));
    if (dash == std::string_view::npos) break;
    start = dash + 1;
  }
  return out;
}

int to_count(const std::string& digits, const std::string& segment,
             const char* what) {
  if (digits.size() > 6) {
    throw ParseError(fmt::format("{} too large in segment '{}'", what, segment));
  }
  const int v = std::stoi(digits);
  if (v < 1) {
    throw ParseError(fmt::format("{} must be >= 1 in segment '{}'", what, segment));
  }
  return v;
}

// floor(a / b) for b > 0.
long floor_div(long a, long b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }

}  // namespace

int ArchSpec::layer_stride(int layer) const {
  if (layer == 0 && layers[0].kind == LayerKind::kConv) return stride;
  if (layer == depth() - 1 && layers[layer].kind == LayerKind::kDeconv) {
    return stride;
  }
  return 1;
}

std::string ArchSpec::notation() const {
  std::string out;
  for (const auto& l : layers) {
    if (!out.empty()) out += '-';
    out += l.kind == LayerKind::kConv ? fmt::format("{}({})", l.filters, l.size)
                                      : fmt::format("{}[{}]", l.filters, l.size);
  }
  if (stride != 1) out += fmt::format("-s{}", stride);
  return out;
}

void ArchSpec::validate() const {
  if (layers.empty()) throw ParseError("architecture has no layers");
  if (stride < 1) throw ParseError(fmt::format("stride {} must be >= 1", stride));
  if (input_channels < 1) throw ParseError("input channel count must be >= 1");
  for (int i = 0; i < depth(); ++i) {
    const auto& l = layers[i];
    if (l.filters < 1 || l.size < 1) {
      throw ParseError(fmt::format("layer {} has a non-positive extent", i + 1));
    }
    if (l.size % 2 == 0) {
      throw ParseError(fmt::format(
          "layer {} filter size {} must be odd for same-size padding", i + 1,
          l.size));
    }
    if (l.kind == LayerKind::kDeconv) {
      if (i != depth() - 1) {
        throw ParseError(fmt::format(
            "deconvolution layer {} must be the last layer", i + 1));
      }
      if (i == 0) {
        throw ParseError("a deconvolution layer needs a convolution before it");
      }
    }
  }
  if (stride > 1 && layers.back().kind != LayerKind::kDeconv) {
    throw ParseError(fmt::format(
        "stride {} requires the last layer to be a deconvolution", stride));
  }
}

ArchSpec parse_arch(std::string_view text) {
  const std::string_view body = trim(text);
  if (body.empty()) throw ParseError("empty architecture notation");

  // "×" is U+00D7, two bytes in UTF-8.
  static const std::regex kLayer(R"(^(\d+)([\(\[])(\d+)([\)\]])(?:(?:x|\xC3\x97)(\d+))?$)");
  static const std::regex kStride(R"(^s(\d+)$)");

  ArchSpec spec;
  const auto segments = split_segments(body);
  bool have_stride = false;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const std::string& seg = segments[i];
    std::smatch m;
    if (std::regex_match(seg, m, kStride)) {
      if (have_stride) {
        throw ParseError(fmt::format("multiple stride suffixes ('{}')", seg));
      }
      if (i + 1 != segments.size()) {
        throw ParseError(fmt::format("stride suffix '{}' must come last", seg));
      }
      spec.stride = to_count(m[1].str(), seg, "stride");
      have_stride = true;
      continue;
    }
    if (!std::regex_match(seg, m, kLayer)) {
      throw ParseError(fmt::format("malformed segment '{}' in '{}'", seg, body));
    }
    const bool round = m[2].str() == "(";
    if (round != (m[4].str() == ")")) {
      throw ParseError(fmt::format("unbalanced brackets in segment '{}'", seg));
    }
    LayerSpec layer{to_count(m[1].str(), seg, "filter count"),
                    to_count(m[3].str(), seg, "filter size"),
                    round ? LayerKind::kConv : LayerKind::kDeconv};
    const int repeat = m[5].matched ? to_count(m[5].str(), seg, "repeat count") : 1;
    if (!round && repeat != 1) {
      throw ParseError(fmt::format("deconvolution segment '{}' cannot repeat", seg));
    }
    if (!spec.layers.empty() && spec.layers.back().kind == LayerKind::kDeconv) {
      throw ParseError(fmt::format(
          "segment '{}' follows a deconvolution; deconvolution must be last",
          seg));
    }
    for (int r = 0; r < repeat; ++r) spec.layers.push_back(layer);
  }
  spec.validate();
  return spec;
}

ParamCounts count_params(const ArchSpec& spec) {
  spec.validate();
  ParamCounts counts;
  for (int i = 0; i < spec.depth(); ++i) {
    const auto& l = spec.layers[i];
    const std::int64_t n =
        static_cast<std::int64_t>(spec.in_channels(i)) * l.filters * l.size * l.size;
    counts.per_layer.push_back(n);
    counts.total += n;
    counts.biases += l.filters;
    if (i + 1 < spec.depth()) counts.slopes += l.filters;
  }
  return counts;
}

std::vector<Extent> layer_extents(const ArchSpec& spec, Extent input) {
  spec.validate();
  std::vector<Extent> out;
  Extent cur = input;
  for (int i = 0; i < spec.depth(); ++i) {
    const int f = spec.layers[i].size;
    const int s = spec.layer_stride(i);
    const int p = spec.pad(i);
    if (spec.is_transposed(i)) {
      cur = {nn::deconv_output_extent(cur.h, f, s, p),
             nn::deconv_output_extent(cur.w, f, s, p)};
    } else {
      cur = {nn::conv_output_extent(cur.h, f, s, p),
             nn::conv_output_extent(cur.w, f, s, p)};
    }
    out.push_back(cur);
  }
  return out;
}

Extent output_extent(const ArchSpec& spec, Extent input) {
  return layer_extents(spec, input).back();
}

OpCounts count_ops(const ArchSpec& spec, Extent input) {
  const auto extents = layer_extents(spec, input);
  const auto params = count_params(spec);
  OpCounts ops;
  for (int i = 0; i < spec.depth(); ++i) {
    const Extent charged = spec.is_transposed(i)
                               ? (i == 0 ? input : extents[i - 1])
                               : extents[i];
    const std::int64_t n =
        params.per_layer[i] * static_cast<std::int64_t>(charged.h) * charged.w;
    ops.per_layer.push_back(n);
    ops.total += n;
  }
  return ops;
}

namespace {

// Input index range [lo, hi] along one axis feeding output range [lo, hi].
std::pair<long, long> trace_axis(const ArchSpec& spec, long lo, long hi,
                                 const std::vector<int>* in_sizes) {
  for (int i = spec.depth() - 1; i >= 0; --i) {
    const long f = spec.layers[i].size;
    const long s = spec.layer_stride(i);
    const long p = spec.pad(i);
    if (spec.is_transposed(i)) {
      // output y = j * s - p + k, 0 <= k < f
      lo = floor_div(lo + p - f + 1 + s - 1, s);
      hi = floor_div(hi + p, s);
    } else {
      // input = y * s - p + k
      lo = lo * s - p;
      hi = hi * s - p + f - 1;
    }
    if (in_sizes) {
      lo = std::max(lo, 0L);
      hi = std::min(hi, static_cast<long>((*in_sizes)[i]) - 1);
    }
  }
  return {lo, hi};
}

}  // namespace

Rect receptive_field(const ArchSpec& spec, int y, int x,
                     std::optional<Extent> input) {
  spec.validate();
  if (!input) {
    const auto [y0, y1] = trace_axis(spec, y, y, nullptr);
    const auto [x0, x1] = trace_axis(spec, x, x, nullptr);
    return Rect{static_cast<int>(y0), static_cast<int>(x0), static_cast<int>(y1),
                static_cast<int>(x1)};
  }
  const auto extents = layer_extents(spec, *input);
  std::vector<int> in_h{input->h};
  std::vector<int> in_w{input->w};
  for (int i = 0; i + 1 < spec.depth(); ++i) {
    in_h.push_back(extents[i].h);
    in_w.push_back(extents[i].w);
  }
  const auto [y0, y1] = trace_axis(spec, y, y, &in_h);
  const auto [x0, x1] = trace_axis(spec, x, x, &in_w);
  return Rect{static_cast<int>(y0), static_cast<int>(x0), static_cast<int>(y1),
              static_cast<int>(x1)};
}

AccelerationReport acceleration_report(const ArchSpec& base,
                                       const ArchSpec& fast, Extent size) {
  AccelerationReport r;
  r.quoted_ratio = static_cast<double>(kQuotedArcnnParams) /
                   static_cast<double>(kQuotedFastArcnnParams) *
                   kQuotedFastStride * kQuotedFastStride;
  r.base_notation = base.notation();
  r.fast_notation = fast.notation();
  r.base_params = count_params(base).total;
  r.fast_params = count_params(fast).total;
  r.stride = fast.stride;
  r.formula_ratio = static_cast<double>(r.base_params) /
                    static_cast<double>(r.fast_params) * fast.stride * fast.stride;
  r.size = size;
  r.base_ops = count_ops(base, size).total;
  r.fast_ops = count_ops(fast, size).total;
  r.op_model_ratio =
      static_cast<double>(r.base_ops) / static_cast<double>(r.fast_ops);
  r.quoted_discrepancy = r.base_notation == kArcnnNotation &&
                         r.fast_notation == kFastArcnnNotation &&
                         r.fast_params != kQuotedFastArcnnParams;
  return r;
}

}  // namespace arcnn::netspec
