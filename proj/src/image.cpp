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

#include "arcnn/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

#include <fmt/format.h>

#include "arcnn/error.hpp"

namespace arcnn {

GrayImage::GrayImage(int h_, int w_, double fill) : h(h_), w(w_) {
  if (h < 1 || w < 1) throw ShapeError(fmt::format("image size {}x{} is empty", h, w));
  samples.assign(static_cast<std::size_t>(h) * w, fill);
}

GrayImage::GrayImage(int h_, int w_, std::vector<double> s)
    : h(h_), w(w_), samples(std::move(s)) {
  if (h < 1 || w < 1) throw ShapeError(fmt::format("image size {}x{} is empty", h, w));
  if (samples.size() != static_cast<std::size_t>(h) * w) {
    throw ShapeError(fmt::format("{} samples for a {}x{} image", samples.size(), h, w));
  }
}

void GrayImage::clamp() {
  for (double& v : samples) v = std::clamp(v, 0.0, 255.0);
}

bool GrayImage::in_range() const {
  return std::all_of(samples.begin(), samples.end(),
                     [](double v) { return v >= 0.0 && v <= 255.0; });
}

GrayImage to_luminance(const RgbImage& rgb) {
  GrayImage out(rgb.h, rgb.w);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& p = rgb.pixels[i];
    out.samples[i] = std::clamp(0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2], 0.0, 255.0);
  }
  return out;
}

namespace {

class PnmHeader {
 public:
  explicit PnmHeader(const std::string& bytes) : b_(bytes) {}

  // Next whitespace-delimited token, skipping '#' comments.
  int number(const std::string& path) {
    skip_space();
    std::size_t start = pos_;
    while (pos_ < b_.size() && std::isdigit(static_cast<unsigned char>(b_[pos_]))) ++pos_;
    if (start == pos_ || pos_ - start > 9) {
      throw FormatError(fmt::format("'{}': malformed PNM header", path));
    }
    return std::stoi(b_.substr(start, pos_ - start));
  }

  // The single whitespace byte that ends the header.
  std::size_t raster_start(const std::string& path) {
    if (pos_ >= b_.size() || !std::isspace(static_cast<unsigned char>(b_[pos_]))) {
      throw FormatError(fmt::format("'{}': malformed PNM header", path));
    }
    return pos_ + 1;
  }

  std::size_t pos_ = 2;

 private:
  void skip_space() {
    while (pos_ < b_.size()) {
      const char c = b_[pos_];
      if (c == '#') {
        while (pos_ < b_.size() && b_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::string& b_;
};

}  // namespace

GrayImage read_pgm(const std::filesystem::path& path) {
  const std::string p = path.string();
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(fmt::format("cannot open image '{}'", p));
  const std::string bytes((std::istreambuf_iterator<char>(f)),
                          std::istreambuf_iterator<char>());
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6')) {
    throw FormatError(fmt::format("'{}' is not a binary PGM/PPM (P5/P6) file", p));
  }
  const bool rgb = bytes[1] == '6';
  PnmHeader hdr(bytes);
  const int w = hdr.number(p);
  const int h = hdr.number(p);
  const int maxval = hdr.number(p);
  if (w < 1 || h < 1 || maxval < 1 || maxval > 65535) {
    throw FormatError(fmt::format("'{}': bad PNM dimensions or maxval", p));
  }
  const std::size_t start = hdr.raster_start(p);
  const int channels = rgb ? 3 : 1;
  const int bps = maxval > 255 ? 2 : 1;
  const std::size_t need = static_cast<std::size_t>(w) * h * channels * bps;
  if (bytes.size() - start < need) {
    throw FormatError(fmt::format("'{}': raster truncated ({} of {} bytes)", p,
                                  bytes.size() - start, need));
  }
  const auto* raw = reinterpret_cast<const unsigned char*>(bytes.data() + start);
  const double scale = 255.0 / maxval;
  auto sample = [&](std::size_t i) {
    const unsigned v = bps == 1 ? raw[i] : (raw[2 * i] << 8) | raw[2 * i + 1];
    return std::min(static_cast<double>(v), static_cast<double>(maxval)) * scale;
  };
  if (!rgb) {
    GrayImage out(h, w);
    for (std::size_t i = 0; i < out.size(); ++i) out.samples[i] = sample(i);
    return out;
  }
  RgbImage img{h, w, std::vector<std::array<double, 3>>(static_cast<std::size_t>(h) * w)};
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    img.pixels[i] = {sample(3 * i), sample(3 * i + 1), sample(3 * i + 2)};
  }
  return to_luminance(img);
}

void write_pgm(const GrayImage& img, const std::filesystem::path& path,
               const std::string& comment) {
  std::string out = "P5\n";
  if (!comment.empty()) {
    std::string line = comment;
    std::replace(line.begin(), line.end(), '\n', ' ');
    out += "# " + line + "\n";
  }
  out += fmt::format("{} {}\n255\n", img.w, img.h);
  out.reserve(out.size() + img.size());
  for (double v : img.samples) {
    out.push_back(static_cast<char>(static_cast<unsigned char>(
        std::lround(std::clamp(v, 0.0, 255.0)))));
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(fmt::format("cannot open '{}' for writing", path.string()));
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw Error(fmt::format("failed writing '{}'", path.string()));
}

GrayImage rotate90(const GrayImage& img, int quarter_turns) {
  const int k = ((quarter_turns % 4) + 4) % 4;
  if (k == 0) return img;
  if (k == 2) {
    GrayImage out = img;
    std::reverse(out.samples.begin(), out.samples.end());
    return out;
  }
  GrayImage out(img.w, img.h);
  for (int y = 0; y < img.h; ++y) {
    for (int x = 0; x < img.w; ++x) {
      if (k == 1) {
        out.at(x, img.h - 1 - y) = img.at(y, x);
      } else {
        out.at(img.w - 1 - x, y) = img.at(y, x);
      }
    }
  }
  return out;
}

GrayImage crop(const GrayImage& img, int y, int x, int h, int w) {
  if (y < 0 || x < 0 || h < 1 || w < 1 || y + h > img.h || x + w > img.w) {
    throw ShapeError(fmt::format("crop {}x{} at ({}, {}) exceeds {}x{} image", h, w,
                                 y, x, img.h, img.w));
  }
  GrayImage out(h, w);
  for (int r = 0; r < h; ++r) {
    std::copy_n(img.samples.begin() + static_cast<std::ptrdiff_t>(y + r) * img.w + x, w,
                out.samples.begin() + static_cast<std::ptrdiff_t>(r) * w);
  }
  return out;
}

template <typename T>
Tensor<T> to_tensor(const GrayImage& img) {
  std::vector<T> v(img.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<T>(to_unit(img.samples[i]));
  return Tensor<T>(Shape{1, 1, img.h, img.w}, std::move(v));
}

template <typename T>
GrayImage from_tensor(const Tensor<T>& t, int n) {
  const Shape& s = t.shape();
  if (s.c != 1) throw ShapeError(fmt::format("cannot view {} as a gray image", to_string(s)));
  GrayImage out(s.h, s.w);
  const auto plane = t.plane(n, 0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.samples[i] = std::clamp(from_unit(static_cast<double>(plane[i])), 0.0, 255.0);
  }
  return out;
}

GrayImage quantize8(const GrayImage& img) {
  GrayImage out = img;
  for (double& v : out.samples) v = std::clamp(std::round(v), 0.0, 255.0);
  return out;
}

template Tensor<float> to_tensor(const GrayImage&);
template Tensor<double> to_tensor(const GrayImage&);
template GrayImage from_tensor(const Tensor<float>&, int);
template GrayImage from_tensor(const Tensor<double>&, int);

}  // namespace arcnn
