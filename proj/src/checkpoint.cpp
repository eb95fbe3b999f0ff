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

#include "arcnn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "arcnn/error.hpp"

namespace arcnn {
namespace {

constexpr char kMagic[4] = {'A', 'R', 'C', 'N'};

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

void put_bytes(std::string& out, const void* p, std::size_t n) {
  out.append(static_cast<const char*>(p), n);
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  std::size_t remaining() const { return bytes_.size() - pos_; }

  template <typename U>
  U scalar(const char* what) {
    if (remaining() < sizeof(U)) {
      throw FormatError(fmt::format("corrupt checkpoint: truncated header ({})", what));
    }
    U v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(U));
    pos_ += sizeof(U);
    return v;
  }

  std::string text(std::size_t n) {
    if (remaining() < n) {
      throw FormatError("corrupt checkpoint: truncated header (notation)");
    }
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  // Copies up to values.size() floats; returns how many were available.
  std::size_t floats(std::span<float> values) {
    const std::size_t n = std::min(values.size(), remaining() / sizeof(float));
    std::memcpy(values.data(), bytes_.data() + pos_, n * sizeof(float));
    pos_ += n * sizeof(float);
    return n;
  }

 private:
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_checkpoint(const Network<float>& net, const std::filesystem::path& path) {
  net.validate();
  if (net.spec.input_channels != 1) {
    throw ConfigError(fmt::format(
        "checkpoints support single-channel input only (network has {})",
        net.spec.input_channels));
  }
  const std::string notation = net.spec.notation();
  std::string out;
  put_bytes(out, kMagic, 4);
  const std::uint32_t version = kCheckpointVersion;
  put_bytes(out, &version, 4);
  const auto len = static_cast<std::uint32_t>(notation.size());
  put_bytes(out, &len, 4);
  out += notation;
  const std::uint64_t iteration = net.iteration;
  put_bytes(out, &iteration, 8);
  for (const auto& b : net.blocks()) put_bytes(out, b.values.data(), b.values.size_bytes());

  // Write to a sibling file first so a crash never leaves a half-written
  // checkpoint under the final name.
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(fmt::format("cannot open '{}' for writing", tmp.string()));
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw Error(fmt::format("failed writing '{}'", tmp.string()));
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw Error(fmt::format("cannot move '{}' to '{}': {}", tmp.string(),
                            path.string(), ec.message()));
  }
}

Network<float> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(fmt::format("cannot open checkpoint '{}'", path.string()));
  const std::string bytes((std::istreambuf_iterator<char>(f)),
                          std::istreambuf_iterator<char>());
  Reader r(bytes);

  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw FormatError(fmt::format("'{}' is not a checkpoint (bad magic)", path.string()));
  }
  r.text(4);
  const auto version = r.scalar<std::uint32_t>("version");
  if (version != kCheckpointVersion) {
    throw FormatError(fmt::format("unsupported checkpoint version {} (expected {})",
                                  version, kCheckpointVersion));
  }
  const auto len = r.scalar<std::uint32_t>("notation length");
  const std::string notation = r.text(len);
  const auto iteration = r.scalar<std::uint64_t>("iteration");

  netspec::ArchSpec spec;
  try {
    spec = netspec::parse_arch(notation);
  } catch (const ParseError& e) {
    throw FormatError(fmt::format("corrupt checkpoint: bad notation '{}': {}",
                                  notation, e.what()));
  }
  auto net = Network<float>::make(spec);
  net.iteration = iteration;

  const auto blocks = net.blocks();
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto got = r.floats(blocks[i].values);
    if (got < blocks[i].values.size()) {
      // Report the whole shortfall of the layer this block belongs to.
      std::size_t missing = blocks[i].values.size() - got;
      for (std::size_t j = i + 1; j < blocks.size() && blocks[j].layer == blocks[i].layer; ++j) {
        missing += blocks[j].values.size();
      }
      throw FormatError(fmt::format("corrupt checkpoint: layer {} short by {} values",
                                    blocks[i].layer + 1, missing));
    }
  }
  if (r.remaining() != 0) {
    throw FormatError(fmt::format("corrupt checkpoint: {} trailing bytes after '{}'",
                                  r.remaining(), notation));
  }
  return net;
}

}  // namespace arcnn
