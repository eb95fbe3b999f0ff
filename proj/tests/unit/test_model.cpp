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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <utility>

#include "arcnn/checkpoint.hpp"
#include "arcnn/error.hpp"
#include "arcnn/model.hpp"
#include "arcnn/nn/conv.hpp"
#include "arcnn/nn/prelu.hpp"
#include "support/oracles.hpp"

namespace arcnn {
namespace {

namespace fs = std::filesystem;
using netspec::parse_arch;

Network<double> random_net(const std::string& arch, std::uint64_t seed, double scale = 0.5) {
  auto net = Network<double>::make(parse_arch(arch));
  std::mt19937_64 rng(seed);
  testing::randomize(net, rng, scale);
  return net;
}

TEST(Network, MakeSetsShapesAndSlopes) {
  const auto net = Network<float>::make(parse_arch("8(5)-4(1)-4(3)-4(1)-1[5]-s2"));
  ASSERT_EQ(net.depth(), 5);
  ASSERT_EQ(net.activations.size(), 4u);
  EXPECT_EQ(net.layers[0].weights.shape(), (Shape{8, 1, 5, 5}));
  EXPECT_EQ(net.layers[0].stride, 2);
  EXPECT_EQ(net.layers[4].weights.shape(), (Shape{4, 1, 5, 5}));
  EXPECT_TRUE(net.layers[4].transposed);
  EXPECT_EQ(net.layers[4].stride, 2);
  for (const auto& a : net.activations)
    for (float s : a.slopes) EXPECT_EQ(s, 0.25f);
  std::size_t total = 0;
  for (const auto& b : net.blocks()) total += b.values.size();
  const auto c = netspec::count_params(net.spec);
  EXPECT_EQ(static_cast<std::int64_t>(total), c.all());
}

TEST(Network, ForwardEqualsManualChaining) {
  auto net = random_net("8(5)-4(1)-4(3)-4(1)-1[5]-s2", 1);
  std::mt19937_64 rng(2);
  const auto x = testing::random_tensor<double>(Shape{2, 1, 19, 22}, rng);
  Tensor<double> h = x;
  for (int i = 0; i < net.depth(); ++i) {
    h = nn::layer_forward(h, net.layers[i]);
    if (i + 1 < net.depth()) h = nn::prelu_forward(h, net.activations[i]);
  }
  const auto y = net_forward(net, x);
  ASSERT_EQ(y.shape(), h.shape());
  EXPECT_EQ(y.shape(), (Shape{2, 1, 19, 21}));
  for (std::size_t i = 0; i < y.size(); ++i) EXPECT_EQ(y.ptr()[i], h.ptr()[i]);
}

TEST(Network, ZeroWeightsGiveBias) {
  auto net = Network<double>::make(parse_arch("4(3)-1(3)"));
  net.layers[1].biases[0] = 0.75;
  std::mt19937_64 rng(3);
  const auto y = net_forward(net, testing::random_tensor<double>(Shape{1, 1, 9, 9}, rng));
  for (double v : y.data()) EXPECT_EQ(v, 0.75);
}

TEST(Network, IdentityOneByOne) {
  auto net = Network<float>::make(parse_arch("1(1)"));
  net.layers[0].weights.ptr()[0] = 1.0f;
  std::mt19937_64 rng(4);
  const auto x = testing::random_tensor<float>(Shape{1, 1, 7, 5}, rng);
  const auto y = net_forward(net, x);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_EQ(y.ptr()[i], x.ptr()[i]);
}

TEST(Network, RejectsBadInput) {
  auto net = Network<double>::make(parse_arch("4(5)-1(3)"));
  EXPECT_THROW(net_forward(net, Tensor<double>(Shape{1, 2, 9, 9})), ShapeError);
  EXPECT_THROW(net_forward(net, Tensor<double>(Shape{1, 1, 4, 9})), ShapeError);
}

// Linear when every slope is 1: f(a x + b y) - f(0) = a (f(x) - f(0)) + b (f(y) - f(0)).
TEST(Network, AffineWhenSlopesAreOne) {
  auto net = random_net("6(5)-3(1)-3(3)-6(1)-1[5]-s2", 5);
  for (auto& a : net.activations) std::fill(a.slopes.begin(), a.slopes.end(), 1.0);
  std::mt19937_64 rng(6);
  const Shape s{1, 1, 15, 15};
  const auto x = testing::random_tensor<double>(s, rng), y = testing::random_tensor<double>(s, rng);
  Tensor<double> z(s), zero(s);
  for (std::size_t i = 0; i < z.size(); ++i) z.ptr()[i] = 2.0 * x.ptr()[i] - 3.0 * y.ptr()[i];
  const auto fx = net_forward(net, x), fy = net_forward(net, y), fz = net_forward(net, z),
             f0 = net_forward(net, zero);
  for (std::size_t i = 0; i < fz.size(); ++i) {
    const double want = f0.ptr()[i] + 2.0 * (fx.ptr()[i] - f0.ptr()[i]) -
                        3.0 * (fy.ptr()[i] - f0.ptr()[i]);
    EXPECT_NEAR(fz.ptr()[i], want, 1e-10);
  }
}

class NetworkGradient : public ::testing::TestWithParam<std::tuple<std::string, int>> {};

TEST_P(NetworkGradient, FiniteDifferencesAgree) {
  const auto& [arch, size] = GetParam();
  auto net = random_net(arch, 7);
  const auto r = testing::check_network_gradients(net, Shape{2, 1, size, size + 1}, 8);
  EXPECT_EQ(r.params.failures, 0) << r.params.worst;
  EXPECT_EQ(r.input.failures, 0) << r.input.worst;
  EXPECT_GT(r.params.checked, 0);
  EXPECT_LE(r.params.skipped * 100, r.params.checked) << "too many kink skips";
  EXPECT_LE(r.params.max_rel, 1e-5);
  EXPECT_LE(r.input.max_rel, 1e-5);
}

INSTANTIATE_TEST_SUITE_P(
    Specs, NetworkGradient,
    ::testing::Values(std::make_tuple("8(5)-4(3)-1(3)", 9),
                      std::make_tuple("8(5)-4(1)-4(3)-1(3)", 9),
                      std::make_tuple("8(5)-4(1)-4(3)-4(1)-1[5]-s2", 11),
                      std::make_tuple("4(3)-2(1)-1[3]-s3", 10)));

TEST(NetworkBackward, RejectsStaleCache) {
  auto net = random_net("4(3)-1(3)", 9);
  std::mt19937_64 rng(10);
  ForwardCache<double> cache;
  const auto y = net_forward(net, testing::random_tensor<double>(Shape{1, 1, 8, 8}, rng), &cache);
  net.layers[0].weights.ptr()[0] += 1.0;
  EXPECT_THROW(net_backward(net, cache, y), ShapeError);
}

TEST(NetworkBackward, RejectsWrongGradShape) {
  auto net = random_net("4(3)-1(3)", 11);
  std::mt19937_64 rng(12);
  ForwardCache<double> cache;
  net_forward(net, testing::random_tensor<double>(Shape{1, 1, 8, 8}, rng), &cache);
  EXPECT_THROW(net_backward(net, cache, Tensor<double>(Shape{1, 1, 7, 8})), ShapeError);
}

TEST(NetworkBackward, InputGradOnlyWhenAsked) {
  auto net = random_net("4(3)-1(3)", 13);
  std::mt19937_64 rng(14);
  ForwardCache<double> cache;
  const auto y = net_forward(net, testing::random_tensor<double>(Shape{1, 1, 8, 8}, rng), &cache);
  EXPECT_TRUE(net_backward(net, cache, y).input.empty());
  EXPECT_EQ(net_backward(net, cache, y, true).input.shape(), (Shape{1, 1, 8, 8}));
}

class CheckpointTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("arcnn_ckpt_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
            "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string load_error(const fs::path& p) {
    try {
      load_checkpoint(p);
    } catch (const FormatError& e) {
      return e.what();
    }
    return "";
  }

  fs::path dir_;
};

TEST_F(CheckpointTest, RoundTripIsExact) {
  auto net = random_net("8(5)-4(1)-4(3)-4(1)-1[5]-s2", 15).cast<float>();
  net.iteration = 123456789012ull;
  const auto p = dir_ / "a.ckpt";
  save_checkpoint(net, p);
  const auto back = load_checkpoint(p);
  EXPECT_EQ(back.spec, net.spec);
  EXPECT_EQ(back.iteration, net.iteration);
  const auto a = std::as_const(net).blocks();
  const auto b = back.blocks();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    ASSERT_EQ(a[i].values.size(), b[i].values.size());
    for (std::size_t j = 0; j < a[i].values.size(); ++j) EXPECT_EQ(a[i].values[j], b[i].values[j]);
  }
}

TEST_F(CheckpointTest, BaselineFileSizeMatchesParameterCount) {
  const auto net = Network<float>::make(parse_arch("64(9)-32(7)-16(1)-1(5)"));
  const auto p = dir_ / "base.ckpt";
  save_checkpoint(net, p);
  const std::string notation = "64(9)-32(7)-16(1)-1(5)";
  const std::uintmax_t header = 4 + 4 + 4 + notation.size() + 8;
  EXPECT_EQ(fs::file_size(p), header + (106448 + 113 + 112) * 4);
}

TEST_F(CheckpointTest, DistinctDiagnostics) {
  const auto good = dir_ / "g.ckpt";
  save_checkpoint(random_net("4(3)-1(3)", 16).cast<float>(), good);
  std::string bytes;
  {
    std::ifstream in(good, std::ios::binary);
    bytes.assign(std::istreambuf_iterator<char>(in), {});
  }
  auto write = [&](const std::string& name, const std::string& data) {
    const auto p = dir_ / name;
    std::ofstream(p, std::ios::binary) << data;
    return p;
  };

  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_NE(load_error(write("m", bad_magic)).find("bad magic"), std::string::npos);

  std::string bad_version = bytes;
  bad_version[4] = 9;
  EXPECT_NE(load_error(write("v", bad_version)).find("version"), std::string::npos);

  EXPECT_NE(load_error(write("h", bytes.substr(0, 10))).find("truncated header"),
            std::string::npos);

  // Drop the last three floats: the output layer's 36 weights + 1 bias.
  EXPECT_NE(load_error(write("t", bytes.substr(0, bytes.size() - 12)))
                .find("layer 2 short by 3 values"),
            std::string::npos);

  EXPECT_NE(load_error(write("x", bytes + "zz")).find("2 trailing bytes"), std::string::npos);

  EXPECT_THROW(load_checkpoint(dir_ / "missing.ckpt"), Error);
}

TEST_F(CheckpointTest, RejectsMultiChannelInput) {
  auto spec = parse_arch("4(3)-1(3)");
  spec.input_channels = 3;
  EXPECT_THROW(save_checkpoint(Network<float>::make(spec), dir_ / "c.ckpt"), ConfigError);
}

}  // namespace
}  // namespace arcnn
