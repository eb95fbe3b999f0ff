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

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>

#include "arcnn/datapipe.hpp"
#include "arcnn/error.hpp"
#include "arcnn/resample.hpp"
#include "support/corpus.hpp"

namespace arcnn {
namespace {

using testing::TempDir;

GrayImage ramp(int h, int w) {
  GrayImage img(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) img.at(y, x) = (7 * y + 3 * x) % 256;
  return img;
}

TEST(Augment, TwentyVariantsScaleMajor) {
  const auto img = ramp(100, 80);
  const auto v = augment(img);
  ASSERT_EQ(v.size(), 20u);
  EXPECT_EQ(v[0], img);
  EXPECT_EQ(v[1], rotate90(img, 1));
  EXPECT_EQ(v[2], rotate90(img, 2));
  EXPECT_EQ(v[4].h, 90);
  EXPECT_EQ(v[4].w, 72);
  EXPECT_EQ(v[16].h, 60);
  EXPECT_EQ(v[16].w, 48);
  EXPECT_EQ(v[17].h, 48);
  EXPECT_EQ(v[17].w, 60);
  EXPECT_EQ(v[16], rescale_bicubic(img, 0.6));
}

TEST(Augment, HalfTurnTwiceIsIdentity) {
  const auto img = ramp(31, 45);
  EXPECT_EQ(rotate90(rotate90(img, 2), 2), img);
}

TEST(Augment, SmallVariantsDroppedWithWarning) {
  std::vector<std::string> warnings;
  const auto v = augment(ramp(36, 60), kPatchSize, &warnings);
  // 0.6 -> 22 rows, 0.7 -> 25 rows: only the 0.6 variants go.
  EXPECT_EQ(v.size(), 16u);
  EXPECT_EQ(warnings.size(), 1u);
}

TEST(SubImages, CountLaw) {
  EXPECT_EQ(grid_count(481) * grid_count(321), 345);
  EXPECT_EQ(grid_count(24), 1);
  EXPECT_EQ(grid_count(43), 1);
  EXPECT_EQ(grid_count(44), 2);
  EXPECT_EQ(grid_count(23), 0);
  EXPECT_EQ(extract_subimages(GrayImage(481, 321)).size(), 345u);
  EXPECT_EQ(extract_subimages(GrayImage(43, 24)).size(), 1u);
  EXPECT_TRUE(extract_subimages(GrayImage(23, 100)).empty());
}

TEST(SubImages, RowMajorGridPositions) {
  const auto img = ramp(64, 50);
  const auto subs = extract_subimages(img);
  ASSERT_EQ(subs.size(), 6u);  // 3 rows x 2 columns
  EXPECT_EQ(subs[1], crop(img, 0, 20, 24, 24));
  EXPECT_EQ(subs[2], crop(img, 20, 0, 24, 24));
  EXPECT_EQ(subs[5], crop(img, 40, 20, 24, 24));
}

TEST(BuildPairs, StrideOneTargetIsCleanPatch) {
  const auto img = read_pgm(testing::corpus_paths()[0]);
  PairOptions opt;
  const auto set = build_pairs({img}, opt);
  const std::size_t per_axis = static_cast<std::size_t>(grid_count(img.h));
  ASSERT_EQ(set.size(), per_axis * grid_count(img.w));
  EXPECT_EQ(set.target_size, 24);
  const auto p = set.pair(per_axis + 1);  // row 1, column 1
  EXPECT_EQ(quantize8(p.target), crop(img, 20, 20, 24, 24));
  const auto deg = jpeg_degrade(img, opt.degrade);
  EXPECT_EQ(quantize8(p.input), crop(deg, 20, 20, 24, 24));
}

TEST(BuildPairs, StrideTwoTargetIsUpperLeftCrop) {
  const auto img = read_pgm(testing::corpus_paths()[1]);
  PairOptions opt;
  opt.net_stride = 2;
  const auto set = build_pairs({img}, opt);
  EXPECT_EQ(set.target_size, 23);
  EXPECT_EQ(set.net_stride, 2);
  const auto p = set.pair(3);
  EXPECT_EQ(p.target.h, 23);
  EXPECT_EQ(quantize8(p.target), crop(img, 0, 60, 23, 23));
}

TEST(BuildPairs, DegradesWholeImageNotPatches) {
  // Patch origins at multiples of 20 are generally not block aligned; the
  // input must still equal the same crop of the whole-image degradation.
  const auto img = read_pgm(testing::corpus_paths()[4]);
  PairOptions opt;
  const auto set = build_pairs({img}, opt);
  const auto deg = jpeg_degrade(img, opt.degrade);
  const std::size_t k = 5 * grid_count(img.w) + 5;  // origin (100, 100)
  EXPECT_EQ(quantize8(set.pair(k).input), crop(deg, 100, 100, 24, 24));
  EXPECT_NE(quantize8(set.pair(k).input), jpeg_degrade(crop(img, 100, 100, 24, 24), opt.degrade));
}

TEST(BuildPairs, CountSumsOverImagesAndVariants) {
  std::vector<GrayImage> imgs{ramp(100, 80), ramp(50, 60)};
  PairOptions opt;
  opt.augment = true;
  std::size_t want = 0;
  for (const auto& img : imgs)
    for (const auto& v : augment(img)) want += grid_count(v.h) * grid_count(v.w);
  EXPECT_EQ(build_pairs(imgs, opt).size(), want);
}

TEST(BuildPairs, RejectsRescale) {
  PairOptions opt;
  opt.degrade.rescale_factor = 0.5;
  EXPECT_THROW(build_pairs({ramp(48, 48)}, opt), ConfigError);
}

TEST(BuildPairs, Deterministic) {
  const auto img = read_pgm(testing::corpus_paths()[4]);
  PairOptions opt;
  opt.augment = true;
  EXPECT_EQ(build_pairs({img}, opt), build_pairs({img}, opt));
}

TEST(PairSet, BatchesStackRequestedPairs) {
  const auto set = build_pairs({ramp(48, 48)}, PairOptions{});
  const auto b = set.input_batch({2, 0});
  EXPECT_EQ(b.shape(), (Shape{2, 1, 24, 24}));
  EXPECT_FLOAT_EQ(b.at(0, 0, 3, 4), set.inputs[2 * 576 + 3 * 24 + 4]);
  EXPECT_FLOAT_EQ(b.at(1, 0, 3, 4), set.inputs[3 * 24 + 4]);
  const auto t = set.target_batch({1});
  EXPECT_EQ(t.shape(), (Shape{1, 1, 24, 24}));
}

TEST(EpochOrder, PermutationAndDeterminism) {
  const auto a = epoch_order(1000, 7, 0);
  auto sorted = a;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::size_t> iota(1000);
  std::iota(iota.begin(), iota.end(), 0);
  EXPECT_EQ(sorted, iota);
  EXPECT_EQ(a, epoch_order(1000, 7, 0));
  EXPECT_NE(a, epoch_order(1000, 7, 1));
  EXPECT_NE(a, epoch_order(1000, 8, 0));
}

TEST(Manifest, SkipsCommentsAndResolvesRelativePaths) {
  TempDir dir("manifest");
  {
    std::ofstream m(dir / "list.txt");
    m << "# training split\n\na.pgm\n  b.pgm  \n/abs/c.pgm\n";
  }
  const auto paths = read_manifest(dir / "list.txt");
  ASSERT_EQ(paths.size(), 3u);
  EXPECT_EQ(paths[0], dir.path() / "a.pgm");
  EXPECT_EQ(paths[1], dir.path() / "b.pgm");
  EXPECT_EQ(paths[2], std::filesystem::path("/abs/c.pgm"));
  EXPECT_THROW(read_manifest(dir / "none.txt"), Error);
}

TEST(PairBlob, RoundTripAndErrors) {
  TempDir dir("blob");
  PairOptions opt;
  opt.net_stride = 2;
  const auto set = build_pairs({read_pgm(testing::corpus_paths()[6])}, opt);
  save_pairs(set, dir / "p.bin");
  EXPECT_EQ(load_pairs(dir / "p.bin"), set);
  std::ofstream(dir / "bad.bin", std::ios::binary) << "NOPE0000";
  EXPECT_THROW(load_pairs(dir / "bad.bin"), FormatError);
  std::filesystem::resize_file(dir / "p.bin", std::filesystem::file_size(dir / "p.bin") - 4);
  EXPECT_THROW(load_pairs(dir / "p.bin"), FormatError);
}

}  // namespace
}  // namespace arcnn
