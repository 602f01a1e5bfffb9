// Copyright 2026 The FalconNet Toolkit Authors.
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

#include "falcon/input.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <string>
#include <vector>

#include "falcon/error.h"
#include "falcon/weights.h"

namespace falcon {
namespace {

std::vector<std::uint8_t> Bytes(const std::string& header,
                                const std::vector<std::uint8_t>& raster) {
  std::vector<std::uint8_t> b(header.begin(), header.end());
  b.insert(b.end(), raster.begin(), raster.end());
  return b;
}

TEST(PpmTest, DecodesPlanarFloats) {
  // 2x1 image: red pixel then a gray pixel.
  const auto bytes = Bytes("P6\n# comment line\n2 1\n255\n", {255, 0, 0, 51, 102, 153});
  Tensor t = DecodePpm(bytes);
  ASSERT_EQ(t.shape(), (Shape{1, 3, 1, 2}));
  EXPECT_FLOAT_EQ(t.at(0, 0, 0, 0), 1.0f);
  EXPECT_FLOAT_EQ(t.at(0, 1, 0, 0), 0.0f);
  EXPECT_FLOAT_EQ(t.at(0, 0, 0, 1), 0.2f);
  EXPECT_FLOAT_EQ(t.at(0, 1, 0, 1), 0.4f);
  EXPECT_FLOAT_EQ(t.at(0, 2, 0, 1), 0.6f);
}

TEST(PpmTest, MaxvalScales) {
  Tensor t = DecodePpm(Bytes("P6 1 1 15\n", {15, 5, 0}));
  EXPECT_FLOAT_EQ(t.at(0, 0, 0, 0), 1.0f);
  EXPECT_FLOAT_EQ(t.at(0, 1, 0, 0), 1.0f / 3.0f);
}

TEST(PpmTest, RejectsMalformed) {
  EXPECT_THROW(DecodePpm(Bytes("P3\n1 1\n255\n", {0, 0, 0})), Error);
  EXPECT_THROW(DecodePpm(Bytes("P6\n1 1\n65535\n", {0, 0, 0, 0, 0, 0})), Error);
  EXPECT_THROW(DecodePpm(Bytes("P6\n2 2\n255\n", {0, 0, 0})), Error);
  EXPECT_THROW(DecodePpm(Bytes("P6\n0 2\n255\n", {})), Error);
  EXPECT_THROW(DecodePpm(Bytes("P6\nx 2\n255\n", {})), Error);
}

TEST(ResizeTest, NearestNeighbour) {
  Tensor x({1, 1, 2, 2}, {1, 2, 3, 4});
  Tensor up = ResizeNearest(x, 4, 4);
  EXPECT_EQ(up.values(), (std::vector<float>{1, 1, 2, 2, 1, 1, 2, 2,
                                             3, 3, 4, 4, 3, 3, 4, 4}));
  EXPECT_EQ(ResizeNearest(up, 2, 2), x);
  EXPECT_EQ(ResizeNearest(x, 2, 2), x);
}

TEST(LoadInputTest, TensorContainerAndPpm) {
  const auto dir = std::filesystem::temp_directory_path();
  const std::string falc = (dir / "falcon_input_test.falc").string();
  WeightStore s;
  s.AddTensor("input", Tensor({2, 3, 4, 4}, 0.5f));
  SaveWeights(s, falc);
  EXPECT_EQ(LoadInput(falc, 4).shape(), (Shape{2, 3, 4, 4}));
  EXPECT_THROW(LoadInput(falc, 8), Error);

  WeightStore wrong;
  wrong.AddTensor("image", Tensor({1, 3, 4, 4}));
  SaveWeights(wrong, falc);
  try {
    LoadInput(falc, 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kMissing);
  }

  const std::string ppm = (dir / "falcon_input_test.ppm").string();
  WriteFileBytes(ppm, Bytes("P6\n1 1\n255\n", {255, 255, 0}));
  Tensor t = LoadInput(ppm, 3);
  EXPECT_EQ(t.shape(), (Shape{1, 3, 3, 3}));
  EXPECT_EQ(t.at(0, 1, 2, 2), 1.0f);
  EXPECT_EQ(t.at(0, 2, 1, 1), 0.0f);

  std::filesystem::remove(falc);
  std::filesystem::remove(ppm);
  try {
    LoadInput(ppm, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIo);
  }
}

}  // namespace
}  // namespace falcon
