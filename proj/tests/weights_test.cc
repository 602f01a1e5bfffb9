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

#include "falcon/weights.h"

#include <gtest/gtest.h>

#include <bit>
#include <cstring>
#include <filesystem>
#include <limits>
#include <random>
#include <vector>

#include "falcon/error.h"
#include "test_util.h"

namespace falcon {
namespace {

using testing::RandomTensor;
using testing::RandomVector;

ErrorKind KindOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::kIo;
}

WeightStore SampleStore() {
  std::mt19937_64 rng(1);
  WeightStore s;
  s.AddTensor("stem.conv.weight", RandomTensor({4, 3, 3, 3}, rng));
  s.AddVector("stem.bn.gamma", RandomVector(4, rng));
  s.AddMatrix("head.fc.weight", Matrix{2, 3, RandomVector(6, rng)});
  s.Add("odd.values", {5}, {0.0f, -0.0f, std::numeric_limits<float>::infinity(),
                            std::numeric_limits<float>::denorm_min(), 1e30f});
  s.Add("empty", {0, 3}, {});
  return s;
}

void PutU32(std::vector<std::uint8_t>& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void PutU64(std::vector<std::uint8_t>& b, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) b.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

TEST(WeightStoreTest, AccessorsAndErrors) {
  const WeightStore s = SampleStore();
  EXPECT_EQ(s.size(), 5u);
  EXPECT_EQ(s.ElementCount(), 108 + 4 + 6 + 5);
  EXPECT_TRUE(s.Contains("stem.bn.gamma"));
  EXPECT_EQ(s.GetTensor("stem.conv.weight").shape(), (Shape{4, 3, 3, 3}));
  EXPECT_EQ(s.GetMatrix("head.fc.weight").cols, 3);
  EXPECT_EQ(s.GetVector("stem.bn.gamma").size(), 4u);

  EXPECT_EQ(KindOf([&] { s.Get("nope"); }), ErrorKind::kMissing);
  try {
    s.Get("stages.0.blocks.1.channel1.weight");
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("stages.0.blocks.1.channel1.weight"),
              std::string::npos);
  }
  EXPECT_EQ(KindOf([&] { s.GetTensor("stem.bn.gamma"); }), ErrorKind::kFormat);
  EXPECT_EQ(KindOf([&] { s.GetVector("head.fc.weight"); }), ErrorKind::kFormat);

  WeightStore d;
  d.AddVector("a", {1.0f});
  EXPECT_EQ(KindOf([&] { d.AddVector("a", {2.0f}); }), ErrorKind::kFormat);
  EXPECT_EQ(KindOf([&] { d.Add("b", {2, 2}, {1.0f}); }), ErrorKind::kFormat);
}

TEST(WeightFormatTest, RoundTripIsBitwiseExact) {
  const WeightStore s = SampleStore();
  const std::vector<std::uint8_t> bytes = EncodeWeights(s);
  const WeightStore back = DecodeWeights(bytes);
  ASSERT_EQ(back.size(), s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto& a = s.entries()[i];
    const auto& b = back.entries()[i];
    EXPECT_EQ(a.name, b.name);
    EXPECT_EQ(a.extents, b.extents);
    ASSERT_EQ(a.values.size(), b.values.size());
    for (std::size_t k = 0; k < a.values.size(); ++k) {
      EXPECT_EQ(std::bit_cast<std::uint32_t>(a.values[k]),
                std::bit_cast<std::uint32_t>(b.values[k]));
    }
  }
  EXPECT_EQ(EncodeWeights(back), bytes);
}

TEST(WeightFormatTest, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "falcon_weights_test.falc";
  const WeightStore s = SampleStore();
  SaveWeights(s, path.string());
  EXPECT_EQ(LoadWeights(path.string()), s);
  std::filesystem::remove(path);
  EXPECT_EQ(KindOf([&] { LoadWeights(path.string()); }), ErrorKind::kIo);
}

TEST(WeightFormatTest, EmptyStore) {
  const std::vector<std::uint8_t> bytes = EncodeWeights(WeightStore{});
  EXPECT_EQ(bytes.size(), 12u);
  EXPECT_EQ(DecodeWeights(bytes).size(), 0u);
}

TEST(WeightFormatTest, LayoutMatchesDocumentedBytes) {
  WeightStore s;
  s.Add("w", {2}, {1.0f, -2.0f});
  std::vector<std::uint8_t> want{'F', 'A', 'L', 'C'};
  PutU32(want, 1);
  PutU32(want, 1);
  PutU32(want, 1);
  want.push_back('w');
  PutU32(want, 1);
  PutU64(want, 2);
  PutU32(want, std::bit_cast<std::uint32_t>(1.0f));
  PutU32(want, std::bit_cast<std::uint32_t>(-2.0f));
  EXPECT_EQ(EncodeWeights(s), want);
}

TEST(WeightFormatTest, CorruptInputs) {
  std::vector<std::uint8_t> good = EncodeWeights(SampleStore());

  std::vector<std::uint8_t> magic = good;
  magic[0] = 'X';
  EXPECT_EQ(KindOf([&] { DecodeWeights(magic); }), ErrorKind::kFormat);

  std::vector<std::uint8_t> version = good;
  version[4] = 2;
  EXPECT_EQ(KindOf([&] { DecodeWeights(version); }), ErrorKind::kFormat);

  for (std::size_t cut : {std::size_t{3}, std::size_t{11}, good.size() / 2,
                          good.size() - 1}) {
    std::vector<std::uint8_t> t(good.begin(), good.begin() + cut);
    EXPECT_EQ(KindOf([&] { DecodeWeights(t); }), ErrorKind::kFormat) << cut;
  }

  std::vector<std::uint8_t> trailing = good;
  trailing.push_back(0);
  EXPECT_EQ(KindOf([&] { DecodeWeights(trailing); }), ErrorKind::kFormat);

  // Duplicate names written by hand.
  std::vector<std::uint8_t> dup{'F', 'A', 'L', 'C'};
  PutU32(dup, 1);
  PutU32(dup, 2);
  for (int i = 0; i < 2; ++i) {
    PutU32(dup, 1);
    dup.push_back('a');
    PutU32(dup, 1);
    PutU64(dup, 1);
    PutU32(dup, 0);
  }
  EXPECT_EQ(KindOf([&] { DecodeWeights(dup); }), ErrorKind::kFormat);

  // Absurd extents must not allocate.
  std::vector<std::uint8_t> huge{'F', 'A', 'L', 'C'};
  PutU32(huge, 1);
  PutU32(huge, 1);
  PutU32(huge, 1);
  huge.push_back('h');
  PutU32(huge, 2);
  PutU64(huge, std::uint64_t{1} << 40);
  PutU64(huge, std::uint64_t{1} << 40);
  EXPECT_EQ(KindOf([&] { DecodeWeights(huge); }), ErrorKind::kFormat);
}

}  // namespace
}  // namespace falcon
