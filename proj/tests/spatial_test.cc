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

#include "falcon/spatial.h"

#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "falcon/error.h"
#include "test_util.h"

namespace falcon {
namespace {

using testing::OracleConv2d;
using testing::RandomTensor;
using testing::UnitBn;

RepSOConfig Only3x3(std::int64_t channels, std::int64_t n) {
  RepSOConfig cfg;
  cfg.channels = channels;
  cfg.n_parallel_3x3 = n;
  cfg.include_1x3 = cfg.include_3x1 = cfg.include_1x1 = false;
  cfg.include_identity = false;
  return cfg;
}

TEST(RepSOConfigTest, DefaultsHaveSevenBranchesInOrder) {
  RepSOConfig cfg;
  cfg.channels = 4;
  EXPECT_EQ(cfg.BranchCount(), 7);
  EXPECT_EQ(cfg.Branches(),
            (std::vector<BranchKind>{BranchKind::k3x3, BranchKind::k3x3,
                                     BranchKind::k3x3, BranchKind::k1x3,
                                     BranchKind::k3x1, BranchKind::k1x1,
                                     BranchKind::kIdentity}));
  cfg.include_1x1 = false;
  cfg.n_parallel_3x3 = 1;
  EXPECT_EQ(cfg.BranchCount(), 4);
}

TEST(RepSOConfigTest, RejectsNoSquareBranch) {
  RepSOConfig cfg;
  cfg.n_parallel_3x3 = 0;
  EXPECT_THROW(cfg.Validate(), Error);
  cfg.n_parallel_3x3 = 1;
  cfg.channels = 0;
  EXPECT_THROW(cfg.Validate(), Error);
}

TEST(RepSOTest, ZeroKernelsLeaveOnlyIdentity) {
  RepSOConfig cfg;
  cfg.channels = 3;
  RepSOWeights w;
  for (BranchKind k : cfg.Branches()) {
    RepSOBranch b;
    b.kind = k;
    if (k != BranchKind::kIdentity) {
      const auto [kh, kw] = BranchKernelExtent(k);
      b.kernel = Tensor({3, 1, kh, kw});
    }
    b.bn = UnitBn(3);
    w.branches.push_back(b);
  }
  std::mt19937_64 rng(1);
  Tensor x = RandomTensor({2, 3, 5, 5}, rng);
  EXPECT_EQ(RepSOForward(x, w, cfg), x);
}

TEST(RepSOTest, SingleBranchIsPlainDepthwiseConv) {
  std::mt19937_64 rng(2);
  RepSOConfig cfg = Only3x3(4, 1);
  RepSOWeights w;
  w.branches.push_back({BranchKind::k3x3, RandomTensor({4, 1, 3, 3}, rng), UnitBn(4)});
  Tensor x = RandomTensor({1, 4, 6, 6}, rng);
  const ConvSpec s = DepthwiseSpec(4, 3, 3, 1, 1);
  EXPECT_EQ(RepSOForward(x, w, cfg), Conv2d(x, w.branches[0].kernel, std::nullopt, s));
}

TEST(RepSOTest, ThreeAllOnesBranchesTripleTheConv) {
  RepSOConfig cfg = Only3x3(1, 3);
  RepSOWeights w;
  for (int i = 0; i < 3; ++i) {
    w.branches.push_back({BranchKind::k3x3, Tensor({1, 1, 3, 3}, 1.0f), UnitBn(1)});
  }
  Tensor y = RepSOForward(Tensor({1, 1, 3, 3}, 1.0f), w, cfg);
  EXPECT_EQ(y.values(),
            (std::vector<float>{12, 18, 12, 18, 27, 18, 12, 18, 12}));
}

TEST(RepSOTest, AsymmetricBranchesAlignWithCenter) {
  // A 1x3 branch padded (0,1) must equal a 3x3 kernel with the taps in row 1.
  std::mt19937_64 rng(3);
  Tensor k13 = RandomTensor({2, 1, 1, 3}, rng);
  Tensor k33({2, 1, 3, 3});
  for (std::int64_t c = 0; c < 2; ++c) {
    for (std::int64_t j = 0; j < 3; ++j) k33.at(c, 0, 1, j) = k13.at(c, 0, 0, j);
  }
  Tensor x = RandomTensor({1, 2, 5, 4}, rng);
  Tensor a = Conv2d(x, k13, std::nullopt, BranchConvSpec(BranchKind::k1x3, 2));
  Tensor b = OracleConv2d(x, k33, {}, DepthwiseSpec(2, 3, 3, 1, 1));
  EXPECT_LE(MaxAbsDiff(a, b), 1e-6f);
}

TEST(RepSOTest, RejectsMismatchedWeights) {
  RepSOConfig cfg = Only3x3(2, 2);
  RepSOWeights w;
  w.branches.push_back({BranchKind::k3x3, Tensor({2, 1, 3, 3}), UnitBn(2)});
  EXPECT_THROW(w.Validate(cfg), Error);
  w.branches.push_back({BranchKind::k1x3, Tensor({2, 1, 1, 3}), UnitBn(2)});
  EXPECT_THROW(w.Validate(cfg), Error);
  w.branches[1] = {BranchKind::k3x3, Tensor({2, 1, 3, 3}), UnitBn(3)};
  EXPECT_THROW(w.Validate(cfg), Error);
  w.branches[1].bn = UnitBn(2);
  EXPECT_NO_THROW(w.Validate(cfg));
  EXPECT_THROW(RepSOForward(Tensor({1, 3, 4, 4}), w, cfg), Error);
}

TEST(KernelMagnitudeTest, SingleNonzeroPosition) {
  Tensor a({1, 1, 3, 3});
  Tensor b({1, 1, 3, 3});
  a.at(0, 0, 1, 1) = 2.0f;
  b.at(0, 0, 1, 1) = 4.0f;
  std::vector<Tensor> ks{a, b};
  Matrix m = KernelMagnitudeMatrix(ks, 3, 3);
  ASSERT_EQ(m.rows, 3);
  ASSERT_EQ(m.cols, 3);
  for (std::int64_t r = 0; r < 3; ++r) {
    for (std::int64_t c = 0; c < 3; ++c) {
      EXPECT_EQ(m.at(r, c), r == 1 && c == 1 ? 1.0f : 0.0f);
    }
  }
}

TEST(KernelMagnitudeTest, AllOnesIsAllOnes) {
  std::vector<Tensor> ks{Tensor({4, 1, 3, 3}, 1.0f)};
  Matrix m = KernelMagnitudeMatrix(ks, 3, 3);
  for (float v : m.values) EXPECT_EQ(v, 1.0f);
}

TEST(KernelMagnitudeTest, MeanThenMaxNormalize) {
  std::vector<Tensor> ks{Tensor({1, 1, 2, 2}, {1, 0, 0, 0}),
                         Tensor({1, 1, 2, 2}, {3, 0, 0, 0})};
  Matrix m = KernelMagnitudeMatrix(ks, 2, 2);
  EXPECT_EQ(m.values, (std::vector<float>{1, 0, 0, 0}));
}

TEST(KernelMagnitudeTest, HandComputedMixedSigns) {
  // |.| means per position: (1+3)/2, (2+2)/2, (0+1)/2, (4+0)/2.
  std::vector<Tensor> ks{Tensor({1, 1, 2, 2}, {-1, 2, 0, 4}),
                         Tensor({1, 1, 2, 2}, {3, -2, 1, 0})};
  Matrix m = KernelMagnitudeMatrix(ks, 2, 2);
  EXPECT_FLOAT_EQ(m.at(0, 0), 1.0f);
  EXPECT_FLOAT_EQ(m.at(0, 1), 1.0f);
  EXPECT_FLOAT_EQ(m.at(1, 0), 0.25f);
  EXPECT_FLOAT_EQ(m.at(1, 1), 1.0f);
}

TEST(KernelMagnitudeTest, ScaleInvariantAndBounded) {
  std::mt19937_64 rng(4);
  std::vector<Tensor> ks{RandomTensor({8, 1, 3, 3}, rng),
                         RandomTensor({5, 1, 3, 3}, rng)};
  Matrix m = KernelMagnitudeMatrix(ks, 3, 3);
  float peak = 0.0f;
  for (float v : m.values) {
    EXPECT_GE(v, 0.0f);
    EXPECT_LE(v, 1.0f);
    peak = std::max(peak, v);
  }
  EXPECT_EQ(peak, 1.0f);
  std::vector<Tensor> scaled = ks;
  for (Tensor& t : scaled) {
    for (float& v : t.data()) v *= 4.0f;  // power of two keeps rounding exact
  }
  EXPECT_EQ(KernelMagnitudeMatrix(scaled, 3, 3).values, m.values);
}

TEST(KernelMagnitudeTest, ZeroKernelsAndErrors) {
  std::vector<Tensor> zeros{Tensor({2, 1, 3, 3})};
  for (float v : KernelMagnitudeMatrix(zeros, 3, 3).values) EXPECT_EQ(v, 0.0f);
  EXPECT_THROW(KernelMagnitudeMatrix({}, 3, 3), Error);
  std::vector<Tensor> wrong{Tensor({1, 1, 1, 3})};
  EXPECT_THROW(KernelMagnitudeMatrix(wrong, 3, 3), Error);
}

}  // namespace
}  // namespace falcon
