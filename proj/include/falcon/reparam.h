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

// Structural reparameterization: folds BN into the preceding linear
// operator and collapses parallel linear branches into a single operator.

#ifndef FALCON_REPARAM_H_
#define FALCON_REPARAM_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "falcon/channel.h"
#include "falcon/spatial.h"
#include "falcon/tensor.h"

namespace falcon {

inline constexpr float kDefaultFusionTolerance = 1e-4f;
inline constexpr std::uint64_t kDefaultVerificationSeed = 0x5eedfa1c0ULL;

struct FusedDWConv {
  Tensor kernel;             // C x 1 x 3 x 3
  std::vector<float> bias;   // C
};

struct FusionReport {
  float max_abs_error = 0.0f;
  std::int64_t trials = 0;
  Shape input_shape;
  float tolerance = kDefaultFusionTolerance;
  std::uint64_t seed = kDefaultVerificationSeed;
  bool passed = true;
};

// Folds bn into an operator whose weight is laid out output-channel major
// (dim 0). An absent bias is treated as zero.
std::pair<Tensor, std::vector<float>> FuseBnIntoLinear(
    const Tensor& weight, std::optional<std::span<const float>> bias,
    const BnParams& bn);

// Places a branch kernel centered in a 3x3 frame. kernel is ignored for
// BranchKind::kIdentity, which yields a unit center tap per channel.
Tensor PadKernelTo3x3(const Tensor* kernel, BranchKind kind,
                      std::int64_t channels);

FusedDWConv MergeRepSO(const RepSOWeights& w, const RepSOConfig& cfg);

// Result has spec.has_bias layout: b1 (K/R) and b2 (c_out) populated.
SFConvWeights MergeRefCO(const SFConvSpec& spec, const RefCOWeights& w);

using TensorFn = std::function<Tensor(const Tensor&)>;

// Runs both functions on `trials` inputs drawn uniformly from [-1, 1] with
// a fixed-seed generator and records the largest absolute output gap.
FusionReport VerifyEquivalence(const TensorFn& reference,
                               const TensorFn& candidate, std::int64_t trials,
                               const Shape& input_shape,
                               float tolerance = kDefaultFusionTolerance,
                               std::uint64_t seed = kDefaultVerificationSeed);

}  // namespace falcon

#endif  // FALCON_REPARAM_H_
