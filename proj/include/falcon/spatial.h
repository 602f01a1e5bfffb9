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

#ifndef FALCON_SPATIAL_H_
#define FALCON_SPATIAL_H_

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "falcon/tensor.h"

namespace falcon {

enum class BranchKind { k3x3, k1x3, k3x1, k1x1, kIdentity };

std::string_view BranchKindName(BranchKind kind);
// Kernel extents (h, w) of a branch kind; identity reports (1, 1).
std::pair<std::int64_t, std::int64_t> BranchKernelExtent(BranchKind kind);
// Depthwise conv spec for a branch. Padding keeps every branch aligned with
// the padded 3x3 branch.
ConvSpec BranchConvSpec(BranchKind kind, std::int64_t channels);

// Multi-branch depthwise spatial operator (training form).
struct RepSOConfig {
  std::int64_t channels = 1;
  std::int64_t n_parallel_3x3 = 3;
  bool include_1x3 = true;
  bool include_3x1 = true;
  bool include_1x1 = true;
  bool include_identity = true;

  std::int64_t BranchCount() const;
  // Branch order: n_parallel_3x3 x 3x3, then 1x3, 3x1, 1x1, identity.
  std::vector<BranchKind> Branches() const;
  void Validate() const;

  friend bool operator==(const RepSOConfig&, const RepSOConfig&) = default;
};

struct RepSOBranch {
  BranchKind kind = BranchKind::k3x3;
  Tensor kernel;  // C x 1 x kh x kw; empty for identity
  BnParams bn;
};

struct RepSOWeights {
  std::vector<RepSOBranch> branches;

  void Validate(const RepSOConfig& cfg) const;
};

// Sum over branches of BN(depthwise_conv(x)); identity contributes BN(x).
Tensor RepSOForward(const Tensor& x, const RepSOWeights& w,
                    const RepSOConfig& cfg);

// Positionwise mean |w| over all kernels and channels, normalized by the
// matrix maximum. An all-zero input yields an all-zero matrix.
Matrix KernelMagnitudeMatrix(std::span<const Tensor> kernels,
                             std::int64_t kernel_h, std::int64_t kernel_w);

}  // namespace falcon

#endif  // FALCON_SPATIAL_H_
