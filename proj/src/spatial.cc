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

#include <algorithm>
#include <cmath>

#include "falcon/error.h"
#include "internal.h"

namespace falcon {

using internal::Cat;

std::string_view BranchKindName(BranchKind kind) {
  switch (kind) {
    case BranchKind::k3x3:
      return "3x3";
    case BranchKind::k1x3:
      return "1x3";
    case BranchKind::k3x1:
      return "3x1";
    case BranchKind::k1x1:
      return "1x1";
    case BranchKind::kIdentity:
      return "identity";
  }
  return "?";
}

std::pair<std::int64_t, std::int64_t> BranchKernelExtent(BranchKind kind) {
  switch (kind) {
    case BranchKind::k3x3:
      return {3, 3};
    case BranchKind::k1x3:
      return {1, 3};
    case BranchKind::k3x1:
      return {3, 1};
    case BranchKind::k1x1:
    case BranchKind::kIdentity:
      return {1, 1};
  }
  return {1, 1};
}

ConvSpec BranchConvSpec(BranchKind kind, std::int64_t channels) {
  const auto [kh, kw] = BranchKernelExtent(kind);
  return DepthwiseSpec(channels, kh, kw, kh / 2, kw / 2);
}

std::int64_t RepSOConfig::BranchCount() const {
  return n_parallel_3x3 + include_1x3 + include_3x1 + include_1x1 +
         include_identity;
}

std::vector<BranchKind> RepSOConfig::Branches() const {
  std::vector<BranchKind> kinds(static_cast<std::size_t>(n_parallel_3x3),
                                BranchKind::k3x3);
  if (include_1x3) kinds.push_back(BranchKind::k1x3);
  if (include_3x1) kinds.push_back(BranchKind::k3x1);
  if (include_1x1) kinds.push_back(BranchKind::k1x1);
  if (include_identity) kinds.push_back(BranchKind::kIdentity);
  return kinds;
}

void RepSOConfig::Validate() const {
  if (channels <= 0) {
    Fail(ErrorKind::kConfig, Cat("repso channels must be positive, got ",
                                 channels));
  }
  if (n_parallel_3x3 <= 0) {
    Fail(ErrorKind::kConfig, Cat("repso needs at least one 3x3 branch, got ",
                                 n_parallel_3x3));
  }
}

void RepSOWeights::Validate(const RepSOConfig& cfg) const {
  cfg.Validate();
  const std::vector<BranchKind> kinds = cfg.Branches();
  if (branches.size() != kinds.size()) {
    Fail(ErrorKind::kConfig, Cat("repso branch count: expected ", kinds.size(),
                                 ", got ", branches.size()));
  }
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    const RepSOBranch& b = branches[i];
    if (b.kind != kinds[i]) {
      Fail(ErrorKind::kConfig, Cat("repso branch ", i, ": expected kind ",
                                   BranchKindName(kinds[i]), ", got ",
                                   BranchKindName(b.kind)));
    }
    if (b.kind != BranchKind::kIdentity) {
      const auto [kh, kw] = BranchKernelExtent(b.kind);
      const Shape want{cfg.channels, 1, kh, kw};
      if (b.kernel.shape() != want) {
        Fail(ErrorKind::kShape, Cat("repso branch ", i, " kernel: expected ",
                                    want.ToString(), ", got ",
                                    b.kernel.shape().ToString()));
      }
    }
    b.bn.Validate();
    if (b.bn.channels() != cfg.channels) {
      Fail(ErrorKind::kShape, Cat("repso branch ", i, " bn channels: expected ",
                                  cfg.channels, ", got ", b.bn.channels()));
    }
  }
}

Tensor RepSOForward(const Tensor& x, const RepSOWeights& w,
                    const RepSOConfig& cfg) {
  w.Validate(cfg);
  if (x.shape().c != cfg.channels) {
    Fail(ErrorKind::kShape, Cat("repso input channels: expected ",
                                cfg.channels, ", got ", x.shape().c));
  }
  Tensor sum(x.shape());
  for (const RepSOBranch& b : w.branches) {
    const Tensor y =
        b.kind == BranchKind::kIdentity
            ? BatchNormInfer(x, b.bn)
            : BatchNormInfer(
                  Conv2d(x, b.kernel, std::nullopt,
                         BranchConvSpec(b.kind, cfg.channels)),
                  b.bn);
    if (y.shape() != sum.shape()) {
      Fail(ErrorKind::kShape, Cat("repso branch ", BranchKindName(b.kind),
                                  " output ", y.shape().ToString(),
                                  " is not aligned with ",
                                  sum.shape().ToString()));
    }
    sum = Add(sum, y);
  }
  return sum;
}

Matrix KernelMagnitudeMatrix(std::span<const Tensor> kernels,
                             std::int64_t kernel_h, std::int64_t kernel_w) {
  if (kernels.empty()) {
    Fail(ErrorKind::kConfig, "kernel magnitude needs at least one kernel");
  }
  if (kernel_h <= 0 || kernel_w <= 0) {
    Fail(ErrorKind::kConfig, "kernel magnitude extents must be positive");
  }
  Matrix m{kernel_h, kernel_w,
           std::vector<float>(static_cast<std::size_t>(kernel_h * kernel_w))};
  std::vector<double> sum(m.values.size(), 0.0);
  std::int64_t count = 0;
  for (std::size_t k = 0; k < kernels.size(); ++k) {
    const Shape& s = kernels[k].shape();
    if (s.h != kernel_h || s.w != kernel_w) {
      Fail(ErrorKind::kShape, Cat("kernel ", k, " has spatial extent ", s.h,
                                  "x", s.w, ", expected ", kernel_h, "x",
                                  kernel_w));
    }
    for (std::int64_t n = 0; n < s.n; ++n) {
      for (std::int64_t c = 0; c < s.c; ++c) {
        for (std::int64_t i = 0; i < kernel_h; ++i) {
          for (std::int64_t j = 0; j < kernel_w; ++j) {
            sum[i * kernel_w + j] += std::fabs(kernels[k].at(n, c, i, j));
          }
        }
        ++count;
      }
    }
  }
  if (count == 0) return m;
  double peak = 0.0;
  for (double& v : sum) {
    v /= static_cast<double>(count);
    peak = std::max(peak, v);
  }
  if (peak == 0.0) return m;
  for (std::size_t i = 0; i < sum.size(); ++i) {
    m.values[i] = static_cast<float>(sum[i] / peak);
  }
  return m;
}

}  // namespace falcon
