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

#include "falcon/reparam.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "falcon/error.h"
#include "internal.h"

namespace falcon {

using internal::Cat;

std::pair<Tensor, std::vector<float>> FuseBnIntoLinear(
    const Tensor& weight, std::optional<std::span<const float>> bias,
    const BnParams& bn) {
  bn.Validate();
  const std::int64_t out = weight.shape().n;
  if (bn.channels() != out) {
    Fail(ErrorKind::kShape, Cat("bn fusion: operator has ", out,
                                " output channels, bn has ", bn.channels()));
  }
  if (bias && static_cast<std::int64_t>(bias->size()) != out) {
    Fail(ErrorKind::kShape, Cat("bn fusion: bias length ", bias->size(),
                                " != output channels ", out));
  }
  Tensor fused_w(weight.shape());
  std::vector<float> fused_b(static_cast<std::size_t>(out));
  const std::int64_t per_out = out == 0 ? 0 : weight.numel() / out;
  for (std::int64_t o = 0; o < out; ++o) {
    const auto oi = static_cast<std::size_t>(o);
    const float scale = bn.gamma[oi] / std::sqrt(bn.running_var[oi] + bn.epsilon);
    for (std::int64_t i = o * per_out; i < (o + 1) * per_out; ++i) {
      fused_w.data()[i] = weight.data()[i] * scale;
    }
    const float b = bias ? (*bias)[oi] : 0.0f;
    fused_b[oi] = bn.beta[oi] + (b - bn.running_mean[oi]) * scale;
  }
  return {std::move(fused_w), std::move(fused_b)};
}

Tensor PadKernelTo3x3(const Tensor* kernel, BranchKind kind,
                      std::int64_t channels) {
  Tensor out({channels, 1, 3, 3});
  if (kind == BranchKind::kIdentity) {
    for (std::int64_t c = 0; c < channels; ++c) out.at(c, 0, 1, 1) = 1.0f;
    return out;
  }
  const auto [kh, kw] = BranchKernelExtent(kind);
  const Shape want{channels, 1, kh, kw};
  if (kernel == nullptr || kernel->shape() != want) {
    Fail(ErrorKind::kShape,
         Cat("branch ", BranchKindName(kind), " kernel: expected ",
             want.ToString(), ", got ",
             kernel ? kernel->shape().ToString() : std::string("none")));
  }
  const std::int64_t oy = (3 - kh) / 2;
  const std::int64_t ox = (3 - kw) / 2;
  for (std::int64_t c = 0; c < channels; ++c) {
    for (std::int64_t i = 0; i < kh; ++i) {
      for (std::int64_t j = 0; j < kw; ++j) {
        out.at(c, 0, oy + i, ox + j) = kernel->at(c, 0, i, j);
      }
    }
  }
  return out;
}

namespace {

// Multi-branch merges sum BN-folded branches in double and round once.
struct FoldedSum {
  std::vector<double> weight;
  std::vector<double> bias;

  FoldedSum(const Shape& shape, std::int64_t channels)
      : weight(static_cast<std::size_t>(shape.numel()), 0.0),
        bias(static_cast<std::size_t>(channels), 0.0) {}

  // weight is laid out output-channel major; bn has one entry per channel.
  void Add(const Tensor& w, const BnParams& bn) {
    bn.Validate();
    if (bn.channels() != static_cast<std::int64_t>(bias.size()) ||
        w.numel() != static_cast<std::int64_t>(weight.size())) {
      Fail(ErrorKind::kShape, Cat("branch merge: weight ", w.shape().ToString(),
                                  " with ", bn.channels(), " bn channels"));
    }
    const std::size_t per_out = weight.size() / bias.size();
    for (std::size_t o = 0; o < bias.size(); ++o) {
      const double scale = static_cast<double>(bn.gamma[o]) /
                           std::sqrt(static_cast<double>(bn.running_var[o]) + bn.epsilon);
      for (std::size_t i = o * per_out; i < (o + 1) * per_out; ++i) {
        weight[i] += static_cast<double>(w.data()[i]) * scale;
      }
      bias[o] += bn.beta[o] - static_cast<double>(bn.running_mean[o]) * scale;
    }
  }

  void RoundInto(Tensor& w, std::vector<float>& b) const {
    std::transform(weight.begin(), weight.end(), w.data().begin(),
                   [](double v) { return static_cast<float>(v); });
    b.resize(bias.size());
    std::transform(bias.begin(), bias.end(), b.begin(),
                   [](double v) { return static_cast<float>(v); });
  }
};

}  // namespace

FusedDWConv MergeRepSO(const RepSOWeights& w, const RepSOConfig& cfg) {
  w.Validate(cfg);
  const Shape shape{cfg.channels, 1, 3, 3};
  FoldedSum sum(shape, cfg.channels);
  for (const RepSOBranch& b : w.branches) {
    sum.Add(PadKernelTo3x3(b.kind == BranchKind::kIdentity ? nullptr : &b.kernel,
                           b.kind, cfg.channels),
            b.bn);
  }
  FusedDWConv fused{Tensor(shape), {}};
  sum.RoundInto(fused.kernel, fused.bias);
  return fused;
}

SFConvWeights MergeRefCO(const SFConvSpec& spec, const RefCOWeights& w) {
  w.Validate(spec);
  FoldedSum stage1(spec.W1Shape(), spec.hidden_channels());
  for (const RefCOStage1Branch& b : w.stage1) stage1.Add(b.w1, b.bn);
  FoldedSum stage2(spec.W2Shape(), spec.c_out);
  for (const RefCOStage2Branch& b : w.stage2) stage2.Add(b.w2, b.bn);
  SFConvWeights fused{Tensor(spec.W1Shape()), Tensor(spec.W2Shape()), {}, {}};
  stage1.RoundInto(fused.w1, fused.b1);
  stage2.RoundInto(fused.w2, fused.b2);
  return fused;
}

FusionReport VerifyEquivalence(const TensorFn& reference,
                               const TensorFn& candidate, std::int64_t trials,
                               const Shape& input_shape, float tolerance,
                               std::uint64_t seed) {
  if (trials <= 0) {
    Fail(ErrorKind::kConfig, Cat("verification needs trials > 0, got ", trials));
  }
  FusionReport report;
  report.trials = trials;
  report.input_shape = input_shape;
  report.tolerance = tolerance;
  report.seed = seed;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
  for (std::int64_t t = 0; t < trials; ++t) {
    Tensor x(input_shape);
    for (float& v : x.data()) v = dist(rng);
    report.max_abs_error =
        std::max(report.max_abs_error, MaxAbsDiff(reference(x), candidate(x)));
  }
  report.passed = report.max_abs_error <= tolerance;
  return report;
}

}  // namespace falcon
