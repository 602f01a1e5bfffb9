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

#include "falcon/tensor.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "falcon/error.h"
#include "internal.h"

namespace falcon {

using internal::Cat;

std::string Shape::ToString() const {
  return Cat("[", n, ", ", c, ", ", h, ", ", w, "]");
}

Tensor::Tensor(Shape shape, float fill) : shape_(shape) {
  if (shape.n < 0 || shape.c < 0 || shape.h < 0 || shape.w < 0) {
    Fail(ErrorKind::kShape, "negative extent in shape " + shape.ToString());
  }
  data_.assign(static_cast<std::size_t>(shape.numel()), fill);
}

Tensor::Tensor(Shape shape, std::vector<float> values)
    : shape_(shape), data_(std::move(values)) {
  if (shape.n < 0 || shape.c < 0 || shape.h < 0 || shape.w < 0) {
    Fail(ErrorKind::kShape, "negative extent in shape " + shape.ToString());
  }
  if (static_cast<std::int64_t>(data_.size()) != shape.numel()) {
    Fail(ErrorKind::kShape, Cat("shape ", shape.ToString(), " needs ",
                                shape.numel(), " values, got ", data_.size()));
  }
}

void ConvSpec::Validate() const {
  if (in_channels <= 0 || out_channels <= 0) {
    Fail(ErrorKind::kConfig, Cat("conv channels must be positive (in=",
                                 in_channels, ", out=", out_channels, ")"));
  }
  if (kernel_h <= 0 || kernel_w <= 0 || stride_h <= 0 || stride_w <= 0) {
    Fail(ErrorKind::kConfig, "conv kernel and stride extents must be positive");
  }
  if (pad_h < 0 || pad_w < 0) {
    Fail(ErrorKind::kConfig, "conv padding must be non-negative");
  }
  if (groups <= 0 || in_channels % groups != 0 ||
      out_channels % groups != 0) {
    Fail(ErrorKind::kConfig,
         Cat("groups=", groups, " must divide in_channels=", in_channels,
             " and out_channels=", out_channels));
  }
}

Shape ConvSpec::OutputShape(const Shape& input) const {
  Validate();
  if (input.c != in_channels) {
    Fail(ErrorKind::kShape, Cat("conv input channels: expected ", in_channels,
                                ", got ", input.c));
  }
  const std::int64_t span_h = input.h + 2 * pad_h - kernel_h;
  const std::int64_t span_w = input.w + 2 * pad_w - kernel_w;
  if (span_h < 0 || span_w < 0 || input.n == 0) {
    Fail(ErrorKind::kShape, Cat("conv output is empty for input ",
                                input.ToString(), " with kernel ", kernel_h,
                                "x", kernel_w, " pad ", pad_h, "x", pad_w));
  }
  return {input.n, out_channels, span_h / stride_h + 1, span_w / stride_w + 1};
}

ConvSpec DepthwiseSpec(std::int64_t channels, std::int64_t kernel_h,
                       std::int64_t kernel_w, std::int64_t pad_h,
                       std::int64_t pad_w, bool has_bias) {
  ConvSpec s;
  s.in_channels = s.out_channels = s.groups = channels;
  s.kernel_h = kernel_h;
  s.kernel_w = kernel_w;
  s.pad_h = pad_h;
  s.pad_w = pad_w;
  s.has_bias = has_bias;
  return s;
}

ConvSpec PointwiseSpec(std::int64_t in_channels, std::int64_t out_channels,
                       bool has_bias) {
  ConvSpec s;
  s.in_channels = in_channels;
  s.out_channels = out_channels;
  s.has_bias = has_bias;
  return s;
}

void BnParams::Validate() const {
  const std::size_t c = gamma.size();
  if (beta.size() != c || running_mean.size() != c ||
      running_var.size() != c) {
    Fail(ErrorKind::kShape,
         Cat("batch norm vector lengths differ: gamma=", gamma.size(),
             " beta=", beta.size(), " mean=", running_mean.size(),
             " var=", running_var.size()));
  }
  for (std::size_t i = 0; i < c; ++i) {
    if (!(running_var[i] + epsilon > 0.0f)) {
      Fail(ErrorKind::kNumeric, Cat("batch norm channel ", i,
                                    ": running_var + epsilon must be > 0"));
    }
  }
}

BnParams BnParams::Identity(std::int64_t channels) {
  BnParams bn;
  const auto c = static_cast<std::size_t>(channels);
  bn.gamma.assign(c, 1.0f);
  bn.beta.assign(c, 0.0f);
  bn.running_mean.assign(c, 0.0f);
  bn.running_var.assign(c, 1.0f);
  bn.epsilon = 0.0f;
  return bn;
}

BnAffine BnScaleShift(const BnParams& bn) {
  bn.Validate();
  BnAffine a;
  a.scale.resize(bn.gamma.size());
  a.shift.resize(bn.gamma.size());
  for (std::size_t i = 0; i < bn.gamma.size(); ++i) {
    a.scale[i] = bn.gamma[i] / std::sqrt(bn.running_var[i] + bn.epsilon);
    a.shift[i] = bn.beta[i] - bn.running_mean[i] * a.scale[i];
  }
  return a;
}

namespace internal {

Shape CheckConvOperands(const Tensor& x, const Tensor& weight,
                        std::optional<std::span<const float>> bias,
                        const ConvSpec& spec) {
  const Shape out = spec.OutputShape(x.shape());
  const Shape ws = spec.WeightShape();
  const Shape& got = weight.shape();
  if (got.n != ws.n) {
    Fail(ErrorKind::kShape, Cat("conv weight out_channels: expected ", ws.n,
                                ", got ", got.n));
  }
  if (got.c != ws.c) {
    Fail(ErrorKind::kShape, Cat("conv weight in_channels/groups: expected ",
                                ws.c, ", got ", got.c));
  }
  if (got.h != ws.h || got.w != ws.w) {
    Fail(ErrorKind::kShape, Cat("conv weight kernel: expected ", ws.h, "x",
                                ws.w, ", got ", got.h, "x", got.w));
  }
  if (bias && static_cast<std::int64_t>(bias->size()) != spec.out_channels) {
    Fail(ErrorKind::kShape, Cat("conv bias length: expected ",
                                spec.out_channels, ", got ", bias->size()));
  }
  return out;
}

void CheckBnOperands(const Tensor& x, const BnParams& bn) {
  bn.Validate();
  if (bn.channels() != x.shape().c) {
    Fail(ErrorKind::kShape, Cat("batch norm channels: expected ", x.shape().c,
                                ", got ", bn.channels()));
  }
}

}  // namespace internal

Tensor Conv2d(const Tensor& x, const Tensor& weight,
              std::optional<std::span<const float>> bias,
              const ConvSpec& spec) {
  const Shape os = internal::CheckConvOperands(x, weight, bias, spec);
  const Shape& is = x.shape();
  Tensor out(os);
  const std::int64_t in_per_group = spec.in_channels / spec.groups;
  const std::int64_t out_per_group = spec.out_channels / spec.groups;
  const std::int64_t kh = spec.kernel_h;
  const std::int64_t kw = spec.kernel_w;
  const float* xd = x.data().data();
  const float* wd = weight.data().data();
  float* od = out.data().data();
  const std::int64_t planes = os.n * os.c;

#pragma omp parallel for schedule(static)
  for (std::int64_t plane = 0; plane < planes; ++plane) {
    const std::int64_t n = plane / os.c;
    const std::int64_t o = plane % os.c;
    const std::int64_t ic0 = (o / out_per_group) * in_per_group;
    const float* wo = wd + o * in_per_group * kh * kw;
    const float b = bias ? (*bias)[static_cast<std::size_t>(o)] : 0.0f;
    float* dst = od + plane * os.h * os.w;
    for (std::int64_t oy = 0; oy < os.h; ++oy) {
      const std::int64_t iy0 = oy * spec.stride_h - spec.pad_h;
      for (std::int64_t ox = 0; ox < os.w; ++ox) {
        const std::int64_t ix0 = ox * spec.stride_w - spec.pad_w;
        float acc = 0.0f;
        for (std::int64_t ic = 0; ic < in_per_group; ++ic) {
          const float* src = xd + (n * is.c + ic0 + ic) * is.h * is.w;
          const float* wk = wo + ic * kh * kw;
          for (std::int64_t ky = 0; ky < kh; ++ky) {
            const std::int64_t iy = iy0 + ky;
            if (iy < 0 || iy >= is.h) continue;
            for (std::int64_t kx = 0; kx < kw; ++kx) {
              const std::int64_t ix = ix0 + kx;
              if (ix < 0 || ix >= is.w) continue;
              acc += src[iy * is.w + ix] * wk[ky * kw + kx];
            }
          }
        }
        dst[oy * os.w + ox] = acc + b;
      }
    }
  }
  return out;
}

Tensor BatchNormInfer(const Tensor& x, const BnParams& bn) {
  internal::CheckBnOperands(x, bn);
  const BnAffine a = BnScaleShift(bn);
  const Shape& s = x.shape();
  Tensor out(s);
  const std::int64_t area = s.h * s.w;
  const std::int64_t planes = s.n * s.c;
  const float* src = x.data().data();
  float* dst = out.data().data();

#pragma omp parallel for schedule(static)
  for (std::int64_t plane = 0; plane < planes; ++plane) {
    const auto c = static_cast<std::size_t>(plane % s.c);
    const float scale = a.scale[c];
    const float shift = a.shift[c];
    for (std::int64_t i = plane * area; i < (plane + 1) * area; ++i) {
      dst[i] = scale * src[i] + shift;
    }
  }
  return out;
}

Tensor Relu(const Tensor& x) {
  Tensor out(x.shape());
  const float* src = x.data().data();
  float* dst = out.data().data();
  const std::int64_t n = x.numel();
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) dst[i] = std::max(0.0f, src[i]);
  return out;
}

Tensor GlobalAvgPool(const Tensor& x) {
  const Shape& s = x.shape();
  if (s.h < 1 || s.w < 1) {
    Fail(ErrorKind::kShape, "global average pool needs H, W >= 1, got " +
                                s.ToString());
  }
  Tensor out({s.n, s.c, 1, 1});
  const std::int64_t area = s.h * s.w;
  const std::int64_t planes = s.n * s.c;
  const float* src = x.data().data();
  float* dst = out.data().data();
#pragma omp parallel for schedule(static)
  for (std::int64_t plane = 0; plane < planes; ++plane) {
    float sum = 0.0f;
    for (std::int64_t i = plane * area; i < (plane + 1) * area; ++i) {
      sum += src[i];
    }
    dst[plane] = sum / static_cast<float>(area);
  }
  return out;
}

std::vector<float> Linear(std::span<const float> x, const Matrix& weight,
                          std::span<const float> bias) {
  if (static_cast<std::int64_t>(weight.values.size()) !=
      weight.rows * weight.cols) {
    Fail(ErrorKind::kShape, "linear weight matrix has inconsistent extents");
  }
  if (static_cast<std::int64_t>(x.size()) != weight.cols) {
    Fail(ErrorKind::kShape, Cat("linear input length: expected ", weight.cols,
                                ", got ", x.size()));
  }
  if (static_cast<std::int64_t>(bias.size()) != weight.rows) {
    Fail(ErrorKind::kShape, Cat("linear bias length: expected ", weight.rows,
                                ", got ", bias.size()));
  }
  std::vector<float> y(static_cast<std::size_t>(weight.rows));
#pragma omp parallel for schedule(static)
  for (std::int64_t r = 0; r < weight.rows; ++r) {
    const float* row = weight.values.data() + r * weight.cols;
    float acc = 0.0f;
    for (std::int64_t c = 0; c < weight.cols; ++c) acc += row[c] * x[c];
    y[static_cast<std::size_t>(r)] = acc + bias[static_cast<std::size_t>(r)];
  }
  return y;
}

Tensor Add(const Tensor& x, const Tensor& y) {
  if (x.shape() != y.shape()) {
    Fail(ErrorKind::kShape, "add operands differ: " + x.shape().ToString() +
                                " vs " + y.shape().ToString());
  }
  Tensor out(x.shape());
  const float* a = x.data().data();
  const float* b = y.data().data();
  float* dst = out.data().data();
  const std::int64_t n = x.numel();
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) dst[i] = a[i] + b[i];
  return out;
}

float MaxAbsDiff(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    Fail(ErrorKind::kShape, "cannot compare tensors of shapes " +
                                a.shape().ToString() + " and " +
                                b.shape().ToString());
  }
  float m = 0.0f;
  for (std::int64_t i = 0; i < a.numel(); ++i) {
    const float d = std::fabs(a.data()[i] - b.data()[i]);
    if (std::isnan(d)) return std::numeric_limits<float>::infinity();
    m = std::max(m, d);
  }
  return m;
}

}  // namespace falcon
