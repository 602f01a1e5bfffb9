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

#include "falcon/reference.h"

#include <vector>

#include "falcon/error.h"
#include "internal.h"

namespace falcon::reference {

Tensor Conv2d(const Tensor& x, const Tensor& weight,
              std::optional<std::span<const float>> bias,
              const ConvSpec& spec) {
  const Shape os = internal::CheckConvOperands(x, weight, bias, spec);
  const Shape& is = x.shape();
  Tensor out(os);
  const std::int64_t in_per_group = spec.in_channels / spec.groups;
  const std::int64_t out_per_group = spec.out_channels / spec.groups;
  for (std::int64_t n = 0; n < os.n; ++n) {
    for (std::int64_t o = 0; o < os.c; ++o) {
      const std::int64_t g = o / out_per_group;
      for (std::int64_t oy = 0; oy < os.h; ++oy) {
        for (std::int64_t ox = 0; ox < os.w; ++ox) {
          float acc = 0.0f;
          for (std::int64_t ic = 0; ic < in_per_group; ++ic) {
            for (std::int64_t ky = 0; ky < spec.kernel_h; ++ky) {
              for (std::int64_t kx = 0; kx < spec.kernel_w; ++kx) {
                const std::int64_t iy = oy * spec.stride_h - spec.pad_h + ky;
                const std::int64_t ix = ox * spec.stride_w - spec.pad_w + kx;
                if (iy < 0 || iy >= is.h || ix < 0 || ix >= is.w) continue;
                acc += x.at(n, g * in_per_group + ic, iy, ix) *
                       weight.at(o, ic, ky, kx);
              }
            }
          }
          const float b = bias ? (*bias)[static_cast<std::size_t>(o)] : 0.0f;
          out.at(n, o, oy, ox) = acc + b;
        }
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
  for (std::int64_t n = 0; n < s.n; ++n) {
    for (std::int64_t c = 0; c < s.c; ++c) {
      const auto ci = static_cast<std::size_t>(c);
      for (std::int64_t y = 0; y < s.h; ++y) {
        for (std::int64_t xx = 0; xx < s.w; ++xx) {
          out.at(n, c, y, xx) = a.scale[ci] * x.at(n, c, y, xx) + a.shift[ci];
        }
      }
    }
  }
  return out;
}

Tensor SFConvForward(const Tensor& x, const SFConvSpec& spec,
                     const SFConvWeights& w) {
  internal::CheckSFConvOperands(x, spec, w);
  const Shape& s = x.shape();
  const std::int64_t k = spec.kernel;
  const std::int64_t hidden = spec.hidden_channels();
  const std::int64_t windows = spec.windows();
  Tensor out({s.n, spec.c_out, s.h, s.w});
  std::vector<float> h(static_cast<std::size_t>(hidden * windows));
  for (std::int64_t n = 0; n < s.n; ++n) {
    for (std::int64_t i = 0; i < s.h; ++i) {
      for (std::int64_t j = 0; j < s.w; ++j) {
        for (std::int64_t hc = 0; hc < hidden; ++hc) {
          for (std::int64_t p = 0; p < windows; ++p) {
            double acc = 0.0;
            for (std::int64_t t = 0; t < k; ++t) {
              acc += static_cast<double>(w.w1.at(hc, p, t, 0)) *
                     x.at(n, p * k + t, i, j);
            }
            const float b =
                w.b1.empty() ? 0.0f : w.b1[static_cast<std::size_t>(hc)];
            h[static_cast<std::size_t>(hc * windows + p)] =
                static_cast<float>(acc + b);
          }
        }
        for (std::int64_t o = 0; o < spec.c_out; ++o) {
          const std::int64_t hc = spec.HiddenFor(o);
          double acc = 0.0;
          for (std::int64_t p = 0; p < windows; ++p) {
            acc += static_cast<double>(w.w2.at(o, 0, p, 0)) *
                   h[static_cast<std::size_t>(hc * windows + p)];
          }
          const float b =
              w.b2.empty() ? 0.0f : w.b2[static_cast<std::size_t>(o)];
          out.at(n, o, i, j) = static_cast<float>(acc + b);
        }
      }
    }
  }
  return out;
}

}  // namespace falcon::reference
