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

// Shared fixtures and brute-force oracles. The oracles deliberately avoid
// the library's kernels: they accumulate in double and walk indices in the
// most literal order.

#ifndef FALCON_TESTS_TEST_UTIL_H_
#define FALCON_TESTS_TEST_UTIL_H_

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "falcon/channel.h"
#include "falcon/spatial.h"
#include "falcon/tensor.h"

namespace falcon::testing {

inline Tensor RandomTensor(const Shape& s, std::mt19937_64& rng,
                           float lo = -1.0f, float hi = 1.0f) {
  std::uniform_real_distribution<float> d(lo, hi);
  Tensor t(s);
  for (float& v : t.data()) v = d(rng);
  return t;
}

inline std::vector<float> RandomVector(std::int64_t n, std::mt19937_64& rng,
                                       float lo = -1.0f, float hi = 1.0f) {
  std::uniform_real_distribution<float> d(lo, hi);
  std::vector<float> v(static_cast<std::size_t>(n));
  for (float& x : v) x = d(rng);
  return v;
}

// Variance drawn log-uniformly from [var_lo, var_hi].
inline BnParams RandomBn(std::int64_t c, std::mt19937_64& rng,
                         float var_lo = 0.1f, float var_hi = 10.0f) {
  BnParams bn;
  bn.gamma = RandomVector(c, rng, 0.5f, 1.5f);
  bn.beta = RandomVector(c, rng, -0.5f, 0.5f);
  bn.running_mean = RandomVector(c, rng, -0.5f, 0.5f);
  std::uniform_real_distribution<float> lv(std::log(var_lo), std::log(var_hi));
  bn.running_var.resize(static_cast<std::size_t>(c));
  for (float& v : bn.running_var) v = std::exp(lv(rng));
  bn.epsilon = 1e-5f;
  return bn;
}

inline BnParams UnitBn(std::int64_t c) {
  BnParams bn;
  bn.gamma.assign(static_cast<std::size_t>(c), 1.0f);
  bn.beta.assign(static_cast<std::size_t>(c), 0.0f);
  bn.running_mean.assign(static_cast<std::size_t>(c), 0.0f);
  bn.running_var.assign(static_cast<std::size_t>(c), 1.0f);
  bn.epsilon = 0.0f;
  return bn;
}

inline RepSOWeights RandomRepSO(const RepSOConfig& cfg, std::mt19937_64& rng) {
  RepSOWeights w;
  for (BranchKind kind : cfg.Branches()) {
    RepSOBranch b;
    b.kind = kind;
    if (kind != BranchKind::kIdentity) {
      const auto [kh, kw] = BranchKernelExtent(kind);
      b.kernel = RandomTensor({cfg.channels, 1, kh, kw}, rng);
    }
    b.bn = RandomBn(cfg.channels, rng);
    w.branches.push_back(std::move(b));
  }
  return w;
}

inline RefCOWeights RandomRefCO(const SFConvSpec& spec, std::mt19937_64& rng) {
  RefCOWeights w;
  for (std::int64_t i = 0; i < spec.windows(); ++i) {
    w.stage1.push_back(
        {RandomTensor(spec.W1Shape(), rng), RandomBn(spec.hidden_channels(), rng)});
  }
  for (std::int64_t j = 0; j < spec.kernel; ++j) {
    w.stage2.push_back({RandomTensor(spec.W2Shape(), rng), RandomBn(spec.c_out, rng)});
  }
  return w;
}

inline SFConvWeights RandomSFConv(const SFConvSpec& spec, std::mt19937_64& rng) {
  SFConvWeights w;
  w.w1 = RandomTensor(spec.W1Shape(), rng);
  w.w2 = RandomTensor(spec.W2Shape(), rng);
  if (spec.has_bias) {
    w.b1 = RandomVector(spec.hidden_channels(), rng);
    w.b2 = RandomVector(spec.c_out, rng);
  }
  return w;
}

// Literal grouped convolution with zero padding, double accumulation.
inline Tensor OracleConv2d(const Tensor& x, const Tensor& w,
                           const std::vector<float>& bias, const ConvSpec& s) {
  const Shape& in = x.shape();
  const std::int64_t oh = (in.h + 2 * s.pad_h - s.kernel_h) / s.stride_h + 1;
  const std::int64_t ow = (in.w + 2 * s.pad_w - s.kernel_w) / s.stride_w + 1;
  const std::int64_t cin_g = s.in_channels / s.groups;
  const std::int64_t cout_g = s.out_channels / s.groups;
  Tensor out({in.n, s.out_channels, oh, ow});
  for (std::int64_t n = 0; n < in.n; ++n) {
    for (std::int64_t o = 0; o < s.out_channels; ++o) {
      const std::int64_t g = o / cout_g;
      for (std::int64_t y = 0; y < oh; ++y) {
        for (std::int64_t x0 = 0; x0 < ow; ++x0) {
          double acc = bias.empty() ? 0.0 : bias[o];
          for (std::int64_t ci = 0; ci < cin_g; ++ci) {
            for (std::int64_t ky = 0; ky < s.kernel_h; ++ky) {
              for (std::int64_t kx = 0; kx < s.kernel_w; ++kx) {
                const std::int64_t iy = y * s.stride_h - s.pad_h + ky;
                const std::int64_t ix = x0 * s.stride_w - s.pad_w + kx;
                if (iy < 0 || iy >= in.h || ix < 0 || ix >= in.w) continue;
                acc += static_cast<double>(w.at(o, ci, ky, kx)) *
                       x.at(n, g * cin_g + ci, iy, ix);
              }
            }
          }
          out.at(n, o, y, x0) = static_cast<float>(acc);
        }
      }
    }
  }
  return out;
}

// SF-Conv expanded to its equivalent dense c_out x c_in matrix plus bias.
struct DenseEquivalent {
  std::vector<double> m;  // c_out * c_in
  std::vector<double> b;  // c_out
};

inline DenseEquivalent ExpandSFConv(const SFConvSpec& s, const SFConvWeights& w) {
  DenseEquivalent d;
  d.m.assign(static_cast<std::size_t>(s.c_out * s.c_in), 0.0);
  d.b.assign(static_cast<std::size_t>(s.c_out), 0.0);
  const std::int64_t hidden = s.kernel / s.reduction;
  const std::int64_t windows = s.c_in / s.kernel;
  const std::int64_t mult = s.c_out / hidden;
  for (std::int64_t o = 0; o < s.c_out; ++o) {
    const std::int64_t hc = o / mult;
    for (std::int64_t p = 0; p < windows; ++p) {
      const double v = w.w2.at(o, 0, p, 0);
      for (std::int64_t t = 0; t < s.kernel; ++t) {
        d.m[o * s.c_in + p * s.kernel + t] += v * w.w1.at(hc, p, t, 0);
      }
      if (!w.b1.empty()) d.b[o] += v * w.b1[hc];
    }
    if (!w.b2.empty()) d.b[o] += w.b2[o];
  }
  return d;
}

inline Tensor ApplyDense(const Tensor& x, const DenseEquivalent& d,
                         std::int64_t c_out) {
  const Shape& s = x.shape();
  Tensor out({s.n, c_out, s.h, s.w});
  for (std::int64_t n = 0; n < s.n; ++n) {
    for (std::int64_t o = 0; o < c_out; ++o) {
      for (std::int64_t y = 0; y < s.h; ++y) {
        for (std::int64_t xx = 0; xx < s.w; ++xx) {
          double acc = d.b[o];
          for (std::int64_t i = 0; i < s.c; ++i) {
            acc += d.m[o * s.c + i] * x.at(n, i, y, xx);
          }
          out.at(n, o, y, xx) = static_cast<float>(acc);
        }
      }
    }
  }
  return out;
}

// Every admissible spec with c_in <= max_c and c_out in {c_in, 6 c_in}
// across R in {1, 2, 4}.
inline std::vector<SFConvSpec> EnumerateSpecs(std::int64_t max_c,
                                              bool wide_outputs = true) {
  std::vector<SFConvSpec> specs;
  for (std::int64_t c = 1; c <= max_c; ++c) {
    for (std::int64_t r : {1, 2, 4}) {
      std::vector<std::int64_t> outs{c};
      if (wide_outputs) outs.push_back(6 * c);
      for (std::int64_t co : outs) {
        for (std::int64_t k = r; k <= c; k += r) {
          if (!IsAdmissibleKernel(c, co, r, k)) continue;
          SFConvSpec s;
          s.c_in = c;
          s.c_out = co;
          s.reduction = r;
          s.kernel = k;
          specs.push_back(s);
        }
      }
    }
  }
  return specs;
}

}  // namespace falcon::testing

#endif  // FALCON_TESTS_TEST_UTIL_H_
