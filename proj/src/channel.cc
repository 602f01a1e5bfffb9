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

#include "falcon/channel.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "falcon/error.h"
#include "internal.h"

namespace falcon {

using internal::Cat;

bool SFConvSpec::IsValid() const {
  return c_in > 0 && c_out > 0 && reduction > 0 && kernel > 0 &&
         IsAdmissibleKernel(c_in, c_out, reduction, kernel);
}

void SFConvSpec::Validate() const {
  if (c_in <= 0 || c_out <= 0 || reduction <= 0 || kernel <= 0) {
    Fail(ErrorKind::kConfig,
         Cat("sf-conv extents must be positive (c_in=", c_in, ", c_out=",
             c_out, ", R=", reduction, ", K=", kernel, ")"));
  }
  if (c_in % kernel != 0) {
    Fail(ErrorKind::kConfig,
         Cat("sf-conv kernel K=", kernel, " must divide c_in=", c_in));
  }
  if (kernel % reduction != 0) {
    Fail(ErrorKind::kConfig, Cat("sf-conv reduction R=", reduction,
                                 " must divide kernel K=", kernel));
  }
  if (c_out % (kernel / reduction) != 0) {
    Fail(ErrorKind::kConfig, Cat("sf-conv hidden channels K/R=",
                                 kernel / reduction, " must divide c_out=",
                                 c_out));
  }
}

void SFConvWeights::Validate(const SFConvSpec& spec) const {
  spec.Validate();
  if (w1.shape() != spec.W1Shape()) {
    Fail(ErrorKind::kShape, "sf-conv w1: expected " +
                                spec.W1Shape().ToString() + ", got " +
                                w1.shape().ToString());
  }
  if (w2.shape() != spec.W2Shape()) {
    Fail(ErrorKind::kShape, "sf-conv w2: expected " +
                                spec.W2Shape().ToString() + ", got " +
                                w2.shape().ToString());
  }
  const auto check_bias = [&](const std::vector<float>& b, std::int64_t n,
                              const char* which) {
    if (b.empty() && !spec.has_bias) return;
    if (static_cast<std::int64_t>(b.size()) != n) {
      Fail(ErrorKind::kShape, Cat("sf-conv ", which, ": expected ", n,
                                  " values, got ", b.size()));
    }
  };
  check_bias(b1, spec.hidden_channels(), "b1");
  check_bias(b2, spec.c_out, "b2");
}

bool IsAdmissibleKernel(std::int64_t c_in, std::int64_t c_out,
                        std::int64_t reduction, std::int64_t kernel) {
  return kernel > 0 && reduction > 0 && c_in % kernel == 0 &&
         kernel % reduction == 0 && c_out % (kernel / reduction) == 0;
}

std::int64_t SFConvWeightCost(std::int64_t c_in, std::int64_t c_out,
                              std::int64_t reduction, std::int64_t kernel) {
  return c_in * kernel / reduction + c_out * c_in / kernel;
}

std::int64_t ChooseKernelSize(std::int64_t c_in, std::int64_t c_out,
                              std::int64_t reduction) {
  if (c_in <= 0 || c_out <= 0 || reduction <= 0) {
    Fail(ErrorKind::kConfig, Cat("sf-conv sizes must be positive (c_in=", c_in,
                                 ", c_out=", c_out, ", R=", reduction, ")"));
  }
  std::int64_t best = 0;
  std::int64_t best_cost = std::numeric_limits<std::int64_t>::max();
  for (std::int64_t k = reduction; k <= c_in; k += reduction) {
    if (!IsAdmissibleKernel(c_in, c_out, reduction, k)) continue;
    const std::int64_t cost = SFConvWeightCost(c_in, c_out, reduction, k);
    if (cost < best_cost) {
      best = k;
      best_cost = cost;
    }
  }
  if (best == 0) {
    Fail(ErrorKind::kConfig,
         Cat("no admissible sf-conv kernel for c_in=", c_in, ", c_out=", c_out,
             ", R=", reduction,
             " (need K | c_in, R | K and (K/R) | c_out)"));
  }
  return best;
}

SFConvSpec MakeSFConvSpec(std::int64_t c_in, std::int64_t c_out,
                          std::int64_t reduction, bool has_bias) {
  SFConvSpec s;
  s.c_in = c_in;
  s.c_out = c_out;
  s.reduction = reduction;
  s.kernel = ChooseKernelSize(c_in, c_out, reduction);
  s.has_bias = has_bias;
  return s;
}

std::int64_t SFConvParamCount(const SFConvSpec& spec) {
  return spec.c_in * spec.kernel / spec.reduction +
         spec.c_out * spec.c_in / spec.kernel;
}

std::int64_t SFConvBiasCount(const SFConvSpec& spec) {
  return spec.has_bias ? spec.hidden_channels() + spec.c_out : 0;
}

namespace internal {

void CheckSFConvOperands(const Tensor& x, const SFConvSpec& spec,
                         const SFConvWeights& w) {
  w.Validate(spec);
  if (x.shape().c != spec.c_in) {
    Fail(ErrorKind::kShape, Cat("sf-conv input channels: expected ",
                                spec.c_in, ", got ", x.shape().c));
  }
}

}  // namespace internal

namespace {

// Hidden activations are laid out as channel hc * windows + p.
Tensor Stage1(const Tensor& x, const SFConvSpec& spec, const Tensor& w1,
              std::span<const float> b1) {
  const Shape& s = x.shape();
  const std::int64_t k = spec.kernel;
  const std::int64_t windows = spec.windows();
  const std::int64_t hidden_planes = spec.hidden_channels() * windows;
  const std::int64_t area = s.h * s.w;
  Tensor h({s.n, hidden_planes, s.h, s.w});
  const float* xd = x.data().data();
  const float* wd = w1.data().data();
  float* hd = h.data().data();
  const std::int64_t planes = s.n * hidden_planes;

#pragma omp parallel for schedule(static)
  for (std::int64_t plane = 0; plane < planes; ++plane) {
    const std::int64_t n = plane / hidden_planes;
    const std::int64_t hp = plane % hidden_planes;
    const std::int64_t hc = hp / windows;
    const std::int64_t p = hp % windows;
    const float* taps = wd + (hc * windows + p) * k;
    const float* src = xd + (n * s.c + p * k) * area;
    const float b = b1.empty() ? 0.0f : b1[static_cast<std::size_t>(hc)];
    float* dst = hd + plane * area;
    for (std::int64_t i = 0; i < area; ++i) {
      double acc = 0.0;
      for (std::int64_t t = 0; t < k; ++t) {
        acc += static_cast<double>(taps[t]) * src[t * area + i];
      }
      dst[i] = static_cast<float>(acc + b);
    }
  }
  return h;
}

Tensor Stage2(const Tensor& h, const SFConvSpec& spec, const Tensor& w2,
              std::span<const float> b2) {
  const Shape& s = h.shape();
  const std::int64_t windows = spec.windows();
  const std::int64_t area = s.h * s.w;
  Tensor out({s.n, spec.c_out, s.h, s.w});
  const float* hd = h.data().data();
  const float* wd = w2.data().data();
  float* od = out.data().data();
  const std::int64_t planes = s.n * spec.c_out;

#pragma omp parallel for schedule(static)
  for (std::int64_t plane = 0; plane < planes; ++plane) {
    const std::int64_t n = plane / spec.c_out;
    const std::int64_t o = plane % spec.c_out;
    const std::int64_t hc = spec.HiddenFor(o);
    const float* taps = wd + o * windows;
    const float* src = hd + (n * s.c + hc * windows) * area;
    const float b = b2.empty() ? 0.0f : b2[static_cast<std::size_t>(o)];
    float* dst = od + plane * area;
    for (std::int64_t i = 0; i < area; ++i) {
      double acc = 0.0;
      for (std::int64_t p = 0; p < windows; ++p) {
        acc += static_cast<double>(taps[p]) * src[p * area + i];
      }
      dst[i] = static_cast<float>(acc + b);
    }
  }
  return out;
}

struct AffineD {
  std::vector<double> scale;
  std::vector<double> shift;
};

AffineD BnAffineD(const BnParams& bn) {
  AffineD a;
  for (std::size_t c = 0; c < bn.gamma.size(); ++c) {
    const double scale = static_cast<double>(bn.gamma[c]) /
                         std::sqrt(static_cast<double>(bn.running_var[c]) + bn.epsilon);
    a.scale.push_back(scale);
    a.shift.push_back(bn.beta[c] - static_cast<double>(bn.running_mean[c]) * scale);
  }
  return a;
}

}  // namespace

Tensor SFConvForward(const Tensor& x, const SFConvSpec& spec,
                     const SFConvWeights& w) {
  internal::CheckSFConvOperands(x, spec, w);
  return Stage2(Stage1(x, spec, w.w1, w.b1), spec, w.w2, w.b2);
}

void RefCOWeights::Validate(const SFConvSpec& spec) const {
  spec.Validate();
  if (static_cast<std::int64_t>(stage1.size()) != spec.windows()) {
    Fail(ErrorKind::kConfig, Cat("refco stage-1 branch count: expected C/K=",
                                 spec.windows(), ", got ", stage1.size()));
  }
  if (static_cast<std::int64_t>(stage2.size()) != spec.kernel) {
    Fail(ErrorKind::kConfig, Cat("refco stage-2 branch count: expected K=",
                                 spec.kernel, ", got ", stage2.size()));
  }
  for (std::size_t i = 0; i < stage1.size(); ++i) {
    if (stage1[i].w1.shape() != spec.W1Shape()) {
      Fail(ErrorKind::kShape, Cat("refco stage-1 branch ", i, " weight: expected ",
                                  spec.W1Shape().ToString(), ", got ",
                                  stage1[i].w1.shape().ToString()));
    }
    stage1[i].bn.Validate();
    if (stage1[i].bn.channels() != spec.hidden_channels()) {
      Fail(ErrorKind::kShape, Cat("refco stage-1 branch ", i, " bn channels: expected ",
                                  spec.hidden_channels(), ", got ",
                                  stage1[i].bn.channels()));
    }
  }
  for (std::size_t j = 0; j < stage2.size(); ++j) {
    if (stage2[j].w2.shape() != spec.W2Shape()) {
      Fail(ErrorKind::kShape, Cat("refco stage-2 branch ", j, " weight: expected ",
                                  spec.W2Shape().ToString(), ", got ",
                                  stage2[j].w2.shape().ToString()));
    }
    stage2[j].bn.Validate();
    if (stage2[j].bn.channels() != spec.c_out) {
      Fail(ErrorKind::kShape, Cat("refco stage-2 branch ", j, " bn channels: expected ",
                                  spec.c_out, ", got ", stage2[j].bn.channels()));
    }
  }
}

Tensor RefCOForward(const Tensor& x, const SFConvSpec& spec,
                    const RefCOWeights& w) {
  w.Validate(spec);
  if (x.shape().c != spec.c_in) {
    Fail(ErrorKind::kShape, Cat("refco input channels: expected ", spec.c_in,
                                ", got ", x.shape().c));
  }
  const Shape& s = x.shape();
  // The training form is evaluated entirely in double and rounded once, so
  // it serves as a tight reference for the fused operator.
  const std::int64_t k = spec.kernel;
  const std::int64_t windows = spec.windows();
  const std::int64_t hidden_planes = spec.hidden_channels() * windows;
  const std::int64_t area = s.h * s.w;
  std::vector<AffineD> bn1;
  std::vector<AffineD> bn2;
  for (const RefCOStage1Branch& b : w.stage1) bn1.push_back(BnAffineD(b.bn));
  for (const RefCOStage2Branch& b : w.stage2) bn2.push_back(BnAffineD(b.bn));

  std::vector<double> hidden(static_cast<std::size_t>(s.n * hidden_planes * area), 0.0);
  const float* xd = x.data().data();
#pragma omp parallel for schedule(static)
  for (std::int64_t plane = 0; plane < s.n * hidden_planes; ++plane) {
    const std::int64_t n = plane / hidden_planes;
    const std::int64_t hc = (plane % hidden_planes) / windows;
    const std::int64_t p = plane % windows;
    const float* src = xd + (n * s.c + p * k) * area;
    double* dst = hidden.data() + plane * area;
    for (std::size_t br = 0; br < w.stage1.size(); ++br) {
      const float* taps = w.stage1[br].w1.data().data() + (hc * windows + p) * k;
      const double scale = bn1[br].scale[static_cast<std::size_t>(hc)];
      const double shift = bn1[br].shift[static_cast<std::size_t>(hc)];
      for (std::int64_t i = 0; i < area; ++i) {
        double acc = 0.0;
        for (std::int64_t t = 0; t < k; ++t) {
          acc += static_cast<double>(taps[t]) * src[t * area + i];
        }
        dst[i] += scale * acc + shift;
      }
    }
  }

  Tensor out({s.n, spec.c_out, s.h, s.w});
  float* od = out.data().data();
#pragma omp parallel for schedule(static)
  for (std::int64_t plane = 0; plane < s.n * spec.c_out; ++plane) {
    const std::int64_t n = plane / spec.c_out;
    const std::int64_t o = plane % spec.c_out;
    const double* src =
        hidden.data() + (n * hidden_planes + spec.HiddenFor(o) * windows) * area;
    std::vector<double> acc_out(static_cast<std::size_t>(area), 0.0);
    for (std::size_t br = 0; br < w.stage2.size(); ++br) {
      const float* taps = w.stage2[br].w2.data().data() + o * windows;
      const double scale = bn2[br].scale[static_cast<std::size_t>(o)];
      const double shift = bn2[br].shift[static_cast<std::size_t>(o)];
      for (std::int64_t i = 0; i < area; ++i) {
        double acc = 0.0;
        for (std::int64_t q = 0; q < windows; ++q) {
          acc += static_cast<double>(taps[q]) * src[q * area + i];
        }
        acc_out[static_cast<std::size_t>(i)] += scale * acc + shift;
      }
    }
    for (std::int64_t i = 0; i < area; ++i) {
      od[plane * area + i] = static_cast<float>(acc_out[static_cast<std::size_t>(i)]);
    }
  }
  return out;
}

void ChannelPattern::Validate() const {
  if (c_in <= 0 || c_out <= 0) {
    Fail(ErrorKind::kConfig, Cat("pattern channels must be positive (c_in=",
                                 c_in, ", c_out=", c_out, ")"));
  }
  switch (kind) {
    case Kind::kDense:
      break;
    case Kind::kGroup:
      if (groups <= 0 || c_in % groups != 0 || c_out % groups != 0) {
        Fail(ErrorKind::kConfig, Cat("groups=", groups, " must divide c_in=",
                                     c_in, " and c_out=", c_out));
      }
      break;
    case Kind::kChannelWise:
      if (window <= 0 || window > c_in) {
        Fail(ErrorKind::kConfig, Cat("channel-wise window=", window,
                                     " must lie in [1, c_in=", c_in, "]"));
      }
      break;
    case Kind::kSparseFactorized:
      sf.Validate();
      if (sf.c_in != c_in || sf.c_out != c_out) {
        Fail(ErrorKind::kConfig, "sf pattern channels disagree with its spec");
      }
      break;
  }
}

ChannelPattern ChannelPattern::Dense(std::int64_t c_in, std::int64_t c_out) {
  ChannelPattern p;
  p.kind = Kind::kDense;
  p.c_in = c_in;
  p.c_out = c_out;
  return p;
}

ChannelPattern ChannelPattern::Group(std::int64_t c_in, std::int64_t c_out,
                                     std::int64_t groups) {
  ChannelPattern p = Dense(c_in, c_out);
  p.kind = Kind::kGroup;
  p.groups = groups;
  return p;
}

ChannelPattern ChannelPattern::ChannelWise(std::int64_t c_in,
                                           std::int64_t c_out,
                                           std::int64_t window) {
  ChannelPattern p = Dense(c_in, c_out);
  p.kind = Kind::kChannelWise;
  p.window = window;
  return p;
}

ChannelPattern ChannelPattern::SparseFactorized(const SFConvSpec& spec) {
  ChannelPattern p = Dense(spec.c_in, spec.c_out);
  p.kind = Kind::kSparseFactorized;
  p.sf = spec;
  return p;
}

ConnectionGraph BuildConnectionGraph(const ChannelPattern& pattern) {
  pattern.Validate();
  ConnectionGraph g;
  const std::int64_t c_in = pattern.c_in;
  const std::int64_t c_out = pattern.c_out;
  auto range = [](std::int64_t begin, std::int64_t count) {
    std::vector<std::int64_t> r(static_cast<std::size_t>(count));
    for (std::int64_t i = 0; i < count; ++i) r[i] = begin + i;
    return r;
  };

  using Kind = ChannelPattern::Kind;
  if (pattern.kind == Kind::kSparseFactorized) {
    const SFConvSpec& s = pattern.sf;
    const std::int64_t hidden = s.hidden_channels() * s.windows();
    g.layer_sizes = {c_in, hidden, c_out};
    std::vector<std::vector<std::int64_t>> to_hidden(hidden);
    for (std::int64_t hc = 0; hc < s.hidden_channels(); ++hc) {
      for (std::int64_t p = 0; p < s.windows(); ++p) {
        to_hidden[hc * s.windows() + p] = range(p * s.kernel, s.kernel);
      }
    }
    std::vector<std::vector<std::int64_t>> to_out(c_out);
    for (std::int64_t o = 0; o < c_out; ++o) {
      to_out[o] = range(s.HiddenFor(o) * s.windows(), s.windows());
    }
    g.edges = {std::move(to_hidden), std::move(to_out)};
    return g;
  }

  g.layer_sizes = {c_in, c_out};
  std::vector<std::vector<std::int64_t>> to_out(c_out);
  for (std::int64_t o = 0; o < c_out; ++o) {
    switch (pattern.kind) {
      case Kind::kDense:
        to_out[o] = range(0, c_in);
        break;
      case Kind::kGroup: {
        const std::int64_t in_per = c_in / pattern.groups;
        const std::int64_t group = o / (c_out / pattern.groups);
        to_out[o] = range(group * in_per, in_per);
        break;
      }
      case Kind::kChannelWise: {
        // Windows spread evenly from the first to the last channel.
        const std::int64_t start =
            c_out == 1 ? 0 : o * (c_in - pattern.window) / (c_out - 1);
        to_out[o] = range(start, pattern.window);
        break;
      }
      case Kind::kSparseFactorized:
        break;
    }
  }
  g.edges = {std::move(to_out)};
  return g;
}

std::vector<std::int64_t> ReceptiveRange(const ConnectionGraph& graph) {
  const std::size_t depth = graph.edges.size();
  const std::int64_t outputs = graph.layer_sizes.back();
  std::vector<std::int64_t> ranges(static_cast<std::size_t>(outputs));
  for (std::int64_t o = 0; o < outputs; ++o) {
    // Walk backwards one layer at a time, keeping the reachable frontier.
    std::vector<char> frontier(static_cast<std::size_t>(outputs), 0);
    frontier[o] = 1;
    for (std::size_t l = depth; l-- > 0;) {
      std::vector<char> prev(static_cast<std::size_t>(graph.layer_sizes[l]), 0);
      for (std::size_t j = 0; j < frontier.size(); ++j) {
        if (!frontier[j]) continue;
        for (std::int64_t i : graph.edges[l][j]) prev[i] = 1;
      }
      frontier = std::move(prev);
    }
    std::int64_t count = 0;
    for (char c : frontier) count += c;
    ranges[o] = count;
  }
  return ranges;
}

std::vector<std::int64_t> ReceptiveRange(const ChannelPattern& pattern) {
  return ReceptiveRange(BuildConnectionGraph(pattern));
}

}  // namespace falcon
