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

// Kernel timings: serial reference vs OpenMP kernels, dense vs sparse
// factorized pointwise, and train vs fused operator forms.

#include <benchmark/benchmark.h>

#include <random>

#include "falcon/channel.h"
#include "falcon/model.h"
#include "falcon/reference.h"
#include "falcon/reparam.h"
#include "falcon/spatial.h"
#include "falcon/tensor.h"

namespace falcon {
namespace {

Tensor Random(const Shape& s, std::mt19937_64& rng) {
  std::uniform_real_distribution<float> d(-1.0f, 1.0f);
  Tensor t(s);
  for (float& v : t.data()) v = d(rng);
  return t;
}

BnParams RandomBn(std::int64_t c, std::mt19937_64& rng) {
  std::uniform_real_distribution<float> d(0.5f, 1.5f);
  BnParams bn;
  for (std::int64_t i = 0; i < c; ++i) {
    bn.gamma.push_back(d(rng));
    bn.beta.push_back(d(rng) - 1.0f);
    bn.running_mean.push_back(d(rng) - 1.0f);
    bn.running_var.push_back(d(rng));
  }
  return bn;
}

// Args: c_in, c_out, spatial extent.
void BM_PointwiseReference(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const Tensor x = Random({1, state.range(0), state.range(2), state.range(2)}, rng);
  const Tensor w = Random({state.range(1), state.range(0), 1, 1}, rng);
  const ConvSpec spec = PointwiseSpec(state.range(0), state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(reference::Conv2d(x, w, std::nullopt, spec));
}

void BM_PointwiseParallel(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const Tensor x = Random({1, state.range(0), state.range(2), state.range(2)}, rng);
  const Tensor w = Random({state.range(1), state.range(0), 1, 1}, rng);
  const ConvSpec spec = PointwiseSpec(state.range(0), state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(Conv2d(x, w, std::nullopt, spec));
}

void BM_DepthwiseReference(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const std::int64_t c = state.range(0);
  const Tensor x = Random({1, c, state.range(1), state.range(1)}, rng);
  const Tensor w = Random({c, 1, 3, 3}, rng);
  const ConvSpec spec = DepthwiseSpec(c, 3, 3, 1, 1);
  for (auto _ : state) benchmark::DoNotOptimize(reference::Conv2d(x, w, std::nullopt, spec));
}

void BM_DepthwiseParallel(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const std::int64_t c = state.range(0);
  const Tensor x = Random({1, c, state.range(1), state.range(1)}, rng);
  const Tensor w = Random({c, 1, 3, 3}, rng);
  const ConvSpec spec = DepthwiseSpec(c, 3, 3, 1, 1);
  for (auto _ : state) benchmark::DoNotOptimize(Conv2d(x, w, std::nullopt, spec));
}

SFConvWeights RandomSF(const SFConvSpec& s, std::mt19937_64& rng) {
  return {Random(s.W1Shape(), rng), Random(s.W2Shape(), rng), {}, {}};
}

void BM_SFConvReference(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const SFConvSpec s = MakeSFConvSpec(state.range(0), state.range(1), 2);
  const SFConvWeights w = RandomSF(s, rng);
  const Tensor x = Random({1, s.c_in, state.range(2), state.range(2)}, rng);
  for (auto _ : state) benchmark::DoNotOptimize(reference::SFConvForward(x, s, w));
}

void BM_SFConvParallel(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const SFConvSpec s = MakeSFConvSpec(state.range(0), state.range(1), 2);
  const SFConvWeights w = RandomSF(s, rng);
  const Tensor x = Random({1, s.c_in, state.range(2), state.range(2)}, rng);
  for (auto _ : state) benchmark::DoNotOptimize(SFConvForward(x, s, w));
}

RepSOWeights RandomRepSOWeights(const RepSOConfig& cfg, std::mt19937_64& rng) {
  RepSOWeights w;
  for (BranchKind kind : cfg.Branches()) {
    RepSOBranch b;
    b.kind = kind;
    if (kind != BranchKind::kIdentity) {
      const auto [kh, kw] = BranchKernelExtent(kind);
      b.kernel = Random({cfg.channels, 1, kh, kw}, rng);
    }
    b.bn = RandomBn(cfg.channels, rng);
    w.branches.push_back(std::move(b));
  }
  return w;
}

void BM_RepSOTrain(benchmark::State& state) {
  std::mt19937_64 rng(4);
  RepSOConfig cfg;
  cfg.channels = state.range(0);
  const RepSOWeights w = RandomRepSOWeights(cfg, rng);
  const Tensor x = Random({1, cfg.channels, state.range(1), state.range(1)}, rng);
  for (auto _ : state) benchmark::DoNotOptimize(RepSOForward(x, w, cfg));
}

void BM_RepSOFused(benchmark::State& state) {
  std::mt19937_64 rng(4);
  RepSOConfig cfg;
  cfg.channels = state.range(0);
  const FusedDWConv f = MergeRepSO(RandomRepSOWeights(cfg, rng), cfg);
  const Tensor x = Random({1, cfg.channels, state.range(1), state.range(1)}, rng);
  const ConvSpec spec = DepthwiseSpec(cfg.channels, 3, 3, 1, 1, true);
  for (auto _ : state) {
    benchmark::DoNotOptimize(Conv2d(x, f.kernel, std::span<const float>(f.bias), spec));
  }
}

RefCOWeights RandomRefCOWeights(const SFConvSpec& s, std::mt19937_64& rng) {
  RefCOWeights w;
  for (std::int64_t i = 0; i < s.windows(); ++i) {
    w.stage1.push_back({Random(s.W1Shape(), rng), RandomBn(s.hidden_channels(), rng)});
  }
  for (std::int64_t j = 0; j < s.kernel; ++j) {
    w.stage2.push_back({Random(s.W2Shape(), rng), RandomBn(s.c_out, rng)});
  }
  return w;
}

void BM_RefCOTrain(benchmark::State& state) {
  std::mt19937_64 rng(5);
  const SFConvSpec s = MakeSFConvSpec(state.range(0), state.range(1), 2);
  const RefCOWeights w = RandomRefCOWeights(s, rng);
  const Tensor x = Random({1, s.c_in, state.range(2), state.range(2)}, rng);
  for (auto _ : state) benchmark::DoNotOptimize(RefCOForward(x, s, w));
}

void BM_RefCOFused(benchmark::State& state) {
  std::mt19937_64 rng(5);
  SFConvSpec s = MakeSFConvSpec(state.range(0), state.range(1), 2);
  const SFConvWeights f = MergeRefCO(s, RandomRefCOWeights(s, rng));
  s.has_bias = true;
  const Tensor x = Random({1, s.c_in, state.range(2), state.range(2)}, rng);
  for (auto _ : state) benchmark::DoNotOptimize(SFConvForward(x, s, f));
}

// Arg: 0 for the train form, 1 for the fused form.
void BM_FalconNetForward(benchmark::State& state) {
  const LayerGraph g = BuildModel(PresetConfig("falconnet"));
  const WeightStore w = RandomWeights(g, 6);
  const FusedModel f = FuseModel(g, w);
  std::mt19937_64 rng(6);
  const Tensor x = Random({1, 3, 224, 224}, rng);
  const bool fused = state.range(0) == 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fused ? Forward(f.graph, f.weights, x) : Forward(g, w, x));
  }
}

BENCHMARK(BM_PointwiseReference)->Args({64, 384, 28})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PointwiseParallel)->Args({64, 384, 28})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DepthwiseReference)->Args({384, 28})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DepthwiseParallel)->Args({384, 28})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SFConvReference)->Args({64, 384, 28})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SFConvParallel)->Args({64, 384, 28})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RepSOTrain)->Args({192, 56})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RepSOFused)->Args({192, 56})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RefCOTrain)->Args({64, 384, 28})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RefCOFused)->Args({64, 384, 28})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FalconNetForward)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace falcon

BENCHMARK_MAIN();
