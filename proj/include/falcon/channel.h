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

// Sparsely factorized 1x1 convolution (SF-Conv).
//
// At every pixel the C input channels are treated as a length-C signal.
// Stage 1 slides a K-tap window with stride K over it, using an independent
// (unshared) filter bank per window position, producing K/R hidden channels
// at each of the C/K positions. Stage 2 is a depthwise conv over the C/K
// positions of each hidden channel with width multiplier c_out / (K/R).
// Every output therefore reaches all C inputs through the hidden layer
// while the layer holds only C*K/R + c_out*C/K weights.
//
// RefCO is the training-time form: C/K parallel stage-1 banks and K
// parallel stage-2 banks, each followed by its own BN, summed per stage.

#ifndef FALCON_CHANNEL_H_
#define FALCON_CHANNEL_H_

#include <cstdint>
#include <string>
#include <vector>

#include "falcon/tensor.h"

namespace falcon {

struct SFConvSpec {
  std::int64_t c_in = 1;
  std::int64_t c_out = 1;
  std::int64_t reduction = 2;
  std::int64_t kernel = 2;
  bool has_bias = false;

  std::int64_t stride() const { return kernel; }
  std::int64_t hidden_channels() const { return kernel / reduction; }
  std::int64_t windows() const { return c_in / kernel; }
  std::int64_t width_multiplier() const { return c_out / hidden_channels(); }
  // Hidden channel feeding output channel o (block layout).
  std::int64_t HiddenFor(std::int64_t o) const { return o / width_multiplier(); }

  Shape W1Shape() const { return {hidden_channels(), windows(), kernel, 1}; }
  Shape W2Shape() const { return {c_out, 1, windows(), 1}; }

  void Validate() const;
  bool IsValid() const;

  friend bool operator==(const SFConvSpec&, const SFConvSpec&) = default;
};

// w1: [K/R][C/K][K][1], w2: [c_out][1][C/K][1]. Biases are empty unless the
// spec has_bias; then b1 has K/R entries and b2 has c_out entries.
struct SFConvWeights {
  Tensor w1;
  Tensor w2;
  std::vector<float> b1;
  std::vector<float> b2;

  void Validate(const SFConvSpec& spec) const;
};

// True when K divides c_in, R divides K and K/R divides c_out.
bool IsAdmissibleKernel(std::int64_t c_in, std::int64_t c_out,
                        std::int64_t reduction, std::int64_t kernel);
// c_in*K/R + c_out*c_in/K for an admissible K.
std::int64_t SFConvWeightCost(std::int64_t c_in, std::int64_t c_out,
                              std::int64_t reduction, std::int64_t kernel);
// Admissible K with the least weight cost; ties go to the smaller K.
std::int64_t ChooseKernelSize(std::int64_t c_in, std::int64_t c_out,
                              std::int64_t reduction);
// Builds the spec with K from ChooseKernelSize.
SFConvSpec MakeSFConvSpec(std::int64_t c_in, std::int64_t c_out,
                          std::int64_t reduction, bool has_bias = false);

// Weight count, biases excluded.
std::int64_t SFConvParamCount(const SFConvSpec& spec);
std::int64_t SFConvBiasCount(const SFConvSpec& spec);

Tensor SFConvForward(const Tensor& x, const SFConvSpec& spec,
                     const SFConvWeights& w);

struct RefCOStage1Branch {
  Tensor w1;    // SFConvSpec::W1Shape()
  BnParams bn;  // K/R channels
};

struct RefCOStage2Branch {
  Tensor w2;    // SFConvSpec::W2Shape()
  BnParams bn;  // c_out channels
};

struct RefCOWeights {
  std::vector<RefCOStage1Branch> stage1;  // C/K branches
  std::vector<RefCOStage2Branch> stage2;  // K branches

  void Validate(const SFConvSpec& spec) const;
};

Tensor RefCOForward(const Tensor& x, const SFConvSpec& spec,
                    const RefCOWeights& w);

// Channel-connection patterns of 1x1 convolutions.
struct ChannelPattern {
  enum class Kind { kDense, kGroup, kChannelWise, kSparseFactorized };

  Kind kind = Kind::kDense;
  std::int64_t c_in = 1;
  std::int64_t c_out = 1;
  std::int64_t groups = 1;  // kGroup
  std::int64_t window = 1;  // kChannelWise
  SFConvSpec sf;            // kSparseFactorized

  void Validate() const;

  static ChannelPattern Dense(std::int64_t c_in, std::int64_t c_out);
  static ChannelPattern Group(std::int64_t c_in, std::int64_t c_out,
                              std::int64_t groups);
  static ChannelPattern ChannelWise(std::int64_t c_in, std::int64_t c_out,
                                    std::int64_t window);
  static ChannelPattern SparseFactorized(const SFConvSpec& spec);
};

// Layered connection graph: layers[0] are inputs, layers.back() outputs.
// edges[l][j] lists the neurons of layer l that neuron j of layer l+1 reads.
struct ConnectionGraph {
  std::vector<std::int64_t> layer_sizes;
  std::vector<std::vector<std::vector<std::int64_t>>> edges;
};

ConnectionGraph BuildConnectionGraph(const ChannelPattern& pattern);

// Number of input neurons reachable from each output neuron.
std::vector<std::int64_t> ReceptiveRange(const ChannelPattern& pattern);
std::vector<std::int64_t> ReceptiveRange(const ConnectionGraph& graph);

}  // namespace falcon

#endif  // FALCON_CHANNEL_H_
