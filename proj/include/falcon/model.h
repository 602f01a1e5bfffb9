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

// LightNet / FalconNet model description, construction and execution.
//
// Topology built by BuildModel:
//
//   stem:    conv3x3/2 (3 -> S) -> BN -> ReLU
//            -> [dw3x3 -> pw1x1] + identity
//            -> dw3x3/2 -> BN
//   stage i: (i > 0) subsample: conv2x2/2, groups = C[i-1], C[i-1] -> C[i], BN
//            blocks[i] x block template
//   head:    conv1x1 (C[last] -> head_width) -> ReLU -> global avg pool -> fc
//
// A meta light block is channel1 (C -> lC) -> BN -> ReLU -> spatial (lC)
// -> ReLU -> channel2 (lC -> C) -> BN, with an identity shortcut. RepSO and
// RefCO slots carry their own per-branch BN so no trailing BN is added.

#ifndef FALCON_MODEL_H_
#define FALCON_MODEL_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "falcon/channel.h"
#include "falcon/spatial.h"
#include "falcon/tensor.h"
#include "falcon/weights.h"

namespace falcon {

enum class SlotKind { kIdentity, kDwConv, kRepSO, kPwDense, kSFConv, kRefCO };

std::string_view SlotKindName(SlotKind kind);
SlotKind ParseSlotKind(std::string_view name);
bool IsSpatialSlot(SlotKind kind);
bool IsChannelSlot(SlotKind kind);

struct OperatorSlot {
  SlotKind kind = SlotKind::kIdentity;
  // kRepSO
  std::int64_t n_parallel_3x3 = 3;
  bool include_1x3 = true;
  bool include_3x1 = true;
  bool include_1x1 = true;
  bool include_identity = true;
  // kSFConv / kRefCO
  std::int64_t reduction = 2;

  RepSOConfig RepSO(std::int64_t channels) const;

  friend bool operator==(const OperatorSlot&, const OperatorSlot&) = default;
};

// Positive rational expansion ratio.
struct Ratio {
  std::int64_t num = 1;
  std::int64_t den = 1;

  bool DividesEvenly(std::int64_t channels) const {
    return (channels * num) % den == 0;
  }
  std::int64_t Apply(std::int64_t channels) const {
    return channels * num / den;
  }
  std::string ToString() const;

  friend bool operator==(const Ratio&, const Ratio&) = default;
};

enum class BlockForm { kMetaBasic, kMetaLight };

struct BlockConfig {
  BlockForm form = BlockForm::kMetaLight;
  Ratio expansion{6, 1};
  bool residual = true;
  // meta_light: 1 spatial slot; meta_basic: 3 (before, between, after).
  std::vector<OperatorSlot> spatial;
  // Always 2: expand (C -> lC) then reduce (lC -> C).
  std::vector<OperatorSlot> channel;

  void Validate(std::int64_t channels) const;

  friend bool operator==(const BlockConfig&, const BlockConfig&) = default;
};

BlockConfig FalconNetBlock();
BlockConfig LightNetIrbBlock();
BlockConfig LightNetRepSOBlock();

struct ModelConfig {
  std::int64_t stem_channels = 32;
  std::vector<std::int64_t> stage_blocks{3, 3, 9, 3};
  std::vector<std::int64_t> stage_channels{32, 64, 128, 256};
  std::vector<BlockConfig> stage_templates;  // one per stage
  std::int64_t head_width = 1024;
  std::int64_t num_classes = 1000;
  std::int64_t input_resolution = 224;
  double bn_epsilon = 1e-5;

  void Validate() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

// "falconnet", "lightnet-irb" or "lightnet-repso".
ModelConfig PresetConfig(std::string_view preset);
std::vector<std::string> PresetNames();

// JSON mirror of ModelConfig. Unknown keys are rejected.
ModelConfig ParseModelConfig(std::string_view json_text);
std::string ModelConfigToJson(const ModelConfig& cfg);
ModelConfig LoadModelConfig(const std::string& path);
void SaveModelConfig(const ModelConfig& cfg, const std::string& path);

enum class Category { kSpatial, kChannel, kOther, kHead };
std::string_view CategoryName(Category c);

enum class LayerKind {
  kConv,
  kBatchNorm,
  kRelu,
  kRepSO,
  kSFConv,
  kRefCO,
  kResidual,  // body plus identity shortcut
  kBlock,     // body, shortcut when `residual`
  kGlobalAvgPool,
  kLinear,
};
std::string_view LayerKindName(LayerKind kind);

struct Layer {
  LayerKind kind = LayerKind::kRelu;
  std::string name;
  Category category = Category::kOther;

  ConvSpec conv;              // kConv
  std::int64_t channels = 0;  // kBatchNorm
  float bn_epsilon = 1e-5f;   // kBatchNorm, kRepSO, kRefCO
  RepSOConfig repso;          // kRepSO
  SFConvSpec sf;              // kSFConv, kRefCO
  std::int64_t in_features = 0;   // kLinear
  std::int64_t out_features = 0;  // kLinear
  bool residual = false;          // kBlock
  std::vector<Layer> body;        // kResidual, kBlock

  bool IsContainer() const {
    return kind == LayerKind::kResidual || kind == LayerKind::kBlock;
  }
};

struct LayerGraph {
  std::vector<Layer> layers;
  std::int64_t input_channels = 3;
  std::int64_t input_resolution = 224;
  std::int64_t num_classes = 0;
};

// Throws ErrorKind::kConfig for invalid channel arithmetic or inadmissible
// SF-Conv slots, ErrorKind::kShape when the resolution collapses.
LayerGraph BuildModel(const ModelConfig& cfg);

// Calls fn(layer) for every leaf layer in execution order.
template <typename Fn>
void ForEachLeaf(const std::vector<Layer>& layers, Fn&& fn) {
  for (const Layer& l : layers) {
    if (l.IsContainer()) {
      ForEachLeaf(l.body, fn);
    } else {
      fn(l);
    }
  }
}

std::int64_t CountBlocks(const LayerGraph& graph);

struct LayerShape {
  std::string name;
  LayerKind kind;
  Shape input;
  Shape output;
};
// Shapes of every leaf layer for a 1 x C x res x res input.
std::vector<LayerShape> InferShapes(const LayerGraph& graph,
                                    std::int64_t resolution);

// Names and extents of every parameter entry the graph reads.
struct WeightSpec {
  std::string name;
  std::vector<std::int64_t> extents;
};
std::vector<WeightSpec> ExpectedWeights(const LayerGraph& graph);

// Throws ErrorKind::kMissing / kFormat for the first absent or misshapen
// entry, and kFormat for entries the graph does not use.
void CheckWeights(const LayerGraph& graph, const WeightStore& store);

// Seeded random weights with non-degenerate BN statistics.
WeightStore RandomWeights(const LayerGraph& graph, std::uint64_t seed);

// x: N x 3 x res x res. Returns logits N x num_classes x 1 x 1.
Tensor Forward(const LayerGraph& graph, const WeightStore& weights,
               const Tensor& x);

enum class CostMode { kTrain, kInference };

struct LayerCost {
  std::string name;
  LayerKind kind;
  Category category;
  std::int64_t params = 0;
  std::int64_t flops = 0;
  Shape output;
};

struct CategoryTotals {
  std::int64_t spatial = 0;
  std::int64_t channel = 0;
  std::int64_t other = 0;
  std::int64_t head = 0;

  std::int64_t WithoutHead() const { return spatial + channel + other; }
  std::int64_t Total() const { return WithoutHead() + head; }
};

struct CostReport {
  std::vector<LayerCost> layers;
  CategoryTotals params;
  CategoryTotals flops;
};

// Flops follow the output_area x params convention: a multiply-add counts
// once, and BN, activations, pooling and shortcuts count zero. Inference
// mode accounts the fused form of the graph.
CostReport CountParams(const LayerGraph& graph, CostMode mode);
CostReport CountFlops(const LayerGraph& graph, std::int64_t resolution,
                      CostMode mode);

// Structural half of fusion: RepSO -> biased depthwise 3x3, RefCO -> biased
// SF-Conv, conv/SF-Conv followed by BN -> biased operator.
LayerGraph FuseGraph(const LayerGraph& graph);

struct FusedModel {
  LayerGraph graph;
  WeightStore weights;
  std::int64_t fused_ops = 0;  // number of fusion rewrites applied
};
FusedModel FuseModel(const LayerGraph& graph, const WeightStore& weights);

// Picks the train-form or fused graph of cfg whose weight layout matches
// `weights`. Throws when neither does, naming the first missing entry of
// the train form.
LayerGraph ResolveGraph(const ModelConfig& cfg, const WeightStore& weights);

}  // namespace falcon

#endif  // FALCON_MODEL_H_
