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

#include "falcon/error.h"
#include "falcon/model.h"
#include "falcon/reparam.h"
#include "internal.h"
#include "model_internal.h"

namespace falcon {

namespace {

void CopyEntries(const Layer& l, const WeightStore& in, WeightStore& out) {
  for (const WeightSpec& s : internal::LayerWeightSpecs(l)) {
    const WeightStore::Entry& e = in.Get(s.name);
    out.Add(e.name, e.extents, e.values);
  }
}

// Rewrites `layers` into inference form. When `in` is null only the
// structure is rewritten.
std::vector<Layer> FuseLayers(const std::vector<Layer>& layers,
                              const WeightStore* in, WeightStore* out,
                              std::int64_t& rewrites) {
  std::vector<Layer> result;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const Layer& l = layers[i];
    if (l.IsContainer()) {
      Layer c = l;
      c.body = FuseLayers(l.body, in, out, rewrites);
      result.push_back(std::move(c));
      continue;
    }
    const Layer* bn = (i + 1 < layers.size() &&
                       layers[i + 1].kind == LayerKind::kBatchNorm)
                          ? &layers[i + 1]
                          : nullptr;
    Layer f = l;
    switch (l.kind) {
      case LayerKind::kConv:
        if (bn == nullptr) break;
        f.conv.has_bias = true;
        if (in) {
          const Tensor w = in->GetTensor(l.name + ".weight");
          std::vector<float> b;
          if (l.conv.has_bias) b = in->GetVector(l.name + ".bias");
          auto [fw, fb] = FuseBnIntoLinear(
              w,
              l.conv.has_bias ? std::optional<std::span<const float>>(b)
                              : std::nullopt,
              internal::LoadBn(*in, bn->name, bn->bn_epsilon));
          out->AddTensor(l.name + ".weight", fw);
          out->AddVector(l.name + ".bias", std::move(fb));
        }
        ++rewrites;
        ++i;
        result.push_back(std::move(f));
        continue;
      case LayerKind::kSFConv:
        if (bn == nullptr) break;
        f.sf.has_bias = true;
        if (in) {
          const SFConvWeights w = internal::LoadSFConv(*in, l);
          auto [fw2, fb2] = FuseBnIntoLinear(
              w.w2,
              w.b2.empty() ? std::nullopt
                           : std::optional<std::span<const float>>(w.b2),
              internal::LoadBn(*in, bn->name, bn->bn_epsilon));
          std::vector<float> b1 = w.b1;
          if (b1.empty()) b1.assign(static_cast<std::size_t>(l.sf.hidden_channels()), 0.0f);
          out->AddTensor(l.name + ".w1", w.w1);
          out->AddTensor(l.name + ".w2", fw2);
          out->AddVector(l.name + ".b1", std::move(b1));
          out->AddVector(l.name + ".b2", std::move(fb2));
        }
        ++rewrites;
        ++i;
        result.push_back(std::move(f));
        continue;
      case LayerKind::kRepSO:
        f.kind = LayerKind::kConv;
        f.conv = DepthwiseSpec(l.repso.channels, 3, 3, 1, 1, true);
        if (in) {
          FusedDWConv fused = MergeRepSO(internal::LoadRepSO(*in, l), l.repso);
          out->AddTensor(l.name + ".weight", fused.kernel);
          out->AddVector(l.name + ".bias", std::move(fused.bias));
        }
        ++rewrites;
        result.push_back(std::move(f));
        continue;
      case LayerKind::kRefCO:
        f.kind = LayerKind::kSFConv;
        f.sf.has_bias = true;
        if (in) {
          SFConvWeights fused = MergeRefCO(f.sf, internal::LoadRefCO(*in, l));
          out->AddTensor(l.name + ".w1", fused.w1);
          out->AddTensor(l.name + ".w2", fused.w2);
          out->AddVector(l.name + ".b1", std::move(fused.b1));
          out->AddVector(l.name + ".b2", std::move(fused.b2));
        }
        ++rewrites;
        result.push_back(std::move(f));
        continue;
      default:
        break;
    }
    if (in) CopyEntries(l, *in, *out);
    result.push_back(std::move(f));
  }
  return result;
}

}  // namespace

LayerGraph FuseGraph(const LayerGraph& graph) {
  LayerGraph g = graph;
  std::int64_t rewrites = 0;
  g.layers = FuseLayers(graph.layers, nullptr, nullptr, rewrites);
  return g;
}

FusedModel FuseModel(const LayerGraph& graph, const WeightStore& weights) {
  CheckWeights(graph, weights);
  FusedModel m;
  m.graph = graph;
  m.graph.layers = FuseLayers(graph.layers, &weights, &m.weights, m.fused_ops);
  return m;
}

}  // namespace falcon
