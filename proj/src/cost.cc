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

namespace falcon {

namespace {

struct LeafCost {
  std::int64_t params = 0;
  std::int64_t compute = 0;  // parameters that multiply activations
};

LeafCost CostOf(const Layer& l) {
  switch (l.kind) {
    case LayerKind::kConv:
      return {l.conv.ParamCount(), l.conv.ParamCount()};
    case LayerKind::kBatchNorm:
      return {2 * l.channels, 0};
    case LayerKind::kRepSO: {
      std::int64_t kernels = 0;
      for (BranchKind k : l.repso.Branches()) {
        if (k == BranchKind::kIdentity) continue;
        const auto [kh, kw] = BranchKernelExtent(k);
        kernels += l.repso.channels * kh * kw;
      }
      return {kernels + 2 * l.repso.channels * l.repso.BranchCount(), kernels};
    }
    case LayerKind::kSFConv: {
      const std::int64_t p = SFConvParamCount(l.sf) + SFConvBiasCount(l.sf);
      return {p, p};
    }
    case LayerKind::kRefCO: {
      const std::int64_t w1 = l.sf.W1Shape().numel();
      const std::int64_t w2 = l.sf.W2Shape().numel();
      const std::int64_t weights = l.sf.windows() * w1 + l.sf.kernel * w2;
      const std::int64_t bn = l.sf.windows() * 2 * l.sf.hidden_channels() +
                              l.sf.kernel * 2 * l.sf.c_out;
      return {weights + bn, weights};
    }
    case LayerKind::kLinear: {
      const std::int64_t p = l.in_features * l.out_features + l.out_features;
      return {p, p};
    }
    default:
      return {};
  }
}

void AddTo(CategoryTotals& t, Category c, std::int64_t v) {
  switch (c) {
    case Category::kSpatial:
      t.spatial += v;
      break;
    case Category::kChannel:
      t.channel += v;
      break;
    case Category::kOther:
      t.other += v;
      break;
    case Category::kHead:
      t.head += v;
      break;
  }
}

CostReport Account(const LayerGraph& graph, std::int64_t resolution,
                   CostMode mode) {
  const LayerGraph g = mode == CostMode::kInference ? FuseGraph(graph) : graph;
  const std::vector<LayerShape> shapes = InferShapes(g, resolution);
  CostReport report;
  std::size_t next = 0;
  ForEachLeaf(g.layers, [&](const Layer& l) {
    const LayerShape& s = shapes.at(next++);
    const LeafCost c = CostOf(l);
    if (c.params == 0) return;
    LayerCost row;
    row.name = l.name;
    row.kind = l.kind;
    row.category = l.category;
    row.params = c.params;
    row.flops = c.compute * s.output.h * s.output.w;
    row.output = s.output;
    AddTo(report.params, row.category, row.params);
    AddTo(report.flops, row.category, row.flops);
    report.layers.push_back(std::move(row));
  });
  return report;
}

}  // namespace

CostReport CountParams(const LayerGraph& graph, CostMode mode) {
  return Account(graph, graph.input_resolution, mode);
}

CostReport CountFlops(const LayerGraph& graph, std::int64_t resolution,
                      CostMode mode) {
  return Account(graph, resolution, mode);
}

}  // namespace falcon
