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

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "falcon/error.h"
#include "falcon/model.h"
#include "internal.h"
#include "model_internal.h"

namespace falcon {

using internal::Cat;

std::string_view CategoryName(Category c) {
  switch (c) {
    case Category::kSpatial:
      return "spatial";
    case Category::kChannel:
      return "channel";
    case Category::kOther:
      return "other";
    case Category::kHead:
      return "head";
  }
  return "?";
}

std::string_view LayerKindName(LayerKind kind) {
  switch (kind) {
    case LayerKind::kConv:
      return "conv";
    case LayerKind::kBatchNorm:
      return "batch_norm";
    case LayerKind::kRelu:
      return "relu";
    case LayerKind::kRepSO:
      return "repso";
    case LayerKind::kSFConv:
      return "sf_conv";
    case LayerKind::kRefCO:
      return "refco";
    case LayerKind::kResidual:
      return "residual";
    case LayerKind::kBlock:
      return "block";
    case LayerKind::kGlobalAvgPool:
      return "global_avg_pool";
    case LayerKind::kLinear:
      return "linear";
  }
  return "?";
}

namespace {

class GraphBuilder {
 public:
  explicit GraphBuilder(float eps) : eps_(eps) {}

  Layer Conv(std::string name, Category cat, const ConvSpec& spec) const {
    Layer l;
    l.kind = LayerKind::kConv;
    l.name = std::move(name);
    l.category = cat;
    l.conv = spec;
    return l;
  }
  Layer Bn(std::string name, Category cat, std::int64_t channels) const {
    Layer l;
    l.kind = LayerKind::kBatchNorm;
    l.name = std::move(name);
    l.category = cat;
    l.channels = channels;
    l.bn_epsilon = eps_;
    return l;
  }
  static Layer Act(std::string name) {
    Layer l;
    l.kind = LayerKind::kRelu;
    l.name = std::move(name);
    return l;
  }

  // Appends the layers realizing `slot` (including any trailing BN).
  void Slot(const OperatorSlot& slot, const std::string& name,
            std::int64_t c_in, std::int64_t c_out,
            std::vector<Layer>& out) const {
    switch (slot.kind) {
      case SlotKind::kIdentity:
        return;
      case SlotKind::kDwConv:
        out.push_back(Conv(name, Category::kSpatial,
                           DepthwiseSpec(c_in, 3, 3, 1, 1)));
        out.push_back(Bn(name + "_bn", Category::kSpatial, c_in));
        return;
      case SlotKind::kRepSO: {
        Layer l;
        l.kind = LayerKind::kRepSO;
        l.name = name;
        l.category = Category::kSpatial;
        l.repso = slot.RepSO(c_in);
        l.bn_epsilon = eps_;
        out.push_back(std::move(l));
        return;
      }
      case SlotKind::kPwDense:
        out.push_back(Conv(name, Category::kChannel, PointwiseSpec(c_in, c_out)));
        out.push_back(Bn(name + "_bn", Category::kChannel, c_out));
        return;
      case SlotKind::kSFConv: {
        Layer l;
        l.kind = LayerKind::kSFConv;
        l.name = name;
        l.category = Category::kChannel;
        l.sf = MakeSFConvSpec(c_in, c_out, slot.reduction);
        out.push_back(std::move(l));
        out.push_back(Bn(name + "_bn", Category::kChannel, c_out));
        return;
      }
      case SlotKind::kRefCO: {
        Layer l;
        l.kind = LayerKind::kRefCO;
        l.name = name;
        l.category = Category::kChannel;
        l.sf = MakeSFConvSpec(c_in, c_out, slot.reduction);
        l.bn_epsilon = eps_;
        out.push_back(std::move(l));
        return;
      }
    }
  }

  Layer Block(const BlockConfig& cfg, std::int64_t c,
              const std::string& name) const {
    Layer block;
    block.kind = LayerKind::kBlock;
    block.name = name;
    block.residual = cfg.residual;
    const std::int64_t wide = cfg.expansion.Apply(c);
    std::vector<Layer>& body = block.body;
    auto spatial = [&](const OperatorSlot& slot, const std::string& slot_name,
                       std::int64_t width, bool activate) {
      Slot(slot, name + "." + slot_name, width, width, body);
      if (activate && slot.kind != SlotKind::kIdentity) {
        body.push_back(Act(name + "." + slot_name + "_act"));
      }
    };
    if (cfg.form == BlockForm::kMetaBasic) {
      spatial(cfg.spatial[0], "spatial0", c, false);
    }
    Slot(cfg.channel[0], name + ".channel1", c, wide, body);
    body.push_back(Act(name + ".channel1_act"));
    if (cfg.form == BlockForm::kMetaLight) {
      spatial(cfg.spatial[0], "spatial", wide, true);
    } else {
      spatial(cfg.spatial[1], "spatial1", wide, true);
    }
    Slot(cfg.channel[1], name + ".channel2", wide, c, body);
    if (cfg.form == BlockForm::kMetaBasic) {
      spatial(cfg.spatial[2], "spatial2", c, false);
    }
    return block;
  }

 private:
  float eps_;
};

}  // namespace

LayerGraph BuildModel(const ModelConfig& cfg) {
  cfg.Validate();
  const GraphBuilder b(static_cast<float>(cfg.bn_epsilon));
  LayerGraph g;
  g.input_channels = 3;
  g.input_resolution = cfg.input_resolution;
  g.num_classes = cfg.num_classes;
  std::vector<Layer>& L = g.layers;
  const std::int64_t s = cfg.stem_channels;

  ConvSpec stem = PointwiseSpec(3, s);
  stem.kernel_h = stem.kernel_w = 3;
  stem.stride_h = stem.stride_w = 2;
  stem.pad_h = stem.pad_w = 1;
  L.push_back(b.Conv("stem.conv", Category::kOther, stem));
  L.push_back(b.Bn("stem.bn", Category::kOther, s));
  L.push_back(GraphBuilder::Act("stem.act"));
  Layer shortcut;
  shortcut.kind = LayerKind::kResidual;
  shortcut.name = "stem.shortcut";
  shortcut.body.push_back(b.Conv("stem.dw", Category::kSpatial,
                                 DepthwiseSpec(s, 3, 3, 1, 1, true)));
  shortcut.body.push_back(
      b.Conv("stem.pw", Category::kChannel, PointwiseSpec(s, s, true)));
  L.push_back(std::move(shortcut));
  ConvSpec down = DepthwiseSpec(s, 3, 3, 1, 1);
  down.stride_h = down.stride_w = 2;
  L.push_back(b.Conv("stem.down", Category::kSpatial, down));
  L.push_back(b.Bn("stem.down_bn", Category::kSpatial, s));

  for (std::size_t i = 0; i < cfg.stage_channels.size(); ++i) {
    const std::int64_t c = cfg.stage_channels[i];
    const std::string stage = Cat("stages.", i);
    if (i > 0) {
      const std::int64_t prev = cfg.stage_channels[i - 1];
      ConvSpec sub = PointwiseSpec(prev, c);
      sub.groups = prev;
      sub.kernel_h = sub.kernel_w = 2;
      sub.stride_h = sub.stride_w = 2;
      L.push_back(b.Conv(stage + ".subsample", Category::kSpatial, sub));
      L.push_back(b.Bn(stage + ".subsample_bn", Category::kSpatial, c));
    }
    for (std::int64_t j = 0; j < cfg.stage_blocks[i]; ++j) {
      L.push_back(
          b.Block(cfg.stage_templates[i], c, Cat(stage, ".blocks.", j)));
    }
  }

  const std::int64_t last = cfg.stage_channels.back();
  L.push_back(b.Conv("head.conv", Category::kHead,
                     PointwiseSpec(last, cfg.head_width, true)));
  L.push_back(GraphBuilder::Act("head.act"));
  Layer pool;
  pool.kind = LayerKind::kGlobalAvgPool;
  pool.name = "head.pool";
  pool.category = Category::kHead;
  L.push_back(std::move(pool));
  Layer fc;
  fc.kind = LayerKind::kLinear;
  fc.name = "head.fc";
  fc.category = Category::kHead;
  fc.in_features = cfg.head_width;
  fc.out_features = cfg.num_classes;
  L.push_back(std::move(fc));

  InferShapes(g, g.input_resolution);
  return g;
}

std::int64_t CountBlocks(const LayerGraph& graph) {
  std::int64_t n = 0;
  auto visit = [&](const auto& self, const std::vector<Layer>& layers) -> void {
    for (const Layer& l : layers) {
      if (l.kind == LayerKind::kBlock) ++n;
      if (l.IsContainer()) self(self, l.body);
    }
  };
  visit(visit, graph.layers);
  return n;
}

namespace {

Shape LeafOutputShape(const Layer& l, const Shape& in) {
  auto expect_channels = [&](std::int64_t c) {
    if (in.c != c) {
      Fail(ErrorKind::kShape, Cat("layer '", l.name, "' expects ", c,
                                  " input channels, producer gives ", in.c));
    }
  };
  switch (l.kind) {
    case LayerKind::kConv:
      expect_channels(l.conv.in_channels);
      return l.conv.OutputShape(in);
    case LayerKind::kBatchNorm:
      expect_channels(l.channels);
      return in;
    case LayerKind::kRepSO:
      expect_channels(l.repso.channels);
      return in;
    case LayerKind::kSFConv:
    case LayerKind::kRefCO:
      expect_channels(l.sf.c_in);
      return {in.n, l.sf.c_out, in.h, in.w};
    case LayerKind::kGlobalAvgPool:
      return {in.n, in.c, 1, 1};
    case LayerKind::kLinear:
      if (in.c * in.h * in.w != l.in_features) {
        Fail(ErrorKind::kShape, Cat("layer '", l.name, "' expects ",
                                    l.in_features, " features, got ",
                                    in.c * in.h * in.w));
      }
      return {in.n, l.out_features, 1, 1};
    default:
      return in;
  }
}

Shape PropagateShapes(const std::vector<Layer>& layers, Shape in,
                      std::vector<LayerShape>* out) {
  for (const Layer& l : layers) {
    if (l.IsContainer()) {
      const Shape body_out = PropagateShapes(l.body, in, out);
      const bool shortcut = l.kind == LayerKind::kResidual || l.residual;
      if (shortcut && body_out != in) {
        Fail(ErrorKind::kShape, Cat("shortcut around '", l.name,
                                    "' joins mismatched shapes ",
                                    in.ToString(), " and ",
                                    body_out.ToString()));
      }
      in = body_out;
      continue;
    }
    const Shape o = LeafOutputShape(l, in);
    if (out) out->push_back({l.name, l.kind, in, o});
    in = o;
  }
  return in;
}

}  // namespace

std::vector<LayerShape> InferShapes(const LayerGraph& graph,
                                    std::int64_t resolution) {
  std::vector<LayerShape> shapes;
  PropagateShapes(graph.layers,
                  {1, graph.input_channels, resolution, resolution}, &shapes);
  return shapes;
}

namespace {

void AppendBnSpecs(const std::string& prefix, std::int64_t c,
                   std::vector<WeightSpec>& out) {
  for (const char* field : {"gamma", "beta", "running_mean", "running_var"}) {
    out.push_back({prefix + "." + field, {c}});
  }
}

std::vector<std::int64_t> Extents(const Shape& s) { return {s.n, s.c, s.h, s.w}; }

}  // namespace

namespace internal {

std::vector<WeightSpec> LayerWeightSpecs(const Layer& l) {
  std::vector<WeightSpec> out;
  switch (l.kind) {
    case LayerKind::kConv:
      out.push_back({l.name + ".weight", Extents(l.conv.WeightShape())});
      if (l.conv.has_bias) out.push_back({l.name + ".bias", {l.conv.out_channels}});
      break;
    case LayerKind::kBatchNorm:
      AppendBnSpecs(l.name, l.channels, out);
      break;
    case LayerKind::kRepSO: {
      const auto kinds = l.repso.Branches();
      for (std::size_t i = 0; i < kinds.size(); ++i) {
        const std::string p = Cat(l.name, ".branch", i);
        if (kinds[i] != BranchKind::kIdentity) {
          const auto [kh, kw] = BranchKernelExtent(kinds[i]);
          out.push_back({p + ".kernel", {l.repso.channels, 1, kh, kw}});
        }
        AppendBnSpecs(p + ".bn", l.repso.channels, out);
      }
      break;
    }
    case LayerKind::kSFConv:
      out.push_back({l.name + ".w1", Extents(l.sf.W1Shape())});
      out.push_back({l.name + ".w2", Extents(l.sf.W2Shape())});
      if (l.sf.has_bias) {
        out.push_back({l.name + ".b1", {l.sf.hidden_channels()}});
        out.push_back({l.name + ".b2", {l.sf.c_out}});
      }
      break;
    case LayerKind::kRefCO:
      for (std::int64_t i = 0; i < l.sf.windows(); ++i) {
        const std::string p = Cat(l.name, ".stage1.", i);
        out.push_back({p + ".w1", Extents(l.sf.W1Shape())});
        AppendBnSpecs(p + ".bn", l.sf.hidden_channels(), out);
      }
      for (std::int64_t j = 0; j < l.sf.kernel; ++j) {
        const std::string p = Cat(l.name, ".stage2.", j);
        out.push_back({p + ".w2", Extents(l.sf.W2Shape())});
        AppendBnSpecs(p + ".bn", l.sf.c_out, out);
      }
      break;
    case LayerKind::kLinear:
      out.push_back({l.name + ".weight", {l.out_features, l.in_features}});
      out.push_back({l.name + ".bias", {l.out_features}});
      break;
    default:
      break;
  }
  return out;
}

BnParams LoadBn(const WeightStore& store, const std::string& prefix,
                float epsilon) {
  BnParams bn;
  bn.gamma = store.GetVector(prefix + ".gamma");
  bn.beta = store.GetVector(prefix + ".beta");
  bn.running_mean = store.GetVector(prefix + ".running_mean");
  bn.running_var = store.GetVector(prefix + ".running_var");
  bn.epsilon = epsilon;
  return bn;
}

void StoreBn(WeightStore& store, const std::string& prefix, const BnParams& bn) {
  store.AddVector(prefix + ".gamma", bn.gamma);
  store.AddVector(prefix + ".beta", bn.beta);
  store.AddVector(prefix + ".running_mean", bn.running_mean);
  store.AddVector(prefix + ".running_var", bn.running_var);
}

RepSOWeights LoadRepSO(const WeightStore& store, const Layer& l) {
  RepSOWeights w;
  const auto kinds = l.repso.Branches();
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    const std::string p = Cat(l.name, ".branch", i);
    RepSOBranch b;
    b.kind = kinds[i];
    if (kinds[i] != BranchKind::kIdentity) b.kernel = store.GetTensor(p + ".kernel");
    b.bn = LoadBn(store, p + ".bn", l.bn_epsilon);
    w.branches.push_back(std::move(b));
  }
  return w;
}

RefCOWeights LoadRefCO(const WeightStore& store, const Layer& l) {
  RefCOWeights w;
  for (std::int64_t i = 0; i < l.sf.windows(); ++i) {
    const std::string p = Cat(l.name, ".stage1.", i);
    w.stage1.push_back(
        {store.GetTensor(p + ".w1"), LoadBn(store, p + ".bn", l.bn_epsilon)});
  }
  for (std::int64_t j = 0; j < l.sf.kernel; ++j) {
    const std::string p = Cat(l.name, ".stage2.", j);
    w.stage2.push_back(
        {store.GetTensor(p + ".w2"), LoadBn(store, p + ".bn", l.bn_epsilon)});
  }
  return w;
}

SFConvWeights LoadSFConv(const WeightStore& store, const Layer& l) {
  SFConvWeights w;
  w.w1 = store.GetTensor(l.name + ".w1");
  w.w2 = store.GetTensor(l.name + ".w2");
  if (l.sf.has_bias) {
    w.b1 = store.GetVector(l.name + ".b1");
    w.b2 = store.GetVector(l.name + ".b2");
  }
  return w;
}

}  // namespace internal

std::vector<WeightSpec> ExpectedWeights(const LayerGraph& graph) {
  std::vector<WeightSpec> out;
  ForEachLeaf(graph.layers, [&](const Layer& l) {
    for (WeightSpec& s : internal::LayerWeightSpecs(l)) out.push_back(std::move(s));
  });
  return out;
}

void CheckWeights(const LayerGraph& graph, const WeightStore& store) {
  std::set<std::string> used;
  for (const WeightSpec& s : ExpectedWeights(graph)) {
    const WeightStore::Entry& e = store.Get(s.name);
    if (e.extents != s.extents) {
      std::ostringstream want, got;
      for (auto x : s.extents) want << x << ' ';
      for (auto x : e.extents) got << x << ' ';
      Fail(ErrorKind::kFormat, Cat("entry '", s.name, "' has extents [ ",
                                   got.str(), "], expected [ ", want.str(), "]"));
    }
    used.insert(s.name);
  }
  for (const WeightStore::Entry& e : store.entries()) {
    if (!used.contains(e.name)) {
      Fail(ErrorKind::kFormat, "entry '" + e.name + "' is not used by the model");
    }
  }
}

WeightStore RandomWeights(const LayerGraph& graph, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uniform = [&](std::int64_t n, float lo, float hi) {
    std::uniform_real_distribution<float> d(lo, hi);
    std::vector<float> v(static_cast<std::size_t>(n));
    for (float& x : v) x = d(rng);
    return v;
  };
  // Variance-preserving for the given fan-in.
  auto kernel = [&](const Shape& s, std::int64_t fan_in, float gain = 1.0f) {
    const float a = gain * std::sqrt(3.0f / static_cast<float>(fan_in));
    return Tensor(s, uniform(s.numel(), -a, a));
  };
  // Branch BNs are damped so that a sum over `branches` keeps unit scale.
  auto bn = [&](std::int64_t c, std::int64_t branches) {
    const float damp = 1.0f / std::sqrt(static_cast<float>(branches));
    BnParams p;
    p.gamma = uniform(c, 0.5f * damp, 1.5f * damp);
    p.beta = uniform(c, -0.1f * damp, 0.1f * damp);
    p.running_mean = uniform(c, -0.1f, 0.1f);
    p.running_var = uniform(c, 0.5f, 2.0f);
    return p;
  };

  WeightStore store;
  ForEachLeaf(graph.layers, [&](const Layer& l) {
    switch (l.kind) {
      case LayerKind::kConv: {
        const ConvSpec& c = l.conv;
        const std::int64_t fan_in = c.in_channels / c.groups * c.kernel_h * c.kernel_w;
        store.AddTensor(l.name + ".weight", kernel(c.WeightShape(), fan_in));
        if (c.has_bias) {
          store.AddVector(l.name + ".bias", uniform(c.out_channels, -0.1f, 0.1f));
        }
        break;
      }
      case LayerKind::kBatchNorm:
        internal::StoreBn(store, l.name, bn(l.channels, 1));
        break;
      case LayerKind::kRepSO: {
        const auto kinds = l.repso.Branches();
        const auto n = static_cast<std::int64_t>(kinds.size());
        for (std::size_t i = 0; i < kinds.size(); ++i) {
          const std::string p = Cat(l.name, ".branch", i);
          if (kinds[i] != BranchKind::kIdentity) {
            const auto [kh, kw] = BranchKernelExtent(kinds[i]);
            store.AddTensor(p + ".kernel",
                            kernel({l.repso.channels, 1, kh, kw}, kh * kw));
          }
          internal::StoreBn(store, p + ".bn", bn(l.repso.channels, n));
        }
        break;
      }
      case LayerKind::kSFConv: {
        store.AddTensor(l.name + ".w1", kernel(l.sf.W1Shape(), l.sf.kernel));
        store.AddTensor(l.name + ".w2", kernel(l.sf.W2Shape(), l.sf.windows()));
        if (l.sf.has_bias) {
          store.AddVector(l.name + ".b1",
                          uniform(l.sf.hidden_channels(), -0.1f, 0.1f));
          store.AddVector(l.name + ".b2", uniform(l.sf.c_out, -0.1f, 0.1f));
        }
        break;
      }
      case LayerKind::kRefCO: {
        for (std::int64_t i = 0; i < l.sf.windows(); ++i) {
          const std::string p = Cat(l.name, ".stage1.", i);
          store.AddTensor(p + ".w1", kernel(l.sf.W1Shape(), l.sf.kernel));
          internal::StoreBn(store, p + ".bn",
                            bn(l.sf.hidden_channels(), l.sf.windows()));
        }
        for (std::int64_t j = 0; j < l.sf.kernel; ++j) {
          const std::string p = Cat(l.name, ".stage2.", j);
          store.AddTensor(p + ".w2", kernel(l.sf.W2Shape(), l.sf.windows()));
          internal::StoreBn(store, p + ".bn", bn(l.sf.c_out, l.sf.kernel));
        }
        break;
      }
      case LayerKind::kLinear: {
        const float a = std::sqrt(3.0f / static_cast<float>(l.in_features));
        store.AddMatrix(l.name + ".weight",
                        {l.out_features, l.in_features,
                         uniform(l.out_features * l.in_features, -a, a)});
        store.AddVector(l.name + ".bias", uniform(l.out_features, -0.1f, 0.1f));
        break;
      }
      default:
        break;
    }
  });
  return store;
}

namespace {

Tensor RunLeaf(const Layer& l, const WeightStore& store, const Tensor& x) {
  switch (l.kind) {
    case LayerKind::kConv: {
      const Tensor w = store.GetTensor(l.name + ".weight");
      if (l.conv.has_bias) {
        const std::vector<float> b = store.GetVector(l.name + ".bias");
        return Conv2d(x, w, std::span<const float>(b), l.conv);
      }
      return Conv2d(x, w, std::nullopt, l.conv);
    }
    case LayerKind::kBatchNorm:
      return BatchNormInfer(x, internal::LoadBn(store, l.name, l.bn_epsilon));
    case LayerKind::kRelu:
      return Relu(x);
    case LayerKind::kRepSO:
      return RepSOForward(x, internal::LoadRepSO(store, l), l.repso);
    case LayerKind::kSFConv:
      return SFConvForward(x, l.sf, internal::LoadSFConv(store, l));
    case LayerKind::kRefCO:
      return RefCOForward(x, l.sf, internal::LoadRefCO(store, l));
    case LayerKind::kGlobalAvgPool:
      return GlobalAvgPool(x);
    case LayerKind::kLinear: {
      const Matrix w = store.GetMatrix(l.name + ".weight");
      const std::vector<float> b = store.GetVector(l.name + ".bias");
      const Shape& s = x.shape();
      const std::int64_t features = s.c * s.h * s.w;
      Tensor out({s.n, l.out_features, 1, 1});
      for (std::int64_t n = 0; n < s.n; ++n) {
        const auto y = Linear(x.data().subspan(n * features, features), w, b);
        std::copy(y.begin(), y.end(), out.data().begin() + n * l.out_features);
      }
      return out;
    }
    default:
      Fail(ErrorKind::kConfig, "layer '" + l.name + "' is not a leaf");
  }
}

Tensor Run(const std::vector<Layer>& layers, const WeightStore& store,
           Tensor x) {
  for (const Layer& l : layers) {
    if (l.IsContainer()) {
      Tensor y = Run(l.body, store, x);
      const bool shortcut = l.kind == LayerKind::kResidual || l.residual;
      x = shortcut ? Add(x, y) : std::move(y);
      continue;
    }
    try {
      x = RunLeaf(l, store, x);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::kMissing) throw;
      Fail(e.kind(), "layer '" + l.name + "': " + e.what());
    }
  }
  return x;
}

}  // namespace

Tensor Forward(const LayerGraph& graph, const WeightStore& weights,
               const Tensor& x) {
  const Shape& s = x.shape();
  if (s.c != graph.input_channels || s.h != graph.input_resolution ||
      s.w != graph.input_resolution || s.n < 1) {
    Fail(ErrorKind::kShape,
         Cat("model input must be N x ", graph.input_channels, " x ",
             graph.input_resolution, " x ", graph.input_resolution, ", got ",
             s.ToString()));
  }
  return Run(graph.layers, weights, x);
}

LayerGraph ResolveGraph(const ModelConfig& cfg, const WeightStore& weights) {
  LayerGraph train = BuildModel(cfg);
  try {
    CheckWeights(train, weights);
    return train;
  } catch (const Error&) {
    LayerGraph fused = FuseGraph(train);
    try {
      CheckWeights(fused, weights);
      return fused;
    } catch (const Error&) {
    }
    throw;
  }
}

}  // namespace falcon
