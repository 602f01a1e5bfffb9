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

#include "falcon/summary.h"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace falcon {

namespace {

using nlohmann::json;

const char* ModeName(CostMode m) {
  return m == CostMode::kTrain ? "train" : "inference";
}

std::string Fmt(const char* format, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, args...);
  return buf;
}

double Round2(double v) { return std::round(v * 100.0) / 100.0; }

struct CategoryRow {
  Category category;
  std::int64_t params;
  std::int64_t flops;
};

std::vector<CategoryRow> Rows(const CostReport& r) {
  return {{Category::kSpatial, r.params.spatial, r.flops.spatial},
          {Category::kChannel, r.params.channel, r.flops.channel},
          {Category::kOther, r.params.other, r.flops.other}};
}

void RenderTotals(std::ostringstream& out, const CostReport& r, CostMode mode) {
  out << "\n" << ModeName(mode) << " totals\n";
  out << Fmt("  %-20s %14s %8s %16s %8s\n", "category", "params", "share",
             "flops", "share");
  for (const CategoryRow& row : Rows(r)) {
    out << Fmt("  %-20s %14lld %7.2f%% %16lld %7.2f%%\n",
               std::string(CategoryName(row.category)).c_str(),
               static_cast<long long>(row.params),
               SharePercent(row.params, r.params.WithoutHead()),
               static_cast<long long>(row.flops),
               SharePercent(row.flops, r.flops.WithoutHead()));
  }
  out << Fmt("  %-20s %14lld %7.2f%% %16lld %7.2f%%\n", "total (excl. head)",
             static_cast<long long>(r.params.WithoutHead()), 100.0,
             static_cast<long long>(r.flops.WithoutHead()), 100.0);
  out << Fmt("  %-20s %14lld %8s %16lld\n", "head",
             static_cast<long long>(r.params.head), "",
             static_cast<long long>(r.flops.head));
  out << Fmt("  %-20s %14lld %8s %16lld\n", "total",
             static_cast<long long>(r.params.Total()), "",
             static_cast<long long>(r.flops.Total()));
}

}  // namespace

ModelSummary Summarize(const LayerGraph& graph) {
  ModelSummary s;
  s.resolution = graph.input_resolution;
  s.train = CountFlops(graph, graph.input_resolution, CostMode::kTrain);
  s.inference = CountFlops(graph, graph.input_resolution, CostMode::kInference);
  return s;
}

double SharePercent(std::int64_t part, std::int64_t whole) {
  if (whole == 0) return 0.0;
  return 100.0 * static_cast<double>(part) / static_cast<double>(whole);
}

std::string RenderSummaryText(const ModelSummary& s) {
  std::ostringstream out;
  out << "input " << s.resolution << "x" << s.resolution
      << ", inference form (fused)\n";
  out << Fmt("%-44s %-8s %-8s %12s %14s  %s\n", "layer", "kind", "category",
             "params", "flops", "output");
  for (const LayerCost& l : s.inference.layers) {
    out << Fmt("%-44s %-8s %-8s %12lld %14lld  %lldx%lldx%lld\n", l.name.c_str(),
               std::string(LayerKindName(l.kind)).c_str(),
               std::string(CategoryName(l.category)).c_str(),
               static_cast<long long>(l.params), static_cast<long long>(l.flops),
               static_cast<long long>(l.output.c),
               static_cast<long long>(l.output.h),
               static_cast<long long>(l.output.w));
  }
  RenderTotals(out, s.train, CostMode::kTrain);
  RenderTotals(out, s.inference, CostMode::kInference);
  return out.str();
}

std::string RenderSummaryJsonl(const ModelSummary& s) {
  std::ostringstream out;
  const std::pair<CostMode, const CostReport*> modes[] = {
      {CostMode::kTrain, &s.train}, {CostMode::kInference, &s.inference}};
  for (const auto& [mode, report] : modes) {
    for (const LayerCost& l : report->layers) {
      json j;
      j["record"] = "layer";
      j["mode"] = ModeName(mode);
      j["name"] = l.name;
      j["kind"] = LayerKindName(l.kind);
      j["category"] = CategoryName(l.category);
      j["params"] = l.params;
      j["flops"] = l.flops;
      j["output"] = {l.output.c, l.output.h, l.output.w};
      out << j.dump() << "\n";
    }
  }
  for (const auto& [mode, report] : modes) {
    for (const CategoryRow& row : Rows(*report)) {
      json j;
      j["record"] = "category";
      j["mode"] = ModeName(mode);
      j["category"] = CategoryName(row.category);
      j["params"] = row.params;
      j["flops"] = row.flops;
      j["params_pct"] = Round2(SharePercent(row.params, report->params.WithoutHead()));
      j["flops_pct"] = Round2(SharePercent(row.flops, report->flops.WithoutHead()));
      out << j.dump() << "\n";
    }
    json h;
    h["record"] = "category";
    h["mode"] = ModeName(mode);
    h["category"] = CategoryName(Category::kHead);
    h["params"] = report->params.head;
    h["flops"] = report->flops.head;
    out << h.dump() << "\n";
  }
  for (const auto& [mode, report] : modes) {
    json j;
    j["record"] = "total";
    j["mode"] = ModeName(mode);
    j["resolution"] = s.resolution;
    j["params"] = report->params.Total();
    j["flops"] = report->flops.Total();
    j["params_excl_head"] = report->params.WithoutHead();
    j["flops_excl_head"] = report->flops.WithoutHead();
    out << j.dump() << "\n";
  }
  return out.str();
}

}  // namespace falcon
