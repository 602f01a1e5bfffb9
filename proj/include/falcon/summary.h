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

// Human and machine-readable cost summaries of a model.

#ifndef FALCON_SUMMARY_H_
#define FALCON_SUMMARY_H_

#include <string>

#include "falcon/model.h"

namespace falcon {

struct ModelSummary {
  std::int64_t resolution = 0;
  CostReport train;
  CostReport inference;
};

ModelSummary Summarize(const LayerGraph& graph);

// Category shares exclude the classifier head. Returns 0 for an empty total.
double SharePercent(std::int64_t part, std::int64_t whole);

// Per-layer inference table followed by category totals for both modes.
std::string RenderSummaryText(const ModelSummary& s);

// One JSON object per line: "layer" records for both modes, then one
// "category" record per mode and category, then one "total" per mode.
std::string RenderSummaryJsonl(const ModelSummary& s);

}  // namespace falcon

#endif  // FALCON_SUMMARY_H_
