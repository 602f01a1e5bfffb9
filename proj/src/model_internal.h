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

#ifndef FALCON_SRC_MODEL_INTERNAL_H_
#define FALCON_SRC_MODEL_INTERNAL_H_

#include <string>
#include <vector>

#include "falcon/model.h"

namespace falcon::internal {

std::vector<WeightSpec> LayerWeightSpecs(const Layer& l);
BnParams LoadBn(const WeightStore& store, const std::string& prefix,
                float epsilon);
void StoreBn(WeightStore& store, const std::string& prefix, const BnParams& bn);
RepSOWeights LoadRepSO(const WeightStore& store, const Layer& l);
RefCOWeights LoadRefCO(const WeightStore& store, const Layer& l);
SFConvWeights LoadSFConv(const WeightStore& store, const Layer& l);

}  // namespace falcon::internal

#endif  // FALCON_SRC_MODEL_INTERNAL_H_
