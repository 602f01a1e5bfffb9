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

// Serial reference kernels. Kept alongside the OpenMP kernels so tests and
// benchmarks can compare the two; not used on the inference path.

#ifndef FALCON_REFERENCE_H_
#define FALCON_REFERENCE_H_

#include <optional>
#include <span>

#include "falcon/channel.h"
#include "falcon/tensor.h"

namespace falcon::reference {

Tensor Conv2d(const Tensor& x, const Tensor& weight,
              std::optional<std::span<const float>> bias, const ConvSpec& spec);
Tensor BatchNormInfer(const Tensor& x, const BnParams& bn);
Tensor SFConvForward(const Tensor& x, const SFConvSpec& spec,
                     const SFConvWeights& w);

}  // namespace falcon::reference

#endif  // FALCON_REFERENCE_H_
