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

// Helpers shared by the parallel and reference kernels.

#ifndef FALCON_SRC_INTERNAL_H_
#define FALCON_SRC_INTERNAL_H_

#include <optional>
#include <span>
#include <sstream>
#include <string>

#include "falcon/channel.h"
#include "falcon/tensor.h"

namespace falcon::internal {

// Validates operands and returns the output shape.
Shape CheckConvOperands(const Tensor& x, const Tensor& weight,
                        std::optional<std::span<const float>> bias,
                        const ConvSpec& spec);
void CheckBnOperands(const Tensor& x, const BnParams& bn);
void CheckSFConvOperands(const Tensor& x, const SFConvSpec& spec,
                         const SFConvWeights& w);

template <typename... Args>
std::string Cat(const Args&... args) {
  std::ostringstream os;
  (os << ... << args);
  return os.str();
}

}  // namespace falcon::internal

#endif  // FALCON_SRC_INTERNAL_H_
