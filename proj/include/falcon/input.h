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

// Model inputs: FALC tensor containers and 8-bit binary PPM images.

#ifndef FALCON_INPUT_H_
#define FALCON_INPUT_H_

#include <cstdint>
#include <span>
#include <string>

#include "falcon/tensor.h"

namespace falcon {

// Decodes a binary (P6) PPM with maxval <= 255 into 1 x 3 x H x W floats in
// [0, 1].
Tensor DecodePpm(std::span<const std::uint8_t> bytes);

Tensor ResizeNearest(const Tensor& x, std::int64_t height, std::int64_t width);

// Reads `path` as either a FALC container holding an entry named "input"
// (rank 4, N x 3 x res x res) or a PPM image, which is resized to res x res.
Tensor LoadInput(const std::string& path, std::int64_t resolution);

}  // namespace falcon

#endif  // FALCON_INPUT_H_
