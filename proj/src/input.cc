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

#include "falcon/input.h"

#include <cctype>
#include <cstring>

#include "falcon/error.h"
#include "falcon/weights.h"
#include "internal.h"

namespace falcon {

using internal::Cat;

namespace {

class PpmHeader {
 public:
  explicit PpmHeader(std::span<const std::uint8_t> b) : b_(b) {}

  std::int64_t Number() {
    SkipSpaceAndComments();
    if (pos_ >= b_.size() || !std::isdigit(b_[pos_])) {
      Fail(ErrorKind::kFormat, "malformed PPM header");
    }
    std::int64_t v = 0;
    while (pos_ < b_.size() && std::isdigit(b_[pos_])) {
      v = v * 10 + (b_[pos_++] - '0');
      if (v > (1 << 24)) Fail(ErrorKind::kFormat, "PPM header value too large");
    }
    return v;
  }
  // Exactly one whitespace byte separates the header from the raster.
  std::size_t RasterOffset() {
    if (pos_ >= b_.size() || !std::isspace(b_[pos_])) {
      Fail(ErrorKind::kFormat, "malformed PPM header");
    }
    return pos_ + 1;
  }

 private:
  void SkipSpaceAndComments() {
    while (pos_ < b_.size()) {
      if (std::isspace(b_[pos_])) {
        ++pos_;
      } else if (b_[pos_] == '#') {
        while (pos_ < b_.size() && b_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> b_;
  std::size_t pos_ = 2;
};

}  // namespace

Tensor DecodePpm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '6') {
    Fail(ErrorKind::kFormat, "not a binary PPM (P6) image");
  }
  PpmHeader h(bytes);
  const std::int64_t width = h.Number();
  const std::int64_t height = h.Number();
  const std::int64_t maxval = h.Number();
  if (width <= 0 || height <= 0) {
    Fail(ErrorKind::kFormat, "PPM image has zero extent");
  }
  if (maxval <= 0 || maxval > 255) {
    Fail(ErrorKind::kFormat, Cat("PPM maxval ", maxval,
                                 " unsupported (need 8-bit, <= 255)"));
  }
  const std::size_t offset = h.RasterOffset();
  const auto needed = static_cast<std::size_t>(width * height * 3);
  if (bytes.size() - offset < needed) {
    Fail(ErrorKind::kFormat, "PPM raster is truncated");
  }
  Tensor out({1, 3, height, width});
  const float scale = 1.0f / static_cast<float>(maxval);
  for (std::int64_t y = 0; y < height; ++y) {
    for (std::int64_t x = 0; x < width; ++x) {
      for (std::int64_t c = 0; c < 3; ++c) {
        const std::uint8_t v = bytes[offset + (y * width + x) * 3 + c];
        out.at(0, c, y, x) = static_cast<float>(v) * scale;
      }
    }
  }
  return out;
}

Tensor ResizeNearest(const Tensor& x, std::int64_t height, std::int64_t width) {
  const Shape& s = x.shape();
  if (height <= 0 || width <= 0 || s.h <= 0 || s.w <= 0) {
    Fail(ErrorKind::kShape, "resize needs positive extents");
  }
  Tensor out({s.n, s.c, height, width});
  for (std::int64_t n = 0; n < s.n; ++n) {
    for (std::int64_t c = 0; c < s.c; ++c) {
      for (std::int64_t y = 0; y < height; ++y) {
        const std::int64_t sy = y * s.h / height;
        for (std::int64_t xx = 0; xx < width; ++xx) {
          out.at(n, c, y, xx) = x.at(n, c, sy, xx * s.w / width);
        }
      }
    }
  }
  return out;
}

Tensor LoadInput(const std::string& path, std::int64_t resolution) {
  const std::vector<std::uint8_t> bytes = ReadFileBytes(path);
  if (bytes.size() >= sizeof(kWeightMagic) &&
      std::memcmp(bytes.data(), kWeightMagic, sizeof(kWeightMagic)) == 0) {
    const Tensor t = DecodeWeights(bytes).GetTensor("input");
    const Shape& s = t.shape();
    if (s.c != 3 || s.h != resolution || s.w != resolution) {
      Fail(ErrorKind::kShape, Cat("input tensor must be N x 3 x ", resolution,
                                  " x ", resolution, ", got ", s.ToString()));
    }
    return t;
  }
  return ResizeNearest(DecodePpm(bytes), resolution, resolution);
}

}  // namespace falcon
