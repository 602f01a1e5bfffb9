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

#ifndef FALCON_TENSOR_H_
#define FALCON_TENSOR_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace falcon {

// Extents of a rank-4 NCHW tensor.
struct Shape {
  std::int64_t n = 0;
  std::int64_t c = 0;
  std::int64_t h = 0;
  std::int64_t w = 0;

  std::int64_t numel() const { return n * c * h * w; }
  std::string ToString() const;

  friend bool operator==(const Shape&, const Shape&) = default;
};

// Dense float32 tensor, row-major N, C, H, W.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, float fill = 0.0f);
  Tensor(Shape shape, std::vector<float> values);

  const Shape& shape() const { return shape_; }
  std::int64_t numel() const { return shape_.numel(); }

  std::span<float> data() { return data_; }
  std::span<const float> data() const { return data_; }
  const std::vector<float>& values() const { return data_; }

  std::int64_t offset(std::int64_t n, std::int64_t c, std::int64_t h,
                      std::int64_t w) const {
    return ((n * shape_.c + c) * shape_.h + h) * shape_.w + w;
  }
  float& at(std::int64_t n, std::int64_t c, std::int64_t h, std::int64_t w) {
    return data_[offset(n, c, h, w)];
  }
  float at(std::int64_t n, std::int64_t c, std::int64_t h,
           std::int64_t w) const {
    return data_[offset(n, c, h, w)];
  }

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  Shape shape_;
  std::vector<float> data_;
};

// Row-major rows x cols matrix used by the classifier.
struct Matrix {
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  std::vector<float> values;

  float at(std::int64_t r, std::int64_t c) const { return values[r * cols + c]; }
};

struct ConvSpec {
  std::int64_t in_channels = 1;
  std::int64_t out_channels = 1;
  std::int64_t kernel_h = 1;
  std::int64_t kernel_w = 1;
  std::int64_t stride_h = 1;
  std::int64_t stride_w = 1;
  std::int64_t pad_h = 0;
  std::int64_t pad_w = 0;
  std::int64_t groups = 1;
  bool has_bias = false;

  bool depthwise() const { return groups == in_channels; }
  Shape WeightShape() const {
    return {out_channels, in_channels / groups, kernel_h, kernel_w};
  }
  std::int64_t WeightCount() const { return WeightShape().numel(); }
  std::int64_t ParamCount() const {
    return WeightCount() + (has_bias ? out_channels : 0);
  }
  // Throws ErrorKind::kConfig when the spec is internally inconsistent.
  void Validate() const;
  // Throws ErrorKind::kShape when the output would be empty.
  Shape OutputShape(const Shape& input) const;

  friend bool operator==(const ConvSpec&, const ConvSpec&) = default;
};

ConvSpec DepthwiseSpec(std::int64_t channels, std::int64_t kernel_h,
                       std::int64_t kernel_w, std::int64_t pad_h,
                       std::int64_t pad_w, bool has_bias = false);
ConvSpec PointwiseSpec(std::int64_t in_channels, std::int64_t out_channels,
                       bool has_bias = false);

// Inference-form batch normalization statistics.
struct BnParams {
  std::vector<float> gamma;
  std::vector<float> beta;
  std::vector<float> running_mean;
  std::vector<float> running_var;
  float epsilon = 1e-5f;

  std::int64_t channels() const {
    return static_cast<std::int64_t>(gamma.size());
  }
  void Validate() const;

  static BnParams Identity(std::int64_t channels);
};

// BN(x) = scale * x + shift per channel.
struct BnAffine {
  std::vector<float> scale;
  std::vector<float> shift;
};
BnAffine BnScaleShift(const BnParams& bn);

// Parallel (OpenMP) kernels. Each output element is accumulated sequentially
// in the same order as the serial kernels in falcon::reference, so results
// are bitwise identical to them regardless of thread count.
Tensor Conv2d(const Tensor& x, const Tensor& weight,
              std::optional<std::span<const float>> bias, const ConvSpec& spec);
Tensor BatchNormInfer(const Tensor& x, const BnParams& bn);
Tensor Relu(const Tensor& x);
Tensor GlobalAvgPool(const Tensor& x);
std::vector<float> Linear(std::span<const float> x, const Matrix& weight,
                          std::span<const float> bias);
Tensor Add(const Tensor& x, const Tensor& y);

float MaxAbsDiff(const Tensor& a, const Tensor& b);

}  // namespace falcon

#endif  // FALCON_TENSOR_H_
