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

// Named weight storage and its binary container.
//
// File layout (all integers little-endian):
//   "FALC"                 4 bytes magic
//   u32 version            currently 1
//   u32 entry_count
//   per entry:
//     u32 name_length, name bytes (UTF-8)
//     u32 rank, rank x u64 extents
//     prod(extents) x f32 values (IEEE-754 bit patterns)

#ifndef FALCON_WEIGHTS_H_
#define FALCON_WEIGHTS_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "falcon/tensor.h"

namespace falcon {

inline constexpr char kWeightMagic[4] = {'F', 'A', 'L', 'C'};
inline constexpr std::uint32_t kWeightFormatVersion = 1;

class WeightStore {
 public:
  struct Entry {
    std::string name;
    std::vector<std::int64_t> extents;
    std::vector<float> values;

    friend bool operator==(const Entry&, const Entry&) = default;
  };

  // Throws ErrorKind::kFormat on a duplicate name or extent/value mismatch.
  void Add(std::string name, std::vector<std::int64_t> extents,
           std::vector<float> values);
  void AddTensor(std::string name, const Tensor& t);
  void AddVector(std::string name, std::vector<float> values);
  void AddMatrix(std::string name, const Matrix& m);

  bool Contains(std::string_view name) const;
  // Throws ErrorKind::kMissing naming the entry.
  const Entry& Get(std::string_view name) const;
  Tensor GetTensor(std::string_view name) const;
  std::vector<float> GetVector(std::string_view name) const;
  Matrix GetMatrix(std::string_view name) const;

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  std::int64_t ElementCount() const;

  friend bool operator==(const WeightStore& a, const WeightStore& b) {
    return a.entries_ == b.entries_;
  }

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

std::vector<std::uint8_t> EncodeWeights(const WeightStore& store);
WeightStore DecodeWeights(std::span<const std::uint8_t> bytes);

void SaveWeights(const WeightStore& store, const std::string& path);
WeightStore LoadWeights(const std::string& path);

std::vector<std::uint8_t> ReadFileBytes(const std::string& path);
void WriteFileBytes(const std::string& path, std::span<const std::uint8_t> bytes);

}  // namespace falcon

#endif  // FALCON_WEIGHTS_H_
