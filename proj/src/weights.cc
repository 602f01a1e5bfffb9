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

#include "falcon/weights.h"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

#include "falcon/error.h"
#include "internal.h"

namespace falcon {

using internal::Cat;

namespace {

std::int64_t Product(const std::vector<std::int64_t>& extents) {
  std::int64_t p = 1;
  for (std::int64_t e : extents) p *= e;
  return p;
}

class ByteWriter {
 public:
  void U32(std::uint32_t v) { Raw(v); }
  void U64(std::uint64_t v) { Raw(v); }
  void F32(float v) { Raw(std::bit_cast<std::uint32_t>(v)); }
  void Bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  std::vector<std::uint8_t> Take() { return std::move(out_); }

 private:
  template <typename T>
  void Raw(T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
  }
  std::vector<std::uint8_t> out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint32_t U32() { return Raw<std::uint32_t>(); }
  std::uint64_t U64() { return Raw<std::uint64_t>(); }
  float F32() { return std::bit_cast<float>(Raw<std::uint32_t>()); }
  std::span<const std::uint8_t> Bytes(std::size_t n) {
    Need(n);
    auto s = in_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  void Need(std::size_t n) const {
    if (in_.size() - pos_ < n) {
      Fail(ErrorKind::kFormat, Cat("weight file truncated at byte ", pos_,
                                   " (need ", n, " more)"));
    }
  }
  template <typename T>
  T Raw() {
    Need(sizeof(T));
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      v |= static_cast<T>(in_[pos_ + i]) << (8 * i);
    }
    pos_ += sizeof(T);
    return v;
  }

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

}  // namespace

void WeightStore::Add(std::string name, std::vector<std::int64_t> extents,
                      std::vector<float> values) {
  if (index_.contains(name)) {
    Fail(ErrorKind::kFormat, "duplicate weight entry '" + name + "'");
  }
  for (std::int64_t e : extents) {
    if (e < 0) Fail(ErrorKind::kFormat, "negative extent in entry '" + name + "'");
  }
  if (Product(extents) != static_cast<std::int64_t>(values.size())) {
    Fail(ErrorKind::kFormat, Cat("entry '", name, "' extents hold ",
                                 Product(extents), " values, got ",
                                 values.size()));
  }
  index_.emplace(name, entries_.size());
  entries_.push_back({std::move(name), std::move(extents), std::move(values)});
}

void WeightStore::AddTensor(std::string name, const Tensor& t) {
  const Shape& s = t.shape();
  Add(std::move(name), {s.n, s.c, s.h, s.w}, t.values());
}

void WeightStore::AddVector(std::string name, std::vector<float> values) {
  const auto n = static_cast<std::int64_t>(values.size());
  Add(std::move(name), {n}, std::move(values));
}

void WeightStore::AddMatrix(std::string name, const Matrix& m) {
  Add(std::move(name), {m.rows, m.cols}, m.values);
}

bool WeightStore::Contains(std::string_view name) const {
  return index_.contains(std::string(name));
}

const WeightStore::Entry& WeightStore::Get(std::string_view name) const {
  const auto it = index_.find(std::string(name));
  if (it == index_.end()) {
    Fail(ErrorKind::kMissing, "missing weight entry '" + std::string(name) + "'");
  }
  return entries_[it->second];
}

Tensor WeightStore::GetTensor(std::string_view name) const {
  const Entry& e = Get(name);
  if (e.extents.size() != 4) {
    Fail(ErrorKind::kFormat, Cat("entry '", name, "' has rank ",
                                 e.extents.size(), ", expected 4"));
  }
  return Tensor({e.extents[0], e.extents[1], e.extents[2], e.extents[3]},
                e.values);
}

std::vector<float> WeightStore::GetVector(std::string_view name) const {
  const Entry& e = Get(name);
  if (e.extents.size() != 1) {
    Fail(ErrorKind::kFormat, Cat("entry '", name, "' has rank ",
                                 e.extents.size(), ", expected 1"));
  }
  return e.values;
}

Matrix WeightStore::GetMatrix(std::string_view name) const {
  const Entry& e = Get(name);
  if (e.extents.size() != 2) {
    Fail(ErrorKind::kFormat, Cat("entry '", name, "' has rank ",
                                 e.extents.size(), ", expected 2"));
  }
  return {e.extents[0], e.extents[1], e.values};
}

std::int64_t WeightStore::ElementCount() const {
  std::int64_t n = 0;
  for (const Entry& e : entries_) n += static_cast<std::int64_t>(e.values.size());
  return n;
}

std::vector<std::uint8_t> EncodeWeights(const WeightStore& store) {
  ByteWriter w;
  w.Bytes(kWeightMagic, sizeof(kWeightMagic));
  w.U32(kWeightFormatVersion);
  w.U32(static_cast<std::uint32_t>(store.size()));
  for (const WeightStore::Entry& e : store.entries()) {
    w.U32(static_cast<std::uint32_t>(e.name.size()));
    w.Bytes(e.name.data(), e.name.size());
    w.U32(static_cast<std::uint32_t>(e.extents.size()));
    for (std::int64_t x : e.extents) w.U64(static_cast<std::uint64_t>(x));
    for (float v : e.values) w.F32(v);
  }
  return w.Take();
}

WeightStore DecodeWeights(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  if (bytes.size() < sizeof(kWeightMagic) ||
      std::memcmp(bytes.data(), kWeightMagic, sizeof(kWeightMagic)) != 0) {
    Fail(ErrorKind::kFormat, "bad magic: not a FALC weight file");
  }
  r.Bytes(sizeof(kWeightMagic));
  const std::uint32_t version = r.U32();
  if (version != kWeightFormatVersion) {
    Fail(ErrorKind::kFormat, Cat("unsupported weight file version ", version,
                                 " (expected ", kWeightFormatVersion, ")"));
  }
  const std::uint32_t count = r.U32();
  WeightStore store;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint32_t name_len = r.U32();
    const auto name_bytes = r.Bytes(name_len);
    std::string name(name_bytes.begin(), name_bytes.end());
    const std::uint32_t rank = r.U32();
    std::vector<std::int64_t> extents(rank);
    // Saturates at the remaining byte count so corrupt extents cannot
    // overflow the size computation.
    const std::uint64_t budget = r.remaining();
    std::uint64_t numel = 1;
    bool empty = false;
    for (auto& e : extents) {
      const std::uint64_t v = r.U64();
      if (v > static_cast<std::uint64_t>(INT64_MAX)) {
        Fail(ErrorKind::kFormat, Cat("entry '", name, "' extent ", v,
                                     " is out of range"));
      }
      e = static_cast<std::int64_t>(v);
      if (v == 0) empty = true;
      numel = (v != 0 && numel > budget / v) ? budget + 1 : numel * v;
    }
    if (empty) numel = 0;
    if (numel > r.remaining() / 4) {
      Fail(ErrorKind::kFormat, Cat("weight file truncated inside entry '",
                                   name, "'"));
    }
    std::vector<float> values(numel);
    for (float& v : values) v = r.F32();
    store.Add(std::move(name), std::move(extents), std::move(values));
  }
  if (r.remaining() != 0) {
    Fail(ErrorKind::kFormat, Cat(r.remaining(), " trailing bytes after ",
                                 count, " entries"));
  }
  return store;
}

std::vector<std::uint8_t> ReadFileBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorKind::kIo, "cannot open '" + path + "' for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) Fail(ErrorKind::kIo, "read failed for '" + path + "'");
  return bytes;
}

void WriteFileBytes(const std::string& path,
                    std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorKind::kIo, "cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) Fail(ErrorKind::kIo, "write failed for '" + path + "'");
}

void SaveWeights(const WeightStore& store, const std::string& path) {
  WriteFileBytes(path, EncodeWeights(store));
}

WeightStore LoadWeights(const std::string& path) {
  return DecodeWeights(ReadFileBytes(path));
}

}  // namespace falcon
