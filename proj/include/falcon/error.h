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

#ifndef FALCON_ERROR_H_
#define FALCON_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace falcon {

enum class ErrorKind {
  kShape,     // operand extents disagree
  kConfig,    // invalid operator or model configuration
  kMissing,   // named weight entry absent
  kFormat,    // malformed file contents
  kIo,        // filesystem failure
  kNumeric,   // e.g. non-positive variance
};

std::string_view ErrorKindName(ErrorKind kind);

// All library failures are reported through this exception. what() carries
// a single-line message; kind() lets front ends classify the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void Fail(ErrorKind kind, const std::string& message);

}  // namespace falcon

#endif  // FALCON_ERROR_H_
