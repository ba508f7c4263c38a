// Copyright 2026 The tonecc Authors
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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tonecc {

enum class ErrorCode {
  kDimensionMismatch,
  kInvalidArgument,
  kMalformedFile,
  kUnsupportedDepth,
  kIoFailure,
  kMissingFile,
  kEmptyDataset,
  kBasisMismatch,
  kNotFound,
  kUnsupportedFormat,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch: return "dimension_mismatch";
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kMalformedFile: return "malformed_file";
    case ErrorCode::kUnsupportedDepth: return "unsupported_depth";
    case ErrorCode::kIoFailure: return "io_failure";
    case ErrorCode::kMissingFile: return "missing_file";
    case ErrorCode::kEmptyDataset: return "empty_dataset";
    case ErrorCode::kBasisMismatch: return "basis_mismatch";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kUnsupportedFormat: return "unsupported_format";
  }
  return "unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (CLI, HTTP service, tests) can branch on the category.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tonecc
