/*
 * Copyright 2026 The SAGE Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SAGE_ERROR_HPP_
#define SAGE_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace sage {

enum class ErrorCode {
  // Bundle / data validation.
  kMissingFile,
  kMalformedHeader,
  kShapeMismatch,
  kNonFiniteValue,
  kZeroNormRow,
  kInvariantViolation,
  kIoError,
  // Numeric kernels.
  kZeroNorm,
  // Parameter errors.
  kKOutOfRange,
  kIndexOutOfRange,
  kConfigError,
  kPreconditionViolation,
  // Metric domain.
  kAllGroupsEmpty,
  kDomainError,
  kConstantInput,
  kLengthMismatch,
};

// Coarse classes used to pick a process exit status.
enum class ErrorCategory { kConfig, kData, kMetricDomain };

constexpr std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMissingFile: return "MissingFile";
    case ErrorCode::kMalformedHeader: return "MalformedHeader";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kNonFiniteValue: return "NonFiniteValue";
    case ErrorCode::kZeroNormRow: return "ZeroNormRow";
    case ErrorCode::kInvariantViolation: return "InvariantViolation";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kZeroNorm: return "ZeroNorm";
    case ErrorCode::kKOutOfRange: return "KOutOfRange";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kPreconditionViolation: return "PreconditionViolation";
    case ErrorCode::kAllGroupsEmpty: return "AllGroupsEmpty";
    case ErrorCode::kDomainError: return "DomainError";
    case ErrorCode::kConstantInput: return "ConstantInput";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
  }
  return "Unknown";
}

constexpr ErrorCategory error_category(ErrorCode code) {
  switch (code) {
    case ErrorCode::kKOutOfRange:
    case ErrorCode::kIndexOutOfRange:
    case ErrorCode::kConfigError:
    case ErrorCode::kPreconditionViolation:
      return ErrorCategory::kConfig;
    case ErrorCode::kAllGroupsEmpty:
    case ErrorCode::kDomainError:
    case ErrorCode::kConstantInput:
    case ErrorCode::kLengthMismatch:
      return ErrorCategory::kMetricDomain;
    default:
      return ErrorCategory::kData;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace sage

#endif  // SAGE_ERROR_HPP_
