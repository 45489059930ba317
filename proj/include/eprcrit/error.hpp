// Copyright 2026 The eprcrit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace eprcrit {

enum class ErrorCode {
  // Distribution construction.
  AllZero,
  ShapeMismatch,
  IndexOutOfRange,
  InvalidAxis,
  NegativeMass,
  NotNormalized,
  NonPositiveGamma,
  NonPositiveStep,
  // Numerical.
  GridTooNarrow,
  NoSignChange,
  NotMonotonic,
  ZeroTotalCounts,
  // Count-table files.
  BadMagic,
  MissingHeaderKey,
  NegativeCount,
  RaggedMatrix,
  Malformed,
  // Everything else.
  InvalidArgument,
  Io,
};

/// Coarse grouping used by the CLI to choose exit codes.
enum class ErrorCategory { usage, parse, numerical, io };

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::AllZero: return "AllZero";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::InvalidAxis: return "InvalidAxis";
    case ErrorCode::NegativeMass: return "NegativeMass";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::NonPositiveGamma: return "NonPositiveGamma";
    case ErrorCode::NonPositiveStep: return "NonPositiveStep";
    case ErrorCode::GridTooNarrow: return "GridTooNarrow";
    case ErrorCode::NoSignChange: return "NoSignChange";
    case ErrorCode::NotMonotonic: return "NotMonotonic";
    case ErrorCode::ZeroTotalCounts: return "ZeroTotalCounts";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::MissingHeaderKey: return "MissingHeaderKey";
    case ErrorCode::NegativeCount: return "NegativeCount";
    case ErrorCode::RaggedMatrix: return "RaggedMatrix";
    case ErrorCode::Malformed: return "Malformed";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

inline ErrorCategory category_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::BadMagic:
    case ErrorCode::MissingHeaderKey:
    case ErrorCode::NegativeCount:
    case ErrorCode::RaggedMatrix:
    case ErrorCode::Malformed:
      return ErrorCategory::parse;
    case ErrorCode::InvalidArgument:
      return ErrorCategory::usage;
    case ErrorCode::Io:
      return ErrorCategory::io;
    default:
      return ErrorCategory::numerical;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : Error(code, category_of(code), what) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_; }

 protected:
  Error(ErrorCode code, ErrorCategory category, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), category_(category) {}

 private:
  ErrorCode code_;
  ErrorCategory category_;
};

/// A count-table parse failure. `line()` is 1-based. Always in the parse
/// category, whatever the code.
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, std::size_t line, const std::string& message, const std::string& source = "")
      : Error(code, ErrorCategory::parse,
              (source.empty() ? "line " : source + ":") + std::to_string(line) + ": " + message),
        line_(line),
        message_(message) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& message() const noexcept { return message_; }

  /// Same error attributed to a named file.
  ParseError from_source(const std::string& source) const { return ParseError(code(), line_, message_, source); }

 private:
  std::size_t line_;
  std::string message_;
};

}  // namespace eprcrit
