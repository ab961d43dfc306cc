// Copyright 2026 The Shared Transform Authors. All Rights Reserved.
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

namespace stm {

/// Machine-readable failure class. The CLI maps each category to its own
/// exit status and prints the name next to the message.
enum class ErrorCategory {
  dimension,
  numeric_input,
  ill_posed,
  numeric,
  pairing,
  empty_input,
  feature_space,
  not_enrolled,
  config,
  manifest,
  io,
  format,
  checksum,
  version,
};

constexpr std::string_view category_name(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::dimension: return "dimension";
    case ErrorCategory::numeric_input: return "numeric-input";
    case ErrorCategory::ill_posed: return "ill-posed";
    case ErrorCategory::numeric: return "numeric";
    case ErrorCategory::pairing: return "pairing";
    case ErrorCategory::empty_input: return "empty-input";
    case ErrorCategory::feature_space: return "feature-space";
    case ErrorCategory::not_enrolled: return "not-enrolled";
    case ErrorCategory::config: return "config";
    case ErrorCategory::manifest: return "manifest";
    case ErrorCategory::io: return "io";
    case ErrorCategory::format: return "format";
    case ErrorCategory::checksum: return "checksum";
    case ErrorCategory::version: return "version";
  }
  return "unknown";
}

/// Exit status used by the command-line tool for a given category.
constexpr int exit_code(ErrorCategory c) { return 10 + static_cast<int>(c); }

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

namespace detail {

[[noreturn]] inline void fail(ErrorCategory c, const std::string& msg) { throw Error(c, msg); }

inline void require(bool cond, ErrorCategory c, const std::string& msg) {
  if (!cond) fail(c, msg);
}

}  // namespace detail
}  // namespace stm
