// Copyright 2026 The t6gps Authors
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

#ifndef T6GPS_ERROR_HPP_
#define T6GPS_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace t6gps {

// Machine-readable failure categories, mapped to CLI exit codes.
enum class ErrorCategory {
  kConfig = 2,    // bad configuration or arguments
  kIo = 3,        // file read/write/parse failures
  kNumeric = 4,   // integration blowups, non-finite values
  kInternal = 5,  // invariant violations that should be impossible
};

inline const char* ToString(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::kConfig: return "config";
    case ErrorCategory::kIo: return "io";
    case ErrorCategory::kNumeric: return "numeric";
    case ErrorCategory::kInternal: return "internal";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const { return category_; }
  int exit_code() const { return static_cast<int>(category_); }

 private:
  ErrorCategory category_;
};

}  // namespace t6gps

#endif  // T6GPS_ERROR_HPP_
