// Copyright 2026 The simask Authors.
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

#ifndef SIMASK_ERROR_H_
#define SIMASK_ERROR_H_

#include <stdexcept>
#include <string>

namespace simask {

// Broad failure classes. The CLI maps each to a distinct exit status.
enum class ErrorCategory {
  kInvalidArgument,
  kConfig,
  kIo,
  kFormat,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const { return category_; }

 private:
  ErrorCategory category_;
};

[[noreturn]] inline void ThrowInvalid(const std::string& message) {
  throw Error(ErrorCategory::kInvalidArgument, message);
}

}  // namespace simask

#endif  // SIMASK_ERROR_H_
