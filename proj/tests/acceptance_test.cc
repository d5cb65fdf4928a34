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

// Runs the ten acceptance criteria and prints one line per criterion.
// Exits nonzero when any criterion fails.

#include <cstdio>
#include <exception>

#include "simask_checks/criteria.h"

int main() {
  int failures = 0;
  try {
    for (const auto& result : simask::checks::RunCriteria()) {
      std::printf("%s\n", simask::checks::FormatResult(result).c_str());
      std::fflush(stdout);
      failures += !result.passed;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "acceptance run aborted: %s\n", e.what());
    return 2;
  }
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
