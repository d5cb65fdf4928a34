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

#ifndef SIMASK_TOOLS_CLI_H_
#define SIMASK_TOOLS_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace simask::cli {

// Process exit codes. Failures map the error category to a distinct code.
enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,      // verify found a failing criterion
  kUsage = 2,            // bad flags or unknown subcommand
  kInvalidArgument = 3,
  kConfigError = 4,
  kIoError = 5,
  kFormatError = 6,
  kInternal = 7,
};

// Runs one subcommand. Machine-readable results go to `out`, diagnostics to
// `err`. Verbosity comes from the SIM_LOG environment variable (error, warn,
// info, debug; default warn).
int RunCommand(const std::vector<std::string>& args, std::ostream& out,
               std::ostream& err);

}  // namespace simask::cli

#endif  // SIMASK_TOOLS_CLI_H_
