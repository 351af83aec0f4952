/*
 * Copyright (c) 2026, The owntrans Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef OWNTRANS_TOOLS_CLI_HPP_
#define OWNTRANS_TOOLS_CLI_HPP_

#include <ostream>
#include <string>
#include <vector>

namespace owntrans::cli {

enum ExitCode : int {
  kAllHold = 0,
  kViolated = 1,
  kInconclusive = 2,
  kUsageError = 3,
};

// args[0] is the program name. Output goes to `out`, diagnostics to `err`.
int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace owntrans::cli

#endif  // OWNTRANS_TOOLS_CLI_HPP_
