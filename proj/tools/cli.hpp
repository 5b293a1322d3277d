/*
 * Copyright 2026 The rfdiag Authors
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

#ifndef RFDIAG_TOOLS_CLI_HPP
#define RFDIAG_TOOLS_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace rfdiag::cli {

enum ExitCode : int { kOk = 0, kRuntimeError = 1, kUsageError = 2 };

/// Runs one `rfdiag` command. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args);

/// Thread cap: explicit flag, else RFDIAG_THREADS, else 1.
unsigned resolve_threads(int flag_value);

}  // namespace rfdiag::cli

#endif  // RFDIAG_TOOLS_CLI_HPP
