/*
 * Copyright 2026 The FRAG Authors.
 *
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

// The `frag` command line. Kept in a library so tests can drive it
// in-process and check exit codes.

#ifndef FRAG_TOOLS_CLI_HPP_
#define FRAG_TOOLS_CLI_HPP_

#include <ostream>
#include <string>
#include <vector>

#include "frag/common/error.hpp"
#include "frag/vecdb/store.hpp"

namespace frag::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitNetwork = 2;
inline constexpr int kExitContract = 3;
inline constexpr int kExitUsage = 64;

int ExitCodeFor(ErrorCode code);

// Rows of "id,v1,...,vm". Blank lines and lines starting with '#' are
// skipped. MALFORMED_FILE names the line of a bad field; DIM_MISMATCH names
// the first ragged row.
std::vector<vecdb::PlainVector> ReadVectorCsv(const std::string& path);

// Runs one command. `serve` blocks until SIGINT or SIGTERM.
int Main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace frag::cli

#endif  // FRAG_TOOLS_CLI_HPP_
