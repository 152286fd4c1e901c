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

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace rstkit {

inline constexpr std::string_view kVersion = "0.1.0";

enum ExitCode : int { kExitOk = 0, kExitData = 1, kExitUsage = 2 };

/// Per-task seed for task `index` of a run seeded with `seed`
/// (splitmix64 of the pair), so parallel results do not depend on
/// scheduling.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// Runs one command line (args excludes the program name). Results go to
/// `out` unless a subcommand writes files; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace rstkit
