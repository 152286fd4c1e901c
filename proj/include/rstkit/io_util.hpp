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
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace rstkit {

/// Shortest decimal string that parses back to exactly `x`.
std::string format_double(double x);

/// Throws kMalformedLine on anything but a complete finite decimal.
double parse_double(std::string_view s);

std::vector<std::string> split_whitespace(std::string_view s);

/// Whole file as bytes. Throws kIo.
std::string read_file(const std::filesystem::path& path);

/// 64-bit FNV-1a, used for input digests in output headers.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

}  // namespace rstkit
