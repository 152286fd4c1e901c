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

namespace rstkit {

enum class ErrorCode {
  kRootHasNoParent,
  kInvalidTree,
  kMalformedLine,
  kUnknownRelation,
  kUnknownNuclearity,
  kDuplicatePosition,
  kDepthExceeded,
  kShapeMismatch,
  kEmptyCorpus,
  kUnreachableTarget,
  kInvalidConstraint,
  kFinishedCursor,
  kLayoutMismatch,
  kEmptyMaskRow,
  kNonFiniteInput,
  kInapplicableOp,
  kLengthMismatch,
  kInvalidArgument,
  kIo,
};

std::string_view error_code_name(ErrorCode code);

// All library failures are reported through this exception type; the code
// lets callers (and the CLI) branch without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rstkit
