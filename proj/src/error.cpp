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

#include "rstkit/error.hpp"

namespace rstkit {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kRootHasNoParent: return "root-has-no-parent";
    case ErrorCode::kInvalidTree: return "invalid-tree";
    case ErrorCode::kMalformedLine: return "malformed-line";
    case ErrorCode::kUnknownRelation: return "unknown-relation";
    case ErrorCode::kUnknownNuclearity: return "unknown-nuclearity";
    case ErrorCode::kDuplicatePosition: return "duplicate-position";
    case ErrorCode::kDepthExceeded: return "depth-exceeded";
    case ErrorCode::kShapeMismatch: return "shape-mismatch";
    case ErrorCode::kEmptyCorpus: return "empty-corpus";
    case ErrorCode::kUnreachableTarget: return "unreachable-target";
    case ErrorCode::kInvalidConstraint: return "invalid-constraint";
    case ErrorCode::kFinishedCursor: return "finished-cursor";
    case ErrorCode::kLayoutMismatch: return "layout-mismatch";
    case ErrorCode::kEmptyMaskRow: return "empty-mask-row";
    case ErrorCode::kNonFiniteInput: return "non-finite-input";
    case ErrorCode::kInapplicableOp: return "inapplicable-op";
    case ErrorCode::kLengthMismatch: return "length-mismatch";
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

}  // namespace rstkit
