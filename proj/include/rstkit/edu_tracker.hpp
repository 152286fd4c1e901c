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

/**
 * Rule-based EDU boundary detection and the cursor that walks the leaves of
 * an RST tree while tokens are produced.
 *
 * Boundary rules, checked on each token:
 *   R1  a token ending in '.', '!' or '?' closes the EDU;
 *   R2  a token ending in ',' closes the EDU when the EDU opened with a
 *       discourse marker, or when the next two tokens are a coordinating
 *       conjunction followed by a clause opener (lookahead permitting);
 *   R3  a token ending in ';' or ':' closes the EDU.
 */

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rstkit/rst_tree.hpp"

namespace rstkit {

enum class BoundaryRule { kNone, kSentenceFinal, kClauseComma, kSemicolonColon };

class BoundaryRules {
 public:
  /// Default marker lexicon: if, because, although, while, since, when,
  /// after, before, unless, whereas.
  BoundaryRules();
  explicit BoundaryRules(std::set<std::string> markers);

  /// One lower-cased word per line; blank and '#' lines are skipped.
  static BoundaryRules from_lexicon(std::istream& in);
  static BoundaryRules from_lexicon_file(const std::filesystem::path& path);

  const std::set<std::string>& markers() const { return markers_; }
  bool is_marker(std::string_view token) const;

  /// `edu_opener` is the first token of the EDU the token belongs to.
  BoundaryRule check(std::string_view token, std::string_view edu_opener,
                     std::span<const std::string> lookahead = {}) const;

 private:
  std::set<std::string> markers_;
};

/// R1 on its own: the sentence-final test used for sentence counts.
bool is_sentence_final(std::string_view token);

struct Observation {
  NodePos leaf;
  bool boundary_fired = false;
};

/**
 * Starts at the leftmost leaf. Each observed token is assigned to the
 * current leaf; when a rule fires the cursor moves to the next leaf for the
 * following token, or finishes after the last leaf.
 */
class EduCursor {
 public:
  /// Throws kInvalidTree.
  explicit EduCursor(const RstTree& tree, BoundaryRules rules = {});

  /// Throws kFinishedCursor.
  Observation observe_token(std::string_view token,
                            std::span<const std::string> lookahead = {});

  NodePos current_leaf() const { return leaves_.at(current_); }
  std::size_t current_index() const { return current_; }
  bool finished() const { return finished_; }
  const std::vector<NodePos>& leaf_sequence() const { return leaves_; }

 private:
  BoundaryRules rules_;
  std::vector<NodePos> leaves_;
  std::size_t current_ = 0;
  bool finished_ = false;
  std::string opener_;
};

struct TokenAssignment {
  std::vector<std::pair<std::size_t, NodePos>> tokens;
  /// Leaves that received no token, in leaf order.
  std::vector<NodePos> unused_leaves;
};

/// Batch run of the cursor with full lookahead. Tokens left after the cursor
/// finishes go to the final leaf. Throws kInvalidTree.
TokenAssignment assign_tokens(const RstTree& tree,
                              std::span<const std::string> tokens,
                              const BoundaryRules& rules = {});

/// `token_index<TAB>node_pos` per line; '#' lines are comments.
void write_assignment(const TokenAssignment& a, std::ostream& out);
TokenAssignment read_assignment(std::istream& in);

}  // namespace rstkit
