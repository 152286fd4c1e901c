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
 * Positional binary RST trees.
 *
 * Nodes live in an implicit zero-indexed heap: the root is 0 and the
 * children of l are 2l+1 (left) and 2l+2 (right). A tree is stored as the
 * collection of its parent nodes, each labelled with the relation and the
 * nuclearity holding between its two children, plus the ordered list of
 * leaves (EDUs) and any keyphrase anchors.
 */

#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rstkit {

// Rows of the position embedding table. Parent nodes must index into it.
inline constexpr std::uint32_t kMaxRstNode = 4094;
// Longest root-to-node path; also the length of a path encoding.
inline constexpr int kMaxTreeDepth = 12;
// First index at depth kMaxTreeDepth + 1.
inline constexpr std::uint32_t kPositionLimit = (1u << (kMaxTreeDepth + 1)) - 1;

// Index order is part of the encoding contract; Null is always last.
enum class Relation : std::uint8_t {
  Attribution = 0,
  Background,
  Cause,
  Comparison,
  Condition,
  Contrast,
  Elaboration,
  Enablement,
  Evaluation,
  Explanation,
  Joint,
  MannerMeans,
  TopicComment,
  Summary,
  Temporal,
  TopicChange,
  SameUnit,
  TextualOrganization,
  Null,
};

enum class Nuclearity : std::uint8_t { NN = 0, NS, SN, Null };

inline constexpr int kRelationCount = 19;
inline constexpr int kNuclearityCount = 4;
// Labels usable inside a validated tree (everything except Null).
inline constexpr int kContentRelationCount = kRelationCount - 1;
inline constexpr int kContentNuclearityCount = kNuclearityCount - 1;

std::string_view to_string(Relation r);
std::string_view to_string(Nuclearity n);
std::optional<Relation> parse_relation(std::string_view s);
std::optional<Nuclearity> parse_nuclearity(std::string_view s);

inline constexpr int index_of(Relation r) { return static_cast<int>(r); }
inline constexpr int index_of(Nuclearity n) { return static_cast<int>(n); }
Relation relation_from_index(int i);
Nuclearity nuclearity_from_index(int i);

struct NodePos {
  std::uint32_t index = 0;

  constexpr NodePos() = default;
  constexpr explicit NodePos(std::uint32_t i) : index(i) {}

  constexpr bool is_root() const { return index == 0; }
  constexpr NodePos left() const { return NodePos{2 * index + 1}; }
  constexpr NodePos right() const { return NodePos{2 * index + 2}; }
  constexpr bool is_left_child() const { return index != 0 && index % 2 == 1; }

  friend constexpr auto operator<=>(NodePos, NodePos) = default;
};

std::ostream& operator<<(std::ostream& os, NodePos p);

/// Number of edges between the root and `pos`.
int depth(NodePos pos);

/// Throws kRootHasNoParent for the root.
NodePos parent_of(NodePos pos);

/// Sibling position; throws kRootHasNoParent for the root.
NodePos sibling_of(NodePos pos);

/// Strict ancestors, nearest first, ending at the root.
std::vector<NodePos> ancestors_of(NodePos pos);

/// True if `a` is a strict ancestor of `d`.
bool is_ancestor(NodePos a, NodePos d);

/// Key whose ascending order is the left-to-right (in-order) order of
/// positions of depth <= kMaxTreeDepth.
std::int64_t inorder_key(NodePos pos);

struct NodeLabel {
  Relation relation = Relation::Null;
  Nuclearity nuclearity = Nuclearity::Null;

  friend bool operator==(const NodeLabel&, const NodeLabel&) = default;
};

struct Edu {
  NodePos pos;
  std::optional<std::string> text;

  friend bool operator==(const Edu&, const Edu&) = default;
};

struct Keyphrase {
  NodePos pos;
  std::string phrase;

  friend bool operator==(const Keyphrase&, const Keyphrase&) = default;
};

using ParentMap = std::map<NodePos, NodeLabel>;

/**
 * Immutable RST tree. Construction never fails: a tree may violate the
 * structural invariants, which validate() reports as data. Operations that
 * need a well-formed tree check it themselves.
 */
class RstTree {
 public:
  RstTree() = default;
  RstTree(ParentMap parents, std::vector<Edu> edus,
          std::vector<Keyphrase> keyphrases = {});

  /// Builds a tree from its parent nodes alone; the EDU list is derived
  /// from the structure (children that are not parents), in order, without
  /// text.
  static RstTree from_parents(ParentMap parents,
                              std::vector<Keyphrase> keyphrases = {});

  const ParentMap& parents() const { return parents_; }
  const std::vector<Edu>& edus() const { return edus_; }
  const std::vector<Keyphrase>& keyphrases() const { return keyphrases_; }

  bool is_parent(NodePos p) const { return parents_.contains(p); }
  bool is_leaf(NodePos p) const;
  std::optional<NodeLabel> label(NodePos p) const;

  /// Total node count N = parents + leaves.
  std::size_t node_count() const { return parents_.size() + edus_.size(); }

  friend bool operator==(const RstTree&, const RstTree&) = default;

 private:
  ParentMap parents_;
  std::vector<Edu> edus_;
  std::vector<Keyphrase> keyphrases_;
};

enum class ViolationKind {
  kEmptyTree,
  kMissingRoot,
  kOrphanNode,
  kPositionOutOfRange,
  kNullRelation,
  kNullNuclearity,
  kParentAndLeaf,
  kMissingChild,
  kDuplicateLeaf,
  kLeafOrder,
  kKeyphraseOutsideTree,
};

struct Violation {
  ViolationKind kind;
  NodePos pos;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool has(ViolationKind k) const;
};

ValidationReport validate(const RstTree& tree);

/// Throws kInvalidTree with the first violation unless the tree validates.
void require_valid(const RstTree& tree);

/// Leaves in left-to-right order. Throws kInvalidTree.
std::vector<NodePos> leaves_in_order(const RstTree& tree);

/// Parses the tab-separated tree format. Throws kMalformedLine,
/// kUnknownRelation, kUnknownNuclearity or kDuplicatePosition.
RstTree parse_tree(std::istream& in);
RstTree parse_tree(std::string_view text);

/// Nodes ascending, then EDUs, then keyphrases. Tabs, newlines and
/// backslashes inside text fields are backslash-escaped.
void serialize_tree(const RstTree& tree, std::ostream& out);
std::string serialize_tree(const RstTree& tree);

}  // namespace rstkit
