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
 * Edit distance between positional RST trees.
 *
 * A tree is compared as the collection of its parent nodes. Operations and
 * costs: relabel relation (1), relabel nuclearity (1), move a childless node
 * to its empty sibling position (1), delete a childless node (3), insert a
 * node under an existing parent (3). The simple variant counts only
 * structural operations, complex adds nuclearity relabels, complete adds
 * relation relabels too. The raw cost is normalised by 3 x (parent count of
 * the reference), so values above 1 are possible.
 */

#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "rstkit/rst_tree.hpp"

namespace rstkit {

enum class TedVariant { kSimple, kComplex, kComplete };

std::string_view to_string(TedVariant v);
std::optional<TedVariant> parse_variant(std::string_view s);

enum class EditKind {
  kRelabelRelation,
  kRelabelNuclearity,
  kSiblingMove,
  kDelete,
  kInsert,
};

std::string_view to_string(EditKind k);
int edit_cost(EditKind k);

struct EditOp {
  EditKind kind;
  NodePos position;
  NodePos target;   // destination of a sibling move, else == position
  NodeLabel label;  // label written by a relabel or insert
  int cost;

  friend bool operator==(const EditOp&, const EditOp&) = default;
};

struct TedReport {
  std::vector<EditOp> script;
  int raw_cost = 0;
  int normalizer = 0;
  double normalized = 0.0;
  TedVariant variant = TedVariant::kComplete;
};

/**
 * Minimum-cost edit script from `reference` to `hypothesis`. Positions held
 * by both trees are matched in place unless moving the reference node to
 * its empty sibling is strictly cheaper; sibling pairs are solved exactly,
 * subtree by subtree. Throws kInvalidTree.
 */
TedReport ted(const RstTree& reference, const RstTree& hypothesis,
              TedVariant variant);

/// Same cost model over bare parent-node collections, which need not form a
/// rooted tree (partial structures). Throws kInvalidArgument when the
/// reference is empty.
TedReport ted_collections(const ParentMap& reference,
                          const ParentMap& hypothesis, TedVariant variant);

/// Applies ops in order. Throws kInapplicableOp when an op's preconditions
/// fail (e.g. deleting a node that still has parent children).
RstTree apply_script(const RstTree& tree, std::span<const EditOp> script);

/// Same positions and, at the variant's granularity, the same labels.
bool equivalent(const ParentMap& a, const ParentMap& b, TedVariant variant);

/// One op per line: `kind<TAB>position<TAB>target<TAB>relation<TAB>nuclearity<TAB>cost`.
void write_script(std::span<const EditOp> script, std::ostream& out);

}  // namespace rstkit
