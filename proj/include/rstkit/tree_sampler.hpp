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
 * Count-based child-given-parent model of RST trees and a constrained
 * breadth-first sampler over it.
 *
 * A child slot's outcome is either LEAF or a (relation, nuclearity) label.
 * Its distribution is conditioned on the parent's relation, nuclearity and
 * depth, and on whether the slot is the left or the right child. Cells never
 * observed during fitting back off to the (depth, side) marginal, then to
 * uniform.
 */

#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <random>
#include <span>

#include "rstkit/rst_tree.hpp"

namespace rstkit {

enum class Side : std::uint8_t { Left = 0, Right = 1 };

/// LEAF plus every non-Null (relation, nuclearity) pair.
inline constexpr int kOutcomeCount =
    1 + kContentRelationCount * kContentNuclearityCount;
inline constexpr int kLeafOutcome = 0;

struct ChildOutcome {
  std::optional<NodeLabel> label;  // nullopt = LEAF

  bool is_leaf() const { return !label.has_value(); }
  friend bool operator==(const ChildOutcome&, const ChildOutcome&) = default;
};

/// Throws kInvalidArgument for labels containing Null.
int outcome_index(const ChildOutcome& o);
ChildOutcome outcome_from_index(int i);
std::string outcome_name(int i);
std::optional<int> parse_outcome(std::string_view s);

struct CellKey {
  Relation parent_relation = Relation::Null;
  Nuclearity parent_nuclearity = Nuclearity::Null;
  int parent_depth = 0;
  Side side = Side::Left;

  friend auto operator<=>(const CellKey&, const CellKey&) = default;
};

struct MarginalKey {
  int parent_depth = 0;
  Side side = Side::Left;

  friend auto operator<=>(const MarginalKey&, const MarginalKey&) = default;
};

using Distribution = std::array<double, kOutcomeCount>;

class ConditionalTable {
 public:
  /// Throws kInvalidArgument unless every distribution is non-negative and
  /// sums to 1 within 1e-9, and the root distribution puts no mass on LEAF.
  ConditionalTable(double alpha, Distribution root,
                   std::map<CellKey, Distribution> cells,
                   std::map<MarginalKey, Distribution> marginals,
                   std::map<CellKey, std::size_t> observations = {});

  double alpha() const { return alpha_; }
  const Distribution& root() const { return root_; }
  /// Cell distribution, backing off to the marginal and then to uniform.
  const Distribution& lookup(const CellKey& key) const;
  bool has_cell(const CellKey& key) const { return cells_.contains(key); }
  std::size_t observations(const CellKey& key) const;

  const std::map<CellKey, Distribution>& cells() const { return cells_; }
  const std::map<MarginalKey, Distribution>& marginals() const {
    return marginals_;
  }

  /// Versioned TSV; probabilities use shortest round-trip formatting so
  /// load(save(t)) reproduces t exactly.
  void save(std::ostream& out) const;
  static ConditionalTable load(std::istream& in);

 private:
  double alpha_;
  Distribution root_;
  std::map<CellKey, Distribution> cells_;
  std::map<MarginalKey, Distribution> marginals_;
  std::map<CellKey, std::size_t> observations_;
  Distribution uniform_;
};

inline constexpr double kDefaultSmoothing = 0.1;

/// probability = (count + alpha) / (total + alpha * outcomes) per observed
/// cell. Throws kEmptyCorpus, kInvalidTree, kInvalidArgument (alpha < 0).
ConditionalTable fit(std::span<const RstTree> corpus,
                     double alpha = kDefaultSmoothing);

struct SamplerConstraints {
  std::optional<int> target_edu_count;
  std::map<Relation, double> relation_boosts;
  int max_depth = kMaxTreeDepth;
  std::uint64_t seed = 0;
};

using SamplerRng = std::mt19937_64;

/// Uniform in [0, 1) from the top 53 bits; bit-stable across platforms.
double uniform01(SamplerRng& rng);

/// Draws one child outcome from the boost-adjusted, renormalised cell.
ChildOutcome sample_child(const ConditionalTable& table, NodeLabel parent,
                          NodePos parent_pos, Side side, SamplerRng& rng,
                          const std::map<Relation, double>& boosts = {});

/// Largest leaf count reachable under max_depth (parents also stay inside
/// the position table).
std::size_t leaf_capacity(int max_depth);

/**
 * Breadth-first tree sampling. With a target EDU count, any outcome that
 * would make the target unreachable gets probability zero before
 * renormalisation, so the result has exactly that many leaves.
 * Throws kInvalidConstraint (target < 2, bad max_depth or boost) and
 * kUnreachableTarget (target above leaf_capacity(max_depth)).
 */
RstTree sample_tree(const ConditionalTable& table,
                    const SamplerConstraints& constraints, SamplerRng& rng);
/// Seeds a fresh generator from constraints.seed.
RstTree sample_tree(const ConditionalTable& table,
                    const SamplerConstraints& constraints);

}  // namespace rstkit
