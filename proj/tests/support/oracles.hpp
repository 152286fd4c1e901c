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

// Independent, deliberately naive reference implementations used as test
// oracles. None of them calls the routine it checks.

#pragma once

#include <map>
#include <string>
#include <vector>

#include "rstkit/attention_kernel.hpp"
#include "rstkit/edu_tracker.hpp"
#include "rstkit/eval_metrics.hpp"
#include "rstkit/keyphrase_textrank.hpp"
#include "rstkit/rst_attention.hpp"
#include "rstkit/rst_tree.hpp"
#include "rstkit/tree_edit.hpp"

namespace rstkit::testing {

/// Strict ancestors of `pos`, nearest first, found by a breadth-first
/// descent from the root with explicit parent links.
std::vector<NodePos> descend_ancestors(NodePos pos);

/// True if `d` is reachable from `a` by descending at least one level.
bool descend_is_ancestor(NodePos a, NodePos d);

/// Leaves by recursive left-then-right traversal.
std::vector<NodePos> recursive_leaves(const RstTree& tree);

/// Mask built cell by cell from the definition.
AttentionMaskSet naive_full_mask(const RstTree& tree,
                                 const ContextLayout& layout,
                                 const TokenAssignment& assignment);

/// Long-double masked softmax attention.
AttentionResult naive_attention(const AttentionInputs& inp);

/**
 * Exact minimum edit cost by A* over the placement of reference nodes,
 * with relabel cost charged when the hypothesis occupancy is reached.
 * Positions are limited to the deepest level used by either tree.
 */
int search_ted(const ParentMap& reference, const ParentMap& hypothesis,
               TedVariant variant);

/// Long-double PageRank on a dense adjacency matrix.
std::vector<long double> dense_pagerank(
    const std::vector<std::vector<int>>& adjacency, long double damping,
    int iterations);

/// Keyphrase ranking recomputed from scratch: dense graph over filtered
/// lemmas, the iteration with the same stopping rule, phrase scores and
/// lemma deduplication.
std::vector<std::pair<std::string, double>> naive_keyphrases(
    const std::vector<TaggedToken>& tokens,
    const std::vector<TokenSpan>& spans, int window, double damping,
    double tolerance, int max_iterations, std::size_t top_m);

/// Distinct-n with a string-keyed hash set.
double hashed_distinct(const Corpus& corpus, int n);

/// MS-Jaccard from string-keyed frequency tables.
double table_ms_jaccard(const Corpus& a, const Corpus& b, int max_n);

/// Corpus BLEU by explicit counting.
double counted_bleu(const Corpus& hyp, const Corpus& ref, int n);

}  // namespace rstkit::testing
