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

// Hand-rolled random generators for property tests.

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "rstkit/attention_kernel.hpp"
#include "rstkit/edu_tracker.hpp"
#include "rstkit/keyphrase_textrank.hpp"
#include "rstkit/rst_tree.hpp"

namespace rstkit::testing {

using Rng = std::mt19937_64;

int uniform_int(Rng& rng, int lo, int hi);  // inclusive
double uniform_real(Rng& rng, double lo, double hi);

NodeLabel random_label(Rng& rng);

/**
 * Random valid tree with exactly `parents` parent nodes. Each step turns a
 * frontier leaf into a parent; with probability `deep_bias` the deepest
 * expandable leaf is picked, otherwise a uniform one. Leaves get short text
 * when `with_text` is set.
 */
RstTree random_tree(Rng& rng, int parents, int max_depth = kMaxTreeDepth,
                    double deep_bias = 0.0, bool with_text = false);

/// Adds up to `count` keyphrases anchored at random nodes.
RstTree with_random_keyphrases(Rng& rng, const RstTree& tree, int count);

/// Random contiguous, in-order assignment of `tokens` tokens over the
/// leaves (some leaves may be skipped).
TokenAssignment random_assignment(Rng& rng, const RstTree& tree,
                                  std::size_t tokens);

Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols,
                     double scale = 1.0);

/// Random mask with at least one 1 per row.
AttentionMaskSet random_mask(Rng& rng, std::size_t rows, std::size_t cols,
                             double density = 0.6);

/// Random tagged document over a small vocabulary.
std::vector<TaggedToken> random_tagged(Rng& rng, std::size_t tokens,
                                       std::size_t vocabulary);

}  // namespace rstkit::testing
