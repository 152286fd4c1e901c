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
 * TextRank keyphrase extraction.
 *
 * Adjectives, nouns, proper nouns and verbs become lemma nodes of an
 * undirected co-occurrence graph (weight 1 when two qualifying words are
 * fewer than `window` qualifying words apart). Node scores follow
 *
 *   S(i) = (1 - d) + d * sum_j w_ji * S(j) / sum_k w_jk
 *
 * iterated from S = 1 until the largest per-node change drops below the
 * tolerance. A candidate phrase of L words scores the sum of its words'
 * node scores divided by (L + 1); candidates sharing a lemma sequence with a
 * better-ranked one are dropped.
 */

#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rstkit {

/// Universal POS tagset.
enum class PosTag {
  ADJ, ADP, ADV, AUX, CCONJ, DET, INTJ, NOUN, NUM,
  PART, PRON, PROPN, PUNCT, SCONJ, SYM, VERB, X,
};

std::string_view to_string(PosTag t);
std::optional<PosTag> parse_pos_tag(std::string_view s);
bool is_graph_tag(PosTag t);

struct TaggedToken {
  std::string surface;
  std::string lemma;
  PosTag pos = PosTag::X;
  std::size_t offset = 0;    // word index in the document
  std::size_t sentence = 0;
};

/// Tokens [begin, end).
struct TokenSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  friend bool operator==(const TokenSpan&, const TokenSpan&) = default;
};

struct TaggedDocument {
  std::vector<TaggedToken> tokens;
  std::vector<TokenSpan> spans;  // empty = use fallback_candidates
};

/// `surface<TAB>lemma<TAB>pos` per token, blank line between sentences,
/// optional `span<TAB>start<TAB>end` records. Unknown tags read as X.
TaggedDocument read_tagged(std::istream& in);

class WordGraph {
 public:
  WordGraph() = default;
  /// Nodes are numbered in ascending lemma order.
  explicit WordGraph(std::vector<std::string> lemmas, int window = 0);

  void add_edge(std::size_t a, std::size_t b, double weight = 1.0);

  std::size_t size() const { return lemmas_.size(); }
  int window() const { return window_; }
  const std::vector<std::string>& lemmas() const { return lemmas_; }
  std::optional<std::size_t> id(std::string_view lemma) const;
  const std::map<std::size_t, double>& neighbours(std::size_t i) const {
    return adjacency_[i];
  }
  double weight(std::size_t a, std::size_t b) const;
  std::size_t edge_count() const;

 private:
  std::vector<std::string> lemmas_;
  std::vector<std::map<std::size_t, double>> adjacency_;
  int window_ = 0;
};

inline constexpr int kDefaultWindow = 4;

/// Throws kInvalidArgument when window < 1.
WordGraph build_graph(std::span<const TaggedToken> tokens,
                      int window = kDefaultWindow);

struct PageRankOptions {
  double damping = 0.85;
  double tolerance = 1e-6;
  int max_iterations = 100;
  double initial_score = 1.0;
};

struct PageRankResult {
  std::vector<double> scores;      // by node id
  std::vector<double> max_change;  // one entry per iteration
  int iterations = 0;
  bool converged = false;

  std::map<std::string, double> by_lemma(const WordGraph& g) const;
};

/// Synchronous fixed-point iteration. Non-convergence is reported through
/// `converged` with the last iterate. Throws kInvalidArgument for a damping
/// outside (0, 1) or a non-positive tolerance.
PageRankResult pagerank(const WordGraph& graph,
                        const PageRankOptions& options = {});

struct KeyphraseCandidate {
  TokenSpan span;
  std::string phrase;
  std::vector<std::string> lemmas;
  double score = 0.0;
};

/// Maximal runs of ADJ / NOUN / PROPN inside one sentence.
std::vector<TokenSpan> fallback_candidates(std::span<const TaggedToken> tokens);

/// Scores spans; words outside the graph contribute 0. Throws
/// kInvalidArgument for spans outside the token list.
std::vector<KeyphraseCandidate> score_candidates(
    std::span<const TaggedToken> tokens, std::span<const TokenSpan> spans,
    const WordGraph& graph, const PageRankResult& ranks);

/// Sorted by score (ties: earlier span first), lemma-duplicates removed,
/// truncated to `top_m` (0 keeps everything).
std::vector<KeyphraseCandidate> rank_candidates(
    std::vector<KeyphraseCandidate> candidates, std::size_t top_m);

std::vector<KeyphraseCandidate> extract_keyphrases(
    std::span<const TaggedToken> tokens, std::span<const TokenSpan> spans,
    int window = kDefaultWindow, const PageRankOptions& options = {},
    std::size_t top_m = 10);

/// Lexicon and suffix based tagger for untagged demo input. Lemmas are
/// lower-cased with naive plural stripping on nouns.
std::vector<TaggedToken> fallback_tag(std::string_view text);

}  // namespace rstkit
