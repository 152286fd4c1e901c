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
 * Structural and textual evaluation metrics: per-relation position recall,
 * length statistics by EDU count, BLEU, Distinct-n and MS-Jaccard.
 */

#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "rstkit/rst_tree.hpp"

namespace rstkit {

using TokenSeq = std::vector<std::string>;
using Corpus = std::vector<TokenSeq>;

/// One whitespace-tokenized text per line. Blank lines are kept as empty
/// texts so that hypothesis and reference files stay aligned.
Corpus read_corpus(std::istream& in);

struct RelationRecall {
  std::size_t matched = 0;
  std::size_t reference = 0;

  double recall() const {
    return static_cast<double>(matched) / static_cast<double>(reference);
  }
};

/// Only relations with at least one reference node have a row.
struct RecallTable {
  std::map<Relation, RelationRecall> rows;

  void merge(const RecallTable& other);
};

/// Throws kInvalidTree.
RecallTable relation_recall(const RstTree& reference,
                            const RstTree& hypothesis);

inline constexpr int kRecallBands[] = {4, 8, 12, 16, 20};

enum class BucketMode {
  kExact,  // only EDU counts equal to a band
  kRange,  // count c goes to the smallest band >= c; counts above 20 dropped
};

/// Groups recall by the reference tree's EDU count.
class RecallAccumulator {
 public:
  explicit RecallAccumulator(BucketMode mode = BucketMode::kExact)
      : mode_(mode) {}

  /// Returns false when the pair falls into no band.
  bool add(const RstTree& reference, const RstTree& hypothesis);

  const std::map<int, RecallTable>& buckets() const { return buckets_; }
  const RecallTable& overall() const { return overall_; }

 private:
  BucketMode mode_;
  std::map<int, RecallTable> buckets_;
  RecallTable overall_;
};

/// n-gram counts for n = 1..max_n.
class NgramProfile {
 public:
  using Counts = std::map<std::vector<std::string>, std::size_t>;

  NgramProfile(const Corpus& corpus, int max_n);

  int max_n() const { return static_cast<int>(counts_.size()); }
  const Counts& counts(int n) const { return counts_.at(n - 1); }
  std::size_t total(int n) const { return totals_.at(n - 1); }

 private:
  std::vector<Counts> counts_;
  std::vector<std::size_t> totals_;
};

/// Unique over total n-grams. Throws kInvalidArgument for n < 1 and
/// kEmptyCorpus when the corpus has no n-grams of order n.
double distinct_n(const Corpus& corpus, int n);

/// Geometric mean over n = 1..max_n of sum(min) / sum(max) of the normalized
/// n-gram frequencies. Orders at which neither corpus has an n-gram are left
/// out of the mean. Throws kEmptyCorpus when either corpus has no unigrams.
double ms_jaccard(const Corpus& a, const Corpus& b, int max_n);

/// Corpus BLEU with clipped n-gram precisions for orders 1..n combined by a
/// uniform geometric mean, times the brevity penalty exp(1 - r/c) when the
/// hypotheses are shorter. Orders longer than every hypothesis are left out
/// of the mean. Each hypothesis has a single reference. Throws
/// kLengthMismatch when the lists differ in length.
double bleu_n(const Corpus& hypotheses, const Corpus& references, int n);

struct LengthStats {
  std::size_t texts = 0;
  double mean_words = 0.0;
  double mean_sentences = 0.0;
};

/// Words are whitespace tokens; a sentence ends at every sentence-final
/// token, and trailing words after the last one form one more sentence.
std::size_t sentence_count(const TokenSeq& words);

/// Means grouped by EDU count; empty groups are absent. Throws
/// kLengthMismatch.
std::map<int, LengthStats> length_stats(const Corpus& texts,
                                        std::span<const int> edu_counts);

}  // namespace rstkit
