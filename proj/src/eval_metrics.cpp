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

#include "rstkit/eval_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <istream>

#include "rstkit/edu_tracker.hpp"
#include "rstkit/error.hpp"
#include "rstkit/io_util.hpp"

namespace rstkit {

Corpus read_corpus(std::istream& in) {
  Corpus corpus;
  std::string line;
  while (std::getline(in, line)) corpus.push_back(split_whitespace(line));
  return corpus;
}

void RecallTable::merge(const RecallTable& other) {
  for (const auto& [rel, row] : other.rows) {
    auto& mine = rows[rel];
    mine.matched += row.matched;
    mine.reference += row.reference;
  }
}

RecallTable relation_recall(const RstTree& reference,
                            const RstTree& hypothesis) {
  require_valid(reference);
  require_valid(hypothesis);
  RecallTable table;
  for (const auto& [pos, label] : reference.parents()) {
    auto& row = table.rows[label.relation];
    ++row.reference;
    const auto other = hypothesis.label(pos);
    if (other && other->relation == label.relation) ++row.matched;
  }
  return table;
}

bool RecallAccumulator::add(const RstTree& reference,
                            const RstTree& hypothesis) {
  const RecallTable table = relation_recall(reference, hypothesis);
  const int edus = static_cast<int>(reference.edus().size());
  int band = 0;
  for (int b : kRecallBands) {
    if (mode_ == BucketMode::kExact ? edus == b : edus <= b) {
      band = b;
      break;
    }
  }
  if (band == 0) return false;
  buckets_[band].merge(table);
  overall_.merge(table);
  return true;
}

NgramProfile::NgramProfile(const Corpus& corpus, int max_n) {
  if (max_n < 1) throw Error(ErrorCode::kInvalidArgument, "n must be >= 1");
  counts_.resize(static_cast<std::size_t>(max_n));
  totals_.assign(static_cast<std::size_t>(max_n), 0);
  for (const TokenSeq& seq : corpus) {
    for (std::size_t n = 1; n <= counts_.size() && n <= seq.size(); ++n) {
      for (std::size_t i = 0; i + n <= seq.size(); ++i) {
        ++counts_[n - 1][TokenSeq(seq.begin() + i, seq.begin() + i + n)];
        ++totals_[n - 1];
      }
    }
  }
}

double distinct_n(const Corpus& corpus, int n) {
  const NgramProfile profile(corpus, n);
  if (profile.total(n) == 0) {
    throw Error(ErrorCode::kEmptyCorpus,
                "corpus has no " + std::to_string(n) + "-grams");
  }
  return static_cast<double>(profile.counts(n).size()) /
         static_cast<double>(profile.total(n));
}

double ms_jaccard(const Corpus& a, const Corpus& b, int max_n) {
  const NgramProfile pa(a, max_n);
  const NgramProfile pb(b, max_n);
  if (pa.total(1) == 0 || pb.total(1) == 0) {
    throw Error(ErrorCode::kEmptyCorpus, "ms-jaccard needs non-empty corpora");
  }
  double log_sum = 0.0;
  int orders = 0;
  for (int n = 1; n <= max_n; ++n) {
    // 0/0 when neither side has n-grams this long; the order is skipped.
    if (pa.total(n) == 0 && pb.total(n) == 0) continue;
    ++orders;
    const auto& ca = pa.counts(n);
    const auto& cb = pb.counts(n);
    const double ta = static_cast<double>(pa.total(n));
    const double tb = static_cast<double>(pb.total(n));
    double num = 0.0;
    double den = 0.0;
    auto ia = ca.begin();
    auto ib = cb.begin();
    // Merge walk over the two sorted count maps.
    while (ia != ca.end() || ib != cb.end()) {
      double fa = 0.0;
      double fb = 0.0;
      if (ib == cb.end() || (ia != ca.end() && ia->first < ib->first)) {
        fa = static_cast<double>((ia++)->second) / ta;
      } else if (ia == ca.end() || ib->first < ia->first) {
        fb = static_cast<double>((ib++)->second) / tb;
      } else {
        fa = static_cast<double>((ia++)->second) / ta;
        fb = static_cast<double>((ib++)->second) / tb;
      }
      num += std::min(fa, fb);
      den += std::max(fa, fb);
    }
    if (num == 0.0) return 0.0;
    log_sum += std::log(num / den);
  }
  // Identical profiles must give exactly 1.
  return log_sum == 0.0 ? 1.0 : std::exp(log_sum / orders);
}

double bleu_n(const Corpus& hypotheses, const Corpus& references, int n) {
  if (hypotheses.size() != references.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(hypotheses.size()) + " hypotheses vs " +
                    std::to_string(references.size()) + " references");
  }
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "n must be >= 1");
  std::vector<std::size_t> clipped(static_cast<std::size_t>(n), 0);
  std::vector<std::size_t> total(static_cast<std::size_t>(n), 0);
  std::size_t hyp_len = 0;
  std::size_t ref_len = 0;
  for (std::size_t s = 0; s < hypotheses.size(); ++s) {
    hyp_len += hypotheses[s].size();
    ref_len += references[s].size();
    const NgramProfile hp({hypotheses[s]}, n);
    const NgramProfile rp({references[s]}, n);
    for (int k = 1; k <= n; ++k) {
      total[k - 1] += hp.total(k);
      for (const auto& [gram, count] : hp.counts(k)) {
        auto it = rp.counts(k).find(gram);
        if (it != rp.counts(k).end()) {
          clipped[k - 1] += std::min(count, it->second);
        }
      }
    }
  }
  if (hyp_len == 0) return 0.0;
  double log_p = 0.0;
  bool all_match = true;
  int orders = 0;
  for (int k = 0; k < n; ++k) {
    // Orders longer than every hypothesis have no precision; skip them.
    if (total[k] == 0) continue;
    ++orders;
    if (clipped[k] == 0) return 0.0;
    all_match = all_match && clipped[k] == total[k];
    log_p += std::log(static_cast<double>(clipped[k]) /
                      static_cast<double>(total[k]));
  }
  const double precision = all_match ? 1.0 : std::exp(log_p / orders);
  if (hyp_len >= ref_len) return precision;
  return precision * std::exp(1.0 - static_cast<double>(ref_len) /
                                        static_cast<double>(hyp_len));
}

std::size_t sentence_count(const TokenSeq& words) {
  std::size_t count = 0;
  bool trailing = false;
  for (const auto& w : words) {
    if (is_sentence_final(w)) {
      ++count;
      trailing = false;
    } else {
      trailing = true;
    }
  }
  return count + (trailing ? 1 : 0);
}

std::map<int, LengthStats> length_stats(const Corpus& texts,
                                        std::span<const int> edu_counts) {
  if (texts.size() != edu_counts.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(texts.size()) + " texts vs " +
                    std::to_string(edu_counts.size()) + " EDU counts");
  }
  std::map<int, std::pair<double, double>> sums;
  std::map<int, LengthStats> out;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    auto& s = sums[edu_counts[i]];
    s.first += static_cast<double>(texts[i].size());
    s.second += static_cast<double>(sentence_count(texts[i]));
    ++out[edu_counts[i]].texts;
  }
  for (auto& [edus, stats] : out) {
    const double n = static_cast<double>(stats.texts);
    stats.mean_words = sums[edus].first / n;
    stats.mean_sentences = sums[edus].second / n;
  }
  return out;
}

}  // namespace rstkit
