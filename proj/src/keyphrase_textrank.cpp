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

#include "rstkit/keyphrase_textrank.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <istream>
#include <set>

#include "rstkit/edu_tracker.hpp"
#include "rstkit/error.hpp"
#include "rstkit/io_util.hpp"

namespace rstkit {

namespace {

constexpr std::array<std::string_view, 17> kTagNames = {
    "ADJ",  "ADP",  "ADV",   "AUX",   "CCONJ", "DET",   "INTJ", "NOUN", "NUM",
    "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "SYM",   "VERB", "X"};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() > suffix.size() && s.ends_with(suffix);
}

}  // namespace

std::string_view to_string(PosTag t) {
  return kTagNames.at(static_cast<std::size_t>(t));
}

std::optional<PosTag> parse_pos_tag(std::string_view s) {
  for (std::size_t i = 0; i < kTagNames.size(); ++i) {
    if (kTagNames[i] == s) return static_cast<PosTag>(i);
  }
  return std::nullopt;
}

bool is_graph_tag(PosTag t) {
  return t == PosTag::ADJ || t == PosTag::NOUN || t == PosTag::PROPN ||
         t == PosTag::VERB;
}

TaggedDocument read_tagged(std::istream& in) {
  TaggedDocument doc;
  std::string line;
  std::size_t sentence = 0;
  bool sentence_open = false;
  std::size_t line_no = 0;
  auto fail = [&line_no](const std::string& what) {
    throw Error(ErrorCode::kMalformedLine,
                "tagged line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line.front() == '#') continue;
    if (line.empty()) {
      if (sentence_open) ++sentence;
      sentence_open = false;
      continue;
    }
    std::vector<std::string> f;
    std::size_t start = 0;
    while (true) {
      const auto tab = line.find('\t', start);
      f.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (f.size() == 3 && f[0] == "span") {
      TokenSpan span;
      auto parse = [&](const std::string& s, std::size_t& out) {
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        if (s.empty() || ec != std::errc{} || p != s.data() + s.size()) {
          fail("bad span bound '" + s + "'");
        }
      };
      parse(f[1], span.begin);
      parse(f[2], span.end);
      doc.spans.push_back(span);
      continue;
    }
    if (f.size() != 3) fail("expected surface, lemma and tag");
    TaggedToken t;
    t.surface = f[0];
    t.lemma = f[1];
    t.pos = parse_pos_tag(f[2]).value_or(PosTag::X);
    t.offset = doc.tokens.size();
    t.sentence = sentence;
    sentence_open = true;
    doc.tokens.push_back(std::move(t));
  }
  return doc;
}

WordGraph::WordGraph(std::vector<std::string> lemmas, int window)
    : lemmas_(std::move(lemmas)), window_(window) {
  std::sort(lemmas_.begin(), lemmas_.end());
  lemmas_.erase(std::unique(lemmas_.begin(), lemmas_.end()), lemmas_.end());
  adjacency_.resize(lemmas_.size());
}

void WordGraph::add_edge(std::size_t a, std::size_t b, double weight) {
  if (a == b) return;
  adjacency_.at(a)[b] = weight;
  adjacency_.at(b)[a] = weight;
}

std::optional<std::size_t> WordGraph::id(std::string_view lemma) const {
  auto it = std::lower_bound(lemmas_.begin(), lemmas_.end(), lemma);
  if (it == lemmas_.end() || *it != lemma) return std::nullopt;
  return static_cast<std::size_t>(it - lemmas_.begin());
}

double WordGraph::weight(std::size_t a, std::size_t b) const {
  auto it = adjacency_.at(a).find(b);
  return it == adjacency_[a].end() ? 0.0 : it->second;
}

std::size_t WordGraph::edge_count() const {
  std::size_t twice = 0;
  for (const auto& n : adjacency_) twice += n.size();
  return twice / 2;
}

WordGraph build_graph(std::span<const TaggedToken> tokens, int window) {
  if (window < 1) {
    throw Error(ErrorCode::kInvalidArgument, "window must be >= 1");
  }
  std::vector<std::string> sequence;
  for (const auto& t : tokens) {
    if (is_graph_tag(t.pos)) sequence.push_back(t.lemma);
  }
  WordGraph graph(sequence, window);
  std::vector<std::size_t> ids;
  ids.reserve(sequence.size());
  for (const auto& lemma : sequence) ids.push_back(*graph.id(lemma));
  const auto k = static_cast<std::size_t>(window);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size() && j - i < k; ++j) {
      graph.add_edge(ids[i], ids[j]);
    }
  }
  return graph;
}

std::map<std::string, double> PageRankResult::by_lemma(
    const WordGraph& g) const {
  std::map<std::string, double> out;
  for (std::size_t i = 0; i < scores.size(); ++i) out[g.lemmas()[i]] = scores[i];
  return out;
}

PageRankResult pagerank(const WordGraph& graph,
                        const PageRankOptions& options) {
  const double d = options.damping;
  if (!(d > 0.0 && d < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "damping must lie in (0, 1)");
  }
  if (!(options.tolerance > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "tolerance must be positive");
  }
  const std::size_t n = graph.size();
  std::vector<double> out_weight(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (const auto& [k, w] : graph.neighbours(j)) out_weight[j] += w;
  }

  PageRankResult result;
  result.scores.assign(n, options.initial_score);
  std::vector<double> next(n);
  for (int it = 0; it < options.max_iterations; ++it) {
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double sum = 0.0;
      for (const auto& [j, w] : graph.neighbours(i)) {
        sum += w * result.scores[j] / out_weight[j];
      }
      next[i] = (1.0 - d) + d * sum;
      change = std::max(change, std::abs(next[i] - result.scores[i]));
    }
    result.scores.swap(next);
    result.max_change.push_back(change);
    result.iterations = it + 1;
    if (change < options.tolerance) {
      result.converged = true;
      break;
    }
  }
  if (n == 0) result.converged = true;
  return result;
}

std::vector<TokenSpan> fallback_candidates(
    std::span<const TaggedToken> tokens) {
  auto in_chunk = [](PosTag t) {
    return t == PosTag::ADJ || t == PosTag::NOUN || t == PosTag::PROPN;
  };
  std::vector<TokenSpan> spans;
  std::size_t i = 0;
  while (i < tokens.size()) {
    if (!in_chunk(tokens[i].pos)) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < tokens.size() && in_chunk(tokens[j].pos) &&
           tokens[j].sentence == tokens[i].sentence) {
      ++j;
    }
    spans.push_back(TokenSpan{i, j});
    i = j;
  }
  return spans;
}

std::vector<KeyphraseCandidate> score_candidates(
    std::span<const TaggedToken> tokens, std::span<const TokenSpan> spans,
    const WordGraph& graph, const PageRankResult& ranks) {
  std::vector<KeyphraseCandidate> out;
  out.reserve(spans.size());
  for (const TokenSpan& span : spans) {
    if (span.begin >= span.end || span.end > tokens.size()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "candidate span [" + std::to_string(span.begin) + ", " +
                      std::to_string(span.end) + ") outside the document");
    }
    KeyphraseCandidate c;
    c.span = span;
    double sum = 0.0;
    for (std::size_t k = span.begin; k < span.end; ++k) {
      const TaggedToken& t = tokens[k];
      if (!c.phrase.empty()) c.phrase += ' ';
      c.phrase += t.surface;
      c.lemmas.push_back(t.lemma);
      if (!is_graph_tag(t.pos)) continue;
      if (auto id = graph.id(t.lemma)) sum += ranks.scores[*id];
    }
    const double length = static_cast<double>(span.end - span.begin);
    c.score = sum / (length + 1.0);
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<KeyphraseCandidate> rank_candidates(
    std::vector<KeyphraseCandidate> candidates, std::size_t top_m) {
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const KeyphraseCandidate& a,
                      const KeyphraseCandidate& b) {
                     if (a.score != b.score) return a.score > b.score;
                     return a.span.begin < b.span.begin;
                   });
  std::set<std::vector<std::string>> seen;
  std::vector<KeyphraseCandidate> out;
  for (auto& c : candidates) {
    if (top_m != 0 && out.size() == top_m) break;
    if (!seen.insert(c.lemmas).second) continue;
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<KeyphraseCandidate> extract_keyphrases(
    std::span<const TaggedToken> tokens, std::span<const TokenSpan> spans,
    int window, const PageRankOptions& options, std::size_t top_m) {
  const WordGraph graph = build_graph(tokens, window);
  const PageRankResult ranks = pagerank(graph, options);
  return rank_candidates(score_candidates(tokens, spans, graph, ranks), top_m);
}

namespace {

const std::map<std::string, PosTag, std::less<>>& closed_class() {
  static const auto* kLexicon = [] {
    auto* m = new std::map<std::string, PosTag, std::less<>>;
    auto add = [m](PosTag t, std::initializer_list<const char*> words) {
      for (const char* w : words) m->emplace(w, t);
    };
    add(PosTag::DET, {"the", "a", "an", "this", "that", "these", "those",
                      "each", "every", "some", "any", "no", "all", "both"});
    add(PosTag::PRON, {"i", "you", "he", "she", "it", "we", "they", "me",
                       "him", "her", "us", "them", "my", "your", "his",
                       "its", "our", "their", "who", "what", "which",
                       "there"});
    add(PosTag::ADP, {"in", "on", "at", "of", "to", "for", "with", "by",
                      "from", "about", "into", "over", "under", "between",
                      "through", "during", "without", "as", "than"});
    add(PosTag::CCONJ, {"and", "or", "but", "nor", "yet", "so"});
    add(PosTag::SCONJ, {"if", "because", "although", "while", "since",
                        "when", "after", "before", "unless", "whereas",
                        "though", "whether"});
    add(PosTag::AUX, {"is", "are", "was", "were", "be", "been", "being",
                      "am", "do", "does", "did", "have", "has", "had",
                      "will", "would", "can", "could", "shall", "should",
                      "may", "might", "must"});
    add(PosTag::PART, {"not", "n't"});
    add(PosTag::ADV, {"very", "also", "just", "too", "quite", "often",
                      "never", "always", "here", "then", "now"});
    return m;
  }();
  return *kLexicon;
}

bool is_punct_char(unsigned char c) { return std::ispunct(c) != 0; }

std::string noun_lemma(std::string w) {
  if (ends_with(w, "ies") && w.size() > 4) return w.substr(0, w.size() - 3) + "y";
  for (std::string_view s : {"sses", "shes", "ches", "xes"}) {
    if (ends_with(w, s)) return w.substr(0, w.size() - 2);
  }
  if (ends_with(w, "s") && !ends_with(w, "ss") && !ends_with(w, "us") &&
      !ends_with(w, "is") && w.size() > 3) {
    return w.substr(0, w.size() - 1);
  }
  return w;
}

}  // namespace

std::vector<TaggedToken> fallback_tag(std::string_view text) {
  // Split punctuation off word edges.
  std::vector<std::string> pieces;
  for (const auto& raw : split_whitespace(text)) {
    std::size_t b = 0;
    std::size_t e = raw.size();
    std::vector<std::string> tail;
    while (b < e && is_punct_char(static_cast<unsigned char>(raw[b]))) {
      pieces.emplace_back(1, raw[b++]);
    }
    while (e > b && is_punct_char(static_cast<unsigned char>(raw[e - 1]))) {
      tail.emplace_back(1, raw[--e]);
    }
    if (e > b) pieces.push_back(raw.substr(b, e - b));
    pieces.insert(pieces.end(), tail.rbegin(), tail.rend());
  }

  std::vector<TaggedToken> out;
  std::size_t sentence = 0;
  bool at_sentence_start = true;
  for (const auto& w : pieces) {
    TaggedToken t;
    t.surface = w;
    t.offset = out.size();
    t.sentence = sentence;
    const std::string lw = lower(w);
    t.lemma = lw;
    const auto& lex = closed_class();
    if (auto it = lex.find(lw); it != lex.end()) {
      t.pos = it->second;
    } else if (is_punct_char(static_cast<unsigned char>(w.front()))) {
      t.pos = PosTag::PUNCT;
    } else if (std::isdigit(static_cast<unsigned char>(w.front()))) {
      t.pos = PosTag::NUM;
    } else if (!at_sentence_start &&
               std::isupper(static_cast<unsigned char>(w.front()))) {
      t.pos = PosTag::PROPN;
    } else if (ends_with(lw, "ly")) {
      t.pos = PosTag::ADV;
    } else if (ends_with(lw, "ing") || ends_with(lw, "ed")) {
      t.pos = PosTag::VERB;
    } else if (ends_with(lw, "ous") || ends_with(lw, "ful") ||
               ends_with(lw, "ive") || ends_with(lw, "able") ||
               ends_with(lw, "ible") || ends_with(lw, "al") ||
               ends_with(lw, "ic") || ends_with(lw, "less")) {
      t.pos = PosTag::ADJ;
    } else {
      t.pos = PosTag::NOUN;
      t.lemma = noun_lemma(lw);
    }
    at_sentence_start = t.pos == PosTag::PUNCT && is_sentence_final(w);
    if (at_sentence_start) ++sentence;
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace rstkit
