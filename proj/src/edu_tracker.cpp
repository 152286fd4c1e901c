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

#include "rstkit/edu_tracker.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include "rstkit/error.hpp"

namespace rstkit {

namespace {

const std::set<std::string>& coordinators() {
  static const std::set<std::string> kWords = {"and", "but", "or",
                                               "so",  "yet", "nor"};
  return kWords;
}

// Words that commonly open a finite clause after a coordinator.
const std::set<std::string>& clause_openers() {
  static const std::set<std::string> kWords = {
      "i",    "you",   "he",    "she",   "it",    "we",   "they",
      "this", "that",  "these", "those", "there", "the",  "a",
      "an",   "my",    "your",  "his",   "her",   "its",  "our",
      "their", "some", "many",  "most",  "no",    "everyone", "nobody"};
  return kWords;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

char last_char(std::string_view token) {
  return token.empty() ? '\0' : token.back();
}

}  // namespace

BoundaryRules::BoundaryRules()
    : markers_{"if",    "because", "although", "while",  "since",
               "when",  "after",   "before",   "unless", "whereas"} {}

BoundaryRules::BoundaryRules(std::set<std::string> markers)
    : markers_(std::move(markers)) {}

BoundaryRules BoundaryRules::from_lexicon(std::istream& in) {
  std::set<std::string> markers;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    markers.insert(lower(line.substr(first, last - first + 1)));
  }
  return BoundaryRules(std::move(markers));
}

BoundaryRules BoundaryRules::from_lexicon_file(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return from_lexicon(in);
}

bool BoundaryRules::is_marker(std::string_view token) const {
  return markers_.contains(lower(token));
}

bool is_sentence_final(std::string_view token) {
  const char c = last_char(token);
  return c == '.' || c == '!' || c == '?';
}

BoundaryRule BoundaryRules::check(std::string_view token,
                                  std::string_view edu_opener,
                                  std::span<const std::string> lookahead) const {
  if (is_sentence_final(token)) return BoundaryRule::kSentenceFinal;
  const char c = last_char(token);
  if (c == ';' || c == ':') return BoundaryRule::kSemicolonColon;
  if (c == ',') {
    if (is_marker(edu_opener)) return BoundaryRule::kClauseComma;
    if (lookahead.size() >= 2 && coordinators().contains(lower(lookahead[0])) &&
        clause_openers().contains(lower(lookahead[1]))) {
      return BoundaryRule::kClauseComma;
    }
  }
  return BoundaryRule::kNone;
}

EduCursor::EduCursor(const RstTree& tree, BoundaryRules rules)
    : rules_(std::move(rules)), leaves_(leaves_in_order(tree)) {}

Observation EduCursor::observe_token(std::string_view token,
                                     std::span<const std::string> lookahead) {
  if (finished_) {
    throw Error(ErrorCode::kFinishedCursor, "all leaves have been generated");
  }
  if (opener_.empty()) opener_ = std::string(token);
  Observation obs{leaves_[current_], false};
  if (rules_.check(token, opener_, lookahead) != BoundaryRule::kNone) {
    obs.boundary_fired = true;
    opener_.clear();
    if (current_ + 1 < leaves_.size()) {
      ++current_;
    } else {
      finished_ = true;
    }
  }
  return obs;
}

TokenAssignment assign_tokens(const RstTree& tree,
                              std::span<const std::string> tokens,
                              const BoundaryRules& rules) {
  EduCursor cursor(tree, rules);
  TokenAssignment out;
  out.tokens.reserve(tokens.size());
  const NodePos final_leaf = cursor.leaf_sequence().back();
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (cursor.finished()) {
      out.tokens.emplace_back(i, final_leaf);
      continue;
    }
    const auto obs = cursor.observe_token(tokens[i], tokens.subspan(i + 1));
    out.tokens.emplace_back(i, obs.leaf);
  }
  std::set<NodePos> used;
  for (const auto& [idx, leaf] : out.tokens) used.insert(leaf);
  for (NodePos leaf : cursor.leaf_sequence()) {
    if (!used.contains(leaf)) out.unused_leaves.push_back(leaf);
  }
  return out;
}

void write_assignment(const TokenAssignment& a, std::ostream& out) {
  for (const auto& [idx, leaf] : a.tokens) {
    out << idx << '\t' << leaf.index << '\n';
  }
}

TokenAssignment read_assignment(std::istream& in) {
  TokenAssignment a;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    std::size_t idx = 0;
    std::uint32_t pos = 0;
    bool ok = tab != std::string::npos;
    if (ok) {
      const char* b = line.data();
      auto r1 = std::from_chars(b, b + tab, idx);
      auto r2 = std::from_chars(b + tab + 1, b + line.size(), pos);
      ok = r1.ec == std::errc{} && r1.ptr == b + tab &&
           r2.ec == std::errc{} && r2.ptr == b + line.size() && tab > 0 &&
           tab + 1 < line.size();
    }
    if (!ok) {
      throw Error(ErrorCode::kMalformedLine,
                  "assignment line " + std::to_string(line_no));
    }
    a.tokens.emplace_back(idx, NodePos{pos});
  }
  return a;
}

}  // namespace rstkit
