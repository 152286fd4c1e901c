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

#include "rstkit/rst_tree.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "rstkit/error.hpp"

namespace rstkit {

namespace {

constexpr std::array<std::string_view, kRelationCount> kRelationNames = {
    "Attribution", "Background",    "Cause",       "Comparison",
    "Condition",   "Contrast",      "Elaboration", "Enablement",
    "Evaluation",  "Explanation",   "Joint",       "Manner-Means",
    "Topic-Comment", "Summary",     "Temporal",    "Topic-Change",
    "Same-Unit",   "Textual-Organization", "Null",
};

constexpr std::array<std::string_view, kNuclearityCount> kNuclearityNames = {
    "NN", "NS", "SN", "Null"};

}  // namespace

std::string_view to_string(Relation r) { return kRelationNames.at(index_of(r)); }
std::string_view to_string(Nuclearity n) {
  return kNuclearityNames.at(index_of(n));
}

std::optional<Relation> parse_relation(std::string_view s) {
  for (int i = 0; i < kRelationCount; ++i) {
    if (kRelationNames[i] == s) return static_cast<Relation>(i);
  }
  return std::nullopt;
}

std::optional<Nuclearity> parse_nuclearity(std::string_view s) {
  for (int i = 0; i < kNuclearityCount; ++i) {
    if (kNuclearityNames[i] == s) return static_cast<Nuclearity>(i);
  }
  return std::nullopt;
}

Relation relation_from_index(int i) {
  if (i < 0 || i >= kRelationCount) {
    throw Error(ErrorCode::kInvalidArgument,
                "relation index " + std::to_string(i));
  }
  return static_cast<Relation>(i);
}

Nuclearity nuclearity_from_index(int i) {
  if (i < 0 || i >= kNuclearityCount) {
    throw Error(ErrorCode::kInvalidArgument,
                "nuclearity index " + std::to_string(i));
  }
  return static_cast<Nuclearity>(i);
}

std::ostream& operator<<(std::ostream& os, NodePos p) { return os << p.index; }

int depth(NodePos pos) {
  // Depth d occupies indices [2^d - 1, 2^(d+1) - 2].
  return std::bit_width(pos.index + 1) - 1;
}

NodePos parent_of(NodePos pos) {
  if (pos.is_root()) {
    throw Error(ErrorCode::kRootHasNoParent, "node 0 is the root");
  }
  return NodePos{(pos.index - 1) / 2};
}

NodePos sibling_of(NodePos pos) {
  if (pos.is_root()) {
    throw Error(ErrorCode::kRootHasNoParent, "node 0 has no sibling");
  }
  return pos.is_left_child() ? NodePos{pos.index + 1} : NodePos{pos.index - 1};
}

std::vector<NodePos> ancestors_of(NodePos pos) {
  std::vector<NodePos> out;
  out.reserve(static_cast<std::size_t>(depth(pos)));
  while (!pos.is_root()) {
    pos = parent_of(pos);
    out.push_back(pos);
  }
  return out;
}

bool is_ancestor(NodePos a, NodePos d) {
  const int da = depth(a);
  const int dd = depth(d);
  if (da >= dd) return false;
  // Walking up (dd - da) levels from d lands on a iff a is an ancestor.
  std::uint32_t idx = d.index;
  for (int k = 0; k < dd - da; ++k) idx = (idx - 1) / 2;
  return idx == a.index;
}

std::int64_t inorder_key(NodePos pos) {
  const int d = depth(pos);
  if (d > kMaxTreeDepth) {
    throw Error(ErrorCode::kDepthExceeded,
                "position " + std::to_string(pos.index));
  }
  // Each step moves half as far as the one before it: the key is the
  // x-coordinate of the node in a drawing of the full tree.
  std::int64_t key = 0;
  const auto path = ancestors_of(pos);
  NodePos child = pos;
  for (std::size_t k = 0; k < path.size(); ++k) {
    const int level = d - static_cast<int>(k);  // depth of `child`
    const std::int64_t step = std::int64_t{1} << (kMaxTreeDepth + 1 - level);
    key += child.is_left_child() ? -step : step;
    child = path[k];
  }
  return key;
}

RstTree::RstTree(ParentMap parents, std::vector<Edu> edus,
                 std::vector<Keyphrase> keyphrases)
    : parents_(std::move(parents)),
      edus_(std::move(edus)),
      keyphrases_(std::move(keyphrases)) {}

RstTree RstTree::from_parents(ParentMap parents,
                              std::vector<Keyphrase> keyphrases) {
  std::vector<Edu> edus;
  for (const auto& [pos, label] : parents) {
    for (NodePos c : {pos.left(), pos.right()}) {
      if (!parents.contains(c)) edus.push_back(Edu{c, std::nullopt});
    }
  }
  std::stable_sort(edus.begin(), edus.end(), [](const Edu& a, const Edu& b) {
    return inorder_key(a.pos) < inorder_key(b.pos);
  });
  return RstTree(std::move(parents), std::move(edus), std::move(keyphrases));
}

bool RstTree::is_leaf(NodePos p) const {
  return std::any_of(edus_.begin(), edus_.end(),
                     [p](const Edu& e) { return e.pos == p; });
}

std::optional<NodeLabel> RstTree::label(NodePos p) const {
  auto it = parents_.find(p);
  if (it == parents_.end()) return std::nullopt;
  return it->second;
}

bool ValidationReport::has(ViolationKind k) const {
  return std::any_of(violations.begin(), violations.end(),
                     [k](const Violation& v) { return v.kind == k; });
}

ValidationReport validate(const RstTree& tree) {
  ValidationReport report;
  auto flag = [&](ViolationKind kind, NodePos pos, std::string msg) {
    report.violations.push_back(Violation{kind, pos, std::move(msg)});
  };
  const auto& parents = tree.parents();

  if (parents.empty()) {
    flag(ViolationKind::kEmptyTree, NodePos{0}, "tree has no parent nodes");
  } else if (!parents.contains(NodePos{0})) {
    flag(ViolationKind::kMissingRoot, NodePos{0}, "root node 0 is missing");
  }

  for (const auto& [pos, label] : parents) {
    if (pos.index >= kMaxRstNode) {
      flag(ViolationKind::kPositionOutOfRange, pos,
           "parent position beyond the position table");
    }
    if (label.relation == Relation::Null) {
      flag(ViolationKind::kNullRelation, pos,
           "relation must not be Null in a tree");
    }
    if (label.nuclearity == Nuclearity::Null) {
      flag(ViolationKind::kNullNuclearity, pos,
           "nuclearity must contain a nucleus");
    }
    if (!pos.is_root() && !parents.contains(parent_of(pos))) {
      flag(ViolationKind::kOrphanNode, pos, "orphan node");
    }
  }

  std::set<NodePos> leaf_set;
  for (const Edu& e : tree.edus()) {
    if (e.pos.index >= kPositionLimit) {
      flag(ViolationKind::kPositionOutOfRange, e.pos,
           "leaf deeper than the maximum tree depth");
      continue;
    }
    if (!leaf_set.insert(e.pos).second) {
      flag(ViolationKind::kDuplicateLeaf, e.pos, "leaf listed twice");
    }
    if (parents.contains(e.pos)) {
      flag(ViolationKind::kParentAndLeaf, e.pos,
           "node is both a parent and a leaf");
    } else if (!e.pos.is_root() && !parents.contains(parent_of(e.pos))) {
      flag(ViolationKind::kOrphanNode, e.pos, "orphan node");
    }
  }

  for (const auto& [pos, label] : parents) {
    for (NodePos c : {pos.left(), pos.right()}) {
      if (!parents.contains(c) && !leaf_set.contains(c)) {
        flag(ViolationKind::kMissingChild, c,
             "child of a parent node is neither parent nor leaf");
      }
    }
  }

  const auto& edus = tree.edus();
  for (std::size_t i = 1; i < edus.size(); ++i) {
    if (edus[i - 1].pos.index >= kPositionLimit ||
        edus[i].pos.index >= kPositionLimit) {
      continue;
    }
    if (inorder_key(edus[i - 1].pos) >= inorder_key(edus[i].pos)) {
      flag(ViolationKind::kLeafOrder, edus[i].pos,
           "EDUs are not in left-to-right order");
    }
  }

  for (const Keyphrase& kp : tree.keyphrases()) {
    if (!parents.contains(kp.pos) && !leaf_set.contains(kp.pos)) {
      flag(ViolationKind::kKeyphraseOutsideTree, kp.pos,
           "keyphrase anchored outside the tree");
    }
  }
  return report;
}

void require_valid(const RstTree& tree) {
  const auto report = validate(tree);
  if (!report.ok()) {
    const auto& v = report.violations.front();
    throw Error(ErrorCode::kInvalidTree,
                v.message + " at node " + std::to_string(v.pos.index));
  }
}

namespace {

void collect_inorder(const ParentMap& parents, NodePos p,
                     std::vector<NodePos>& out) {
  if (!parents.contains(p)) {
    out.push_back(p);
    return;
  }
  collect_inorder(parents, p.left(), out);
  collect_inorder(parents, p.right(), out);
}

std::vector<std::string_view> split_tabs(std::string_view line,
                                         std::size_t max_fields) {
  std::vector<std::string_view> fields;
  while (fields.size() + 1 < max_fields) {
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) break;
    fields.push_back(line.substr(0, tab));
    line.remove_prefix(tab + 1);
  }
  fields.push_back(line);
  return fields;
}

[[noreturn]] void fail_line(ErrorCode code, std::size_t line_no,
                            const std::string& what) {
  throw Error(code, "line " + std::to_string(line_no) + ": " + what);
}

NodePos parse_position(std::string_view s, std::size_t line_no) {
  std::uint32_t value = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (s.empty() || ec != std::errc{} || ptr != end) {
    fail_line(ErrorCode::kMalformedLine, line_no,
              "bad position '" + std::string(s) + "'");
  }
  if (value >= kPositionLimit) {
    fail_line(ErrorCode::kMalformedLine, line_no,
              "position " + std::string(s) + " deeper than the maximum depth");
  }
  return NodePos{value};
}

std::string unescape(std::string_view s, std::size_t line_no) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '\\') {
      out.push_back(s[i]);
      continue;
    }
    if (++i == s.size()) {
      fail_line(ErrorCode::kMalformedLine, line_no, "dangling escape");
    }
    switch (s[i]) {
      case 't': out.push_back('\t'); break;
      case 'n': out.push_back('\n'); break;
      case 'r': out.push_back('\r'); break;
      case '\\': out.push_back('\\'); break;
      default:
        fail_line(ErrorCode::kMalformedLine, line_no,
                  std::string("unknown escape \\") + s[i]);
    }
  }
  return out;
}

void write_escaped(std::ostream& out, std::string_view s) {
  for (char c : s) {
    switch (c) {
      case '\t': out << "\\t"; break;
      case '\n': out << "\\n"; break;
      case '\r': out << "\\r"; break;
      case '\\': out << "\\\\"; break;
      default: out << c;
    }
  }
}

}  // namespace

std::vector<NodePos> leaves_in_order(const RstTree& tree) {
  require_valid(tree);
  std::vector<NodePos> out;
  out.reserve(tree.parents().size() + 1);
  collect_inorder(tree.parents(), NodePos{0}, out);
  return out;
}

RstTree parse_tree(std::istream& in) {
  ParentMap parents;
  std::vector<Edu> edus;
  std::vector<Keyphrase> keyphrases;
  std::set<NodePos> seen_edus;

  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line(raw);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;

    const auto tag_end = line.find('\t');
    const auto tag = line.substr(0, tag_end);
    if (tag == "node") {
      const auto f = split_tabs(line, 5);
      if (f.size() != 4) {
        fail_line(ErrorCode::kMalformedLine, line_no,
                  "node records have 4 fields");
      }
      const NodePos pos = parse_position(f[1], line_no);
      const auto rel = parse_relation(f[2]);
      if (!rel) {
        fail_line(ErrorCode::kUnknownRelation, line_no, std::string(f[2]));
      }
      const auto nuc = parse_nuclearity(f[3]);
      if (!nuc) {
        fail_line(ErrorCode::kUnknownNuclearity, line_no, std::string(f[3]));
      }
      if (!parents.emplace(pos, NodeLabel{*rel, *nuc}).second) {
        fail_line(ErrorCode::kDuplicatePosition, line_no,
                  "node " + std::to_string(pos.index) + " repeated");
      }
    } else if (tag == "edu") {
      const auto f = split_tabs(line, 3);
      if (f.size() < 2) {
        fail_line(ErrorCode::kMalformedLine, line_no,
                  "edu records have a position");
      }
      const NodePos pos = parse_position(f[1], line_no);
      if (!seen_edus.insert(pos).second) {
        fail_line(ErrorCode::kDuplicatePosition, line_no,
                  "edu " + std::to_string(pos.index) + " repeated");
      }
      std::optional<std::string> text;
      if (f.size() == 3) text = unescape(f[2], line_no);
      edus.push_back(Edu{pos, std::move(text)});
    } else if (tag == "kp") {
      const auto f = split_tabs(line, 3);
      if (f.size() != 3) {
        fail_line(ErrorCode::kMalformedLine, line_no,
                  "kp records have 3 fields");
      }
      keyphrases.push_back(
          Keyphrase{parse_position(f[1], line_no), unescape(f[2], line_no)});
    } else {
      fail_line(ErrorCode::kMalformedLine, line_no,
                "unknown record type '" + std::string(tag) + "'");
    }
  }
  std::stable_sort(edus.begin(), edus.end(), [](const Edu& a, const Edu& b) {
    return inorder_key(a.pos) < inorder_key(b.pos);
  });
  return RstTree(std::move(parents), std::move(edus), std::move(keyphrases));
}

RstTree parse_tree(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_tree(in);
}

void serialize_tree(const RstTree& tree, std::ostream& out) {
  for (const auto& [pos, label] : tree.parents()) {
    out << "node\t" << pos.index << '\t' << to_string(label.relation) << '\t'
        << to_string(label.nuclearity) << '\n';
  }
  for (const Edu& e : tree.edus()) {
    out << "edu\t" << e.pos.index;
    if (e.text) {
      out << '\t';
      write_escaped(out, *e.text);
    }
    out << '\n';
  }
  for (const Keyphrase& kp : tree.keyphrases()) {
    out << "kp\t" << kp.pos.index << '\t';
    write_escaped(out, kp.phrase);
    out << '\n';
  }
}

std::string serialize_tree(const RstTree& tree) {
  std::ostringstream out;
  serialize_tree(tree, out);
  return out.str();
}

}  // namespace rstkit
