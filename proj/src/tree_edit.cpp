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

#include "rstkit/tree_edit.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <ostream>
#include <string>
#include <unordered_map>

#include "rstkit/error.hpp"

namespace rstkit {

std::string_view to_string(TedVariant v) {
  switch (v) {
    case TedVariant::kSimple: return "simple";
    case TedVariant::kComplex: return "complex";
    case TedVariant::kComplete: return "complete";
  }
  return "?";
}

std::optional<TedVariant> parse_variant(std::string_view s) {
  if (s == "simple") return TedVariant::kSimple;
  if (s == "complex") return TedVariant::kComplex;
  if (s == "complete") return TedVariant::kComplete;
  return std::nullopt;
}

std::string_view to_string(EditKind k) {
  switch (k) {
    case EditKind::kRelabelRelation: return "relabel-relation";
    case EditKind::kRelabelNuclearity: return "relabel-nuclearity";
    case EditKind::kSiblingMove: return "sibling-move";
    case EditKind::kDelete: return "delete";
    case EditKind::kInsert: return "insert";
  }
  return "?";
}

int edit_cost(EditKind k) {
  switch (k) {
    case EditKind::kRelabelRelation:
    case EditKind::kRelabelNuclearity:
    case EditKind::kSiblingMove:
      return 1;
    case EditKind::kDelete:
    case EditKind::kInsert:
      return 3;
  }
  return 0;
}

namespace {

constexpr int kNodeCost = 3;

enum class Fate { kStay, kMove, kDelete, kEmpty };

bool compares_nuclearity(TedVariant v) { return v != TedVariant::kSimple; }
bool compares_relation(TedVariant v) { return v == TedVariant::kComplete; }

/**
 * Exact solver. Every node outside a "stay" chain drags its whole subtree
 * with it: a deleted or moved node must be childless first, and anything
 * placed under an inserted or moved-in node has to be inserted. So the
 * optimum decomposes into independent decisions per sibling pair, taken
 * under a parent that stays in place.
 */
class TedSolver {
 public:
  TedSolver(const ParentMap& ref, const ParentMap& hyp, TedVariant variant)
      : ref_(ref), hyp_(hyp), variant_(variant) {
    for (const auto& [pos, l] : ref_) add_to_ancestors(ref_count_, pos);
    for (const auto& [pos, l] : hyp_) add_to_ancestors(hyp_count_, pos);
  }

  int solve() { return solve_group(kRootGroup); }

  std::vector<EditOp> script() {
    std::vector<EditOp> ops;
    emit_group(kRootGroup, ops);
    auto rank = [](EditKind k) {
      switch (k) {
        case EditKind::kDelete: return 0;
        case EditKind::kSiblingMove: return 1;
        case EditKind::kRelabelRelation:
        case EditKind::kRelabelNuclearity: return 2;
        case EditKind::kInsert: return 3;
      }
      return 4;
    };
    std::stable_sort(ops.begin(), ops.end(),
                     [&](const EditOp& a, const EditOp& b) {
                       if (rank(a.kind) != rank(b.kind)) {
                         return rank(a.kind) < rank(b.kind);
                       }
                       // Deletes run bottom-up, everything else top-down.
                       if (a.kind == EditKind::kDelete) {
                         return a.position > b.position;
                       }
                       return a.position < b.position;
                     });
    return ops;
  }

 private:
  static constexpr std::uint32_t kRootGroup =
      std::numeric_limits<std::uint32_t>::max();

  struct Choice {
    std::array<Fate, 2> fates{Fate::kEmpty, Fate::kEmpty};
  };

  static void add_to_ancestors(std::unordered_map<std::uint32_t, int>& counts,
                               NodePos pos) {
    ++counts[pos.index];
    for (NodePos a : ancestors_of(pos)) ++counts[a.index];
  }

  static int count(const std::unordered_map<std::uint32_t, int>& counts,
                   NodePos pos) {
    auto it = counts.find(pos.index);
    return it == counts.end() ? 0 : it->second;
  }

  bool in_ref(NodePos p) const { return ref_.contains(p); }
  bool in_hyp(NodePos p) const { return hyp_.contains(p); }

  // Deleting every reference node strictly below / at-and-below p.
  int ref_below(NodePos p) const {
    return kNodeCost * (count(ref_count_, p) - (in_ref(p) ? 1 : 0));
  }
  int hyp_below(NodePos p) const {
    return kNodeCost * (count(hyp_count_, p) - (in_hyp(p) ? 1 : 0));
  }

  int relabel_cost(NodePos from, NodePos to) const {
    const NodeLabel& a = ref_.at(from);
    const NodeLabel& b = hyp_.at(to);
    int c = 0;
    if (compares_nuclearity(variant_) && a.nuclearity != b.nuclearity) ++c;
    if (compares_relation(variant_) && a.relation != b.relation) ++c;
    return c;
  }

  std::vector<NodePos> members(std::uint32_t group) const {
    if (group == kRootGroup) return {NodePos{0}};
    const NodePos p{group};
    return {p.left(), p.right()};
  }

  // Children of p, given that p's own node (or absence) is settled in place.
  int below(NodePos p) {
    if (p.index >= kMaxRstNode) return 0;
    if (count(ref_count_, p) - (in_ref(p) ? 1 : 0) == 0 &&
        count(hyp_count_, p) - (in_hyp(p) ? 1 : 0) == 0) {
      return 0;
    }
    return solve_group(p.index);
  }

  std::vector<Fate> options(NodePos x, std::optional<NodePos> sib) const {
    if (!in_ref(x)) return {Fate::kEmpty};
    std::vector<Fate> out;
    if (in_hyp(x)) out.push_back(Fate::kStay);
    if (sib && in_hyp(*sib)) out.push_back(Fate::kMove);
    out.push_back(Fate::kDelete);
    return out;
  }

  // Cost of one member given the fates of the whole group.
  int member_cost(NodePos x, Fate fate, std::optional<NodePos> sib,
                  std::optional<Fate> sib_fate) {
    int c = 0;
    switch (fate) {
      case Fate::kStay: c += relabel_cost(x, x) + below(x); break;
      case Fate::kMove:
        c += edit_cost(EditKind::kSiblingMove) + relabel_cost(x, *sib) +
             ref_below(x);
        break;
      case Fate::kDelete: c += kNodeCost + ref_below(x); break;
      case Fate::kEmpty: c += in_hyp(x) ? ref_below(x) : below(x); break;
    }
    if (in_hyp(x) && fate != Fate::kStay) {
      const bool moved_in = sib_fate && *sib_fate == Fate::kMove;
      c += (moved_in ? 0 : kNodeCost) + hyp_below(x);
    }
    if (!in_hyp(x) && (fate == Fate::kMove || fate == Fate::kDelete)) {
      c += hyp_below(x);
    }
    return c;
  }

  int solve_group(std::uint32_t group) {
    if (auto it = memo_.find(group); it != memo_.end()) return it->second;
    const auto m = members(group);
    int best = std::numeric_limits<int>::max();
    Choice best_choice;
    if (m.size() == 1) {
      for (Fate f : options(m[0], std::nullopt)) {
        const int c = member_cost(m[0], f, std::nullopt, std::nullopt);
        if (c < best) {
          best = c;
          best_choice.fates[0] = f;
        }
      }
    } else {
      for (Fate fa : options(m[0], m[1])) {
        for (Fate fb : options(m[1], m[0])) {
          if (fa == Fate::kMove && (fb == Fate::kMove || fb == Fate::kStay)) {
            continue;
          }
          if (fb == Fate::kMove && fa == Fate::kStay) continue;
          const int c = member_cost(m[0], fa, m[1], fb) +
                        member_cost(m[1], fb, m[0], fa);
          if (c < best) {
            best = c;
            best_choice.fates = {fa, fb};
          }
        }
      }
    }
    memo_[group] = best;
    choices_[group] = best_choice;
    return best;
  }

  void push_relabels(NodePos from, NodePos at, std::vector<EditOp>& ops) const {
    const NodeLabel& a = ref_.at(from);
    const NodeLabel& b = hyp_.at(at);
    if (compares_relation(variant_) && a.relation != b.relation) {
      ops.push_back(EditOp{EditKind::kRelabelRelation, at, at, b,
                           edit_cost(EditKind::kRelabelRelation)});
    }
    if (compares_nuclearity(variant_) && a.nuclearity != b.nuclearity) {
      ops.push_back(EditOp{EditKind::kRelabelNuclearity, at, at, b,
                           edit_cost(EditKind::kRelabelNuclearity)});
    }
  }

  void delete_under(NodePos p, bool include_self,
                    std::vector<EditOp>& ops) const {
    for (const auto& [pos, label] : ref_) {
      if ((include_self && pos == p) || is_ancestor(p, pos)) {
        ops.push_back(EditOp{EditKind::kDelete, pos, pos, label,
                             edit_cost(EditKind::kDelete)});
      }
    }
  }

  void insert_under(NodePos p, bool include_self,
                    std::vector<EditOp>& ops) const {
    for (const auto& [pos, label] : hyp_) {
      if ((include_self && pos == p) || is_ancestor(p, pos)) {
        ops.push_back(EditOp{EditKind::kInsert, pos, pos, label,
                             edit_cost(EditKind::kInsert)});
      }
    }
  }

  void emit_below(NodePos p, std::vector<EditOp>& ops) {
    // Groups with nothing below them were never solved and emit nothing.
    if (choices_.contains(p.index)) emit_group(p.index, ops);
  }

  void emit_group(std::uint32_t group, std::vector<EditOp>& ops) {
    const auto m = members(group);
    const Choice& choice = choices_.at(group);
    for (std::size_t k = 0; k < m.size(); ++k) {
      const NodePos x = m[k];
      const std::optional<NodePos> sib =
          m.size() == 2 ? std::optional<NodePos>(m[1 - k]) : std::nullopt;
      const Fate fate = choice.fates[k];
      switch (fate) {
        case Fate::kStay:
          push_relabels(x, x, ops);
          emit_below(x, ops);
          break;
        case Fate::kMove:
          delete_under(x, false, ops);
          ops.push_back(EditOp{EditKind::kSiblingMove, x, *sib, ref_.at(x),
                               edit_cost(EditKind::kSiblingMove)});
          push_relabels(x, *sib, ops);
          break;
        case Fate::kDelete: delete_under(x, true, ops); break;
        case Fate::kEmpty:
          if (in_hyp(x)) {
            delete_under(x, false, ops);
          } else {
            emit_below(x, ops);
          }
          break;
      }
      if (in_hyp(x) && fate != Fate::kStay) {
        const bool moved_in =
            sib && choice.fates[1 - k] == Fate::kMove;
        insert_under(x, !moved_in, ops);
      }
      if (!in_hyp(x) && (fate == Fate::kMove || fate == Fate::kDelete)) {
        insert_under(x, false, ops);
      }
    }
  }

  const ParentMap& ref_;
  const ParentMap& hyp_;
  TedVariant variant_;
  std::unordered_map<std::uint32_t, int> ref_count_;
  std::unordered_map<std::uint32_t, int> hyp_count_;
  std::unordered_map<std::uint32_t, int> memo_;
  std::unordered_map<std::uint32_t, Choice> choices_;
};

bool same_label(const NodeLabel& a, const NodeLabel& b, TedVariant v) {
  if (compares_nuclearity(v) && a.nuclearity != b.nuclearity) return false;
  if (compares_relation(v) && a.relation != b.relation) return false;
  return true;
}

[[noreturn]] void inapplicable(const EditOp& op, const std::string& why) {
  throw Error(ErrorCode::kInapplicableOp,
              std::string(to_string(op.kind)) + " at " +
                  std::to_string(op.position.index) + ": " + why);
}

}  // namespace

TedReport ted_collections(const ParentMap& reference,
                          const ParentMap& hypothesis, TedVariant variant) {
  if (reference.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "reference has no parent nodes to normalise by");
  }
  TedSolver solver(reference, hypothesis, variant);
  TedReport report;
  report.variant = variant;
  report.raw_cost = solver.solve();
  report.script = solver.script();
  report.normalizer = kNodeCost * static_cast<int>(reference.size());
  report.normalized =
      static_cast<double>(report.raw_cost) / report.normalizer;
  return report;
}

TedReport ted(const RstTree& reference, const RstTree& hypothesis,
              TedVariant variant) {
  require_valid(reference);
  require_valid(hypothesis);
  return ted_collections(reference.parents(), hypothesis.parents(), variant);
}

RstTree apply_script(const RstTree& tree, std::span<const EditOp> script) {
  ParentMap nodes = tree.parents();
  auto has_children = [&nodes](NodePos p) {
    return nodes.contains(p.left()) || nodes.contains(p.right());
  };
  for (const EditOp& op : script) {
    const NodePos p = op.position;
    switch (op.kind) {
      case EditKind::kRelabelRelation:
      case EditKind::kRelabelNuclearity: {
        auto it = nodes.find(p);
        if (it == nodes.end()) inapplicable(op, "no node there");
        if (op.kind == EditKind::kRelabelRelation) {
          it->second.relation = op.label.relation;
        } else {
          it->second.nuclearity = op.label.nuclearity;
        }
        break;
      }
      case EditKind::kSiblingMove: {
        auto it = nodes.find(p);
        if (it == nodes.end()) inapplicable(op, "no node there");
        if (p.is_root() || op.target != sibling_of(p)) {
          inapplicable(op, "target is not the sibling position");
        }
        if (has_children(p)) inapplicable(op, "node has children");
        if (nodes.contains(op.target)) inapplicable(op, "sibling is occupied");
        const NodeLabel label = it->second;
        nodes.erase(it);
        nodes.emplace(op.target, label);
        break;
      }
      case EditKind::kDelete:
        if (!nodes.contains(p)) inapplicable(op, "no node there");
        if (has_children(p)) inapplicable(op, "node has children");
        nodes.erase(p);
        break;
      case EditKind::kInsert:
        if (nodes.contains(p)) inapplicable(op, "position is occupied");
        if (p.index >= kMaxRstNode) inapplicable(op, "position out of range");
        if (!p.is_root() && !nodes.contains(parent_of(p))) {
          inapplicable(op, "parent is missing");
        }
        nodes.emplace(p, op.label);
        break;
    }
  }
  return RstTree::from_parents(std::move(nodes));
}

bool equivalent(const ParentMap& a, const ParentMap& b, TedVariant variant) {
  if (a.size() != b.size()) return false;
  return std::equal(a.begin(), a.end(), b.begin(), [&](const auto& x,
                                                       const auto& y) {
    return x.first == y.first && same_label(x.second, y.second, variant);
  });
}

void write_script(std::span<const EditOp> script, std::ostream& out) {
  for (const EditOp& op : script) {
    out << to_string(op.kind) << '\t' << op.position.index << '\t'
        << op.target.index << '\t' << to_string(op.label.relation) << '\t'
        << to_string(op.label.nuclearity) << '\t' << op.cost << '\n';
  }
}

}  // namespace rstkit
