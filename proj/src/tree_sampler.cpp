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

#include "rstkit/tree_sampler.hpp"

#include <cmath>
#include <deque>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "rstkit/error.hpp"
#include "rstkit/io_util.hpp"

namespace rstkit {

namespace {

constexpr std::string_view kTableMagic = "# rstkit-conditional-table\tv1";

Distribution uniform_distribution() {
  Distribution d;
  d.fill(1.0 / kOutcomeCount);
  return d;
}

void check_distribution(const Distribution& d, const std::string& what) {
  double total = 0.0;
  for (double p : d) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw Error(ErrorCode::kInvalidArgument,
                  what + " has a negative or non-finite probability");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidArgument,
                what + " sums to " + format_double(total));
  }
}

Distribution normalise(const std::array<std::size_t, kOutcomeCount>& counts,
                       double alpha, bool allow_leaf) {
  const int outcomes = allow_leaf ? kOutcomeCount : kOutcomeCount - 1;
  double total = 0.0;
  for (int i = 0; i < kOutcomeCount; ++i) {
    if (allow_leaf || i != kLeafOutcome) total += static_cast<double>(counts[i]);
  }
  const double denom = total + alpha * outcomes;
  Distribution d{};
  for (int i = 0; i < kOutcomeCount; ++i) {
    if (!allow_leaf && i == kLeafOutcome) continue;
    d[i] = (static_cast<double>(counts[i]) + alpha) / denom;
  }
  return d;
}

std::string_view side_name(Side s) { return s == Side::Left ? "L" : "R"; }

// Index of the first positive weight whose running sum exceeds u * total.
int draw_index(std::span<const double> weights, SamplerRng& rng) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  const double u = uniform01(rng) * total;
  double acc = 0.0;
  int last_positive = -1;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    acc += weights[i];
    last_positive = static_cast<int>(i);
    if (u < acc) return last_positive;
  }
  return last_positive;  // u rounded up to total
}

Distribution boosted(const Distribution& base,
                     const std::map<Relation, double>& boosts) {
  Distribution w = base;
  if (boosts.empty()) return w;
  for (int i = 1; i < kOutcomeCount; ++i) {
    const auto it = boosts.find(outcome_from_index(i).label->relation);
    if (it != boosts.end()) w[i] *= it->second;
  }
  return w;
}

void check_boosts(const std::map<Relation, double>& boosts) {
  for (const auto& [rel, factor] : boosts) {
    if (!(factor > 0.0) || !std::isfinite(factor) || rel == Relation::Null) {
      throw Error(ErrorCode::kInvalidConstraint,
                  "boost for " + std::string(to_string(rel)) +
                      " must be a positive finite factor on a content relation");
    }
  }
}

}  // namespace

int outcome_index(const ChildOutcome& o) {
  if (o.is_leaf()) return kLeafOutcome;
  const auto& l = *o.label;
  if (l.relation == Relation::Null || l.nuclearity == Nuclearity::Null) {
    throw Error(ErrorCode::kInvalidArgument, "Null label is not an outcome");
  }
  return 1 + index_of(l.relation) * kContentNuclearityCount +
         index_of(l.nuclearity);
}

ChildOutcome outcome_from_index(int i) {
  if (i < 0 || i >= kOutcomeCount) {
    throw Error(ErrorCode::kInvalidArgument,
                "outcome index " + std::to_string(i));
  }
  if (i == kLeafOutcome) return ChildOutcome{};
  const int k = i - 1;
  return ChildOutcome{NodeLabel{relation_from_index(k / kContentNuclearityCount),
                                nuclearity_from_index(k % kContentNuclearityCount)}};
}

std::string outcome_name(int i) {
  const auto o = outcome_from_index(i);
  if (o.is_leaf()) return "LEAF";
  return std::string(to_string(o.label->relation)) + ":" +
         std::string(to_string(o.label->nuclearity));
}

std::optional<int> parse_outcome(std::string_view s) {
  if (s == "LEAF") return kLeafOutcome;
  const auto colon = s.find(':');
  if (colon == std::string_view::npos) return std::nullopt;
  const auto rel = parse_relation(s.substr(0, colon));
  const auto nuc = parse_nuclearity(s.substr(colon + 1));
  if (!rel || !nuc || *rel == Relation::Null || *nuc == Nuclearity::Null) {
    return std::nullopt;
  }
  return outcome_index(ChildOutcome{NodeLabel{*rel, *nuc}});
}

ConditionalTable::ConditionalTable(double alpha, Distribution root,
                                   std::map<CellKey, Distribution> cells,
                                   std::map<MarginalKey, Distribution> marginals,
                                   std::map<CellKey, std::size_t> observations)
    : alpha_(alpha),
      root_(root),
      cells_(std::move(cells)),
      marginals_(std::move(marginals)),
      observations_(std::move(observations)),
      uniform_(uniform_distribution()) {
  check_distribution(root_, "root distribution");
  if (root_[kLeafOutcome] != 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "root cannot be a leaf");
  }
  for (const auto& [key, d] : cells_) check_distribution(d, "cell");
  for (const auto& [key, d] : marginals_) check_distribution(d, "marginal");
}

const Distribution& ConditionalTable::lookup(const CellKey& key) const {
  if (auto it = cells_.find(key); it != cells_.end()) return it->second;
  if (auto it = marginals_.find(MarginalKey{key.parent_depth, key.side});
      it != marginals_.end()) {
    return it->second;
  }
  return uniform_;
}

std::size_t ConditionalTable::observations(const CellKey& key) const {
  auto it = observations_.find(key);
  return it == observations_.end() ? 0 : it->second;
}

void ConditionalTable::save(std::ostream& out) const {
  out << kTableMagic << '\n';
  out << "alpha\t" << format_double(alpha_) << '\n';
  auto emit = [&out](std::string_view keys, const Distribution& d) {
    for (int i = 0; i < kOutcomeCount; ++i) {
      if (d[i] == 0.0) continue;
      out << keys << '\t' << outcome_name(i) << '\t' << format_double(d[i])
          << '\n';
    }
  };
  emit("root\t*\t*\t*\t*", root_);
  for (const auto& [key, d] : marginals_) {
    std::ostringstream keys;
    keys << "marginal\t*\t*\t" << key.parent_depth << '\t'
         << side_name(key.side);
    emit(keys.str(), d);
  }
  for (const auto& [key, d] : cells_) {
    std::ostringstream keys;
    keys << "cell\t" << to_string(key.parent_relation) << '\t'
         << to_string(key.parent_nuclearity) << '\t' << key.parent_depth
         << '\t' << side_name(key.side);
    emit(keys.str(), d);
    out << "obs\t" << to_string(key.parent_relation) << '\t'
        << to_string(key.parent_nuclearity) << '\t' << key.parent_depth
        << '\t' << side_name(key.side) << '\t' << observations(key) << '\n';
  }
}

ConditionalTable ConditionalTable::load(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTableMagic) {
    throw Error(ErrorCode::kMalformedLine, "missing table header");
  }
  double alpha = 0.0;
  Distribution root{};
  std::map<CellKey, Distribution> cells;
  std::map<MarginalKey, Distribution> marginals;
  std::map<CellKey, std::size_t> obs;
  std::size_t line_no = 1;

  auto fields_of = [](const std::string& s) {
    std::vector<std::string> f;
    std::size_t start = 0;
    while (true) {
      const auto tab = s.find('\t', start);
      f.push_back(s.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    return f;
  };
  auto fail = [&line_no](const std::string& what) {
    throw Error(ErrorCode::kMalformedLine,
                "table line " + std::to_string(line_no) + ": " + what);
  };
  auto parse_side = [&](const std::string& s) {
    if (s == "L") return Side::Left;
    if (s == "R") return Side::Right;
    fail("bad side '" + s + "'");
    return Side::Left;
  };
  auto parse_depth = [&](const std::string& s) {
    int d = -1;
    try {
      std::size_t used = 0;
      d = std::stoi(s, &used);
      if (used != s.size()) d = -1;
    } catch (const std::exception&) {
    }
    if (d < 0 || d > kMaxTreeDepth) fail("bad depth '" + s + "'");
    return d;
  };
  auto cell_key = [&](const std::vector<std::string>& f) {
    const auto rel = parse_relation(f[1]);
    const auto nuc = parse_nuclearity(f[2]);
    if (!rel) throw Error(ErrorCode::kUnknownRelation, f[1]);
    if (!nuc) throw Error(ErrorCode::kUnknownNuclearity, f[2]);
    return CellKey{*rel, *nuc, parse_depth(f[3]), parse_side(f[4])};
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto f = fields_of(line);
    if (f[0] == "alpha" && f.size() == 2) {
      alpha = parse_double(f[1]);
      continue;
    }
    if (f[0] == "obs" && f.size() == 6) {
      obs[cell_key(f)] = static_cast<std::size_t>(std::stoull(f[5]));
      continue;
    }
    if (f.size() != 7) fail("expected 7 fields");
    const auto outcome = parse_outcome(f[5]);
    if (!outcome) fail("bad outcome '" + f[5] + "'");
    const double p = parse_double(f[6]);
    if (f[0] == "root") {
      root[*outcome] = p;
    } else if (f[0] == "marginal") {
      MarginalKey key{parse_depth(f[3]), parse_side(f[4])};
      marginals.try_emplace(key, Distribution{}).first->second[*outcome] = p;
    } else if (f[0] == "cell") {
      cells.try_emplace(cell_key(f), Distribution{}).first->second[*outcome] =
          p;
    } else {
      fail("unknown record '" + f[0] + "'");
    }
  }
  return ConditionalTable(alpha, root, std::move(cells), std::move(marginals),
                          std::move(obs));
}

ConditionalTable fit(std::span<const RstTree> corpus, double alpha) {
  if (corpus.empty()) throw Error(ErrorCode::kEmptyCorpus, "no trees to fit");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw Error(ErrorCode::kInvalidArgument, "smoothing must be >= 0");
  }
  using Counts = std::array<std::size_t, kOutcomeCount>;
  Counts root_counts{};
  std::map<CellKey, Counts> cell_counts;
  std::map<MarginalKey, Counts> marginal_counts;

  for (const RstTree& tree : corpus) {
    require_valid(tree);
    const auto& parents = tree.parents();
    ++root_counts[outcome_index(ChildOutcome{parents.at(NodePos{0})})];
    for (const auto& [pos, label] : parents) {
      const int d = depth(pos);
      for (Side side : {Side::Left, Side::Right}) {
        const NodePos child = side == Side::Left ? pos.left() : pos.right();
        ChildOutcome o;
        if (auto it = parents.find(child); it != parents.end()) {
          o.label = it->second;
        }
        const int idx = outcome_index(o);
        ++cell_counts[CellKey{label.relation, label.nuclearity, d, side}][idx];
        ++marginal_counts[MarginalKey{d, side}][idx];
      }
    }
  }

  std::map<CellKey, Distribution> cells;
  std::map<CellKey, std::size_t> obs;
  for (const auto& [key, counts] : cell_counts) {
    cells.emplace(key, normalise(counts, alpha, true));
    obs.emplace(key, std::accumulate(counts.begin(), counts.end(),
                                     std::size_t{0}));
  }
  std::map<MarginalKey, Distribution> marginals;
  for (const auto& [key, counts] : marginal_counts) {
    marginals.emplace(key, normalise(counts, alpha, true));
  }
  return ConditionalTable(alpha, normalise(root_counts, alpha, false),
                          std::move(cells), std::move(marginals),
                          std::move(obs));
}

double uniform01(SamplerRng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

ChildOutcome sample_child(const ConditionalTable& table, NodeLabel parent,
                          NodePos parent_pos, Side side, SamplerRng& rng,
                          const std::map<Relation, double>& boosts) {
  check_boosts(boosts);
  const auto& base = table.lookup(
      CellKey{parent.relation, parent.nuclearity, depth(parent_pos), side});
  const Distribution w = boosted(base, boosts);
  return outcome_from_index(draw_index(w, rng));
}

namespace {

bool can_expand(NodePos pos, int max_depth) {
  return depth(pos) < max_depth && pos.index < kMaxRstNode;
}

class CapacityMemo {
 public:
  explicit CapacityMemo(int max_depth)
      : max_depth_(max_depth), memo_(kPositionLimit, 0) {}

  std::size_t operator()(NodePos pos) {
    auto& slot = memo_[pos.index];
    if (slot == 0) {
      slot = can_expand(pos, max_depth_)
                 ? (*this)(pos.left()) + (*this)(pos.right())
                 : 1;
    }
    return slot;
  }

 private:
  int max_depth_;
  std::vector<std::size_t> memo_;
};

void check_constraints(const SamplerConstraints& c) {
  if (c.max_depth < 1 || c.max_depth > kMaxTreeDepth) {
    throw Error(ErrorCode::kInvalidConstraint,
                "max_depth must be in [1, " + std::to_string(kMaxTreeDepth) +
                    "]");
  }
  if (c.target_edu_count && *c.target_edu_count < 2) {
    throw Error(ErrorCode::kInvalidConstraint,
                "a tree has at least 2 EDUs; target was " +
                    std::to_string(*c.target_edu_count));
  }
  check_boosts(c.relation_boosts);
}

}  // namespace

std::size_t leaf_capacity(int max_depth) {
  return CapacityMemo(max_depth)(NodePos{0});
}

RstTree sample_tree(const ConditionalTable& table,
                    const SamplerConstraints& constraints, SamplerRng& rng) {
  check_constraints(constraints);
  CapacityMemo capacity(constraints.max_depth);
  const auto target = constraints.target_edu_count;
  if (target && static_cast<std::size_t>(*target) > capacity(NodePos{0})) {
    throw Error(ErrorCode::kUnreachableTarget,
                std::to_string(*target) + " EDUs do not fit within depth " +
                    std::to_string(constraints.max_depth));
  }
  const auto& boosts = constraints.relation_boosts;

  ParentMap parents;
  const Distribution root_w = boosted(table.root(), boosts);
  parents.emplace(NodePos{0},
                  *outcome_from_index(draw_index(root_w, rng)).label);

  struct Slot {
    NodePos pos;
    NodeLabel parent;
  };
  std::deque<Slot> frontier;
  frontier.push_back({NodePos{0}.left(), parents.at(NodePos{0})});
  frontier.push_back({NodePos{0}.right(), parents.at(NodePos{0})});

  // Leaves fixed so far, and the most leaves still reachable.
  std::size_t leaves = 0;
  std::size_t max_leaves = capacity(NodePos{0});

  while (!frontier.empty()) {
    const Slot slot = frontier.front();
    const NodePos parent_pos = parent_of(slot.pos);
    const Side side = slot.pos.is_left_child() ? Side::Left : Side::Right;
    const std::size_t slot_cap = capacity(slot.pos);

    // Turning this slot into a leaf drops (slot_cap - 1) reachable leaves;
    // expanding it adds one to the minimum (every open slot ends as >= 1).
    const std::size_t min_leaves = leaves + frontier.size();
    bool leaf_ok = true;
    bool expand_ok = can_expand(slot.pos, constraints.max_depth);
    if (target) {
      const auto t = static_cast<std::size_t>(*target);
      leaf_ok = max_leaves - slot_cap + 1 >= t;
      expand_ok = expand_ok && min_leaves + 1 <= t;
    }

    Distribution w = boosted(
        table.lookup(CellKey{slot.parent.relation, slot.parent.nuclearity,
                             depth(parent_pos), side}),
        boosts);
    if (!leaf_ok) w[kLeafOutcome] = 0.0;
    if (!expand_ok) std::fill(w.begin() + 1, w.end(), 0.0);
    if (std::accumulate(w.begin(), w.end(), 0.0) <= 0.0) {
      // The table gives no mass to any feasible outcome: draw uniformly
      // among the feasible ones instead.
      w.fill(0.0);
      if (leaf_ok) w[kLeafOutcome] = 1.0;
      if (expand_ok) std::fill(w.begin() + 1, w.end(), 1.0);
    }

    const ChildOutcome o = outcome_from_index(draw_index(w, rng));
    frontier.pop_front();
    if (o.is_leaf()) {
      ++leaves;
      max_leaves -= slot_cap - 1;
    } else {
      parents.emplace(slot.pos, *o.label);
      frontier.push_back({slot.pos.left(), *o.label});
      frontier.push_back({slot.pos.right(), *o.label});
    }
  }
  return RstTree::from_parents(std::move(parents));
}

RstTree sample_tree(const ConditionalTable& table,
                    const SamplerConstraints& constraints) {
  SamplerRng rng(constraints.seed);
  return sample_tree(table, constraints, rng);
}

}  // namespace rstkit
