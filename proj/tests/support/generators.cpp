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

#include "generators.hpp"

#include <algorithm>

namespace rstkit::testing {

int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

double uniform_real(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

NodeLabel random_label(Rng& rng) {
  return NodeLabel{
      relation_from_index(uniform_int(rng, 0, kContentRelationCount - 1)),
      nuclearity_from_index(uniform_int(rng, 0, kContentNuclearityCount - 1))};
}

RstTree random_tree(Rng& rng, int parents, int max_depth, double deep_bias,
                    bool with_text) {
  ParentMap nodes;
  nodes.emplace(NodePos{0}, random_label(rng));
  std::vector<NodePos> frontier{NodePos{0}.left(), NodePos{0}.right()};
  auto expandable = [max_depth](NodePos p) {
    return depth(p) < max_depth && p.index < kMaxRstNode;
  };
  while (static_cast<int>(nodes.size()) < parents) {
    std::vector<std::size_t> open;
    for (std::size_t i = 0; i < frontier.size(); ++i) {
      if (expandable(frontier[i])) open.push_back(i);
    }
    if (open.empty()) break;
    std::size_t pick = open[static_cast<std::size_t>(
        uniform_int(rng, 0, static_cast<int>(open.size()) - 1))];
    if (uniform_real(rng, 0.0, 1.0) < deep_bias) {
      pick = *std::max_element(open.begin(), open.end(),
                               [&](std::size_t a, std::size_t b) {
                                 return frontier[a].index < frontier[b].index;
                               });
    }
    const NodePos p = frontier[pick];
    frontier.erase(frontier.begin() + static_cast<std::ptrdiff_t>(pick));
    nodes.emplace(p, random_label(rng));
    frontier.push_back(p.left());
    frontier.push_back(p.right());
  }
  RstTree shape = RstTree::from_parents(nodes);
  if (!with_text) return shape;
  std::vector<Edu> edus = shape.edus();
  for (auto& e : edus) {
    e.text = "edu " + std::to_string(e.pos.index);
    if (uniform_int(rng, 0, 4) == 0) e.text = "";
    if (uniform_int(rng, 0, 6) == 0) e.text = "tab\there\back";
  }
  return RstTree(nodes, edus);
}

RstTree with_random_keyphrases(Rng& rng, const RstTree& tree, int count) {
  std::vector<NodePos> all;
  for (const auto& [p, l] : tree.parents()) all.push_back(p);
  for (const auto& e : tree.edus()) all.push_back(e.pos);
  std::vector<Keyphrase> kps;
  for (int i = 0; i < count; ++i) {
    const NodePos at = all[static_cast<std::size_t>(
        uniform_int(rng, 0, static_cast<int>(all.size()) - 1))];
    std::string phrase = "w" + std::to_string(i);
    for (int k = uniform_int(rng, 0, 2); k > 0; --k) phrase += " x";
    kps.push_back(Keyphrase{at, phrase});
  }
  return RstTree(tree.parents(), tree.edus(), kps);
}

TokenAssignment random_assignment(Rng& rng, const RstTree& tree,
                                  std::size_t tokens) {
  const auto leaves = leaves_in_order(tree);
  TokenAssignment a;
  std::size_t leaf = 0;
  for (std::size_t t = 0; t < tokens; ++t) {
    if (t > 0 && leaf + 1 < leaves.size() && uniform_int(rng, 0, 2) == 0) {
      leaf += static_cast<std::size_t>(
          uniform_int(rng, 1, std::min<int>(2, static_cast<int>(
                                                   leaves.size() - leaf - 1))));
    }
    a.tokens.emplace_back(t, leaves[leaf]);
  }
  return a;
}

Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols,
                     double scale) {
  Matrix m(rows, cols);
  for (double& x : m.data()) x = uniform_real(rng, -scale, scale);
  return m;
}

AttentionMaskSet random_mask(Rng& rng, std::size_t rows, std::size_t cols,
                             double density) {
  AttentionMaskSet m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    bool any = false;
    for (std::size_t j = 0; j < cols; ++j) {
      m(i, j) = uniform_real(rng, 0.0, 1.0) < density ? 1 : 0;
      any = any || m(i, j);
    }
    if (!any) {
      m(i, static_cast<std::size_t>(
               uniform_int(rng, 0, static_cast<int>(cols) - 1))) = 1;
    }
  }
  return m;
}

std::vector<TaggedToken> random_tagged(Rng& rng, std::size_t tokens,
                                       std::size_t vocabulary) {
  static constexpr PosTag kTags[] = {PosTag::NOUN, PosTag::ADJ, PosTag::VERB,
                                     PosTag::PROPN, PosTag::DET, PosTag::ADP,
                                     PosTag::PUNCT};
  std::vector<TaggedToken> out;
  std::size_t sentence = 0;
  for (std::size_t i = 0; i < tokens; ++i) {
    TaggedToken t;
    const auto w = static_cast<std::size_t>(
        uniform_int(rng, 0, static_cast<int>(vocabulary) - 1));
    t.lemma = "w" + std::to_string(w);
    t.surface = t.lemma;
    t.pos = kTags[uniform_int(rng, 0, 6)];
    t.offset = i;
    t.sentence = sentence;
    if (t.pos == PosTag::PUNCT) ++sentence;
    out.push_back(t);
  }
  return out;
}

}  // namespace rstkit::testing
