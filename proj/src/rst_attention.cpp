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

#include "rstkit/rst_attention.hpp"

#include <algorithm>
#include <ostream>
#include <string>

#include "rstkit/error.hpp"
#include "rstkit/io_util.hpp"

namespace rstkit {

namespace {

[[noreturn]] void mismatch(const std::string& what) {
  throw Error(ErrorCode::kLayoutMismatch, what);
}

void check_layout(const RstTree& tree, const ContextLayout& layout) {
  std::vector<int> owner(layout.text_start, 0);
  auto claim = [&](std::size_t pos) {
    if (pos >= layout.text_start) {
      mismatch("context position " + std::to_string(pos) +
               " is not before text_start");
    }
    if (owner[pos]++ != 0) {
      mismatch("context position " + std::to_string(pos) + " used twice");
    }
  };
  for (std::size_t s : layout.separators) claim(s);
  for (const RstSlot& s : layout.rst_slots) {
    if (!tree.is_parent(s.node)) {
      mismatch("RST slot for node " + std::to_string(s.node.index) +
               " which is not a parent node");
    }
    claim(s.slot);
  }
  for (const KeyphraseSpan& k : layout.kp_spans) {
    if (!tree.is_parent(k.node) && !tree.is_leaf(k.node)) {
      mismatch("keyphrase anchored at node " + std::to_string(k.node.index) +
               " outside the tree");
    }
    if (k.begin > k.end) mismatch("keyphrase span reversed");
    for (std::size_t p = k.begin; p < k.end; ++p) claim(p);
  }
}

void check_assignment(const RstTree& tree, const TokenAssignment& a) {
  for (std::size_t i = 0; i < a.tokens.size(); ++i) {
    const auto& [idx, leaf] = a.tokens[i];
    if (idx != i) {
      mismatch("assignment entry " + std::to_string(i) + " has token index " +
               std::to_string(idx));
    }
    if (!tree.is_leaf(leaf)) {
      mismatch("token " + std::to_string(idx) + " assigned to node " +
               std::to_string(leaf.index) + " which is not a leaf");
    }
  }
}

std::vector<std::uint8_t> context_row_for(const ContextLayout& layout,
                                          NodePos leaf) {
  std::vector<std::uint8_t> row(layout.text_start, 0);
  for (std::size_t s : layout.separators) row[s] = 1;
  for (const RstSlot& s : layout.rst_slots) {
    if (is_ancestor(s.node, leaf)) row[s.slot] = 1;
  }
  for (const KeyphraseSpan& k : layout.kp_spans) {
    if (k.node == leaf || is_ancestor(k.node, leaf)) {
      std::fill(row.begin() + static_cast<std::ptrdiff_t>(k.begin),
                row.begin() + static_cast<std::ptrdiff_t>(k.end), 1);
    }
  }
  return row;
}

}  // namespace

ContextLayout make_layout(const RstTree& tree) {
  require_valid(tree);
  ContextLayout layout;
  std::size_t next = 0;
  layout.separators.push_back(next++);
  for (const auto& [pos, label] : tree.parents()) {
    layout.rst_slots.push_back(RstSlot{next++, pos});
  }
  for (const Keyphrase& kp : tree.keyphrases()) {
    layout.separators.push_back(next++);
    const std::size_t words = split_whitespace(kp.phrase).size();
    layout.kp_spans.push_back(KeyphraseSpan{next, next + words, kp.pos});
    next += words;
  }
  layout.text_start = next;
  return layout;
}

AttentionMaskSet context_mask(const RstTree& tree, const ContextLayout& layout,
                              const TokenAssignment& assignment) {
  check_layout(tree, layout);
  check_assignment(tree, assignment);
  AttentionMaskSet m(assignment.tokens.size(), layout.text_start);
  for (std::size_t i = 0; i < assignment.tokens.size(); ++i) {
    const auto row = context_row_for(layout, assignment.tokens[i].second);
    std::copy(row.begin(), row.end(), &m(i, 0));
  }
  return m;
}

AttentionMaskSet text_mask(const TokenAssignment& assignment) {
  const std::size_t n = assignment.tokens.size();
  AttentionMaskSet m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) m(i, j) = 1;
  }
  return m;
}

AttentionMaskSet full_mask(const RstTree& tree, const ContextLayout& layout,
                           const TokenAssignment& assignment) {
  const auto ctx = context_mask(tree, layout, assignment);
  const auto txt = text_mask(assignment);
  AttentionMaskSet m(ctx.rows(), ctx.cols() + txt.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < ctx.cols(); ++j) m(i, j) = ctx(i, j);
    for (std::size_t j = 0; j < txt.cols(); ++j) {
      m(i, ctx.cols() + j) = txt(i, j);
    }
  }
  return m;
}

IncrementalMaskBuilder::IncrementalMaskBuilder(const RstTree& tree,
                                               ContextLayout layout)
    : tree_(&tree), layout_(std::move(layout)) {
  check_layout(tree, layout_);
}

std::vector<std::uint8_t> IncrementalMaskBuilder::context_row(
    NodePos leaf) const {
  return context_row_for(layout_, leaf);
}

void IncrementalMaskBuilder::push(NodePos leaf) {
  if (!tree_->is_leaf(leaf)) {
    mismatch("node " + std::to_string(leaf.index) + " is not a leaf");
  }
  auto row = context_row(leaf);
  row.resize(layout_.text_start + rows_.size() + 1, 1);
  rows_.push_back(std::move(row));
}

AttentionMaskSet IncrementalMaskBuilder::snapshot() const {
  const std::size_t n = rows_.size();
  AttentionMaskSet m(n, layout_.text_start + n);
  for (std::size_t i = 0; i < n; ++i) {
    std::copy(rows_[i].begin(), rows_[i].end(), &m(i, 0));
  }
  return m;
}

void write_mask(const AttentionMaskSet& m, std::ostream& out) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out << ' ';
      out << static_cast<int>(m(i, j));
    }
    out << '\n';
  }
}

}  // namespace rstkit
