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

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "rstkit/edu_tracker.hpp"
#include "rstkit/rst_tree.hpp"

namespace rstkit {

struct RstSlot {
  std::size_t slot;
  NodePos node;
};

/// Keyphrase tokens [begin, end) anchored at `node`.
struct KeyphraseSpan {
  std::size_t begin;
  std::size_t end;
  NodePos node;
};

/// Positions of the conditioning prefix. Everything below `text_start` is
/// context; target-text tokens follow it.
struct ContextLayout {
  std::vector<std::size_t> separators;  // <rst> and <kp> marker tokens
  std::vector<RstSlot> rst_slots;
  std::vector<KeyphraseSpan> kp_spans;
  std::size_t text_start = 0;
};

/// "<rst>", one slot per parent node in ascending position, then for each
/// keyphrase "<kp>" followed by one token per whitespace-separated word.
/// Throws kInvalidTree.
ContextLayout make_layout(const RstTree& tree);

/// Binary mask, rows = text tokens, columns = attended positions.
class AttentionMaskSet {
 public:
  AttentionMaskSet() = default;
  AttentionMaskSet(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), bits_(rows * cols, 0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::uint8_t operator()(std::size_t i, std::size_t j) const {
    return bits_[i * cols_ + j];
  }
  std::uint8_t& operator()(std::size_t i, std::size_t j) {
    return bits_[i * cols_ + j];
  }
  std::span<const std::uint8_t> row(std::size_t i) const {
    return std::span<const std::uint8_t>(bits_).subspan(i * cols_, cols_);
  }

  friend bool operator==(const AttentionMaskSet&,
                         const AttentionMaskSet&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::uint8_t> bits_;
};

/**
 * Context columns. For a token at leaf l: the slot of parent node p is
 * attendable iff p is a strict ancestor of l; a keyphrase anchored at q iff
 * q == l or q is an ancestor of l; separators always. Throws
 * kLayoutMismatch when slots, spans or assigned leaves do not belong to the
 * tree, or spans overlap or reach past text_start.
 */
AttentionMaskSet context_mask(const RstTree& tree, const ContextLayout& layout,
                              const TokenAssignment& assignment);

/// Causal lower-triangular ones over the text tokens (diagonal included).
AttentionMaskSet text_mask(const TokenAssignment& assignment);

/// [context_mask | text_mask].
AttentionMaskSet full_mask(const RstTree& tree, const ContextLayout& layout,
                           const TokenAssignment& assignment);

/// Grows the full mask one text token at a time; earlier rows are kept as
/// computed.
class IncrementalMaskBuilder {
 public:
  IncrementalMaskBuilder(const RstTree& tree, ContextLayout layout);

  /// Appends the row for the next text token, assigned to `leaf`.
  void push(NodePos leaf);
  std::size_t size() const { return rows_.size(); }
  AttentionMaskSet snapshot() const;

 private:
  std::vector<std::uint8_t> context_row(NodePos leaf) const;

  const RstTree* tree_;
  ContextLayout layout_;
  std::vector<std::vector<std::uint8_t>> rows_;
};

/// Rows of space-separated 0/1.
void write_mask(const AttentionMaskSet& m, std::ostream& out);

}  // namespace rstkit
