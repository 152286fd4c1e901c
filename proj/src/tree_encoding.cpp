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

#include "rstkit/tree_encoding.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "rstkit/error.hpp"

namespace rstkit {

PathEncoding encode_position(NodePos pos) {
  const int d = depth(pos);
  if (d > kMaxTreeDepth) {
    throw Error(ErrorCode::kDepthExceeded,
                "position " + std::to_string(pos.index) + " has depth " +
                    std::to_string(d));
  }
  PathEncoding enc{};
  // Fill from the deepest step upwards.
  for (int step = d - 1; step >= 0; --step) {
    enc[static_cast<std::size_t>(step)] =
        pos.is_left_child() ? kLeftStep : kRightStep;
    pos = parent_of(pos);
  }
  return enc;
}

EncodedTree encode_tree(const RstTree& tree) {
  require_valid(tree);
  EncodedTree out;
  const std::size_t n = tree.parents().size();
  out.positions.reserve(n);
  out.relation_ids.reserve(n);
  out.nuclearity_ids.reserve(n);
  out.path_vectors.reserve(n);
  for (const auto& [pos, label] : tree.parents()) {
    out.positions.push_back(pos);
    out.relation_ids.push_back(index_of(label.relation));
    out.nuclearity_ids.push_back(index_of(label.nuclearity));
    out.path_vectors.push_back(encode_position(pos));
  }
  return out;
}

double gelu(double x) {
  return 0.5 * x * std::erfc(-x / std::numbers::sqrt2);
}

ProjectionWeights::ProjectionWeights(std::size_t hidden)
    : matrix_(kMaxTreeDepth * hidden, 0.0), bias_(hidden, 0.0) {}

ProjectionWeights::ProjectionWeights(std::vector<double> matrix,
                                     std::vector<double> bias)
    : matrix_(std::move(matrix)), bias_(std::move(bias)) {
  if (matrix_.size() != kMaxTreeDepth * bias_.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                "projection matrix has " + std::to_string(matrix_.size()) +
                    " entries, expected " +
                    std::to_string(kMaxTreeDepth * bias_.size()));
  }
}

std::vector<double> project_path(const PathEncoding& enc,
                                 const ProjectionWeights& w) {
  const std::size_t hidden = w.hidden();
  std::vector<double> out(w.bias().begin(), w.bias().end());
  for (std::size_t r = 0; r < enc.size(); ++r) {
    if (enc[r] == 0.0) continue;
    for (std::size_t c = 0; c < hidden; ++c) out[c] += enc[r] * w.at(r, c);
  }
  std::transform(out.begin(), out.end(), out.begin(), gelu);
  return out;
}

}  // namespace rstkit
