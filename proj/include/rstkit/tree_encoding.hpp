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

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "rstkit/rst_tree.hpp"

namespace rstkit {

inline constexpr double kLeftStep = -0.05;
inline constexpr double kRightStep = 0.05;

/// Root-to-node path as a fixed-length vector: one entry per step, -0.05 for
/// a left turn, +0.05 for a right turn, zero padding after the last step.
using PathEncoding = std::array<double, kMaxTreeDepth>;

/// Throws kDepthExceeded when depth(pos) > kMaxTreeDepth.
PathEncoding encode_position(NodePos pos);

/// Index views of a tree's parent nodes, in ascending position order.
/// Relation ids follow the Relation enumerator order (Null = 18) and
/// nuclearity ids follow Nuclearity (NN=0, NS=1, SN=2, Null=3).
struct EncodedTree {
  std::vector<NodePos> positions;
  std::vector<int> relation_ids;
  std::vector<int> nuclearity_ids;
  std::vector<PathEncoding> path_vectors;

  std::size_t size() const { return positions.size(); }
};

/// Throws kInvalidTree.
EncodedTree encode_tree(const RstTree& tree);

/// Exact Gelu: x * Phi(x) with Phi the standard normal CDF.
double gelu(double x);

inline constexpr std::size_t kDefaultHiddenSize = 768;

/// Feed-forward layer mapping a path encoding into the model's hidden size:
/// a kMaxTreeDepth x hidden row-major matrix plus a hidden-sized bias.
class ProjectionWeights {
 public:
  explicit ProjectionWeights(std::size_t hidden = kDefaultHiddenSize);
  /// Throws kShapeMismatch unless matrix.size() == kMaxTreeDepth * hidden and
  /// bias.size() == hidden.
  ProjectionWeights(std::vector<double> matrix, std::vector<double> bias);

  std::size_t hidden() const { return bias_.size(); }
  double& at(std::size_t row, std::size_t col) {
    return matrix_[row * hidden() + col];
  }
  double at(std::size_t row, std::size_t col) const {
    return matrix_[row * hidden() + col];
  }
  std::span<double> bias() { return bias_; }
  std::span<const double> bias() const { return bias_; }

 private:
  std::vector<double> matrix_;
  std::vector<double> bias_;
};

/// gelu(enc * W + b), one entry per hidden unit.
std::vector<double> project_path(const PathEncoding& enc,
                                 const ProjectionWeights& w);

}  // namespace rstkit
