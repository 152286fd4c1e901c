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
#include <iosfwd>
#include <span>
#include <vector>

#include "rstkit/rst_attention.hpp"

namespace rstkit {

/// Dense row-major double matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }
  double& operator()(std::size_t i, std::size_t j) {
    return data_[i * cols_ + j];
  }
  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }
  std::span<const double> row(std::size_t i) const {
    return data().subspan(i * cols_, cols_);
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Whitespace-separated rows; blank lines and '#' lines are skipped.
/// Throws kShapeMismatch on ragged rows, kMalformedLine on bad numbers.
Matrix read_matrix(std::istream& in);
void write_matrix(const Matrix& m, std::ostream& out);

struct AttentionInputs {
  Matrix queries;  // n x d
  Matrix keys;     // m x d
  Matrix values;   // m x v
  AttentionMaskSet mask;  // n x m, 1 = attendable
};

struct AttentionResult {
  Matrix output;   // n x v
  Matrix weights;  // n x m
};

/**
 * Row softmax of QK^T / sqrt(d) over the attendable columns only; masked
 * columns are left out of the normaliser and get weight exactly 0.
 * Throws kShapeMismatch, kEmptyMaskRow, kNonFiniteInput.
 */
AttentionResult masked_attention(const AttentionInputs& inp);

struct AttentionGradients {
  Matrix queries;
  Matrix keys;
  Matrix values;
};

/// Analytic gradients given the upstream gradient of the output.
AttentionGradients attention_backward(const AttentionInputs& inp,
                                      const AttentionResult& fwd,
                                      const Matrix& d_output);

struct GradientCheckReport {
  double queries = 0.0;
  double keys = 0.0;
  double values = 0.0;
  double max_relative_error = 0.0;
};

inline constexpr double kGradientCheckStep = 1e-5;
/// Denominator floor for the relative error, so entries whose true gradient
/// is ~0 are compared on an absolute scale.
inline constexpr double kGradientCheckFloor = 1e-6;

/// Compares the analytic gradient of sum(output) with central differences.
GradientCheckReport gradient_check(const AttentionInputs& inp,
                                   double step = kGradientCheckStep);

}  // namespace rstkit
