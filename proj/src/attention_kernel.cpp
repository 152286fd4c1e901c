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

#include "rstkit/attention_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "rstkit/error.hpp"
#include "rstkit/io_util.hpp"

namespace rstkit {

namespace {

void check_finite(const Matrix& m, const char* name) {
  for (double x : m.data()) {
    if (!std::isfinite(x)) {
      throw Error(ErrorCode::kNonFiniteInput,
                  std::string(name) + " contains a non-finite value");
    }
  }
}

void check_inputs(const AttentionInputs& inp) {
  const std::size_t n = inp.queries.rows();
  const std::size_t d = inp.queries.cols();
  const std::size_t m = inp.keys.rows();
  if (d == 0 || inp.keys.cols() != d || inp.values.rows() != m ||
      inp.mask.rows() != n || inp.mask.cols() != m) {
    throw Error(ErrorCode::kShapeMismatch,
                "Q " + std::to_string(n) + "x" + std::to_string(d) + ", K " +
                    std::to_string(m) + "x" + std::to_string(inp.keys.cols()) +
                    ", V " + std::to_string(inp.values.rows()) + "x" +
                    std::to_string(inp.values.cols()) + ", mask " +
                    std::to_string(inp.mask.rows()) + "x" +
                    std::to_string(inp.mask.cols()));
  }
  check_finite(inp.queries, "queries");
  check_finite(inp.keys, "keys");
  check_finite(inp.values, "values");
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = inp.mask.row(i);
    if (std::none_of(row.begin(), row.end(),
                     [](std::uint8_t b) { return b != 0; })) {
      throw Error(ErrorCode::kEmptyMaskRow,
                  "row " + std::to_string(i) + " attends to nothing");
    }
  }
}

double sum_all(const Matrix& m) {
  double s = 0.0;
  for (double x : m.data()) s += x;
  return s;
}

double relative_error(double analytic, double numeric) {
  const double scale =
      std::max({std::abs(analytic), std::abs(numeric), kGradientCheckFloor});
  return std::abs(analytic - numeric) / scale;
}

}  // namespace

Matrix read_matrix(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    const auto fields = split_whitespace(line);
    if (fields.empty() || fields.front().front() == '#') continue;
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) row.push_back(parse_double(f));
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error(ErrorCode::kShapeMismatch, "ragged matrix rows");
    }
    rows.push_back(std::move(row));
  }
  Matrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::copy(rows[i].begin(), rows[i].end(), &m(i, 0));
  }
  return m;
}

void write_matrix(const Matrix& m, std::ostream& out) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out << ' ';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

AttentionResult masked_attention(const AttentionInputs& inp) {
  check_inputs(inp);
  const std::size_t n = inp.queries.rows();
  const std::size_t d = inp.queries.cols();
  const std::size_t m = inp.keys.rows();
  const std::size_t v = inp.values.cols();
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));

  AttentionResult out{Matrix(n, v), Matrix(n, m)};
  std::vector<double> logits(m);
  for (std::size_t i = 0; i < n; ++i) {
    double max_logit = -INFINITY;
    for (std::size_t j = 0; j < m; ++j) {
      if (!inp.mask(i, j)) continue;
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += inp.queries(i, k) * inp.keys(j, k);
      logits[j] = s * scale;
      max_logit = std::max(max_logit, logits[j]);
    }
    double total = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (!inp.mask(i, j)) continue;
      const double e = std::exp(logits[j] - max_logit);
      out.weights(i, j) = e;
      total += e;
    }
    for (std::size_t j = 0; j < m; ++j) {
      if (!inp.mask(i, j)) continue;
      out.weights(i, j) /= total;
      for (std::size_t c = 0; c < v; ++c) {
        out.output(i, c) += out.weights(i, j) * inp.values(j, c);
      }
    }
  }
  return out;
}

AttentionGradients attention_backward(const AttentionInputs& inp,
                                      const AttentionResult& fwd,
                                      const Matrix& d_output) {
  const std::size_t n = inp.queries.rows();
  const std::size_t d = inp.queries.cols();
  const std::size_t m = inp.keys.rows();
  const std::size_t v = inp.values.cols();
  if (d_output.rows() != n || d_output.cols() != v) {
    throw Error(ErrorCode::kShapeMismatch, "upstream gradient shape");
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  AttentionGradients g{Matrix(n, d), Matrix(m, d), Matrix(m, v)};

  // dV = W^T dO
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double w = fwd.weights(i, j);
      if (w == 0.0) continue;
      for (std::size_t c = 0; c < v; ++c) g.values(j, c) += w * d_output(i, c);
    }
  }

  std::vector<double> d_weight(m);
  std::vector<double> d_logit(m);
  for (std::size_t i = 0; i < n; ++i) {
    // dW = dO V^T, then the softmax Jacobian: dS = W * (dW - <dW, W>).
    double dot = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < v; ++c) s += d_output(i, c) * inp.values(j, c);
      d_weight[j] = s;
      dot += s * fwd.weights(i, j);
    }
    for (std::size_t j = 0; j < m; ++j) {
      d_logit[j] = fwd.weights(i, j) * (d_weight[j] - dot) * scale;
    }
    for (std::size_t j = 0; j < m; ++j) {
      if (d_logit[j] == 0.0) continue;
      for (std::size_t k = 0; k < d; ++k) {
        g.queries(i, k) += d_logit[j] * inp.keys(j, k);
        g.keys(j, k) += d_logit[j] * inp.queries(i, k);
      }
    }
  }
  return g;
}

GradientCheckReport gradient_check(const AttentionInputs& inp, double step) {
  const auto fwd = masked_attention(inp);
  const Matrix ones(fwd.output.rows(), fwd.output.cols(), 1.0);
  const auto analytic = attention_backward(inp, fwd, ones);

  AttentionInputs probe = inp;
  auto check = [&](Matrix AttentionInputs::*member, const Matrix& grad) {
    double worst = 0.0;
    auto values = (probe.*member).data();
    for (std::size_t k = 0; k < values.size(); ++k) {
      const double saved = values[k];
      values[k] = saved + step;
      const double up = sum_all(masked_attention(probe).output);
      values[k] = saved - step;
      const double down = sum_all(masked_attention(probe).output);
      values[k] = saved;
      const double numeric = (up - down) / (2.0 * step);
      worst = std::max(worst, relative_error(grad.data()[k], numeric));
    }
    return worst;
  };

  GradientCheckReport report;
  report.queries = check(&AttentionInputs::queries, analytic.queries);
  report.keys = check(&AttentionInputs::keys, analytic.keys);
  report.values = check(&AttentionInputs::values, analytic.values);
  report.max_relative_error =
      std::max({report.queries, report.keys, report.values});
  return report;
}

}  // namespace rstkit
