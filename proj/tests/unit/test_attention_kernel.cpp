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

#include <cmath>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "generators.hpp"
#include "oracles.hpp"
#include "rstkit/attention_kernel.hpp"
#include "rstkit/error.hpp"

using namespace rstkit;
using rstkit::testing::Rng;

namespace {

AttentionInputs random_inputs(Rng& rng, std::size_t n, std::size_t m,
                              std::size_t d, std::size_t v) {
  AttentionInputs inp;
  inp.queries = rstkit::testing::random_matrix(rng, n, d);
  inp.keys = rstkit::testing::random_matrix(rng, m, d);
  inp.values = rstkit::testing::random_matrix(rng, m, v);
  inp.mask = rstkit::testing::random_mask(rng, n, m);
  return inp;
}

AttentionMaskSet all_ones(std::size_t n, std::size_t m) {
  AttentionMaskSet mask(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) mask(i, j) = 1;
  }
  return mask;
}

ErrorCode code_of(const AttentionInputs& inp) {
  try {
    masked_attention(inp);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kIo;
}

}  // namespace

TEST_CASE("equal scores spread weight evenly over unmasked columns") {
  AttentionInputs inp;
  inp.queries = Matrix(2, 3, 0.0);
  inp.keys = Matrix(4, 3, 0.7);
  inp.values = Matrix(4, 2, 1.0);
  inp.mask = AttentionMaskSet(2, 4);
  inp.mask(0, 0) = inp.mask(0, 2) = inp.mask(0, 3) = 1;
  inp.mask(1, 1) = 1;
  const auto r = masked_attention(inp);
  CHECK(r.weights(0, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(r.weights(0, 1) == 0.0);
  CHECK(r.weights(0, 2) == r.weights(0, 0));
  CHECK(r.weights(1, 1) == 1.0);
  CHECK(r.weights(1, 0) == 0.0);
}

TEST_CASE("single unmasked column copies its value row") {
  Rng rng(61);
  AttentionInputs inp = random_inputs(rng, 1, 5, 4, 3);
  inp.mask = AttentionMaskSet(1, 5);
  inp.mask(0, 3) = 1;
  const auto r = masked_attention(inp);
  CHECK(r.weights(0, 3) == 1.0);
  for (std::size_t c = 0; c < 3; ++c) CHECK(r.output(0, c) == inp.values(3, c));
}

TEST_CASE("forward pass matches the long-double oracle") {
  Rng rng(62);
  for (int t = 0; t < 200; ++t) {
    const auto inp = random_inputs(rng, 4, 4, 4, 4);
    const auto r = masked_attention(inp);
    const auto o = rstkit::testing::naive_attention(inp);
    for (std::size_t i = 0; i < 4; ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < 4; ++j) {
        CHECK(std::abs(r.weights(i, j) - o.weights(i, j)) <= 1e-12);
        CHECK(r.weights(i, j) >= 0.0);
        if (!inp.mask(i, j)) CHECK(r.weights(i, j) == 0.0);
        sum += r.weights(i, j);
      }
      CHECK(std::abs(sum - 1.0) <= 1e-9);
      for (std::size_t c = 0; c < 4; ++c) {
        CHECK(std::abs(r.output(i, c) - o.output(i, c)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("large logits stay finite") {
  AttentionInputs inp;
  inp.queries = Matrix(1, 1, 1000.0);
  inp.keys = Matrix(2, 1, 0.0);
  inp.keys(0, 0) = 1.0;
  inp.values = Matrix(2, 1, 0.0);
  inp.values(1, 0) = 5.0;
  inp.mask = all_ones(1, 2);
  const auto r = masked_attention(inp);
  CHECK(r.weights(0, 0) == 1.0);
  CHECK(r.weights(0, 1) == 0.0);
  CHECK(std::isfinite(r.output(0, 0)));
}

TEST_CASE("softmax shift invariance") {
  Rng rng(63);
  for (int t = 0; t < 100; ++t) {
    AttentionInputs inp = random_inputs(rng, 3, 5, 4, 2);
    const auto base = masked_attention(inp);
    // Appending a shared feature to every key and a per-row constant to the
    // query adds the same amount to all logits of that row.
    AttentionInputs shifted;
    shifted.queries = Matrix(3, 5);
    shifted.keys = Matrix(5, 5);
    shifted.values = inp.values;
    shifted.mask = inp.mask;
    const double scale = std::sqrt(5.0 / 4.0);
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t k = 0; k < 4; ++k) {
        shifted.queries(i, k) = inp.queries(i, k) * scale;
      }
      shifted.queries(i, 4) = rstkit::testing::uniform_real(rng, -3, 3);
    }
    for (std::size_t j = 0; j < 5; ++j) {
      for (std::size_t k = 0; k < 4; ++k) shifted.keys(j, k) = inp.keys(j, k);
      shifted.keys(j, 4) = 1.0;
    }
    const auto moved = masked_attention(shifted);
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t c = 0; c < 2; ++c) {
        CHECK(std::abs(base.output(i, c) - moved.output(i, c)) <= 1e-9);
      }
    }
  }
}

TEST_CASE("input errors") {
  Rng rng(64);
  AttentionInputs inp = random_inputs(rng, 2, 3, 2, 2);
  AttentionInputs empty_row = inp;
  empty_row.mask = AttentionMaskSet(2, 3);
  empty_row.mask(0, 0) = 1;
  CHECK(code_of(empty_row) == ErrorCode::kEmptyMaskRow);

  AttentionInputs bad_keys = inp;
  bad_keys.keys = Matrix(3, 3);
  CHECK(code_of(bad_keys) == ErrorCode::kShapeMismatch);

  AttentionInputs bad_mask = inp;
  bad_mask.mask = all_ones(2, 4);
  CHECK(code_of(bad_mask) == ErrorCode::kShapeMismatch);

  AttentionInputs nan = inp;
  nan.values(1, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK(code_of(nan) == ErrorCode::kNonFiniteInput);
}

TEST_CASE("value gradient equals weights transposed times upstream") {
  Rng rng(65);
  const auto inp = random_inputs(rng, 3, 4, 2, 5);
  const auto fwd = masked_attention(inp);
  const Matrix dout = rstkit::testing::random_matrix(rng, 3, 5);
  const auto g = attention_backward(inp, fwd, dout);
  for (std::size_t j = 0; j < 4; ++j) {
    for (std::size_t c = 0; c < 5; ++c) {
      double expect = 0.0;
      for (std::size_t i = 0; i < 3; ++i) expect += fwd.weights(i, j) * dout(i, c);
      CHECK(g.values(j, c) == doctest::Approx(expect).epsilon(1e-14));
    }
  }
}

TEST_CASE("masked-off columns receive no gradient") {
  Rng rng(66);
  AttentionInputs inp = random_inputs(rng, 3, 4, 3, 2);
  for (std::size_t i = 0; i < 3; ++i) {
    inp.mask(i, 2) = 0;
    inp.mask(i, 0) = 1;
  }
  const auto fwd = masked_attention(inp);
  const auto g = attention_backward(inp, fwd, Matrix(3, 2, 1.0));
  for (std::size_t k = 0; k < 3; ++k) CHECK(g.keys(2, k) == 0.0);
  for (std::size_t c = 0; c < 2; ++c) CHECK(g.values(2, c) == 0.0);
}

TEST_CASE("finite-difference gradient check on random instances") {
  Rng rng(67);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const auto n = static_cast<std::size_t>(rstkit::testing::uniform_int(rng, 1, 5));
    const auto m = static_cast<std::size_t>(rstkit::testing::uniform_int(rng, 1, 5));
    const auto d = static_cast<std::size_t>(rstkit::testing::uniform_int(rng, 1, 5));
    const auto v = static_cast<std::size_t>(rstkit::testing::uniform_int(rng, 1, 5));
    const auto report = gradient_check(random_inputs(rng, n, m, d, v));
    worst = std::max(worst, report.max_relative_error);
    CHECK(report.max_relative_error < 1e-4);
  }
  MESSAGE("worst relative error " << worst);

  Rng fixed(68);
  const auto r = gradient_check(random_inputs(fixed, 3, 3, 4, 4));
  CHECK(r.max_relative_error < 1e-4);
}

TEST_CASE("matrix text round-trip") {
  Rng rng(69);
  const Matrix m = rstkit::testing::random_matrix(rng, 3, 4);
  std::stringstream s;
  s << "# comment\n";
  write_matrix(m, s);
  CHECK(read_matrix(s) == m);
  std::stringstream ragged("1 2\n3\n");
  try {
    read_matrix(ragged);
    FAIL("ragged rows accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kShapeMismatch);
  }
}
