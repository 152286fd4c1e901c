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

#include <algorithm>
#include <numeric>
#include <sstream>

#include "doctest.h"
#include "generators.hpp"
#include "oracles.hpp"
#include "rstkit/error.hpp"
#include "rstkit/keyphrase_textrank.hpp"

using namespace rstkit;
using rstkit::testing::Rng;

namespace {

std::vector<TaggedToken> tokens_of(
    std::initializer_list<std::pair<const char*, PosTag>> words) {
  std::vector<TaggedToken> out;
  for (const auto& [w, tag] : words) {
    TaggedToken t;
    t.surface = w;
    t.lemma = w;
    t.pos = tag;
    t.offset = out.size();
    out.push_back(t);
  }
  return out;
}

WordGraph random_graph(Rng& rng, std::size_t n, double density) {
  std::vector<std::string> lemmas;
  for (std::size_t i = 0; i < n; ++i) lemmas.push_back("n" + std::to_string(i));
  WordGraph g(lemmas);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (rstkit::testing::uniform_real(rng, 0.0, 1.0) < density) {
        g.add_edge(a, b);
      }
    }
  }
  return g;
}

std::vector<std::vector<int>> dense(const WordGraph& g) {
  std::vector<std::vector<int>> adj(g.size(), std::vector<int>(g.size(), 0));
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (const auto& [j, w] : g.neighbours(i)) adj[i][j] = 1;
  }
  return adj;
}

}  // namespace

TEST_CASE("tag names") {
  CHECK(parse_pos_tag("PROPN") == PosTag::PROPN);
  CHECK_FALSE(parse_pos_tag("NN").has_value());
  CHECK(to_string(PosTag::CCONJ) == "CCONJ");
  for (PosTag t : {PosTag::ADJ, PosTag::NOUN, PosTag::PROPN, PosTag::VERB}) {
    CHECK(is_graph_tag(t));
  }
  for (PosTag t : {PosTag::DET, PosTag::ADV, PosTag::AUX, PosTag::PUNCT}) {
    CHECK_FALSE(is_graph_tag(t));
  }
}

TEST_CASE("window examples") {
  const auto toks = tokens_of(
      {{"big", PosTag::ADJ}, {"dog", PosTag::NOUN}, {"runs", PosTag::VERB}});
  const WordGraph g3 = build_graph(toks, 3);
  CHECK(g3.size() == 3);
  CHECK(g3.edge_count() == 3);
  const WordGraph g2 = build_graph(toks, 2);
  CHECK(g2.edge_count() == 2);
  CHECK(g2.weight(*g2.id("big"), *g2.id("dog")) == 1.0);
  CHECK(g2.weight(*g2.id("dog"), *g2.id("runs")) == 1.0);
  CHECK(g2.weight(*g2.id("big"), *g2.id("runs")) == 0.0);
  CHECK_THROWS_AS(build_graph(toks, 0), Error);
}

TEST_CASE("function words are excluded and distance skips them") {
  const auto toks = tokens_of({{"the", PosTag::DET},
                               {"dog", PosTag::NOUN},
                               {"of", PosTag::ADP},
                               {"the", PosTag::DET},
                               {"house", PosTag::NOUN}});
  const WordGraph g = build_graph(toks, 2);
  CHECK(g.lemmas() == std::vector<std::string>{"dog", "house"});
  CHECK_FALSE(g.id("the").has_value());
  CHECK(g.edge_count() == 1);
}

TEST_CASE("repeated co-occurrence keeps weight 1 and no self loops") {
  const auto toks = tokens_of({{"a", PosTag::NOUN},
                               {"b", PosTag::NOUN},
                               {"a", PosTag::NOUN},
                               {"b", PosTag::NOUN},
                               {"a", PosTag::NOUN}});
  const WordGraph g = build_graph(toks, 4);
  CHECK(g.size() == 2);
  CHECK(g.edge_count() == 1);
  CHECK(g.weight(0, 1) == 1.0);
  CHECK(g.weight(0, 0) == 0.0);
}

TEST_CASE("isolated node scores 1 - d") {
  WordGraph g({"solo"});
  const PageRankResult r = pagerank(g);
  CHECK(r.converged);
  CHECK(r.scores[0] == 1.0 - 0.85);
  CHECK(r.scores[0] == doctest::Approx(0.15).epsilon(1e-15));
  const PageRankResult e = pagerank(WordGraph{});
  CHECK(e.converged);
  CHECK(e.scores.empty());
}

TEST_CASE("two symmetric nodes score equally") {
  WordGraph g({"a", "b"});
  g.add_edge(0, 1);
  const PageRankResult r = pagerank(g);
  CHECK(r.converged);
  CHECK(r.scores[0] == r.scores[1]);
  CHECK(r.scores[0] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("three-node path against the extended-precision iteration") {
  WordGraph g({"a", "b", "c"});
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  PageRankOptions o;
  o.tolerance = 1e-10;
  // The error on a bipartite graph only shrinks by d per sweep, so 1e-10
  // needs about 140 sweeps.
  o.max_iterations = 1000;
  const PageRankResult r = pagerank(g, o);
  CHECK(r.converged);
  const auto oracle = rstkit::testing::dense_pagerank(dense(g), 0.85L, 200);
  // Closed form of the fixed point: 57/74 at the ends, 108/74 in the middle.
  CHECK(static_cast<double>(oracle[0]) ==
        doctest::Approx(57.0 / 74.0).epsilon(1e-12));
  CHECK(static_cast<double>(oracle[1]) ==
        doctest::Approx(108.0 / 74.0).epsilon(1e-12));
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(std::abs(r.scores[i] - static_cast<double>(oracle[i])) < 1e-8);
  }
  CHECK(r.scores[1] > r.scores[0]);
  CHECK(r.scores[0] == doctest::Approx(r.scores[2]).epsilon(1e-12));
}

TEST_CASE("pagerank argument checks and non-convergence") {
  WordGraph g({"a", "b", "c"});
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  for (double d : {0.0, 1.0, -0.1, 1.5}) {
    PageRankOptions o;
    o.damping = d;
    CHECK_THROWS_AS(pagerank(g, o), Error);
  }
  PageRankOptions o;
  o.tolerance = 0.0;
  CHECK_THROWS_AS(pagerank(g, o), Error);
  o.tolerance = 1e-30;
  o.max_iterations = 3;
  const PageRankResult r = pagerank(g, o);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 3);
  CHECK(r.max_change.size() == 3);
}

TEST_CASE("random graphs converge with positive scores") {
  Rng rng(81);
  int violations = 0;
  for (int t = 0; t < 100; ++t) {
    const auto n = static_cast<std::size_t>(
        rstkit::testing::uniform_int(rng, 1, 200));
    const WordGraph g =
        random_graph(rng, n, rstkit::testing::uniform_real(rng, 0.0, 0.2));
    const PageRankResult r = pagerank(g);
    CHECK(r.converged);
    CHECK(r.iterations <= 100);
    for (double s : r.scores) CHECK(s > 0.0);
    for (std::size_t i = 2; i < r.max_change.size(); ++i) {
      if (r.max_change[i] > r.max_change[i - 1]) ++violations;
    }
    const auto oracle = rstkit::testing::dense_pagerank(dense(g), 0.85L, 200);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::abs(r.scores[i] - static_cast<double>(oracle[i])) < 1e-4);
    }
  }
  MESSAGE("max-change increases after iteration 2: " << violations);
}

TEST_CASE("scores do not depend on insertion order") {
  Rng rng(82);
  for (int t = 0; t < 50; ++t) {
    auto toks = rstkit::testing::random_tagged(rng, 60, 15);
    const WordGraph a = build_graph(toks, 4);
    // Same edge set added in a shuffled order.
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t i = 0; i < a.size(); ++i) {
      for (const auto& [j, w] : a.neighbours(i)) {
        if (i < j) edges.emplace_back(i, j);
      }
    }
    std::shuffle(edges.begin(), edges.end(), rng);
    std::vector<std::string> lemmas = a.lemmas();
    std::shuffle(lemmas.begin(), lemmas.end(), rng);
    WordGraph b(lemmas);
    for (const auto& [i, j] : edges) {
      b.add_edge(*b.id(a.lemmas()[j]), *b.id(a.lemmas()[i]));
    }
    CHECK(b.lemmas() == a.lemmas());
    CHECK(pagerank(a).scores == pagerank(b).scores);
  }
}

TEST_CASE("phrase examples") {
  const auto toks = tokens_of({{"solo", PosTag::NOUN}, {"the", PosTag::DET}});
  const WordGraph g = build_graph(toks, 4);
  const PageRankResult r = pagerank(g);
  const std::vector<TokenSpan> one{{0, 1}};
  auto c = score_candidates(toks, one, g, r);
  REQUIRE(c.size() == 1);
  CHECK(c[0].score == r.scores[0] / 2.0);
  CHECK(c[0].score == doctest::Approx(0.075).epsilon(1e-15));
  // "the" is not a graph word and only lengthens the phrase.
  const std::vector<TokenSpan> two{{0, 2}};
  c = score_candidates(toks, two, g, r);
  CHECK(c[0].score == r.scores[0] / 3.0);
  CHECK(c[0].phrase == "solo the");
  const std::vector<TokenSpan> bad{{1, 3}};
  CHECK_THROWS_AS(score_candidates(toks, bad, g, r), Error);
}

TEST_CASE("lemma duplicates keep the better-ranked candidate") {
  auto toks = tokens_of({{"Dogs", PosTag::NOUN},
                         {"bark", PosTag::VERB},
                         {"dogs", PosTag::NOUN}});
  toks[0].lemma = "dog";
  toks[2].lemma = "dog";
  const std::vector<TokenSpan> spans{{0, 1}, {2, 3}, {1, 2}};
  const auto out = extract_keyphrases(toks, spans, 4, {}, 0);
  REQUIRE(out.size() == 2);
  CHECK(out[0].phrase == "Dogs");
  CHECK(out[0].span == TokenSpan{0, 1});
  CHECK(out[1].phrase == "bark");
  CHECK(extract_keyphrases(toks, spans, 4, {}, 1).size() == 1);
}

TEST_CASE("scaling word scores scales phrases and keeps the ranking") {
  Rng rng(83);
  for (int t = 0; t < 100; ++t) {
    const auto toks = rstkit::testing::random_tagged(rng, 40, 12);
    const WordGraph g = build_graph(toks, 4);
    PageRankResult r = pagerank(g);
    const auto spans = fallback_candidates(toks);
    if (spans.empty()) continue;
    const auto base = score_candidates(toks, spans, g, r);
    const double c = rstkit::testing::uniform_real(rng, 0.1, 10.0);
    for (double& s : r.scores) s *= c;
    const auto scaled = score_candidates(toks, spans, g, r);
    for (std::size_t i = 0; i < base.size(); ++i) {
      CHECK(scaled[i].score == doctest::Approx(base[i].score * c).epsilon(1e-12));
    }
    const auto ra = rank_candidates(base, 0);
    const auto rb = rank_candidates(scaled, 0);
    REQUIRE(ra.size() == rb.size());
    for (std::size_t i = 0; i < ra.size(); ++i) {
      // Ties may be created or broken by rounding; compare scores instead of
      // identities when two neighbours are within rounding.
      if (ra[i].span == rb[i].span) continue;
      CHECK(ra[i].score * c == doctest::Approx(rb[i].score).epsilon(1e-12));
    }
  }
}

TEST_CASE("extraction equals the brute-force recomputation") {
  Rng rng(84);
  for (int t = 0; t < 200; ++t) {
    const auto n = static_cast<std::size_t>(
        rstkit::testing::uniform_int(rng, 1, 80));
    const auto toks = rstkit::testing::random_tagged(
        rng, n, static_cast<std::size_t>(rstkit::testing::uniform_int(rng, 2, 30)));
    std::vector<TokenSpan> spans;
    if (t % 2 == 0) {
      spans = fallback_candidates(toks);
    } else {
      for (int s = 0; s < 15; ++s) {
        const auto b = static_cast<std::size_t>(
            rstkit::testing::uniform_int(rng, 0, static_cast<int>(n) - 1));
        const auto e = std::min(
            n, b + static_cast<std::size_t>(rstkit::testing::uniform_int(rng, 1, 4)));
        spans.push_back({b, e});
      }
    }
    const int window = rstkit::testing::uniform_int(rng, 1, 6);
    const std::size_t top = static_cast<std::size_t>(
        rstkit::testing::uniform_int(rng, 0, 8));
    const auto got = extract_keyphrases(toks, spans, window, {}, top);
    const auto want = rstkit::testing::naive_keyphrases(toks, spans, window,
                                                        0.85, 1e-6, 100, top);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].phrase == want[i].first);
      CHECK(got[i].score == want[i].second);
    }
  }
}

TEST_CASE("fallback candidates stay inside sentences") {
  auto toks = tokens_of({{"red", PosTag::ADJ},
                         {"car", PosTag::NOUN},
                         {"runs", PosTag::VERB},
                         {"Paris", PosTag::PROPN},
                         {"fast", PosTag::NOUN}});
  toks[4].sentence = 1;
  const auto spans = fallback_candidates(toks);
  CHECK(spans == std::vector<TokenSpan>{{0, 2}, {3, 4}, {4, 5}});
}

TEST_CASE("read_tagged") {
  std::istringstream in(
      "# comment\n"
      "The\tthe\tDET\nDogs\tdog\tNOUN\n\nbark\tbark\tVERB\nloud\tloud\tWEIRD\n"
      "span\t1\t2\n");
  const TaggedDocument d = read_tagged(in);
  REQUIRE(d.tokens.size() == 4);
  CHECK(d.tokens[1].lemma == "dog");
  CHECK(d.tokens[1].sentence == 0);
  CHECK(d.tokens[2].sentence == 1);
  CHECK(d.tokens[3].pos == PosTag::X);
  for (std::size_t i = 0; i < 4; ++i) CHECK(d.tokens[i].offset == i);
  CHECK(d.spans == std::vector<TokenSpan>{{1, 2}});
  std::istringstream bad("a\tb\n");
  CHECK_THROWS_AS(read_tagged(bad), Error);
}

TEST_CASE("fallback tagger") {
  const auto toks = fallback_tag("The quick dogs barked loudly at Paris.");
  std::vector<std::string> lemmas;
  std::vector<PosTag> tags;
  for (const auto& t : toks) {
    lemmas.push_back(t.lemma);
    tags.push_back(t.pos);
  }
  CHECK(tags.front() == PosTag::DET);
  CHECK(std::find(lemmas.begin(), lemmas.end(), "dog") != lemmas.end());
  CHECK(tags.back() == PosTag::PUNCT);
  CHECK(toks[toks.size() - 2].pos == PosTag::PROPN);
  CHECK(toks[4].pos == PosTag::ADV);
  CHECK(toks[3].pos == PosTag::VERB);
  for (std::size_t i = 1; i < toks.size(); ++i) {
    CHECK(toks[i].offset > toks[i - 1].offset);
  }
}
