// Copyright 2026 The clineval Authors.
//
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
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "clineval/greedy_match.hpp"

namespace clineval {
namespace {

DocEmbedding Doc(const std::vector<Vector>& rows) {
  DocEmbedding d;
  d.pair_id = "t";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    d.tokens.push_back("t" + std::to_string(i));
    d.matrix.AppendRow(rows[i]);
  }
  return d;
}

double OracleCos(const Vector& a, const Vector& b) {
  long double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<long double>(a[i]) * b[i];
    na += static_cast<long double>(a[i]) * a[i];
    nb += static_cast<long double>(b[i]) * b[i];
  }
  return static_cast<double>(dot / std::sqrt(na * nb));
}

// Max over every mapping f: from-tokens -> to-tokens of sum_i w_i cos(i, f(i)),
// found by enumerating all |to|^|from| mappings.
double ExhaustiveSide(const std::vector<Vector>& from, const std::vector<Vector>& to,
                      const std::vector<double>& w) {
  std::vector<std::size_t> f(from.size(), 0);
  double best = -1e300;
  while (true) {
    double total = 0;
    for (std::size_t i = 0; i < from.size(); ++i) total += w[i] * OracleCos(from[i], to[f[i]]);
    best = std::max(best, total);
    std::size_t k = 0;
    while (k < f.size() && ++f[k] == to.size()) f[k++] = 0;
    if (k == f.size()) break;
  }
  return best;
}

std::vector<Vector> RandomRows(std::mt19937& rng, std::size_t n, std::size_t dim) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Vector> rows(n, Vector(dim));
  for (auto& r : rows) {
    for (auto& x : r) x = u(rng);
  }
  return rows;
}

double Sum(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s;
}

TEST(Greedy, TwoTokenToy) {
  const auto sys = Doc({{1, 0}, {0, 1}});
  const auto ref = Doc({{1, 0}});
  const auto r = GreedyPrf(sys, ref, UniformWeights(2), UniformWeights(1));
  EXPECT_EQ(r.precision, 0.5);
  EXPECT_EQ(r.recall, 1.0);
  EXPECT_DOUBLE_EQ(r.f1, 2.0 / 3.0);
}

TEST(Greedy, IdentityGivesOne) {
  std::mt19937 rng(2);
  const auto rows = RandomRows(rng, 5, 4);
  const WeightVector w{{1, 2, 1, 3, 1}, 1.0};
  const auto r = GreedyPrf(Doc(rows), Doc(rows), w, w);
  EXPECT_NEAR(r.precision, 1.0, 1e-15);
  EXPECT_NEAR(r.recall, 1.0, 1e-15);
}

TEST(Greedy, Errors) {
  const auto a = Doc({{1, 0}});
  EXPECT_THROW(GreedyPrf(Doc({}), a, UniformWeights(0), UniformWeights(1)), Error);
  try {
    GreedyPrf(a, a, UniformWeights(2), UniformWeights(1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kLengthMismatch);
  }
}

// Exhaustive mapping oracle on 100 random pairs (<= 6 tokens, dim 4), with
// random weights in both normalizations.
TEST(Greedy, MatchesExhaustiveOracle) {
  std::mt19937 rng(100);
  std::uniform_real_distribution<double> wdist(0.5, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto sr = RandomRows(rng, 1 + rng() % 6, 4);
    const auto rr = RandomRows(rng, 1 + rng() % 6, 4);
    WeightVector ws{std::vector<double>(sr.size()), 1.0};
    WeightVector wr{std::vector<double>(rr.size()), 1.0};
    for (auto& x : ws.weights) x = wdist(rng);
    for (auto& x : wr.weights) x = wdist(rng);
    const auto got = GreedyPrf(Doc(sr), Doc(rr), ws, wr);
    const double p = ExhaustiveSide(sr, rr, ws.weights) / Sum(ws.weights);
    const double r = ExhaustiveSide(rr, sr, wr.weights) / Sum(wr.weights);
    EXPECT_NEAR(got.precision, p, 1e-12);
    EXPECT_NEAR(got.recall, r, 1e-12);
    const auto tc = GreedyPrf(Doc(sr), Doc(rr), ws, wr, GreedyNormalization::kTokenCount);
    EXPECT_NEAR(tc.precision, ExhaustiveSide(sr, rr, ws.weights) / static_cast<double>(sr.size()),
                1e-12);
  }
}

TEST(Greedy, SwapSymmetry) {
  std::mt19937 rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = Doc(RandomRows(rng, 1 + rng() % 6, 4));
    const auto b = Doc(RandomRows(rng, 1 + rng() % 6, 4));
    const auto wa = UniformWeights(a.matrix.rows());
    const auto wb = UniformWeights(b.matrix.rows());
    EXPECT_EQ(GreedyPrf(a, b, wa, wb).precision, GreedyPrf(b, a, wb, wa).recall);
  }
}

TEST(Greedy, AlphaZeroModesCoincide) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = Doc(RandomRows(rng, 1 + rng() % 6, 4));
    const auto b = Doc(RandomRows(rng, 1 + rng() % 6, 4));
    const auto wa = UniformWeights(a.matrix.rows());
    const auto wb = UniformWeights(b.matrix.rows());
    const auto x = GreedyPrf(a, b, wa, wb, GreedyNormalization::kWeightSum);
    const auto y = GreedyPrf(a, b, wa, wb, GreedyNormalization::kTokenCount);
    EXPECT_EQ(x.precision, y.precision);
    EXPECT_EQ(x.recall, y.recall);
  }
}

TEST(Greedy, WeightSumBoundedTokenCountCanExceedOne) {
  const auto a = Doc({{1, 0}, {0, 1}});
  const WeightVector w{{3.0, 1.0}, 2.0};
  const auto ws = GreedyPrf(a, a, w, w, GreedyNormalization::kWeightSum);
  const auto tc = GreedyPrf(a, a, w, w, GreedyNormalization::kTokenCount);
  EXPECT_EQ(ws.precision, 1.0);
  EXPECT_EQ(tc.precision, 2.0);
}

ConceptLexicon ChestPainLexicon() {
  ConceptLexicon lex;
  lex.Add("chest pain", "C0008031");
  return lex;
}

TEST(MedicalWeights, RuleApplication) {
  const std::vector<std::string> toks{"patient", "denies", "chest", "pain"};
  const auto lex = ChestPainLexicon();
  EXPECT_EQ(MedicalWeights(toks, lex, 1.0).weights, (std::vector<double>{1, 1, 2, 2}));
  EXPECT_EQ(MedicalWeights(toks, ConceptLexicon{}, 1.0).weights,
            (std::vector<double>{1, 1, 1, 1}));
  ConceptLexicon single;
  single.Add("denies", "C1");
  EXPECT_EQ(MedicalWeights(toks, single, 0.5).weights, (std::vector<double>{1, 1.5, 1, 1}));
}

// Vocabulary w0..w39 with random vectors.
EmbeddingStore Vocab() {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  EmbeddingStore s(6, EmbeddingKind::kToken);
  for (int i = 0; i < 40; ++i) {
    Vector v(6);
    for (auto& x : v) x = u(rng);
    s.Add("w" + std::to_string(i), v);
  }
  return s;
}

std::string Text(std::size_t n, std::size_t offset = 0) {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) s.push_back(' ');
    s += "w" + std::to_string((i + offset) % 40);
  }
  return s;
}

TEST(MedBertScore, ShortPairsSameWindowedOrNot) {
  const auto store = Vocab();
  StaticProvider p(store);
  SummaryPair pair{"x", "d", std::nullopt, "", Text(30), Text(25, 7)};
  GreedyOptions win, trunc;
  trunc.windowed = false;
  const auto a = MedBertScore(pair, p, nullptr, win);
  const auto b = MedBertScore(pair, p, nullptr, trunc);
  EXPECT_EQ(a.precision, b.precision);
  EXPECT_EQ(a.recall, b.recall);
}

TEST(MedBertScore, LongIdentityIsOne) {
  const auto store = Vocab();
  StaticProvider p(store);
  SummaryPair pair{"x", "d", std::nullopt, "", Text(700), Text(700)};
  for (bool windowed : {true, false}) {
    GreedyOptions o;
    o.windowed = windowed;
    const auto r = MedBertScore(pair, p, nullptr, o);
    EXPECT_NEAR(r.precision, 1.0, 1e-12);
    EXPECT_NEAR(r.recall, 1.0, 1e-12);
  }
}

// System = 700 tokens whose last 188 are fresh words; reference = its first
// 512 tokens. Every reference token appears in the system, so windowed
// recall is 1, while the unmatched fresh suffix pulls precision below 1.
TEST(MedBertScore, TruncatedReferenceRecallIsOne) {
  EmbeddingStore store(6, EmbeddingKind::kToken);
  std::mt19937 rng(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::string sys, ref;
  for (int i = 0; i < 700; ++i) {
    const std::string w = i < 512 ? "a" + std::to_string(i % 20) : "z" + std::to_string(i);
    if (!store.Find(w)) {
      Vector v(6);
      for (auto& x : v) x = u(rng);
      store.Add(w, v);
    }
    sys += (i ? " " : "") + w;
    if (i < 512) ref += (i ? " " : "") + w;
  }
  StaticProvider p(store);
  SummaryPair pair{"x", "d", std::nullopt, "", ref, sys};
  GreedyOptions o;
  const auto r = MedBertScore(pair, p, nullptr, o);
  EXPECT_NEAR(r.recall, 1.0, 1e-12);
  EXPECT_LT(r.precision, 1.0);
}

TEST(MedBertScore, AlphaZeroEqualsUnweighted) {
  const auto store = Vocab();
  StaticProvider p(store);
  ConceptLexicon lex;
  lex.Add("w3", "C3");
  lex.Add("w5 w6", "C56");
  SummaryPair pair{"x", "d", std::nullopt, "", Text(30, 2), Text(20, 25)};
  GreedyOptions o;
  o.alpha = 0.0;
  const auto a = MedBertScore(pair, p, &lex, o);
  const auto b = MedBertScore(pair, p, nullptr, o);
  EXPECT_EQ(a.precision, b.precision);
  EXPECT_EQ(a.recall, b.recall);
  o.alpha = 1.0;
  const auto c = MedBertScore(pair, p, &lex, o);
  EXPECT_NE(a.precision, c.precision);
}

}  // namespace
}  // namespace clineval
