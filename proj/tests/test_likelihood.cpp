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
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "clineval/likelihood.hpp"

namespace clineval {
namespace {

using Toks = std::vector<std::string>;
using Corpus = std::vector<Toks>;

Corpus Split(const std::vector<std::string>& lines) {
  Corpus c;
  for (const auto& l : lines) c.push_back(Tokenize(l).surfaces());
  return c;
}

TEST(NGram, BigramHandCount) {
  const auto lm = NGramLM::Train(Split({"a b", "a b"}), 2, 1.0);
  EXPECT_EQ(lm.event_count(), 3u);
  EXPECT_DOUBLE_EQ(lm.ProbGivenHistory(Toks{"a"}, "b"), 0.6);
}

TEST(NGram, UniformUnigram) {
  const auto lm = NGramLM::Train(Split({"a b c", "c b a"}), 1, 1.0);
  EXPECT_EQ(lm.ProbGivenHistory(Toks{}, "a"), lm.ProbGivenHistory(Toks{}, "b"));
  EXPECT_EQ(lm.ProbGivenHistory(Toks{}, "a"), lm.ProbGivenHistory(Toks{}, "c"));
}

// Uniform unigram counts c over V words: p(w) = (c + k) / (V c + k (V + 1)),
// which tends to 1 / (V + 1) as k grows.
TEST(NGram, SingleTokenUnderUniformUnigram) {
  const auto corpus = Split({"a b c d", "d c b a"});
  const double v = 4.0;
  const double c = 2.0;
  for (double k : {0.5, 1.0, 3.0}) {
    const auto lm = NGramLM::Train(corpus, 1, k);
    NGramProvider p(lm);
    const auto lp = ScoreLogProbs("x", Direction::kRefToSys, Toks{"b"}, p);
    EXPECT_NEAR(lp.logprobs[0], std::log((c + k) / (v * c + k * (v + 1))), 1e-15);
  }
  const auto lm = NGramLM::Train(corpus, 1, 1e12);
  EXPECT_NEAR(lm.ProbGivenHistory(Toks{}, "b"), 1.0 / (v + 1), 1e-9);
  EXPECT_NEAR(lm.ProbGivenHistory(Toks{}, "never-seen"), 1.0 / (v + 1), 1e-9);
}

// Corpus {a b c, a c, b c c}, bigram, k = 1, event space {a, b, c, UNK}:
//   BOS -> a:2 b:1 (3)   a -> b:1 c:1 (2)   b -> c:2 (2)   c -> c:1 (1)
TEST(NGram, ChainRuleByHand) {
  const auto lm = NGramLM::Train(Split({"a b c", "a c", "b c c"}), 2, 1.0);
  NGramProvider p(lm);
  const auto lp = ScoreLogProbs("x", Direction::kRefToSys, Toks{"a", "b", "c"}, p, "ignored");
  const double expect = std::log(3.0 / 7.0) + std::log(2.0 / 6.0) + std::log(3.0 / 6.0);
  EXPECT_NEAR(std::accumulate(lp.logprobs.begin(), lp.logprobs.end(), 0.0), expect, 1e-12);
  const auto unseen = lm.LogProbs(Toks{"c", "d"});
  EXPECT_NEAR(unseen[0], std::log(1.0 / 7.0), 1e-15);
  EXPECT_NEAR(unseen[1], std::log(1.0 / 5.0), 1e-15);
}

TEST(NGram, DistributionsSumToOne) {
  std::mt19937 rng(77);
  const Toks words{"pt", "has", "pain", "no", "fever", "cough", "today", "mild"};
  Corpus corpus;
  for (int s = 0; s < 40; ++s) {
    Toks t;
    for (std::size_t i = 0, n = 1 + rng() % 9; i < n; ++i) t.push_back(words[rng() % words.size()]);
    corpus.push_back(t);
  }
  for (int order : {1, 2, 3}) {
    const auto lm = NGramLM::Train(corpus, order, 0.3);
    for (int h = 0; h < 100; ++h) {
      Toks hist;
      for (std::size_t i = 0, n = rng() % 4; i < n; ++i) {
        hist.push_back(rng() % 5 ? words[rng() % words.size()] : "oov");
      }
      const auto d = lm.Distribution(hist);
      ASSERT_EQ(d.size(), lm.event_count());
      ASSERT_NEAR(std::accumulate(d.begin(), d.end(), 0.0), 1.0, 1e-9);
    }
  }
}

double KlFromUniform(const std::vector<double>& p) {
  double kl = 0;
  for (double x : p) kl += x * std::log(x * static_cast<double>(p.size()));
  return kl;
}

TEST(NGram, LargerKFlattens) {
  const auto corpus = Split({"a a a b", "a c a a", "b a d a"});
  const std::vector<Toks> histories{{}, {"a"}, {"b"}, {"zz"}};
  double prev_k = 0;
  std::vector<double> prev(histories.size(), 1e300);
  for (double k : {0.01, 0.1, 0.5, 1.0, 2.0, 10.0}) {
    const auto lm = NGramLM::Train(corpus, 2, k);
    for (std::size_t h = 0; h < histories.size(); ++h) {
      const double kl = KlFromUniform(lm.Distribution(histories[h]));
      EXPECT_LE(kl, prev[h] + 1e-12) << "k " << prev_k << " -> " << k;
      prev[h] = kl;
    }
    prev_k = k;
  }
}

TEST(NGram, Errors) {
  EXPECT_THROW(NGramLM::Train(Corpus{{}}, 2), Error);
  EXPECT_THROW(NGramLM::Train(Split({"a"}), 0), Error);
  EXPECT_THROW(NGramLM::Train(Split({"a"}), 2, 0.0), Error);
  const auto lm = NGramLM::Train(Split({"a"}), 1);
  NGramProvider p(lm);
  try {
    ScoreLogProbs("x", Direction::kRefToSys, Toks{}, p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kEmptyTarget);
  }
}

TEST(LogProbFile, RoundTripAndErrors) {
  TokenLogProbs lp{"p1", Direction::kSysToRef, {"▁a", "▁b"}, {-0.25, -1.5}};
  const auto p = LogProbFileProvider::Parse(SerializeLogProbs(lp));
  ASSERT_TRUE(p.Has("p1", Direction::kSysToRef));
  const auto back = ScoreLogProbs("p1", Direction::kSysToRef, Toks{}, p);
  EXPECT_EQ(back.target_tokens, lp.target_tokens);
  EXPECT_EQ(back.logprobs, lp.logprobs);
  auto code = [](const std::function<void()>& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::kIoError;
  };
  EXPECT_EQ(code([&] { ScoreLogProbs("p1", Direction::kRefToSys, Toks{}, p); }), Errc::kMissingPair);
  EXPECT_EQ(code([] {
              LogProbFileProvider::Parse(
                  R"({"pair_id":"p","direction":"ref_to_sys","target_tokens":["a"],"logprobs":[-1,-2]})");
            }),
            Errc::kLengthMismatch);
  EXPECT_EQ(code([] {
              LogProbFileProvider::Parse(
                  R"({"pair_id":"p","direction":"ref_to_sys","target_tokens":["a"],"logprobs":[0.5]})");
            }),
            Errc::kParseError);
  EXPECT_EQ(code([] {
              LogProbFileProvider::Parse(
                  R"({"pair_id":"p","direction":"sideways","target_tokens":["a"],"logprobs":[-1]})");
            }),
            Errc::kParseError);
}

TokenLogProbs Lp(std::vector<double> v) {
  TokenLogProbs lp;
  lp.pair_id = "x";
  lp.logprobs = std::move(v);
  lp.target_tokens.assign(lp.logprobs.size(), "t");
  return lp;
}

TEST(BartScore, Arithmetic) {
  EXPECT_EQ(BartScore(Lp({-1, -3})), -2.0);
  EXPECT_EQ(BartScore(Lp({0, 0, 0})), 0.0);
  EXPECT_EQ(BartScore(Lp({-0.7})), -0.7);
  EXPECT_THROW(BartScore(Lp({})), Error);
}

TEST(MedBartScore, Arithmetic) {
  const WeightVector w{{1, 2}, 1.0};
  EXPECT_EQ(MedBartScore(Lp({-1, -1}), w, LikelihoodNormalization::kWeightSum), -1.0);
  EXPECT_EQ(MedBartScore(Lp({-1, -1}), w, LikelihoodNormalization::kRawSum), -3.0);
  EXPECT_THROW(MedBartScore(Lp({-1}), w), Error);
}

TEST(MedBartScore, AlphaZeroEqualsBartScoreAndRawSumScales) {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> u(-8.0, 0.0);
  std::uniform_real_distribution<double> wd(1.0, 3.0);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> v(1 + rng() % 20);
    for (auto& x : v) x = u(rng);
    const auto lp = Lp(v);
    EXPECT_EQ(MedBartScore(lp, UniformWeights(v.size())), BartScore(lp));
    WeightVector w{std::vector<double>(v.size()), 1.0};
    for (auto& x : w.weights) x = wd(rng);
    const double ws = MedBartScore(lp, w, LikelihoodNormalization::kWeightSum);
    const double raw = MedBartScore(lp, w, LikelihoodNormalization::kRawSum);
    EXPECT_LE(ws, 0.0);
    EXPECT_NEAR(raw, ws * w.Sum(), 1e-12 * std::abs(raw));
  }
}

// Raising the weight of a token whose log-prob is below the current
// weighted mean strictly lowers the weighted mean.
TEST(MedBartScore, UpweightingBelowAverageTokenLowersScore) {
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> u(-6.0, 0.0);
  for (int t = 0; t < 300; ++t) {
    std::vector<double> v(2 + rng() % 10);
    for (auto& x : v) x = u(rng);
    const auto lp = Lp(v);
    WeightVector w = UniformWeights(v.size());
    const double before = MedBartScore(lp, w);
    const auto low = static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
    if (!(v[low] < before)) continue;
    w.weights[low] += 1.0;
    EXPECT_LT(MedBartScore(lp, w), before);
  }
}

TEST(Direction, NamesAndTags) {
  Direction d{};
  EXPECT_TRUE(ParseDirectionName("src_to_sys", d));
  EXPECT_EQ(d, Direction::kSrcToSys);
  EXPECT_EQ(DirectionTag(Direction::kRefToSys), "ref2sys");
  EXPECT_EQ(DirectionName(Direction::kSysToRef), "sys_to_ref");
}

}  // namespace
}  // namespace clineval
