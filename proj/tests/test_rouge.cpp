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

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "clineval/rouge.hpp"
#include "clineval/text.hpp"

namespace clineval {
namespace {

using Toks = std::vector<std::string>;

Toks Words(std::string_view s) { return Tokenize(s).surfaces(); }

// Clipped n-gram count by direct pairwise marking: each system n-gram is
// matched to at most one unused identical reference n-gram.
std::size_t BruteMatches(const Toks& sys, const Toks& ref, std::size_t n) {
  if (sys.size() < n || ref.size() < n) return 0;
  std::vector<bool> used(ref.size() - n + 1, false);
  std::size_t match = 0;
  for (std::size_t i = 0; i + n <= sys.size(); ++i) {
    for (std::size_t j = 0; j + n <= ref.size(); ++j) {
      if (used[j]) continue;
      if (std::equal(sys.begin() + i, sys.begin() + i + n, ref.begin() + j)) {
        used[j] = true;
        ++match;
        break;
      }
    }
  }
  return match;
}

bool IsSubsequence(const Toks& sub, const Toks& seq) {
  std::size_t k = 0;
  for (const auto& t : seq) {
    if (k < sub.size() && sub[k] == t) ++k;
  }
  return k == sub.size();
}

// Longest subsequence of `a` (all 2^|a| of them) that is also one of `b`.
std::size_t BruteLcs(const Toks& a, const Toks& b) {
  std::size_t best = 0;
  for (std::uint32_t mask = 0; mask < (1u << a.size()); ++mask) {
    Toks sub;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (mask & (1u << i)) sub.push_back(a[i]);
    }
    if (sub.size() > best && IsSubsequence(sub, b)) best = sub.size();
  }
  return best;
}

Toks RandomTokens(std::mt19937& rng, std::size_t max_len) {
  const std::size_t len = rng() % (max_len + 1);
  Toks out;
  for (std::size_t i = 0; i < len; ++i) out.push_back(std::string(1, static_cast<char>('a' + rng() % 4)));
  return out;
}

TEST(RougeN, Identity) {
  const auto t = Words("the cat sat");
  const auto r = RougeN(t, t, 1);
  EXPECT_EQ(r.precision, 1.0);
  EXPECT_EQ(r.recall, 1.0);
  EXPECT_EQ(r.f1, 1.0);
}

TEST(RougeN, HandExample) {
  const auto r = RougeN(Words("the cat"), Words("the cat sat"), 1);
  EXPECT_EQ(r.precision, 1.0);
  EXPECT_DOUBLE_EQ(r.recall, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.f1, 0.8);
}

TEST(RougeN, DegenerateAndInvalid) {
  const auto r = RougeN(Words("a"), Words("b c"), 2);
  EXPECT_EQ(r.precision, 0.0);
  EXPECT_EQ(r.recall, 0.0);
  EXPECT_EQ(r.f1, 0.0);
  EXPECT_THROW(RougeN(Words("a"), Words("a"), 0), Error);
  const auto big = RougeN(Words("a b"), Words("a b"), 3);
  EXPECT_EQ(big.f1, 0.0);
}

TEST(RougeN, Clipping) {
  const auto r = RougeN(Words("the the the"), Words("the cat"), 1);
  EXPECT_DOUBLE_EQ(r.precision, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.recall, 0.5);
}

TEST(RougeN, MatchesBruteForceOracle) {
  std::mt19937 rng(1);
  for (int trial = 0; trial < 300; ++trial) {
    const auto sys = RandomTokens(rng, 15);
    const auto ref = RandomTokens(rng, 15);
    for (int n : {1, 2, 3}) {
      const auto got = RougeN(sys, ref, n);
      const auto m = static_cast<double>(BruteMatches(sys, ref, static_cast<std::size_t>(n)));
      const auto sys_grams = sys.size() >= static_cast<std::size_t>(n) ? sys.size() - n + 1 : 0;
      const auto ref_grams = ref.size() >= static_cast<std::size_t>(n) ? ref.size() - n + 1 : 0;
      const double p = sys_grams ? m / static_cast<double>(sys_grams) : 0.0;
      const double r = ref_grams ? m / static_cast<double>(ref_grams) : 0.0;
      EXPECT_NEAR(got.precision, p, 1e-12);
      EXPECT_NEAR(got.recall, r, 1e-12);
      EXPECT_NEAR(got.f1, p + r > 0 ? 2 * p * r / (p + r) : 0.0, 1e-12);
    }
  }
}

TEST(RougeN, SwapSymmetry) {
  std::mt19937 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = RandomTokens(rng, 10);
    const auto b = RandomTokens(rng, 10);
    for (int n : {1, 2}) {
      EXPECT_EQ(RougeN(a, b, n).precision, RougeN(b, a, n).recall);
    }
    EXPECT_EQ(RougeL(a, b).precision, RougeL(b, a).recall);
  }
}

TEST(RougeN, AppendingUnseenTokenNeverRaisesPrecision) {
  std::mt19937 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    auto sys = RandomTokens(rng, 10);
    const auto ref = RandomTokens(rng, 10);
    const double before = RougeN(sys, ref, 1).precision;
    sys.push_back("zzz");
    EXPECT_LE(RougeN(sys, ref, 1).precision, before);
  }
}

TEST(RougeL, HandLcsTable) {
  const auto r = RougeL(Words("the sat mat"), Words("the cat sat on the mat"));
  EXPECT_EQ(LcsLength(Words("the sat mat"), Words("the cat sat on the mat")), 3u);
  EXPECT_EQ(r.precision, 1.0);
  EXPECT_EQ(r.recall, 0.5);
  EXPECT_DOUBLE_EQ(r.f1, 2.0 / 3.0);
}

TEST(RougeL, EmptySide) {
  const auto r = RougeL(Toks{}, Words("a b"));
  EXPECT_EQ(r.precision, 0.0);
  EXPECT_EQ(r.recall, 0.0);
}

TEST(RougeL, MatchesExponentialLcs) {
  std::mt19937 rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = RandomTokens(rng, 12);
    const auto b = RandomTokens(rng, 12);
    ASSERT_EQ(LcsLength(a, b), BruteLcs(a, b));
  }
}

}  // namespace
}  // namespace clineval
