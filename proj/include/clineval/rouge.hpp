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

#ifndef CLINEVAL_ROUGE_HPP_
#define CLINEVAL_ROUGE_HPP_

#include <algorithm>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "clineval/error.hpp"
#include "clineval/text.hpp"

namespace clineval {

struct PRF {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Harmonic mean, defined as 0 when P + R <= 0.
inline double HarmonicF1(double precision, double recall) {
  const double denom = precision + recall;
  return denom > 0.0 ? 2.0 * precision * recall / denom : 0.0;
}

inline PRF MakePRF(double precision, double recall) {
  return {precision, recall, HarmonicF1(precision, recall)};
}

namespace rouge_detail {

using NGramCounts = std::map<std::vector<std::string>, std::size_t>;

inline NGramCounts CountNGrams(std::span<const std::string> tokens, std::size_t n,
                               std::size_t& total) {
  NGramCounts counts;
  total = 0;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++counts[std::vector<std::string>(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                      tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
    ++total;
  }
  return counts;
}

}  // namespace rouge_detail

// Clipped n-gram overlap. A side with no n-grams contributes 0 to its ratio.
inline PRF RougeN(std::span<const std::string> sys, std::span<const std::string> ref, int n) {
  if (n < 1) throw Error(Errc::kInvalidN, "n = " + std::to_string(n));
  const auto order = static_cast<std::size_t>(n);
  std::size_t sys_total = 0;
  std::size_t ref_total = 0;
  const auto sys_counts = rouge_detail::CountNGrams(sys, order, sys_total);
  const auto ref_counts = rouge_detail::CountNGrams(ref, order, ref_total);
  std::size_t match = 0;
  for (const auto& [gram, count] : sys_counts) {
    auto it = ref_counts.find(gram);
    if (it != ref_counts.end()) match += std::min(count, it->second);
  }
  const double p = sys_total ? static_cast<double>(match) / static_cast<double>(sys_total) : 0.0;
  const double r = ref_total ? static_cast<double>(match) / static_cast<double>(ref_total) : 0.0;
  return MakePRF(p, r);
}

inline PRF RougeN(const TokenSequence& sys, const TokenSequence& ref, int n) {
  const auto s = sys.surfaces();
  const auto r = ref.surfaces();
  return RougeN(s, r, n);
}

inline std::size_t LcsLength(std::span<const std::string> a, std::span<const std::string> b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

// Whole-text LCS; sentence boundaries are ignored.
inline PRF RougeL(std::span<const std::string> sys, std::span<const std::string> ref) {
  const auto lcs = static_cast<double>(LcsLength(sys, ref));
  const double p = sys.empty() ? 0.0 : lcs / static_cast<double>(sys.size());
  const double r = ref.empty() ? 0.0 : lcs / static_cast<double>(ref.size());
  return MakePRF(p, r);
}

inline PRF RougeL(const TokenSequence& sys, const TokenSequence& ref) {
  const auto s = sys.surfaces();
  const auto r = ref.surfaces();
  return RougeL(s, r);
}

}  // namespace clineval

#endif  // CLINEVAL_ROUGE_HPP_
