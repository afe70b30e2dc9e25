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

// BERTScore-style greedy token matching with optional medical-term weights.

#ifndef CLINEVAL_GREEDY_MATCH_HPP_
#define CLINEVAL_GREEDY_MATCH_HPP_

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "clineval/concepts.hpp"
#include "clineval/data.hpp"
#include "clineval/embeddings.hpp"
#include "clineval/error.hpp"
#include "clineval/rouge.hpp"
#include "clineval/text.hpp"

namespace clineval {

inline constexpr double kDefaultAlpha = 1.0;

// 1 for ordinary tokens, 1 + alpha for tokens inside a linked concept.
struct WeightVector {
  std::vector<double> weights;
  double alpha = 0.0;

  std::size_t size() const { return weights.size(); }
  double Sum() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }
};

inline WeightVector UniformWeights(std::size_t n) { return {std::vector<double>(n, 1.0), 0.0}; }

inline WeightVector MedicalWeights(std::span<const std::string> tokens,
                                   const ConceptLexicon& lexicon, double alpha = kDefaultAlpha) {
  WeightVector w{std::vector<double>(tokens.size(), 1.0), alpha};
  for (const auto& m : LinkConcepts(tokens, lexicon).mentions) {
    for (std::size_t i = m.begin; i < m.end; ++i) w.weights[i] = 1.0 + alpha;
  }
  return w;
}

inline WeightVector MedicalWeights(const TokenSequence& tokens, const ConceptLexicon& lexicon,
                                   double alpha = kDefaultAlpha) {
  const auto s = tokens.surfaces();
  return MedicalWeights(s, lexicon, alpha);
}

enum class GreedyNormalization {
  kWeightSum,   // divide by the sum of weights; bounded
  kTokenCount,  // divide by the token count, as the weighted formula is printed
};

// P = sum_i w_sys[i] * max_j cos(sys_i, ref_j) / Z_sys, R symmetric over the
// reference tokens. F is the harmonic mean of the raw P and R.
inline PRF GreedyPrf(const DocEmbedding& sys, const DocEmbedding& ref, const WeightVector& w_sys,
                     const WeightVector& w_ref,
                     GreedyNormalization normalize = GreedyNormalization::kWeightSum) {
  const std::size_t n = sys.matrix.rows();
  const std::size_t m = ref.matrix.rows();
  if (n == 0 || m == 0) {
    throw Error(Errc::kEmptyDocument, (n == 0 ? "system " : "reference ") + sys.pair_id);
  }
  if (w_sys.size() != n || w_ref.size() != m) {
    throw Error(Errc::kLengthMismatch, "weight vector length does not match token count");
  }
  std::vector<double> best_sys(n, -std::numeric_limits<double>::infinity());
  std::vector<double> best_ref(m, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double c = Cosine(sys.matrix.row(i), ref.matrix.row(j));
      best_sys[i] = std::max(best_sys[i], c);
      best_ref[j] = std::max(best_ref[j], c);
    }
  }
  auto side_score = [normalize](const std::vector<double>& best, const WeightVector& w) {
    double total = 0.0;
    for (std::size_t i = 0; i < best.size(); ++i) total += w.weights[i] * best[i];
    const double z = normalize == GreedyNormalization::kWeightSum
                         ? w.Sum()
                         : static_cast<double>(best.size());
    return total / z;
  };
  return MakePRF(side_score(best_sys, w_sys), side_score(best_ref, w_ref));
}

struct GreedyOptions {
  double alpha = kDefaultAlpha;  // 0 gives plain unweighted matching
  GreedyNormalization normalize = GreedyNormalization::kWeightSum;
  bool windowed = true;  // sliding windows (-SP); otherwise truncate to max_len
  std::size_t max_len = kDefaultMaxLen;
  std::size_t overlap = kDefaultOverlap;
  Normalization tokenizer = Normalization::kLowerAlnum;
};

// tokenize -> embed (windowed or truncated) -> medical weights -> greedy P/R/F.
// A null lexicon gives uniform weights.
inline PRF MedBertScore(const SummaryPair& pair, const EmbeddingProvider& provider,
                        const ConceptLexicon* lexicon, const GreedyOptions& opts = {}) {
  auto embed = [&](Side side, const std::string& text) {
    DocRef ref{pair.pair_id, side};
    auto tokens = provider.Tokens(ref, text, opts.tokenizer);
    return opts.windowed
               ? EmbedDocument(ref, std::move(tokens), provider, opts.max_len, opts.overlap)
               : EmbedTruncated(ref, std::move(tokens), provider, opts.max_len);
  };
  const DocEmbedding sys = embed(Side::kSystem, pair.system);
  const DocEmbedding ref = embed(Side::kReference, pair.reference);
  auto weights = [&](const DocEmbedding& doc) {
    return lexicon && opts.alpha != 0.0 ? MedicalWeights(doc.tokens, *lexicon, opts.alpha)
                                        : UniformWeights(doc.tokens.size());
  };
  return GreedyPrf(sys, ref, weights(sys), weights(ref), opts.normalize);
}

}  // namespace clineval

#endif  // CLINEVAL_GREEDY_MATCH_HPP_
