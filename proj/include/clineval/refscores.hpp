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

// Scores derived from human annotations: factual precision/recall/F1,
// hallucination and omission rates, key-phrase counts, the error-weighted
// quality score, and the aggregate of correlation coefficients.

#ifndef CLINEVAL_REFSCORES_HPP_
#define CLINEVAL_REFSCORES_HPP_

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clineval/data.hpp"
#include "clineval/error.hpp"
#include "clineval/rouge.hpp"
#include "clineval/text.hpp"

namespace clineval {

struct FactScores {
  double factual_precision = 0.0;
  double factual_recall = 0.0;
  double factual_f1 = 0.0;
  double hallucination_rate = 0.0;
  double omission_rate = 0.0;
  std::int64_t system_facts = 0;
  std::int64_t reference_facts = 0;
};

// Same quantities with the ones whose denominator is zero left unset.
struct PartialFactScores {
  std::optional<double> factual_precision;
  std::optional<double> factual_recall;
  std::optional<double> factual_f1;
  std::optional<double> hallucination_rate;
  std::optional<double> omission_rate;
};

inline PartialFactScores PartialScores(const FactAnnotation& a) {
  PartialFactScores s;
  const auto sys = static_cast<double>(a.system_facts());
  const auto ref = static_cast<double>(a.reference_facts);
  if (sys > 0) {
    s.factual_precision = static_cast<double>(a.correct_facts) / sys;
    s.hallucination_rate = static_cast<double>(a.hallucinated_facts) / sys;
  }
  if (ref > 0) {
    s.factual_recall = static_cast<double>(a.correct_facts) / ref;
    s.omission_rate = static_cast<double>(a.omitted_facts) / ref;
  }
  if (s.factual_precision && s.factual_recall) {
    s.factual_f1 = HarmonicF1(*s.factual_precision, *s.factual_recall);
  }
  return s;
}

inline FactScores ComputeFactScores(const FactAnnotation& a) {
  ValidateFactAnnotation(a);
  const auto p = PartialScores(a);
  std::string undefined;
  if (!p.factual_precision) undefined += "precision, hallucination";
  if (!p.factual_recall) undefined += std::string(undefined.empty() ? "" : ", ") + "recall, omission";
  if (!undefined.empty()) {
    throw Error(Errc::kUndefinedScore, a.pair_id + ": " + undefined);
  }
  return {*p.factual_precision, *p.factual_recall, *p.factual_f1, *p.hallucination_rate,
          *p.omission_rate,     a.system_facts(),   a.reference_facts};
}

struct KeyPhraseScores {
  double hallucination_count = 0.0;  // spans per system word
  double omission_count = 0.0;       // markers per reference word
};

// Repeated spans count once per occurrence.
inline KeyPhraseScores ComputeKeyPhraseScores(const KeyPhraseAnnotation& ann,
                                              const SummaryPair& pair) {
  const auto sys_words = WordCount(pair.system);
  const auto ref_words = WordCount(pair.reference);
  if (sys_words == 0 || ref_words == 0) {
    throw Error(Errc::kEmptyText, pair.pair_id + ": " +
                                      (sys_words == 0 ? "system" : "reference") + " has no words");
  }
  return {static_cast<double>(ann.hallucinated_spans.size()) / static_cast<double>(sys_words),
          static_cast<double>(ann.omission_markers.size()) / static_cast<double>(ref_words)};
}

struct ErrorCounts {
  std::int64_t critical = 0;
  std::int64_t non_critical = 0;
  std::int64_t spelling_grammar = 0;
};

// Production QA weights (3, 1, 1/4) normalized by the critical weight.
struct ErrorWeights {
  double critical = 1.0;
  double non_critical = 1.0 / 3.0;
  double spelling_grammar = 1.0 / 12.0;
};

inline double ErrorScore(const ErrorCounts& e, const ErrorWeights& w = {}) {
  if (e.critical < 0 || e.non_critical < 0 || e.spelling_grammar < 0) {
    throw Error(Errc::kNegativeCount, "error counts must be >= 0");
  }
  return w.critical * static_cast<double>(e.critical) +
         w.non_critical * static_cast<double>(e.non_critical) +
         w.spelling_grammar * static_cast<double>(e.spelling_grammar);
}

// 1 - error_score / (larger sentence count of the two texts). Unclamped
// unless clamp01 is set.
inline double QualityScoreFromErrorScore(double error_score, std::string_view summary,
                                         std::string_view reference, bool clamp01 = false) {
  const auto max_sentences = std::max(SentenceCount(summary), SentenceCount(reference));
  if (max_sentences == 0) throw Error(Errc::kEmptyText, "no sentences in either text");
  const double q = 1.0 - error_score / static_cast<double>(max_sentences);
  return clamp01 ? std::clamp(q, 0.0, 1.0) : q;
}

inline double QualityScore(const ErrorCounts& e, std::string_view summary,
                           std::string_view reference, bool clamp01 = false,
                           const ErrorWeights& w = {}) {
  return QualityScoreFromErrorScore(ErrorScore(e, w), summary, reference, clamp01);
}

// Combines correlations with factual F1 (F), hallucination (H) and
// omission (O): (2F - H - O) / 4.
inline double AggregateScore(double f, double h, double o) { return (2.0 * f - h - o) / 4.0; }

// Criterion column names shared by refscores output and correlation reports.
namespace criteria {
inline constexpr std::string_view kFactualP = "factual_p";
inline constexpr std::string_view kFactualR = "factual_r";
inline constexpr std::string_view kFactualF1 = "factual_f1";
inline constexpr std::string_view kHallucRate = "halluc_rate";
inline constexpr std::string_view kOmissionRate = "omission_rate";
inline constexpr std::string_view kHallucCount = "halluc_count";
inline constexpr std::string_view kOmissionCount = "omission_count";
inline constexpr std::string_view kAggregate = "aggregate";
}  // namespace criteria

enum class AnnotatorCombine {
  kMean,          // average each criterion over annotators that define it
  kFirst,         // first annotator in file order
  kPerAnnotator,  // one column per annotator: "<criterion>@<annotator>"
};

namespace refscores_detail {

// Groups annotations by pair (file order) and emits per-criterion columns.
template <typename Ann, typename ScoreFn>
std::vector<ScoreColumn> BuildColumns(const std::vector<Ann>& anns,
                                      const std::vector<std::pair<std::string_view, bool>>& names,
                                      AnnotatorCombine combine, ScoreFn&& score) {
  std::vector<std::string> pair_order;
  std::map<std::string, std::vector<const Ann*>> by_pair;
  std::vector<std::string> annotators;
  for (const auto& a : anns) {
    if (!by_pair.count(a.pair_id)) pair_order.push_back(a.pair_id);
    by_pair[a.pair_id].push_back(&a);
    if (std::find(annotators.begin(), annotators.end(), a.annotator_id) == annotators.end()) {
      annotators.push_back(a.annotator_id);
    }
  }
  std::vector<ScoreColumn> cols;
  if (combine == AnnotatorCombine::kPerAnnotator) {
    for (const auto& who : annotators) {
      for (const auto& [name, higher] : names) {
        cols.emplace_back(std::string(name) + "@" + who, higher);
      }
    }
  } else {
    for (const auto& [name, higher] : names) cols.emplace_back(std::string(name), higher);
  }
  for (const auto& pid : pair_order) {
    const auto& group = by_pair[pid];
    if (combine == AnnotatorCombine::kPerAnnotator) {
      for (const Ann* a : group) {
        const auto pos = static_cast<std::size_t>(
            std::find(annotators.begin(), annotators.end(), a->annotator_id) - annotators.begin());
        const auto vals = score(*a);
        for (std::size_t c = 0; c < names.size(); ++c) {
          if (vals[c]) cols[pos * names.size() + c].Set(pid, *vals[c]);
        }
      }
      continue;
    }
    const auto n = combine == AnnotatorCombine::kFirst ? std::size_t{1} : group.size();
    std::vector<double> sum(names.size(), 0.0);
    std::vector<std::size_t> cnt(names.size(), 0);
    for (std::size_t g = 0; g < n; ++g) {
      const auto vals = score(*group[g]);
      for (std::size_t c = 0; c < names.size(); ++c) {
        if (vals[c]) {
          sum[c] += *vals[c];
          ++cnt[c];
        }
      }
    }
    for (std::size_t c = 0; c < names.size(); ++c) {
      if (cnt[c]) cols[c].Set(pid, sum[c] / static_cast<double>(cnt[c]));
    }
  }
  return cols;
}

}  // namespace refscores_detail

// Criterion columns factual_p, factual_r, factual_f1, halluc_rate,
// omission_rate. Pairs with a zero denominator are left out of the
// affected columns.
inline std::vector<ScoreColumn> FactScoreColumns(const std::vector<FactAnnotation>& anns,
                                                 AnnotatorCombine combine = AnnotatorCombine::kMean) {
  using namespace criteria;
  const std::vector<std::pair<std::string_view, bool>> names = {
      {kFactualP, true}, {kFactualR, true}, {kFactualF1, true},
      {kHallucRate, false}, {kOmissionRate, false}};
  return refscores_detail::BuildColumns(anns, names, combine, [](const FactAnnotation& a) {
    const auto s = PartialScores(a);
    return std::vector<std::optional<double>>{s.factual_precision, s.factual_recall, s.factual_f1,
                                              s.hallucination_rate, s.omission_rate};
  });
}

// Criterion columns halluc_count and omission_count.
inline std::vector<ScoreColumn> KeyPhraseScoreColumns(
    const std::vector<KeyPhraseAnnotation>& anns, const Dataset& dataset,
    AnnotatorCombine combine = AnnotatorCombine::kMean) {
  using namespace criteria;
  const std::vector<std::pair<std::string_view, bool>> names = {{kHallucCount, false},
                                                                {kOmissionCount, false}};
  return refscores_detail::BuildColumns(anns, names, combine, [&](const KeyPhraseAnnotation& a) {
    const SummaryPair* pair = dataset.Find(a.pair_id);
    if (!pair) throw Error(Errc::kUnknownPair, a.pair_id);
    const auto s = ComputeKeyPhraseScores(a, *pair);
    return std::vector<std::optional<double>>{s.hallucination_count, s.omission_count};
  });
}

}  // namespace clineval

#endif  // CLINEVAL_REFSCORES_HPP_
