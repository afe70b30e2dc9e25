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

// Sequence-likelihood scoring (BARTScore-style mean log-probability and its
// medical-weighted variant) over pluggable log-probability providers.

#ifndef CLINEVAL_LIKELIHOOD_HPP_
#define CLINEVAL_LIKELIHOOD_HPP_

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <map>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "clineval/error.hpp"
#include "clineval/greedy_match.hpp"
#include "clineval/io_util.hpp"
#include "clineval/text.hpp"
#include "json.hpp"

namespace clineval {

enum class Direction { kSrcToSys, kRefToSys, kSysToRef };

inline std::string_view DirectionName(Direction d) {
  switch (d) {
    case Direction::kSrcToSys: return "src_to_sys";
    case Direction::kRefToSys: return "ref_to_sys";
    case Direction::kSysToRef: return "sys_to_ref";
  }
  return "ref_to_sys";
}

// Compact label used in metric column names, e.g. "bartscore-ref2sys".
inline std::string_view DirectionTag(Direction d) {
  switch (d) {
    case Direction::kSrcToSys: return "src2sys";
    case Direction::kRefToSys: return "ref2sys";
    case Direction::kSysToRef: return "sys2ref";
  }
  return "ref2sys";
}

inline bool ParseDirectionName(std::string_view s, Direction& out) {
  std::string v(s);
  for (auto& c : v) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  for (Direction d : {Direction::kSrcToSys, Direction::kRefToSys, Direction::kSysToRef}) {
    if (v == DirectionName(d) || v == DirectionTag(d)) {
      out = d;
      return true;
    }
  }
  return false;
}

struct TokenLogProbs {
  std::string pair_id;
  Direction direction = Direction::kRefToSys;
  std::vector<std::string> target_tokens;
  std::vector<double> logprobs;  // each <= 0 and finite

  std::size_t size() const { return logprobs.size(); }
};

// Add-k smoothed n-gram model with BOS padding. Unseen tokens map to a
// single UNK symbol that is part of the event space, so every conditional
// distribution sums to one over vocab + UNK.
class NGramLM {
 public:
  static NGramLM Train(const std::vector<std::vector<std::string>>& corpus, int order,
                       double k = 1.0) {
    if (order < 1) throw Error(Errc::kInvalidN, "order = " + std::to_string(order));
    if (!(k > 0.0)) throw Error(Errc::kConfigError, "add-k constant must be > 0");
    NGramLM lm;
    lm.order_ = static_cast<std::size_t>(order);
    lm.k_ = k;
    for (const auto& sentence : corpus) lm.vocab_.insert(sentence.begin(), sentence.end());
    if (lm.vocab_.empty()) throw Error(Errc::kEmptyCorpus, "no tokens in training corpus");
    for (const auto& sentence : corpus) {
      for (std::size_t t = 0; t < sentence.size(); ++t) {
        const auto h = lm.HistoryKey(sentence, t);
        ++lm.counts_[h][sentence[t]];
        ++lm.context_totals_[h];
      }
    }
    return lm;
  }

  std::size_t order() const { return order_; }
  double k() const { return k_; }
  const std::set<std::string>& vocab() const { return vocab_; }
  // Size of the event space: vocabulary plus UNK.
  std::size_t event_count() const { return vocab_.size() + 1; }

  // p(tokens[pos] | preceding order-1 tokens of `tokens`).
  double Prob(std::span<const std::string> tokens, std::size_t pos) const {
    return ProbGivenKey(HistoryKey(tokens, pos), tokens[pos]);
  }

  // p(word | history), where history holds the preceding tokens (only the
  // last order-1 are used; missing positions are BOS).
  double ProbGivenHistory(std::span<const std::string> history, const std::string& word) const {
    std::vector<std::string> seq(history.begin(), history.end());
    seq.push_back(word);
    return Prob(seq, seq.size() - 1);
  }

  std::vector<double> LogProbs(std::span<const std::string> tokens) const {
    std::vector<double> out;
    out.reserve(tokens.size());
    for (std::size_t t = 0; t < tokens.size(); ++t) out.push_back(std::log(Prob(tokens, t)));
    return out;
  }

  // Full conditional distribution, vocab in sorted order followed by UNK.
  std::vector<double> Distribution(std::span<const std::string> history) const {
    std::vector<double> out;
    for (const auto& w : vocab_) out.push_back(ProbGivenHistory(history, w));
    out.push_back(ProbGivenHistory(history, kUnk));
    return out;
  }

  static constexpr const char* kUnk = "\x02unk";
  static constexpr const char* kBos = "\x02s";

 private:
  std::string Mapped(const std::string& w) const { return vocab_.count(w) ? w : kUnk; }

  std::string HistoryKey(std::span<const std::string> tokens, std::size_t pos) const {
    std::string key;
    for (std::size_t back = order_ - 1; back >= 1; --back) {
      key += pos >= back ? Mapped(tokens[pos - back]) : std::string(kBos);
      key.push_back('\x1f');
    }
    return key;
  }

  double ProbGivenKey(const std::string& key, const std::string& word) const {
    double c_hw = 0.0;
    double c_h = 0.0;
    if (auto it = counts_.find(key); it != counts_.end()) {
      if (auto w = it->second.find(Mapped(word)); w != it->second.end()) {
        c_hw = static_cast<double>(w->second);
      }
      c_h = static_cast<double>(context_totals_.at(key));
    }
    return (c_hw + k_) / (c_h + k_ * static_cast<double>(event_count()));
  }

  std::size_t order_ = 1;
  double k_ = 1.0;
  std::set<std::string> vocab_;
  std::map<std::string, std::map<std::string, std::size_t>> counts_;
  std::map<std::string, std::size_t> context_totals_;
};

class LikelihoodProvider {
 public:
  virtual ~LikelihoodProvider() = default;
  virtual TokenLogProbs Score(const std::string& pair_id, Direction direction,
                              std::span<const std::string> target,
                              std::string_view conditioning) const = 0;
};

// Unconditional: the conditioning text is ignored.
class NGramProvider : public LikelihoodProvider {
 public:
  explicit NGramProvider(const NGramLM& lm) : lm_(lm) {}

  TokenLogProbs Score(const std::string& pair_id, Direction direction,
                      std::span<const std::string> target, std::string_view) const override {
    if (target.empty()) throw Error(Errc::kEmptyTarget, pair_id);
    TokenLogProbs lp;
    lp.pair_id = pair_id;
    lp.direction = direction;
    lp.target_tokens.assign(target.begin(), target.end());
    lp.logprobs = lm_.LogProbs(target);
    return lp;
  }

 private:
  const NGramLM& lm_;
};

// Stored per-token log-probabilities keyed by (pair_id, direction).
class LogProbFileProvider : public LikelihoodProvider {
 public:
  static LogProbFileProvider Parse(std::string_view data) {
    LogProbFileProvider p;
    std::size_t line_no = 0;
    for (const auto& line : SplitLines(data)) {
      ++line_no;
      if (IsBlank(line)) continue;
      const std::string where = "line " + std::to_string(line_no);
      nlohmann::json obj;
      try {
        obj = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::kParseError, where + ": " + e.what());
      }
      for (const char* key : {"pair_id", "direction", "target_tokens", "logprobs"}) {
        if (!obj.is_object() || !obj.contains(key)) {
          throw Error(Errc::kMissingField, std::string(key) + " (" + where + ")");
        }
      }
      TokenLogProbs lp;
      try {
        lp.pair_id = obj["pair_id"].get<std::string>();
        if (!ParseDirectionName(obj["direction"].get<std::string>(), lp.direction)) {
          throw Error(Errc::kParseError, where + ": unknown direction");
        }
        lp.target_tokens = obj["target_tokens"].get<std::vector<std::string>>();
        lp.logprobs = obj["logprobs"].get<std::vector<double>>();
      } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::kParseError, where + ": " + e.what());
      }
      if (lp.target_tokens.size() != lp.logprobs.size()) {
        throw Error(Errc::kLengthMismatch, where + ": target_tokens vs logprobs");
      }
      for (double v : lp.logprobs) {
        if (!std::isfinite(v) || v > 0.0) {
          throw Error(Errc::kParseError, where + ": log-probabilities must be finite and <= 0");
        }
      }
      auto key = Key(lp.pair_id, lp.direction);
      if (p.rows_.count(key)) throw Error(Errc::kDuplicateKey, key);
      p.rows_.emplace(std::move(key), std::move(lp));
    }
    return p;
  }

  static LogProbFileProvider Load(const std::filesystem::path& path) {
    return Parse(ReadFile(path));
  }

  std::size_t size() const { return rows_.size(); }

  bool Has(const std::string& pair_id, Direction direction) const {
    return rows_.count(Key(pair_id, direction)) != 0;
  }

  TokenLogProbs Score(const std::string& pair_id, Direction direction,
                      std::span<const std::string>, std::string_view) const override {
    auto it = rows_.find(Key(pair_id, direction));
    if (it == rows_.end()) {
      throw Error(Errc::kMissingPair, pair_id + "/" + std::string(DirectionName(direction)));
    }
    if (it->second.logprobs.empty()) throw Error(Errc::kEmptyTarget, pair_id);
    return it->second;
  }

 private:
  static std::string Key(const std::string& pair_id, Direction d) {
    return pair_id + '\x1f' + std::string(DirectionName(d));
  }

  std::map<std::string, TokenLogProbs> rows_;
};

inline std::string SerializeLogProbs(const TokenLogProbs& lp) {
  nlohmann::json obj = {{"pair_id", lp.pair_id},
                        {"direction", std::string(DirectionName(lp.direction))},
                        {"target_tokens", lp.target_tokens},
                        {"logprobs", lp.logprobs}};
  return obj.dump() + "\n";
}

inline TokenLogProbs ScoreLogProbs(const std::string& pair_id, Direction direction,
                                   std::span<const std::string> target,
                                   const LikelihoodProvider& provider,
                                   std::string_view conditioning = {}) {
  return provider.Score(pair_id, direction, target, conditioning);
}

// Length-normalized mean log-probability.
inline double BartScore(const TokenLogProbs& lp) {
  if (lp.logprobs.empty()) throw Error(Errc::kEmptyTarget, lp.pair_id);
  return std::accumulate(lp.logprobs.begin(), lp.logprobs.end(), 0.0) /
         static_cast<double>(lp.logprobs.size());
}

enum class LikelihoodNormalization {
  kWeightSum,  // weighted mean
  kRawSum,     // plain weighted sum
};

inline double MedBartScore(const TokenLogProbs& lp, const WeightVector& weights,
                           LikelihoodNormalization normalize = LikelihoodNormalization::kWeightSum) {
  if (lp.logprobs.empty()) throw Error(Errc::kEmptyTarget, lp.pair_id);
  if (weights.size() != lp.logprobs.size()) {
    throw Error(Errc::kLengthMismatch, lp.pair_id + ": " + std::to_string(weights.size()) +
                                           " weights for " + std::to_string(lp.size()) +
                                           " tokens");
  }
  double total = 0.0;
  for (std::size_t t = 0; t < lp.logprobs.size(); ++t) total += weights.weights[t] * lp.logprobs[t];
  return normalize == LikelihoodNormalization::kWeightSum ? total / weights.Sum() : total;
}

}  // namespace clineval

#endif  // CLINEVAL_LIKELIHOOD_HPP_
