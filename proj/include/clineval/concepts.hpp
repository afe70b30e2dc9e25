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

// Lexicon-based medical concept linking and the knowledge-graph embedding
// similarity metric (MIST) over linked concept sets.

#ifndef CLINEVAL_CONCEPTS_HPP_
#define CLINEVAL_CONCEPTS_HPP_

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <limits>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "clineval/embeddings.hpp"
#include "clineval/error.hpp"
#include "clineval/io_util.hpp"
#include "clineval/text.hpp"

namespace clineval {

// Lowercases and drops non-word bytes; strips common subword markers so
// model tokens ("▁Pain", "Ġpain", "##pain") link like word tokens.
inline std::string NormalizeToken(std::string_view token) {
  for (std::string_view marker : {"\xE2\x96\x81", "\xC4\xA0", "##"}) {
    if (token.substr(0, marker.size()) == marker) {
      token.remove_prefix(marker.size());
      break;
    }
  }
  std::string out;
  out.reserve(token.size());
  for (char c : token) {
    if (text_detail::IsWordByte(static_cast<unsigned char>(c))) {
      out.push_back(text_detail::AsciiLower(c));
    }
  }
  return out;
}

class ConceptLexicon {
 public:
  // Surface forms are normalized with LOWER_ALNUM tokenization. When a
  // surface form repeats, the first concept id is kept.
  void Add(std::string_view surface, const std::string& concept_id) {
    const auto toks = Tokenize(surface, Normalization::kLowerAlnum).surfaces();
    if (toks.empty()) {
      throw Error(Errc::kParseError, "surface form '" + std::string(surface) +
                                         "' has no word tokens");
    }
    if (concept_id.empty()) throw Error(Errc::kParseError, "empty concept id");
    std::string key;
    for (const auto& t : toks) {
      if (!key.empty()) key.push_back(' ');
      key += t;
    }
    if (entries_.emplace(std::move(key), concept_id).second) {
      max_entry_len_ = std::max(max_entry_len_, toks.size());
    }
  }

  const std::string* Lookup(const std::string& normalized_key) const {
    auto it = entries_.find(normalized_key);
    return it == entries_.end() ? nullptr : &it->second;
  }

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::size_t max_entry_len() const { return max_entry_len_; }

 private:
  std::unordered_map<std::string, std::string> entries_;
  std::size_t max_entry_len_ = 0;
};

// TSV `surface_form<TAB>concept_id`; blank lines and '#' comments skipped.
inline ConceptLexicon ParseLexicon(std::string_view data) {
  ConceptLexicon lex;
  std::size_t line_no = 0;
  for (const auto& line : SplitLines(data)) {
    ++line_no;
    if (IsBlank(line) || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error(Errc::kParseError, "line " + std::to_string(line_no) + ": missing TAB");
    }
    std::string id = line.substr(tab + 1);
    while (!id.empty() && (id.back() == ' ' || id.back() == '\t')) id.pop_back();
    try {
      lex.Add(std::string_view(line).substr(0, tab), id);
    } catch (const Error& e) {
      throw Error(Errc::kParseError, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return lex;
}

inline ConceptLexicon LoadLexicon(const std::filesystem::path& path) {
  return ParseLexicon(ReadFile(path));
}

struct ConceptMention {
  std::string concept_id;
  std::size_t begin = 0;  // token index
  std::size_t end = 0;    // exclusive
};

// Multiset of linked concepts with their token spans.
struct ConceptSet {
  std::vector<ConceptMention> mentions;

  std::size_t size() const { return mentions.size(); }
  bool empty() const { return mentions.empty(); }

  // Distinct concept ids in sorted order.
  std::vector<std::string> Unique() const {
    std::set<std::string> ids;
    for (const auto& m : mentions) ids.insert(m.concept_id);
    return {ids.begin(), ids.end()};
  }

  std::size_t Count(std::string_view id) const {
    return static_cast<std::size_t>(std::count_if(
        mentions.begin(), mentions.end(), [&](const auto& m) { return m.concept_id == id; }));
  }
};

// Greedy longest match, left to right, without overlapping mentions.
inline ConceptSet LinkConcepts(std::span<const std::string> tokens,
                               const ConceptLexicon& lexicon) {
  ConceptSet out;
  if (lexicon.empty()) return out;
  std::vector<std::string> norm;
  norm.reserve(tokens.size());
  for (const auto& t : tokens) norm.push_back(NormalizeToken(t));
  std::size_t i = 0;
  while (i < norm.size()) {
    bool matched = false;
    if (!norm[i].empty()) {
      const std::size_t longest = std::min(lexicon.max_entry_len(), norm.size() - i);
      for (std::size_t len = longest; len >= 1; --len) {
        std::string key;
        bool ok = true;
        for (std::size_t k = i; k < i + len; ++k) {
          if (norm[k].empty()) {
            ok = false;
            break;
          }
          if (!key.empty()) key.push_back(' ');
          key += norm[k];
        }
        if (!ok) continue;
        if (const std::string* id = lexicon.Lookup(key)) {
          out.mentions.push_back({*id, i, i + len});
          i += len;
          matched = true;
          break;
        }
      }
    }
    if (!matched) ++i;
  }
  return out;
}

inline ConceptSet LinkConcepts(const TokenSequence& tokens, const ConceptLexicon& lexicon) {
  const auto s = tokens.surfaces();
  return LinkConcepts(s, lexicon);
}

enum class MistMode {
  kRecall,    // mean over reference concepts of the best system match
  kVerbatim,  // sum over system concepts of the best reference match, / |R|
};

struct MistResult {
  double value = 0.0;
  std::size_t ref_used = 0;
  std::size_t ref_skipped = 0;  // reference concepts without a KGE vector
  std::size_t sys_used = 0;
  std::size_t sys_skipped = 0;
};

// Concepts are deduplicated (set semantics) and those without a KGE vector
// are skipped and counted. No embedded reference concept -> UndefinedScore;
// no embedded system concept -> 0.
inline MistResult Mist(std::span<const std::string> sys_ids, std::span<const std::string> ref_ids,
                       const EmbeddingStore& kge, MistMode mode = MistMode::kRecall) {
  MistResult res;
  auto resolve = [&](std::span<const std::string> ids, std::size_t& used, std::size_t& skipped) {
    std::set<std::string> uniq(ids.begin(), ids.end());
    std::vector<const Vector*> vecs;
    for (const auto& id : uniq) {
      if (const Vector* v = kge.Find(id)) {
        vecs.push_back(v);
      } else {
        ++skipped;
      }
    }
    used = vecs.size();
    return vecs;
  };
  const auto sys = resolve(sys_ids, res.sys_used, res.sys_skipped);
  const auto ref = resolve(ref_ids, res.ref_used, res.ref_skipped);
  if (ref.empty()) {
    throw Error(Errc::kUndefinedScore, "no reference concepts with embeddings");
  }
  if (sys.empty()) return res;
  const auto& outer = mode == MistMode::kRecall ? ref : sys;
  const auto& inner = mode == MistMode::kRecall ? sys : ref;
  double total = 0.0;
  for (const Vector* a : outer) {
    double best = -std::numeric_limits<double>::infinity();
    for (const Vector* b : inner) best = std::max(best, Cosine(*a, *b));
    total += best;
  }
  res.value = total / static_cast<double>(ref.size());
  return res;
}

inline MistResult Mist(const ConceptSet& sys, const ConceptSet& ref, const EmbeddingStore& kge,
                       MistMode mode = MistMode::kRecall) {
  const auto s = sys.Unique();
  const auto r = ref.Unique();
  return Mist(s, r, kge, mode);
}

}  // namespace clineval

#endif  // CLINEVAL_CONCEPTS_HPP_
