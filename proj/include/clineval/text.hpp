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

#ifndef CLINEVAL_TEXT_HPP_
#define CLINEVAL_TEXT_HPP_

#include <algorithm>
#include <array>
#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "clineval/error.hpp"

namespace clineval {

enum class Normalization {
  kLowerAlnum,      // lowercase, split on any non-alphanumeric byte
  kWhitespaceOnly,  // split on whitespace, case preserved
};

struct Token {
  std::string surface;
  std::size_t start = 0;  // byte offset into the source text
  std::size_t end = 0;    // exclusive
};

struct TokenSequence {
  std::vector<Token> tokens;
  Normalization normalization = Normalization::kLowerAlnum;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }

  std::vector<std::string> surfaces() const {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) out.push_back(t.surface);
    return out;
  }
};

namespace text_detail {

// Bytes >= 0x80 belong to UTF-8 sequences and are kept inside words so
// non-ASCII letters are never split apart.
inline bool IsWordByte(unsigned char c) {
  return c >= 0x80 || std::isalnum(c) != 0;
}

inline bool IsSpace(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

inline char AsciiLower(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

}  // namespace text_detail

inline TokenSequence Tokenize(std::string_view text,
                              Normalization mode = Normalization::kLowerAlnum) {
  using text_detail::IsSpace;
  using text_detail::IsWordByte;
  TokenSequence seq;
  seq.normalization = mode;
  const std::size_t n = text.size();
  std::size_t i = 0;
  while (i < n) {
    const auto c = static_cast<unsigned char>(text[i]);
    const bool in_word =
        mode == Normalization::kLowerAlnum ? IsWordByte(c) : !IsSpace(c);
    if (!in_word) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < n) {
      const auto d = static_cast<unsigned char>(text[j]);
      const bool w =
          mode == Normalization::kLowerAlnum ? IsWordByte(d) : !IsSpace(d);
      if (!w) break;
      ++j;
    }
    Token tok{std::string(text.substr(i, j - i)), i, j};
    if (mode == Normalization::kLowerAlnum) {
      std::transform(tok.surface.begin(), tok.surface.end(),
                     tok.surface.begin(), text_detail::AsciiLower);
    }
    seq.tokens.push_back(std::move(tok));
    i = j;
  }
  return seq;
}

// Word count under the default LOWER_ALNUM convention.
inline std::size_t WordCount(std::string_view text) {
  return Tokenize(text, Normalization::kLowerAlnum).size();
}

struct SentenceSpan {
  std::size_t start = 0;
  std::size_t end = 0;  // exclusive, includes the terminator

  bool operator==(const SentenceSpan&) const = default;
};

namespace text_detail {

inline bool IsAbbreviation(std::string_view word) {
  static constexpr std::array<std::string_view, 7> kAbbrev = {
      "dr", "mr", "mrs", "ms", "vs", "e.g", "i.e"};
  // Strip leading punctuation such as "(" from "(Dr".
  while (!word.empty() && !IsWordByte(static_cast<unsigned char>(word[0]))) {
    word.remove_prefix(1);
  }
  if (word.empty() || word.size() > 3) return false;
  std::string lower(word);
  std::transform(lower.begin(), lower.end(), lower.begin(), AsciiLower);
  return std::find(kAbbrev.begin(), kAbbrev.end(), lower) != kAbbrev.end();
}

}  // namespace text_detail

// Splits on '.', '!' or '?' followed by whitespace or end of text. A '.'
// closing one of the abbreviations Dr, Mr, Mrs, Ms, vs, e.g, i.e does not
// end a sentence. Whitespace-only sentences are dropped.
inline std::vector<SentenceSpan> SplitSentences(std::string_view text) {
  using text_detail::IsSpace;
  std::vector<SentenceSpan> out;
  const std::size_t n = text.size();
  auto emit = [&](std::size_t begin, std::size_t end) {
    while (begin < end && IsSpace(static_cast<unsigned char>(text[begin]))) {
      ++begin;
    }
    std::size_t stop = end;
    while (stop > begin && IsSpace(static_cast<unsigned char>(text[stop - 1]))) {
      --stop;
    }
    if (stop > begin) out.push_back({begin, stop});
  };
  std::size_t sentence_start = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const char c = text[i];
    if (c != '.' && c != '!' && c != '?') continue;
    if (i + 1 < n && !IsSpace(static_cast<unsigned char>(text[i + 1]))) {
      continue;
    }
    if (c == '.') {
      std::size_t w = i;
      while (w > sentence_start &&
             !IsSpace(static_cast<unsigned char>(text[w - 1]))) {
        --w;
      }
      if (text_detail::IsAbbreviation(text.substr(w, i - w))) continue;
    }
    emit(sentence_start, i + 1);
    sentence_start = i + 1;
  }
  emit(sentence_start, n);
  return out;
}

inline std::size_t SentenceCount(std::string_view text) {
  return SplitSentences(text).size();
}

struct Segment {
  std::size_t begin = 0;  // token index, inclusive
  std::size_t end = 0;    // token index, exclusive
  std::size_t index = 0;

  std::size_t size() const { return end - begin; }
  bool operator==(const Segment&) const = default;
};

inline constexpr std::size_t kDefaultMaxLen = 512;
inline constexpr std::size_t kDefaultOverlap = 100;

// Segment k covers [k*stride, min(k*stride + max_len, N)) with
// stride = max_len - overlap; generation stops at the first segment that
// reaches N. N <= max_len yields exactly one segment.
inline std::vector<Segment> SegmentSliding(std::size_t num_tokens,
                                           std::size_t max_len = kDefaultMaxLen,
                                           std::size_t overlap = kDefaultOverlap) {
  if (overlap >= max_len) {
    throw Error(Errc::kInvalidWindow,
                "overlap " + std::to_string(overlap) +
                    " must be smaller than max_len " + std::to_string(max_len));
  }
  const std::size_t stride = max_len - overlap;
  std::vector<Segment> out;
  for (std::size_t k = 0;; ++k) {
    const std::size_t begin = k * stride;
    const std::size_t end = std::min(begin + max_len, num_tokens);
    out.push_back({begin, end, k});
    if (end >= num_tokens) break;
  }
  return out;
}

inline std::vector<Segment> SegmentSliding(const TokenSequence& tokens,
                                           std::size_t max_len = kDefaultMaxLen,
                                           std::size_t overlap = kDefaultOverlap) {
  return SegmentSliding(tokens.size(), max_len, overlap);
}

}  // namespace clineval

#endif  // CLINEVAL_TEXT_HPP_
