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

#ifndef CLINEVAL_EMBEDDINGS_HPP_
#define CLINEVAL_EMBEDDINGS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "clineval/error.hpp"
#include "clineval/io_util.hpp"
#include "clineval/text.hpp"
#include "json.hpp"

namespace clineval {

using Vector = std::vector<double>;

// Dense row-major matrix, one row per token.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }

  void AppendRow(std::span<const double> values) {
    if (rows_ == 0 && cols_ == 0) cols_ = values.size();
    if (values.size() != cols_) {
      throw Error(Errc::kDimMismatch, "row of length " + std::to_string(values.size()) +
                                          ", expected " + std::to_string(cols_));
    }
    data_.insert(data_.end(), values.begin(), values.end());
    ++rows_;
  }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline double Cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw Error(Errc::kDimMismatch,
                std::to_string(u.size()) + " vs " + std::to_string(v.size()));
  }
  double dot = 0.0;
  double nu = 0.0;
  double nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0.0 || nv == 0.0) throw Error(Errc::kZeroVector, "cosine of a zero vector");
  const double c = dot / (std::sqrt(nu) * std::sqrt(nv));
  return std::clamp(c, -1.0, 1.0);
}

enum class EmbeddingKind { kToken, kConcept };

// Key -> vector table with a fixed dimension. Zero vectors are rejected.
class EmbeddingStore {
 public:
  EmbeddingStore() = default;
  EmbeddingStore(std::size_t dim, EmbeddingKind kind) : dim_(dim), kind_(kind) {}

  std::size_t dim() const { return dim_; }
  EmbeddingKind kind() const { return kind_; }
  std::size_t size() const { return keys_.size(); }
  const std::vector<std::string>& keys() const { return keys_; }

  void Add(const std::string& key, Vector v) {
    if (v.size() != dim_) {
      throw Error(Errc::kDimMismatch, key + ": " + std::to_string(v.size()) +
                                          " values, expected " + std::to_string(dim_));
    }
    if (std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; })) {
      throw Error(Errc::kZeroVector, key);
    }
    if (!table_.emplace(key, std::move(v)).second) throw Error(Errc::kDuplicateKey, key);
    keys_.push_back(key);
  }

  const Vector* Find(std::string_view key) const {
    auto it = table_.find(std::string(key));
    return it == table_.end() ? nullptr : &it->second;
  }

  Vector Mean() const {
    Vector mean(dim_, 0.0);
    if (keys_.empty()) return mean;
    for (const auto& k : keys_) {
      const auto& v = table_.at(k);
      for (std::size_t i = 0; i < dim_; ++i) mean[i] += v[i];
    }
    for (auto& x : mean) x /= static_cast<double>(keys_.size());
    return mean;
  }

 private:
  std::size_t dim_ = 0;
  EmbeddingKind kind_ = EmbeddingKind::kToken;
  std::vector<std::string> keys_;
  std::unordered_map<std::string, Vector> table_;
};

// Text format: "<count> <dim>" header, then `key v1 ... v_dim` per line.
inline EmbeddingStore ParseStore(std::string_view data,
                                 EmbeddingKind kind = EmbeddingKind::kToken) {
  const auto lines = SplitLines(data);
  std::size_t idx = 0;
  while (idx < lines.size() && IsBlank(lines[idx])) ++idx;
  if (idx == lines.size()) throw Error(Errc::kHeaderMismatch, "empty embedding file");
  std::istringstream header(lines[idx]);
  long long count = -1;
  long long dim = -1;
  std::string extra;
  if (!(header >> count >> dim) || (header >> extra) || count < 0 || dim <= 0) {
    throw Error(Errc::kHeaderMismatch, "expected '<count> <dim>', got '" + lines[idx] + "'");
  }
  EmbeddingStore store(static_cast<std::size_t>(dim), kind);
  for (++idx; idx < lines.size(); ++idx) {
    const auto& line = lines[idx];
    if (IsBlank(line)) continue;
    std::istringstream row(line);
    std::string key;
    row >> key;
    Vector v;
    std::string tok;
    while (row >> tok) {
      double x = 0;
      if (!ParseDouble(tok, x) || !std::isfinite(x)) {
        throw Error(Errc::kParseError, "line " + std::to_string(idx + 1) +
                                           ": bad float '" + tok + "'");
      }
      v.push_back(x);
    }
    if (v.size() != store.dim()) {
      throw Error(Errc::kDimMismatch, "line " + std::to_string(idx + 1) + ": " +
                                          std::to_string(v.size()) + " values under dim " +
                                          std::to_string(store.dim()));
    }
    store.Add(key, std::move(v));
  }
  if (store.size() != static_cast<std::size_t>(count)) {
    throw Error(Errc::kHeaderMismatch, "header declares " + std::to_string(count) +
                                           " entries, file has " + std::to_string(store.size()));
  }
  return store;
}

inline EmbeddingStore LoadStore(const std::filesystem::path& path,
                                EmbeddingKind kind = EmbeddingKind::kToken) {
  return ParseStore(ReadFile(path), kind);
}

inline std::string SerializeStore(const EmbeddingStore& store) {
  std::string out = std::to_string(store.size()) + " " + std::to_string(store.dim()) + "\n";
  for (const auto& key : store.keys()) {
    out += key;
    for (double x : *store.Find(key)) {
      out.push_back(' ');
      out += FormatDouble(x);
    }
    out.push_back('\n');
  }
  return out;
}

enum class Side { kSystem, kReference };

inline std::string_view SideName(Side s) { return s == Side::kSystem ? "system" : "reference"; }

inline bool ParseSide(std::string_view s, Side& out) {
  std::string v(s);
  std::transform(v.begin(), v.end(), v.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (v == "system" || v == "sys") {
    out = Side::kSystem;
    return true;
  }
  if (v == "reference" || v == "ref") {
    out = Side::kReference;
    return true;
  }
  return false;
}

struct DocRef {
  std::string pair_id;
  Side side = Side::kSystem;
};

struct DocEmbedding {
  std::string pair_id;
  Side side = Side::kSystem;
  std::vector<std::string> tokens;
  Matrix matrix;

  std::size_t dim() const { return matrix.cols(); }
};

// Source of token vectors. A provider embeds one window of a document at a
// time; EmbedDocument handles windowing and overlap resolution.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual std::size_t dim() const = 0;

  // The token list this provider embeds for a document.
  virtual std::vector<std::string> Tokens(const DocRef& doc, std::string_view text,
                                          Normalization mode) const {
    (void)doc;
    return Tokenize(text, mode).surfaces();
  }

  // Returns exactly seg.size() rows for doc_tokens[seg.begin, seg.end).
  virtual Matrix EmbedSegment(const DocRef& doc, std::span<const std::string> doc_tokens,
                              const Segment& seg) const = 0;
};

// Position-independent lookups in a static store. Unknown tokens share the
// mean of all store vectors.
class StaticProvider : public EmbeddingProvider {
 public:
  explicit StaticProvider(const EmbeddingStore& store) : store_(store), unk_(store.Mean()) {}

  std::size_t dim() const override { return store_.dim(); }

  const Vector& unk() const { return unk_; }

  Matrix EmbedSegment(const DocRef&, std::span<const std::string> doc_tokens,
                      const Segment& seg) const override {
    Matrix m(0, store_.dim());
    for (std::size_t i = seg.begin; i < seg.end; ++i) {
      const Vector* v = store_.Find(doc_tokens[i]);
      m.AppendRow(v ? *v : unk_);
    }
    return m;
  }

 private:
  const EmbeddingStore& store_;
  Vector unk_;
};

// Per-document contextual vectors exported by an external model. Rows are
// already one per token, so a segment is a slice of the stored matrix.
class ContextualFileProvider : public EmbeddingProvider {
 public:
  static ContextualFileProvider Parse(std::string_view data) {
    ContextualFileProvider p;
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
      for (const char* key : {"pair_id", "side", "tokens", "vectors"}) {
        if (!obj.is_object() || !obj.contains(key)) {
          throw Error(Errc::kMissingField, std::string(key) + " (" + where + ")");
        }
      }
      DocEmbedding doc;
      try {
        doc.pair_id = obj["pair_id"].get<std::string>();
        if (!ParseSide(obj["side"].get<std::string>(), doc.side)) {
          throw Error(Errc::kParseError, where + ": bad side");
        }
        doc.tokens = obj["tokens"].get<std::vector<std::string>>();
        for (const auto& row : obj["vectors"]) {
          const auto v = row.get<std::vector<double>>();
          if (p.dim_ == 0) p.dim_ = v.size();
          if (v.size() != p.dim_ || v.empty()) {
            throw Error(Errc::kDimMismatch, where + ": vector length " +
                                                std::to_string(v.size()));
          }
          doc.matrix.AppendRow(v);
        }
      } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::kParseError, where + ": " + e.what());
      }
      if (doc.tokens.size() != doc.matrix.rows()) {
        throw Error(Errc::kLengthMismatch, where + ": " + std::to_string(doc.tokens.size()) +
                                               " tokens vs " +
                                               std::to_string(doc.matrix.rows()) + " vectors");
      }
      auto key = Key(doc.pair_id, doc.side);
      if (p.docs_.count(key)) throw Error(Errc::kDuplicateKey, key);
      p.docs_.emplace(std::move(key), std::move(doc));
    }
    return p;
  }

  static ContextualFileProvider Load(const std::filesystem::path& path) {
    return Parse(ReadFile(path));
  }

  std::size_t dim() const override { return dim_; }
  std::size_t size() const { return docs_.size(); }

  const DocEmbedding* Find(const DocRef& doc) const {
    auto it = docs_.find(Key(doc.pair_id, doc.side));
    return it == docs_.end() ? nullptr : &it->second;
  }

  std::vector<std::string> Tokens(const DocRef& doc, std::string_view,
                                  Normalization) const override {
    return Require(doc).tokens;
  }

  Matrix EmbedSegment(const DocRef& doc, std::span<const std::string> doc_tokens,
                      const Segment& seg) const override {
    const auto& stored = Require(doc);
    if (doc_tokens.size() != stored.tokens.size() ||
        !std::equal(doc_tokens.begin(), doc_tokens.end(), stored.tokens.begin())) {
      throw Error(Errc::kTokenMismatch, doc.pair_id + "/" + std::string(SideName(doc.side)));
    }
    Matrix m(0, dim_);
    for (std::size_t i = seg.begin; i < seg.end; ++i) m.AppendRow(stored.matrix.row(i));
    return m;
  }

 private:
  static std::string Key(const std::string& pair_id, Side side) {
    return pair_id + '\x1f' + std::string(SideName(side));
  }

  const DocEmbedding& Require(const DocRef& doc) const {
    const DocEmbedding* d = Find(doc);
    if (!d) {
      throw Error(Errc::kProviderError, "no contextual vectors for " + doc.pair_id + "/" +
                                            std::string(SideName(doc.side)));
    }
    return *d;
  }

  std::size_t dim_ = 0;
  std::map<std::string, DocEmbedding> docs_;
};

// Embeds each sliding window independently and concatenates them. Tokens in
// an overlap zone keep the vector from the earlier window, so the result has
// exactly one row per token.
inline DocEmbedding EmbedDocument(const DocRef& doc, std::vector<std::string> tokens,
                                  const EmbeddingProvider& provider,
                                  std::size_t max_len = kDefaultMaxLen,
                                  std::size_t overlap = kDefaultOverlap) {
  const auto segments = SegmentSliding(tokens.size(), max_len, overlap);
  DocEmbedding out;
  out.pair_id = doc.pair_id;
  out.side = doc.side;
  out.matrix = Matrix(0, provider.dim());
  std::size_t covered = 0;
  for (const auto& seg : segments) {
    if (seg.size() == 0) continue;
    Matrix rows = provider.EmbedSegment(doc, tokens, seg);
    if (rows.rows() != seg.size() || rows.cols() != provider.dim()) {
      throw Error(Errc::kProviderError, "provider returned " + std::to_string(rows.rows()) +
                                            "x" + std::to_string(rows.cols()) +
                                            " for a window of " + std::to_string(seg.size()));
    }
    for (std::size_t i = covered - seg.begin; i < rows.rows(); ++i) {
      out.matrix.AppendRow(rows.row(i));
    }
    covered = seg.end;
  }
  out.tokens = std::move(tokens);
  return out;
}

// Single window over the first max_len tokens; the rest are dropped.
inline DocEmbedding EmbedTruncated(const DocRef& doc, std::vector<std::string> tokens,
                                   const EmbeddingProvider& provider,
                                   std::size_t max_len = kDefaultMaxLen) {
  if (tokens.size() <= max_len) return EmbedDocument(doc, std::move(tokens), provider, max_len, 0);
  const Segment head{0, max_len, 0};
  DocEmbedding out;
  out.pair_id = doc.pair_id;
  out.side = doc.side;
  out.matrix = provider.EmbedSegment(doc, tokens, head);
  if (out.matrix.rows() != max_len || out.matrix.cols() != provider.dim()) {
    throw Error(Errc::kProviderError, "provider returned a malformed window");
  }
  tokens.resize(max_len);
  out.tokens = std::move(tokens);
  return out;
}

}  // namespace clineval

#endif  // CLINEVAL_EMBEDDINGS_HPP_
