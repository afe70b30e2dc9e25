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

// Domain types for summary pairs, human annotations and score columns, with
// the JSONL/CSV loaders that produce them. Every loader is total-or-error: a
// returned value always satisfies the type invariants below.

#ifndef CLINEVAL_DATA_HPP_
#define CLINEVAL_DATA_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "clineval/error.hpp"
#include "clineval/io_util.hpp"
#include "json.hpp"

namespace clineval {

using json = nlohmann::json;

enum class Section { kHpi, kExam, kResults, kAssessment, kOther };

inline std::string_view SectionName(Section s) {
  switch (s) {
    case Section::kHpi: return "HPI";
    case Section::kExam: return "EXAM";
    case Section::kResults: return "RESULTS";
    case Section::kAssessment: return "ASSESSMENT";
    case Section::kOther: return "OTHER";
  }
  return "OTHER";
}

inline std::optional<Section> ParseSection(std::string_view s) {
  std::string up(s);
  std::transform(up.begin(), up.end(), up.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (up == "HPI") return Section::kHpi;
  if (up == "EXAM") return Section::kExam;
  if (up == "RESULTS") return Section::kResults;
  if (up == "ASSESSMENT") return Section::kAssessment;
  if (up == "OTHER") return Section::kOther;
  return std::nullopt;
}

struct SummaryPair {
  std::string pair_id;
  std::string dataset_id;
  std::optional<Section> section;
  std::string source;  // may be empty (radiology-style pairs)
  std::string reference;
  std::string system;
};

enum class AnnotationKind { kNone, kFacts, kKeyPhrases };

struct Dataset {
  std::string dataset_id;
  std::vector<SummaryPair> pairs;
  AnnotationKind annotation_kind = AnnotationKind::kNone;

  const SummaryPair* Find(std::string_view pair_id) const {
    auto it = index_.find(std::string(pair_id));
    return it == index_.end() ? nullptr : &pairs[it->second];
  }
  bool Contains(std::string_view pair_id) const { return Find(pair_id) != nullptr; }

  // Appends a pair, enforcing id uniqueness and the shared dataset id.
  void Add(SummaryPair pair) {
    if (index_.count(pair.pair_id)) throw Error(Errc::kDuplicateId, pair.pair_id);
    if (pairs.empty() && dataset_id.empty()) dataset_id = pair.dataset_id;
    if (pair.dataset_id.empty()) pair.dataset_id = dataset_id;
    if (pair.dataset_id != dataset_id) {
      throw Error(Errc::kParseError, "pair " + pair.pair_id + " has dataset_id '" +
                                         pair.dataset_id + "', expected '" +
                                         dataset_id + "'");
    }
    index_.emplace(pair.pair_id, pairs.size());
    pairs.push_back(std::move(pair));
  }

 private:
  std::unordered_map<std::string, std::size_t> index_;
};

enum class DataFormat { kJsonl, kCsv };

inline DataFormat FormatFromPath(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".csv" ? DataFormat::kCsv : DataFormat::kJsonl;
}

namespace data_detail {

[[noreturn]] inline void ParseFail(std::size_t line, const std::string& why) {
  throw Error(Errc::kParseError, "line " + std::to_string(line) + ": " + why);
}

// A flat record view over either a JSON object or a CSV row with header.
class Record {
 public:
  Record(const json* obj, std::size_t line) : obj_(obj), line_(line) {}
  Record(const std::vector<std::string>* header, const std::vector<std::string>* row,
         std::size_t line)
      : header_(header), row_(row), line_(line) {}

  std::size_t line() const { return line_; }

  bool Has(const std::string& key) const {
    if (obj_) return obj_->contains(key) && !(*obj_)[key].is_null();
    return Column(key).has_value();
  }

  std::optional<std::string> String(const std::string& key) const {
    if (obj_) {
      if (!obj_->contains(key) || (*obj_)[key].is_null()) return std::nullopt;
      const auto& v = (*obj_)[key];
      if (v.is_string()) return v.get<std::string>();
      if (v.is_number_integer()) return v.dump();
      ParseFail(line_, "field '" + key + "' must be a string");
    }
    auto col = Column(key);
    if (!col) return std::nullopt;
    return (*row_)[*col];
  }

  std::string RequireString(const std::string& key) const {
    auto v = String(key);
    if (!v) {
      throw Error(Errc::kMissingField,
                  key + " (line " + std::to_string(line_) + ")");
    }
    return *v;
  }

  // Non-negative counts are checked by the caller so NegativeCount can be
  // distinguished from malformed input.
  std::int64_t RequireInt(const std::string& key) const {
    if (obj_) {
      if (!obj_->contains(key) || (*obj_)[key].is_null()) {
        throw Error(Errc::kMissingField, key + " (line " + std::to_string(line_) + ")");
      }
      const auto& v = (*obj_)[key];
      if (v.is_number_integer()) return v.get<std::int64_t>();
      if (v.is_number_float()) {
        const double d = v.get<double>();
        if (std::floor(d) == d && std::isfinite(d)) return static_cast<std::int64_t>(d);
      }
      ParseFail(line_, "field '" + key + "' must be an integer");
    }
    const std::string s = RequireString(key);
    double d = 0;
    if (!ParseDouble(s, d) || std::floor(d) != d || !std::isfinite(d)) {
      ParseFail(line_, "field '" + key + "' must be an integer, got '" + s + "'");
    }
    return static_cast<std::int64_t>(d);
  }

 private:
  std::optional<std::size_t> Column(const std::string& key) const {
    for (std::size_t i = 0; i < header_->size(); ++i) {
      if ((*header_)[i] == key) {
        if (i >= row_->size()) return std::nullopt;
        return i;
      }
    }
    return std::nullopt;
  }

  const json* obj_ = nullptr;
  const std::vector<std::string>* header_ = nullptr;
  const std::vector<std::string>* row_ = nullptr;
  std::size_t line_ = 0;
};

// Calls fn(Record) for each record of a JSONL or headed CSV document.
template <typename Fn>
void ForEachRecord(std::string_view data, DataFormat format, Fn&& fn) {
  if (format == DataFormat::kJsonl) {
    std::size_t line_no = 0;
    for (const auto& line : SplitLines(data)) {
      ++line_no;
      if (IsBlank(line)) continue;
      json obj;
      try {
        obj = json::parse(line);
      } catch (const json::exception& e) {
        ParseFail(line_no, e.what());
      }
      if (!obj.is_object()) ParseFail(line_no, "record is not a JSON object");
      fn(Record(&obj, line_no));
    }
    return;
  }
  auto records = ParseCsv(data);
  if (records.empty()) return;
  const auto header = records.front().fields;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != header.size()) {
      ParseFail(rec.line, "expected " + std::to_string(header.size()) +
                              " fields, got " + std::to_string(rec.fields.size()));
    }
    fn(Record(&header, &rec.fields, rec.line));
  }
}

}  // namespace data_detail

inline Dataset ParseDataset(std::string_view data, DataFormat format,
                            std::string default_dataset_id = "") {
  Dataset ds;
  ds.dataset_id = std::move(default_dataset_id);
  bool first = true;
  data_detail::ForEachRecord(data, format, [&](const data_detail::Record& rec) {
    SummaryPair p;
    p.pair_id = rec.RequireString("pair_id");
    if (p.pair_id.empty()) data_detail::ParseFail(rec.line(), "empty pair_id");
    p.reference = rec.RequireString("reference");
    p.system = rec.RequireString("system");
    if (p.reference.empty()) data_detail::ParseFail(rec.line(), "empty reference");
    if (p.system.empty()) data_detail::ParseFail(rec.line(), "empty system");
    p.source = rec.String("source").value_or("");
    if (auto sec = rec.String("section"); sec && !sec->empty()) {
      p.section = ParseSection(*sec);
      if (!p.section) data_detail::ParseFail(rec.line(), "unknown section '" + *sec + "'");
    }
    p.dataset_id = rec.String("dataset_id").value_or("");
    if (first && !p.dataset_id.empty()) ds.dataset_id = p.dataset_id;
    first = false;
    if (p.dataset_id.empty()) p.dataset_id = ds.dataset_id;
    if (p.dataset_id != ds.dataset_id) {
      data_detail::ParseFail(rec.line(), "mixed dataset_id '" + p.dataset_id +
                                             "' vs '" + ds.dataset_id + "'");
    }
    ds.Add(std::move(p));
  });
  return ds;
}

inline Dataset LoadDataset(const std::filesystem::path& path, DataFormat format) {
  return ParseDataset(ReadFile(path), format, path.stem().string());
}

inline Dataset LoadDataset(const std::filesystem::path& path) {
  return LoadDataset(path, FormatFromPath(path));
}

inline std::string SerializeDataset(const Dataset& ds, DataFormat format) {
  std::string out;
  if (format == DataFormat::kJsonl) {
    for (const auto& p : ds.pairs) {
      json obj = json::object();
      obj["pair_id"] = p.pair_id;
      obj["dataset_id"] = p.dataset_id;
      obj["section"] = p.section ? json(std::string(SectionName(*p.section))) : json(nullptr);
      obj["source"] = p.source;
      obj["reference"] = p.reference;
      obj["system"] = p.system;
      out += obj.dump();
      out.push_back('\n');
    }
    return out;
  }
  AppendCsvRow(out, {"pair_id", "dataset_id", "section", "source", "reference", "system"});
  for (const auto& p : ds.pairs) {
    AppendCsvRow(out, {p.pair_id, p.dataset_id,
                       p.section ? std::string(SectionName(*p.section)) : "",
                       p.source, p.reference, p.system});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Fact-based annotations.

struct FactAnnotation {
  std::string pair_id;
  std::string annotator_id;
  std::int64_t correct_facts = 0;
  std::int64_t incorrect_facts = 0;
  std::int64_t hallucinated_facts = 0;
  std::int64_t omitted_facts = 0;
  std::int64_t reference_facts = 0;

  std::int64_t system_facts() const {
    return correct_facts + incorrect_facts + hallucinated_facts;
  }
};

// Throws NegativeCount or CountInconsistent on invariant violations.
inline void ValidateFactAnnotation(const FactAnnotation& a) {
  const std::pair<const char*, std::int64_t> counts[] = {
      {"correct", a.correct_facts},       {"incorrect", a.incorrect_facts},
      {"hallucinated", a.hallucinated_facts}, {"omitted", a.omitted_facts},
      {"reference_facts", a.reference_facts}};
  for (const auto& [name, v] : counts) {
    if (v < 0) {
      throw Error(Errc::kNegativeCount, a.pair_id + "/" + a.annotator_id + ": " +
                                            name + " = " + std::to_string(v));
    }
  }
  if (a.correct_facts > a.reference_facts) {
    throw Error(Errc::kCountInconsistent, a.pair_id + "/" + a.annotator_id +
                                              ": correct > reference_facts");
  }
  if (a.omitted_facts > a.reference_facts) {
    throw Error(Errc::kCountInconsistent, a.pair_id + "/" + a.annotator_id +
                                              ": omitted > reference_facts");
  }
}

// Data-quality warnings that do not reject the record.
inline std::vector<std::string> FactAnnotationWarnings(const FactAnnotation& a) {
  std::vector<std::string> warnings;
  if (a.correct_facts + a.omitted_facts > a.reference_facts) {
    warnings.push_back(a.pair_id + "/" + a.annotator_id +
                       ": correct + omitted exceeds reference_facts");
  }
  return warnings;
}

inline std::vector<FactAnnotation> ParseFactAnnotations(std::string_view data,
                                                        DataFormat format,
                                                        const Dataset* dataset = nullptr) {
  std::vector<FactAnnotation> out;
  std::set<std::pair<std::string, std::string>> seen;
  data_detail::ForEachRecord(data, format, [&](const data_detail::Record& rec) {
    FactAnnotation a;
    a.pair_id = rec.RequireString("pair_id");
    a.annotator_id = rec.String("annotator_id").value_or("");
    a.correct_facts = rec.RequireInt("correct");
    a.incorrect_facts = rec.RequireInt("incorrect");
    a.hallucinated_facts = rec.RequireInt("hallucinated");
    a.omitted_facts = rec.RequireInt("omitted");
    a.reference_facts = rec.RequireInt("reference_facts");
    ValidateFactAnnotation(a);
    if (dataset && !dataset->Contains(a.pair_id)) throw Error(Errc::kUnknownPair, a.pair_id);
    if (!seen.emplace(a.pair_id, a.annotator_id).second) {
      throw Error(Errc::kDuplicateId, a.pair_id + "/" + a.annotator_id);
    }
    out.push_back(std::move(a));
  });
  return out;
}

inline std::vector<FactAnnotation> LoadFactAnnotations(const std::filesystem::path& path,
                                                       const Dataset* dataset = nullptr) {
  return ParseFactAnnotations(ReadFile(path), FormatFromPath(path), dataset);
}

inline std::string SerializeFactAnnotations(const std::vector<FactAnnotation>& anns) {
  std::string out;
  for (const auto& a : anns) {
    json obj = {{"pair_id", a.pair_id},
                {"annotator_id", a.annotator_id},
                {"correct", a.correct_facts},
                {"incorrect", a.incorrect_facts},
                {"hallucinated", a.hallucinated_facts},
                {"omitted", a.omitted_facts},
                {"reference_facts", a.reference_facts}};
    out += obj.dump();
    out.push_back('\n');
  }
  return out;
}

// ---------------------------------------------------------------------------
// Key-phrase annotations.

struct HallucinatedSpan {
  std::size_t start = 0;  // byte offset into the system text
  std::size_t end = 0;
  std::string label;
};

struct OmissionMarker {
  std::size_t position = 0;  // insertion point in the system text
  std::string note;
};

struct KeyPhraseAnnotation {
  std::string pair_id;
  std::string annotator_id;
  std::vector<HallucinatedSpan> hallucinated_spans;
  std::vector<OmissionMarker> omission_markers;
};

inline std::vector<KeyPhraseAnnotation> ParseKeyPhraseAnnotations(
    std::string_view data, const Dataset* dataset = nullptr) {
  std::vector<KeyPhraseAnnotation> out;
  std::set<std::pair<std::string, std::string>> seen;
  std::size_t line_no = 0;
  for (const auto& line : SplitLines(data)) {
    ++line_no;
    if (IsBlank(line)) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& e) {
      data_detail::ParseFail(line_no, e.what());
    }
    if (!obj.is_object()) data_detail::ParseFail(line_no, "record is not a JSON object");
    data_detail::Record rec(&obj, line_no);
    KeyPhraseAnnotation a;
    a.pair_id = rec.RequireString("pair_id");
    a.annotator_id = rec.String("annotator_id").value_or("");
    const SummaryPair* pair = nullptr;
    if (dataset) {
      pair = dataset->Find(a.pair_id);
      if (!pair) throw Error(Errc::kUnknownPair, a.pair_id);
    }
    auto read_offset = [&](const json& item, const char* key) -> std::size_t {
      if (!item.contains(key) || !item[key].is_number_integer()) {
        throw Error(Errc::kMissingField,
                    std::string(key) + " (line " + std::to_string(line_no) + ")");
      }
      const auto v = item[key].get<std::int64_t>();
      if (v < 0) data_detail::ParseFail(line_no, std::string(key) + " is negative");
      return static_cast<std::size_t>(v);
    };
    if (obj.contains("hallucinations")) {
      if (!obj["hallucinations"].is_array()) {
        data_detail::ParseFail(line_no, "hallucinations must be an array");
      }
      for (const auto& item : obj["hallucinations"]) {
        HallucinatedSpan s;
        s.start = read_offset(item, "start");
        s.end = read_offset(item, "end");
        if (item.contains("label") && item["label"].is_string()) {
          s.label = item["label"].get<std::string>();
        }
        if (s.start >= s.end) data_detail::ParseFail(line_no, "span start must be < end");
        if (pair && s.end > pair->system.size()) {
          data_detail::ParseFail(line_no, "span exceeds system text bounds");
        }
        a.hallucinated_spans.push_back(std::move(s));
      }
    }
    if (obj.contains("omissions")) {
      if (!obj["omissions"].is_array()) {
        data_detail::ParseFail(line_no, "omissions must be an array");
      }
      for (const auto& item : obj["omissions"]) {
        OmissionMarker m;
        m.position = read_offset(item, "pos");
        if (item.contains("note") && item["note"].is_string()) {
          m.note = item["note"].get<std::string>();
        }
        if (pair && m.position > pair->system.size()) {
          data_detail::ParseFail(line_no, "omission marker beyond system text");
        }
        a.omission_markers.push_back(std::move(m));
      }
    }
    if (!seen.emplace(a.pair_id, a.annotator_id).second) {
      throw Error(Errc::kDuplicateId, a.pair_id + "/" + a.annotator_id);
    }
    out.push_back(std::move(a));
  }
  return out;
}

inline std::vector<KeyPhraseAnnotation> LoadKeyPhraseAnnotations(
    const std::filesystem::path& path, const Dataset* dataset = nullptr) {
  return ParseKeyPhraseAnnotations(ReadFile(path), dataset);
}

inline std::string SerializeKeyPhraseAnnotations(const std::vector<KeyPhraseAnnotation>& anns) {
  std::string out;
  for (const auto& a : anns) {
    json h = json::array();
    for (const auto& s : a.hallucinated_spans) {
      h.push_back({{"start", s.start}, {"end", s.end}, {"label", s.label}});
    }
    json o = json::array();
    for (const auto& m : a.omission_markers) o.push_back({{"pos", m.position}, {"note", m.note}});
    json obj = {{"pair_id", a.pair_id}, {"annotator_id", a.annotator_id},
                {"hallucinations", h}, {"omissions", o}};
    out += obj.dump();
    out.push_back('\n');
  }
  return out;
}

// ---------------------------------------------------------------------------
// Score columns and tables.

// Per-pair values of one metric, kept in insertion order.
class ScoreColumn {
 public:
  ScoreColumn() = default;
  explicit ScoreColumn(std::string metric_name, bool higher_is_better = true)
      : metric_name(std::move(metric_name)), higher_is_better(higher_is_better) {}

  std::string metric_name;
  bool higher_is_better = true;

  void Set(const std::string& pair_id, double value) {
    if (std::isnan(value)) throw Error(Errc::kNaNValue, metric_name + "/" + pair_id);
    auto [it, inserted] = index_.emplace(pair_id, ids_.size());
    if (!inserted) throw Error(Errc::kDuplicateId, metric_name + "/" + pair_id);
    ids_.push_back(pair_id);
    values_.push_back(value);
  }

  std::optional<double> Get(std::string_view pair_id) const {
    auto it = index_.find(std::string(pair_id));
    if (it == index_.end()) return std::nullopt;
    return values_[it->second];
  }

  bool Contains(std::string_view pair_id) const {
    return index_.count(std::string(pair_id)) != 0;
  }

  const std::vector<std::string>& ids() const { return ids_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }

 private:
  std::vector<std::string> ids_;
  std::vector<double> values_;
  std::unordered_map<std::string, std::size_t> index_;
};

inline bool ParseDirection(std::string_view s, bool& higher) {
  std::string v(s);
  std::transform(v.begin(), v.end(), v.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (v == "higher" || v == "true" || v == "1") {
    higher = true;
    return true;
  }
  if (v == "lower" || v == "false" || v == "0") {
    higher = false;
    return true;
  }
  return false;
}

// Header `metric_name,higher|lower`, then `pair_id,value` rows.
inline ScoreColumn ParseScoreColumn(std::string_view data, const Dataset* dataset = nullptr) {
  auto records = ParseCsv(data);
  if (records.empty()) throw Error(Errc::kParseError, "line 1: missing header");
  const auto& header = records.front();
  if (header.fields.size() != 2) {
    throw Error(Errc::kParseError, "line 1: header must be metric_name,higher_is_better");
  }
  bool higher = true;
  if (!ParseDirection(header.fields[1], higher)) {
    throw Error(Errc::kParseError, "line 1: bad direction '" + header.fields[1] + "'");
  }
  ScoreColumn col(header.fields[0], higher);
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != 2) {
      data_detail::ParseFail(rec.line, "expected pair_id,value");
    }
    double v = 0;
    const auto& raw = rec.fields[1];
    if (!ParseDouble(raw, v)) data_detail::ParseFail(rec.line, "bad value '" + raw + "'");
    if (std::isnan(v)) throw Error(Errc::kNaNValue, rec.fields[0]);
    if (dataset && !dataset->Contains(rec.fields[0])) {
      throw Error(Errc::kUnknownPair, rec.fields[0]);
    }
    col.Set(rec.fields[0], v);
  }
  return col;
}

inline ScoreColumn LoadScoreColumn(const std::filesystem::path& path,
                                   const Dataset* dataset = nullptr) {
  return ParseScoreColumn(ReadFile(path), dataset);
}

inline std::string SerializeScoreColumn(const ScoreColumn& col) {
  std::string out;
  AppendCsvRow(out, {col.metric_name, col.higher_is_better ? "higher" : "lower"});
  for (std::size_t i = 0; i < col.size(); ++i) {
    AppendCsvRow(out, {col.ids()[i], FormatDouble(col.values()[i])});
  }
  return out;
}

// Dataset pairs that the column does not cover, in dataset order.
inline std::vector<std::string> MissingIds(const ScoreColumn& col, const Dataset& ds) {
  std::vector<std::string> missing;
  for (const auto& p : ds.pairs) {
    if (!col.Contains(p.pair_id)) missing.push_back(p.pair_id);
  }
  return missing;
}

// Metric columns over a shared pair ordering.
struct ScoreTable {
  std::vector<std::string> pair_ids;
  std::vector<ScoreColumn> columns;

  const ScoreColumn* Find(std::string_view name) const {
    for (const auto& c : columns) {
      if (c.metric_name == name) return &c;
    }
    return nullptr;
  }

  void Add(ScoreColumn col) {
    if (Find(col.metric_name)) throw Error(Errc::kDuplicateKey, col.metric_name);
    std::set<std::string> known(pair_ids.begin(), pair_ids.end());
    for (const auto& id : col.ids()) {
      if (known.insert(id).second) pair_ids.push_back(id);
    }
    columns.push_back(std::move(col));
  }
};

// Wide layout: `pair_id,<metric>...`; an empty cell means no value. A
// leading `#direction` row records higher/lower per metric.
inline std::string SerializeScoreTable(const ScoreTable& table) {
  std::string out;
  std::vector<std::string> header{"pair_id"};
  std::vector<std::string> dirs{"#direction"};
  for (const auto& c : table.columns) {
    header.push_back(c.metric_name);
    dirs.push_back(c.higher_is_better ? "higher" : "lower");
  }
  AppendCsvRow(out, header);
  AppendCsvRow(out, dirs);
  for (const auto& id : table.pair_ids) {
    std::vector<std::string> row{id};
    for (const auto& c : table.columns) {
      auto v = c.Get(id);
      row.push_back(v ? FormatDouble(*v) : "");
    }
    AppendCsvRow(out, row);
  }
  return out;
}

inline ScoreTable ParseScoreTable(std::string_view data) {
  auto records = ParseCsv(data);
  if (records.empty()) throw Error(Errc::kParseError, "line 1: missing header");
  const auto& header = records.front().fields;
  if (header.empty() || header[0] != "pair_id") {
    throw Error(Errc::kParseError, "line 1: first column must be pair_id");
  }
  ScoreTable table;
  std::vector<ScoreColumn> cols;
  for (std::size_t c = 1; c < header.size(); ++c) cols.emplace_back(header[c]);
  std::size_t r = 1;
  if (r < records.size() && !records[r].fields.empty() &&
      records[r].fields[0] == "#direction") {
    const auto& dirs = records[r].fields;
    for (std::size_t c = 1; c < dirs.size() && c < header.size(); ++c) {
      bool higher = true;
      if (!ParseDirection(dirs[c], higher)) {
        data_detail::ParseFail(records[r].line, "bad direction '" + dirs[c] + "'");
      }
      cols[c - 1].higher_is_better = higher;
    }
    ++r;
  }
  std::set<std::string> seen;
  for (; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != header.size()) {
      data_detail::ParseFail(rec.line, "expected " + std::to_string(header.size()) + " fields");
    }
    const auto& id = rec.fields[0];
    if (!seen.insert(id).second) throw Error(Errc::kDuplicateId, id);
    table.pair_ids.push_back(id);
    for (std::size_t c = 1; c < header.size(); ++c) {
      if (rec.fields[c].empty()) continue;
      double v = 0;
      if (!ParseDouble(rec.fields[c], v)) {
        data_detail::ParseFail(rec.line, "bad value '" + rec.fields[c] + "'");
      }
      if (std::isnan(v)) throw Error(Errc::kNaNValue, header[c] + "/" + id);
      cols[c - 1].Set(id, v);
    }
  }
  table.columns = std::move(cols);
  return table;
}

inline ScoreTable LoadScoreTable(const std::filesystem::path& path) {
  return ParseScoreTable(ReadFile(path));
}

}  // namespace clineval

#endif  // CLINEVAL_DATA_HPP_
