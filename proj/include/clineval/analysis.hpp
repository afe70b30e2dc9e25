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

// Meta-evaluation: z-score ensembles, Pearson correlation reports against
// human reference scores, cross-dataset averaging and inter-annotator
// agreement.

#ifndef CLINEVAL_ANALYSIS_HPP_
#define CLINEVAL_ANALYSIS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "clineval/data.hpp"
#include "clineval/error.hpp"
#include "clineval/io_util.hpp"
#include "clineval/refscores.hpp"

namespace clineval {

enum class SigmaMode { kPopulation, kSample };

inline std::string_view SigmaModeName(SigmaMode m) {
  return m == SigmaMode::kPopulation ? "population" : "sample";
}

// (x - mean) / sigma over every value in the column.
inline ScoreColumn ZScoreColumn(const ScoreColumn& col, SigmaMode mode = SigmaMode::kPopulation) {
  const auto& v = col.values();
  if (v.size() < 2) {
    throw Error(Errc::kDegenerateColumn, col.metric_name + ": fewer than 2 values");
  }
  const auto n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double sigma = std::sqrt(ss / (mode == SigmaMode::kPopulation ? n : n - 1.0));
  if (!(sigma > 0.0)) throw Error(Errc::kDegenerateColumn, col.metric_name + ": constant values");
  ScoreColumn out(col.metric_name, col.higher_is_better);
  for (std::size_t i = 0; i < v.size(); ++i) out.Set(col.ids()[i], (v[i] - mean) / sigma);
  return out;
}

struct EnsembleConfig {
  std::string name;
  std::vector<std::string> members;  // uniformly weighted
};

inline EnsembleConfig MistComb1(std::string bertscore_member = "bertscore-r") {
  return {"mist-comb1", {"mist", "rouge-1-r", std::move(bertscore_member)}};
}

inline EnsembleConfig MistComb2() { return {"mist-comb2", {"mist", "rouge-1-r", "bleurt"}}; }

inline std::optional<EnsembleConfig> FindPreset(std::string_view name) {
  if (name == "mist-comb1") return MistComb1();
  if (name == "mist-comb2") return MistComb2();
  return std::nullopt;
}

// Each member is z-scored over its own full column; the ensemble covers the
// pairs every member scores, in table order.
inline ScoreColumn Ensemble(const ScoreTable& table, const EnsembleConfig& config,
                            SigmaMode mode = SigmaMode::kPopulation) {
  if (config.members.size() < 2) {
    throw Error(Errc::kConfigError, config.name + ": an ensemble needs at least 2 members");
  }
  std::vector<ScoreColumn> z;
  for (const auto& m : config.members) {
    const ScoreColumn* col = table.Find(m);
    if (!col) throw Error(Errc::kMissingMember, config.name + ": " + m);
    z.push_back(ZScoreColumn(*col, mode));
  }
  ScoreColumn out(config.name, true);
  for (const auto& id : table.pair_ids) {
    // Extended precision keeps the mean of identical members exact.
    long double sum = 0.0L;
    bool complete = true;
    for (const auto& col : z) {
      auto v = col.Get(id);
      if (!v) {
        complete = false;
        break;
      }
      sum += static_cast<long double>(*v);
    }
    if (complete) {
      out.Set(id, static_cast<double>(sum / static_cast<long double>(z.size())));
    }
  }
  return out;
}

inline double Pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(Errc::kLengthMismatch,
                std::to_string(x.size()) + " vs " + std::to_string(y.size()));
  }
  if (x.size() < 2) throw Error(Errc::kDegenerateInput, "fewer than 2 points");
  const auto n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw Error(Errc::kDegenerateInput, "constant input");
  return std::clamp(sxy / (std::sqrt(sxx) * std::sqrt(syy)), -1.0, 1.0);
}

struct CorrelationCell {
  std::optional<double> r;  // unset when undefined
  std::size_t n = 0;        // pairs used (or reports averaged)
};

struct CorrelationReport {
  std::string dataset_id;
  std::vector<std::string> metrics;
  std::vector<std::string> criteria;
  std::vector<std::vector<CorrelationCell>> cells;  // [metric][criterion]
  std::vector<std::optional<double>> aggregate;     // per metric; empty if not applicable

  bool has_aggregate() const { return !aggregate.empty(); }

  std::optional<std::size_t> MetricIndex(std::string_view m) const {
    for (std::size_t i = 0; i < metrics.size(); ++i) {
      if (metrics[i] == m) return i;
    }
    return std::nullopt;
  }
  std::optional<std::size_t> CriterionIndex(std::string_view c) const {
    for (std::size_t i = 0; i < criteria.size(); ++i) {
      if (criteria[i] == c) return i;
    }
    return std::nullopt;
  }
  const CorrelationCell* Cell(std::string_view m, std::string_view c) const {
    auto mi = MetricIndex(m);
    auto ci = CriterionIndex(c);
    if (!mi || !ci) return nullptr;
    return &cells[*mi][*ci];
  }
};

// Fills the aggregate column when F1, hallucination and omission criteria
// (rate- or count-based) are all present.
inline void RecomputeAggregate(CorrelationReport& report) {
  report.aggregate.clear();
  auto f = report.CriterionIndex(criteria::kFactualF1);
  auto h = report.CriterionIndex(criteria::kHallucRate);
  auto o = report.CriterionIndex(criteria::kOmissionRate);
  if (!f || !h || !o) return;
  for (const auto& row : report.cells) {
    const auto& cf = row[*f].r;
    const auto& ch = row[*h].r;
    const auto& co = row[*o].r;
    report.aggregate.push_back(cf && ch && co ? std::optional<double>(AggregateScore(*cf, *ch, *co))
                                              : std::nullopt);
  }
}

namespace analysis_detail {

// Values of both columns over the pairs they share, in metric column order.
inline std::pair<std::vector<double>, std::vector<double>> Paired(const ScoreColumn& a,
                                                                   const ScoreColumn& b) {
  std::pair<std::vector<double>, std::vector<double>> out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (auto v = b.Get(a.ids()[i])) {
      out.first.push_back(a.values()[i]);
      out.second.push_back(*v);
    }
  }
  return out;
}

}  // namespace analysis_detail

// Pearson r for each (metric, criterion) over the pairs both columns cover.
// Undefined cells are recorded, never fatal.
inline CorrelationReport BuildCorrelationReport(const ScoreTable& table,
                                                const std::vector<ScoreColumn>& refs,
                                                std::string dataset_id = "") {
  CorrelationReport report;
  report.dataset_id = std::move(dataset_id);
  for (const auto& c : table.columns) report.metrics.push_back(c.metric_name);
  for (const auto& r : refs) report.criteria.push_back(r.metric_name);
  for (const auto& col : table.columns) {
    std::vector<CorrelationCell> row;
    for (const auto& ref : refs) {
      auto [x, y] = analysis_detail::Paired(col, ref);
      CorrelationCell cell;
      cell.n = x.size();
      try {
        cell.r = Pearson(x, y);
      } catch (const Error&) {
        cell.r.reset();
      }
      row.push_back(cell);
    }
    report.cells.push_back(std::move(row));
  }
  RecomputeAggregate(report);
  return report;
}

// Unweighted mean per cell over the reports defining it; n counts those
// reports. The aggregate is recomputed from the averaged cells.
inline CorrelationReport AverageReports(const std::vector<CorrelationReport>& reports) {
  if (reports.empty()) throw Error(Errc::kNoSharedMetrics, "no reports to average");
  CorrelationReport out;
  out.dataset_id = "average";
  std::map<std::string, std::size_t> metric_seen;
  for (const auto& r : reports) {
    for (const auto& m : r.metrics) {
      if (!metric_seen.count(m)) out.metrics.push_back(m);
      ++metric_seen[m];
    }
    for (const auto& c : r.criteria) {
      if (std::find(out.criteria.begin(), out.criteria.end(), c) == out.criteria.end()) {
        out.criteria.push_back(c);
      }
    }
  }
  const bool shared = std::any_of(metric_seen.begin(), metric_seen.end(),
                                  [&](const auto& kv) { return kv.second == reports.size(); });
  if (!shared) throw Error(Errc::kNoSharedMetrics, "no metric appears in every report");
  for (const auto& m : out.metrics) {
    std::vector<CorrelationCell> row;
    for (const auto& c : out.criteria) {
      double sum = 0.0;
      std::size_t n = 0;
      for (const auto& r : reports) {
        const CorrelationCell* cell = r.Cell(m, c);
        if (cell && cell->r) {
          sum += *cell->r;
          ++n;
        }
      }
      CorrelationCell avg;
      avg.n = n;
      if (n) avg.r = sum / static_cast<double>(n);
      row.push_back(avg);
    }
    out.cells.push_back(std::move(row));
  }
  RecomputeAggregate(out);
  return out;
}

// CSV rows (metric, criterion, r, n); undefined r is written as "undefined".
// Aggregate values appear under criterion "aggregate" with an empty n.
inline std::string SerializeReportCsv(const CorrelationReport& report) {
  std::string out;
  AppendCsvRow(out, {"metric", "criterion", "r", "n"});
  for (std::size_t m = 0; m < report.metrics.size(); ++m) {
    for (std::size_t c = 0; c < report.criteria.size(); ++c) {
      const auto& cell = report.cells[m][c];
      AppendCsvRow(out, {report.metrics[m], report.criteria[c],
                         cell.r ? FormatDouble(*cell.r) : "undefined", std::to_string(cell.n)});
    }
    if (report.has_aggregate()) {
      const auto& a = report.aggregate[m];
      AppendCsvRow(out, {report.metrics[m], std::string(criteria::kAggregate),
                         a ? FormatDouble(*a) : "undefined", ""});
    }
  }
  return out;
}

inline CorrelationReport ParseReportCsv(std::string_view data, std::string dataset_id = "") {
  auto records = ParseCsv(data);
  if (records.empty() || records[0].fields != std::vector<std::string>{"metric", "criterion", "r", "n"}) {
    throw Error(Errc::kParseError, "line 1: expected header metric,criterion,r,n");
  }
  CorrelationReport report;
  report.dataset_id = std::move(dataset_id);
  struct Raw {
    std::string m, c;
    CorrelationCell cell;
  };
  std::vector<Raw> raws;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& f = records[i].fields;
    if (f.size() != 4) {
      throw Error(Errc::kParseError, "line " + std::to_string(records[i].line) + ": 4 fields expected");
    }
    if (f[1] == criteria::kAggregate) continue;
    Raw raw{f[0], f[1], {}};
    if (f[2] != "undefined") {
      double r = 0;
      if (!ParseDouble(f[2], r)) {
        throw Error(Errc::kParseError, "line " + std::to_string(records[i].line) + ": bad r");
      }
      raw.cell.r = r;
    }
    double n = 0;
    if (!f[3].empty() && ParseDouble(f[3], n)) raw.cell.n = static_cast<std::size_t>(n);
    if (!report.MetricIndex(raw.m)) report.metrics.push_back(raw.m);
    if (!report.CriterionIndex(raw.c)) report.criteria.push_back(raw.c);
    raws.push_back(std::move(raw));
  }
  report.cells.assign(report.metrics.size(),
                      std::vector<CorrelationCell>(report.criteria.size()));
  for (const auto& raw : raws) {
    report.cells[*report.MetricIndex(raw.m)][*report.CriterionIndex(raw.c)] = raw.cell;
  }
  RecomputeAggregate(report);
  return report;
}

inline std::string CriterionTitle(std::string_view c) {
  if (c == criteria::kFactualP) return "Factual P";
  if (c == criteria::kFactualR) return "Factual R";
  if (c == criteria::kFactualF1) return "Factual F1";
  if (c == criteria::kHallucRate || c == criteria::kHallucCount) return "Hallucination";
  if (c == criteria::kOmissionRate || c == criteria::kOmissionCount) return "Omission";
  return std::string(c);
}

// Aligned table with two-decimal cells; "-" marks undefined values.
inline std::string FormatReportTable(const CorrelationReport& report) {
  std::vector<std::string> header{"Metric"};
  for (const auto& c : report.criteria) header.push_back(CriterionTitle(c));
  if (report.has_aggregate()) header.push_back("Aggregate Score");
  std::vector<std::vector<std::string>> rows;
  auto fmt = [](const std::optional<double>& v) {
    if (!v) return std::string("-");
    std::ostringstream os;
    os << std::fixed << std::setprecision(2) << (std::abs(*v) < 0.005 ? 0.0 : *v);
    return os.str();
  };
  for (std::size_t m = 0; m < report.metrics.size(); ++m) {
    std::vector<std::string> row{report.metrics[m]};
    for (const auto& cell : report.cells[m]) row.push_back(fmt(cell.r));
    if (report.has_aggregate()) row.push_back(fmt(report.aggregate[m]));
    rows.push_back(std::move(row));
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (std::size_t i = 0; i < header.size(); ++i) width[i] = header[i].size();
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  }
  std::ostringstream os;
  if (!report.dataset_id.empty()) os << report.dataset_id << "\n";
  auto line = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i == 0) {
        os << std::left << std::setw(static_cast<int>(width[i])) << row[i];
      } else {
        os << "  " << std::right << std::setw(static_cast<int>(width[i])) << row[i];
      }
    }
    os << "\n";
  };
  line(header);
  std::size_t total = 0;
  for (auto w : width) total += w + 2;
  os << std::string(total - 2, '-') << "\n";
  for (const auto& row : rows) line(row);
  return os.str();
}

// Paired values behind one report cell, for external scatter plots.
inline std::string ScatterCsv(const ScoreColumn& metric, const ScoreColumn& criterion) {
  std::string out;
  AppendCsvRow(out, {"pair_id", metric.metric_name, criterion.metric_name});
  for (std::size_t i = 0; i < metric.size(); ++i) {
    if (auto v = criterion.Get(metric.ids()[i])) {
      AppendCsvRow(out, {metric.ids()[i], FormatDouble(metric.values()[i]), FormatDouble(*v)});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Inter-annotator agreement over per-item counts.

// Cohen's kappa with each integer count treated as a category. Perfect
// observed agreement gives 1 even when chance agreement is also 1.
inline double CohenKappa(std::span<const std::int64_t> a, std::span<const std::int64_t> b) {
  if (a.size() != b.size()) throw Error(Errc::kLengthMismatch, "kappa inputs differ in length");
  if (a.empty()) throw Error(Errc::kDegenerateInput, "no items");
  const auto n = static_cast<double>(a.size());
  std::map<std::int64_t, double> pa;
  std::map<std::int64_t, double> pb;
  double agree = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    pa[a[i]] += 1.0 / n;
    pb[b[i]] += 1.0 / n;
    if (a[i] == b[i]) agree += 1.0;
  }
  const double po = agree / n;
  if (agree == n) return 1.0;
  double pe = 0.0;
  for (const auto& [label, p] : pa) {
    if (auto it = pb.find(label); it != pb.end()) pe += p * it->second;
  }
  return (po - pe) / (1.0 - pe);
}

// Micro F1 where per item TP = min(a,b) + min(tol, |a-b|), capped at
// max(a,b). Precision and recall denominators are max(sum a, sum TP) and
// max(sum b, sum TP). Two all-zero vectors agree perfectly (1.0).
inline double TolerantF1(std::span<const std::int64_t> a, std::span<const std::int64_t> b,
                         std::int64_t tolerance) {
  if (a.size() != b.size()) throw Error(Errc::kLengthMismatch, "f1 inputs differ in length");
  std::int64_t tp = 0;
  std::int64_t predicted = 0;
  std::int64_t gold = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto lo = std::min(a[i], b[i]);
    const auto hi = std::max(a[i], b[i]);
    tp += std::min(lo + std::min(tolerance, hi - lo), hi);
    predicted += a[i];
    gold += b[i];
  }
  const auto p_den = std::max(predicted, tp);
  const auto r_den = std::max(gold, tp);
  if (p_den + r_den == 0) return 1.0;
  return 2.0 * static_cast<double>(tp) / static_cast<double>(p_den + r_den);
}

struct IaaResult {
  std::optional<double> kappa;
  std::vector<std::pair<std::int64_t, double>> f1;  // (tolerance, f1)
  std::optional<double> pearson;                    // unset on constant input
};

inline IaaResult Iaa(std::span<const std::int64_t> a, std::span<const std::int64_t> b,
                     std::span<const std::int64_t> tolerances) {
  if (a.size() != b.size()) throw Error(Errc::kLengthMismatch, "annotators cover different items");
  if (a.size() < 2) throw Error(Errc::kDegenerateInput, "need at least 2 items");
  IaaResult res;
  res.kappa = CohenKappa(a, b);
  for (auto t : tolerances) res.f1.emplace_back(t, TolerantF1(a, b, t));
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  try {
    res.pearson = Pearson(x, y);
  } catch (const Error&) {
    res.pearson.reset();
  }
  return res;
}

inline std::string ToleranceColumn(std::int64_t t) {
  return t == 0 ? "f1" : "f1(tol=" + std::to_string(t) + ")";
}

struct IaaRow {
  std::string field;
  std::optional<double> kappa;
  std::vector<std::optional<double>> f1;  // aligned with IaaTable::tolerances
  std::optional<double> pearson;
  std::size_t annotator_pairs = 0;
};

struct IaaTable {
  std::vector<std::int64_t> tolerances;
  std::vector<IaaRow> rows;
};

// Averaged pairwise agreement over every annotator pair sharing at least 2
// items, for the omitted, hallucinated, correct and incorrect counts.
inline IaaTable PairwiseFactIaa(const std::vector<FactAnnotation>& anns,
                                std::vector<std::int64_t> tolerances) {
  std::vector<std::string> annotators;
  std::map<std::string, std::map<std::string, const FactAnnotation*>> by_annotator;
  std::map<std::string, std::vector<std::string>> order;
  for (const auto& a : anns) {
    if (!by_annotator.count(a.annotator_id)) annotators.push_back(a.annotator_id);
    by_annotator[a.annotator_id][a.pair_id] = &a;
    order[a.annotator_id].push_back(a.pair_id);
  }
  struct Field {
    const char* name;
    std::int64_t FactAnnotation::*count;
  };
  const Field fields[] = {{"crit-omissions", &FactAnnotation::omitted_facts},
                          {"hallucinations", &FactAnnotation::hallucinated_facts},
                          {"correct-facts", &FactAnnotation::correct_facts},
                          {"incorrect-facts", &FactAnnotation::incorrect_facts}};
  IaaTable table;
  table.tolerances = tolerances;
  struct Acc {
    double sum = 0.0;
    std::size_t n = 0;
    void Add(const std::optional<double>& v) {
      if (v) {
        sum += *v;
        ++n;
      }
    }
    std::optional<double> Mean() const {
      return n ? std::optional<double>(sum / static_cast<double>(n)) : std::nullopt;
    }
  };
  std::vector<Acc> kappa(std::size(fields));
  std::vector<Acc> pearson(std::size(fields));
  std::vector<std::vector<Acc>> f1(std::size(fields), std::vector<Acc>(tolerances.size()));
  std::size_t usable_pairs = 0;
  for (std::size_t i = 0; i < annotators.size(); ++i) {
    for (std::size_t j = i + 1; j < annotators.size(); ++j) {
      const auto& first = by_annotator[annotators[i]];
      const auto& second = by_annotator[annotators[j]];
      std::vector<std::string> shared;
      for (const auto& pid : order[annotators[i]]) {
        if (second.count(pid)) shared.push_back(pid);
      }
      if (shared.size() < 2) continue;
      ++usable_pairs;
      for (std::size_t f = 0; f < std::size(fields); ++f) {
        std::vector<std::int64_t> a;
        std::vector<std::int64_t> b;
        for (const auto& pid : shared) {
          a.push_back(first.at(pid)->*fields[f].count);
          b.push_back(second.at(pid)->*fields[f].count);
        }
        const auto res = Iaa(a, b, tolerances);
        kappa[f].Add(res.kappa);
        pearson[f].Add(res.pearson);
        for (std::size_t t = 0; t < tolerances.size(); ++t) f1[f][t].Add(res.f1[t].second);
      }
    }
  }
  if (usable_pairs == 0) {
    throw Error(Errc::kInsufficientAnnotators,
                "need 2 annotators sharing at least 2 items");
  }
  for (std::size_t f = 0; f < std::size(fields); ++f) {
    IaaRow row;
    row.field = fields[f].name;
    row.kappa = kappa[f].Mean();
    row.pearson = pearson[f].Mean();
    for (const auto& acc : f1[f]) row.f1.push_back(acc.Mean());
    row.annotator_pairs = usable_pairs;
    table.rows.push_back(std::move(row));
  }
  return table;
}

inline std::string SerializeIaaCsv(const IaaTable& table) {
  std::string out;
  std::vector<std::string> header{"annotations", "kappa"};
  for (auto t : table.tolerances) header.push_back(ToleranceColumn(t));
  header.push_back("pearson");
  AppendCsvRow(out, header);
  auto fmt = [](const std::optional<double>& v) { return v ? FormatDouble(*v) : "undefined"; };
  for (const auto& row : table.rows) {
    std::vector<std::string> cells{row.field, fmt(row.kappa)};
    for (const auto& v : row.f1) cells.push_back(fmt(v));
    cells.push_back(fmt(row.pearson));
    AppendCsvRow(out, cells);
  }
  return out;
}

}  // namespace clineval

#endif  // CLINEVAL_ANALYSIS_HPP_
