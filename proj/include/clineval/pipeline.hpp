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

// Batch scoring: validates a run configuration up front, loads every
// provider, scores pairs in parallel and writes a deterministic score table
// plus a run manifest.

#ifndef CLINEVAL_PIPELINE_HPP_
#define CLINEVAL_PIPELINE_HPP_

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cctype>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "clineval/analysis.hpp"
#include "clineval/concepts.hpp"
#include "clineval/data.hpp"
#include "clineval/embeddings.hpp"
#include "clineval/error.hpp"
#include "clineval/greedy_match.hpp"
#include "clineval/io_util.hpp"
#include "clineval/likelihood.hpp"
#include "clineval/refscores.hpp"
#include "clineval/rouge.hpp"
#include "clineval/text.hpp"
#include "json.hpp"

namespace clineval {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfigError = 1,
  kExitDataError = 2,
  kExitPartial = 3,
};

struct RunConfig {
  std::filesystem::path dataset;
  std::optional<DataFormat> format;
  Normalization tokenizer = Normalization::kLowerAlnum;
  std::vector<std::string> metrics;

  double alpha = kDefaultAlpha;
  GreedyNormalization normalize = GreedyNormalization::kWeightSum;
  LikelihoodNormalization bart_normalize = LikelihoodNormalization::kWeightSum;
  bool window = true;
  std::size_t max_len = kDefaultMaxLen;
  std::size_t overlap = kDefaultOverlap;
  MistMode mist_mode = MistMode::kRecall;
  std::vector<Direction> directions{Direction::kRefToSys};

  std::filesystem::path embeddings;  // static token store
  std::filesystem::path contextual;  // per-document vectors (JSONL)
  std::filesystem::path kge;
  std::filesystem::path lexicon;
  std::filesystem::path logprobs;
  std::filesystem::path lm_corpus;  // one document per line; default: references
  int lm_order = 2;
  double lm_k = 1.0;

  std::vector<std::filesystem::path> score_columns;
  std::vector<std::string> ensembles;  // preset name or "name=m1+m2+..."
  std::string comb1_bertscore = "bertscore-r";
  SigmaMode sigma = SigmaMode::kPopulation;

  std::filesystem::path out_dir;
  unsigned jobs = 1;  // never affects output bytes
};

inline std::string_view NormalizationName(Normalization n) {
  return n == Normalization::kLowerAlnum ? "lower-alnum" : "whitespace";
}

inline std::string_view GreedyNormalizationName(GreedyNormalization n) {
  return n == GreedyNormalization::kWeightSum ? "weight-sum" : "token-count";
}

inline std::string_view LikelihoodNormalizationName(LikelihoodNormalization n) {
  return n == LikelihoodNormalization::kWeightSum ? "weight-sum" : "raw-sum";
}

inline std::string_view MistModeName(MistMode m) {
  return m == MistMode::kRecall ? "recall" : "verbatim";
}

// Canonical JSON view of the configuration (jobs excluded).
inline nlohmann::json ConfigToJson(const RunConfig& c) {
  nlohmann::json dirs = nlohmann::json::array();
  for (auto d : c.directions) dirs.push_back(std::string(DirectionName(d)));
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& p : c.score_columns) cols.push_back(p.string());
  return {{"dataset", c.dataset.string()},
          {"format", c.format ? (*c.format == DataFormat::kCsv ? "csv" : "jsonl") : "auto"},
          {"tokenizer", std::string(NormalizationName(c.tokenizer))},
          {"metrics", c.metrics},
          {"alpha", c.alpha},
          {"normalize", std::string(GreedyNormalizationName(c.normalize))},
          {"bart_normalize", std::string(LikelihoodNormalizationName(c.bart_normalize))},
          {"window", c.window},
          {"max_len", c.max_len},
          {"overlap", c.overlap},
          {"mist_mode", std::string(MistModeName(c.mist_mode))},
          {"directions", dirs},
          {"embeddings", c.embeddings.string()},
          {"contextual", c.contextual.string()},
          {"kge", c.kge.string()},
          {"lexicon", c.lexicon.string()},
          {"logprobs", c.logprobs.string()},
          {"lm_corpus", c.lm_corpus.string()},
          {"lm_order", c.lm_order},
          {"lm_k", c.lm_k},
          {"score_columns", cols},
          {"ensembles", c.ensembles},
          {"comb1_bertscore", c.comb1_bertscore},
          {"sigma", std::string(SigmaModeName(c.sigma))},
          {"out_dir", c.out_dir.string()}};
}

// Applies the keys present in a JSON config object onto `c`.
inline void ApplyConfigJson(const nlohmann::json& j, RunConfig& c) {
  if (!j.is_object()) throw Error(Errc::kConfigError, "config must be a JSON object");
  auto bad = [](const std::string& key) {
    throw Error(Errc::kConfigError, "bad value for config key '" + key + "'");
  };
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "dataset") c.dataset = v.get<std::string>();
      else if (key == "format") {
        const auto f = v.get<std::string>();
        if (f == "csv") c.format = DataFormat::kCsv;
        else if (f == "jsonl") c.format = DataFormat::kJsonl;
        else if (f == "auto") c.format.reset();
        else bad(key);
      } else if (key == "tokenizer") {
        const auto t = v.get<std::string>();
        if (t == "lower-alnum") c.tokenizer = Normalization::kLowerAlnum;
        else if (t == "whitespace") c.tokenizer = Normalization::kWhitespaceOnly;
        else bad(key);
      } else if (key == "metrics") c.metrics = v.get<std::vector<std::string>>();
      else if (key == "alpha") c.alpha = v.get<double>();
      else if (key == "normalize") {
        const auto n = v.get<std::string>();
        if (n == "weight-sum") c.normalize = GreedyNormalization::kWeightSum;
        else if (n == "token-count") c.normalize = GreedyNormalization::kTokenCount;
        else bad(key);
      } else if (key == "bart_normalize") {
        const auto n = v.get<std::string>();
        if (n == "weight-sum") c.bart_normalize = LikelihoodNormalization::kWeightSum;
        else if (n == "raw-sum") c.bart_normalize = LikelihoodNormalization::kRawSum;
        else bad(key);
      } else if (key == "window") c.window = v.get<bool>();
      else if (key == "max_len") c.max_len = v.get<std::size_t>();
      else if (key == "overlap") c.overlap = v.get<std::size_t>();
      else if (key == "mist_mode") {
        const auto m = v.get<std::string>();
        if (m == "recall") c.mist_mode = MistMode::kRecall;
        else if (m == "verbatim") c.mist_mode = MistMode::kVerbatim;
        else bad(key);
      } else if (key == "directions") {
        c.directions.clear();
        for (const auto& d : v.get<std::vector<std::string>>()) {
          Direction dir{};
          if (!ParseDirectionName(d, dir)) bad(key);
          c.directions.push_back(dir);
        }
      } else if (key == "embeddings") c.embeddings = v.get<std::string>();
      else if (key == "contextual") c.contextual = v.get<std::string>();
      else if (key == "kge") c.kge = v.get<std::string>();
      else if (key == "lexicon") c.lexicon = v.get<std::string>();
      else if (key == "logprobs") c.logprobs = v.get<std::string>();
      else if (key == "lm_corpus") c.lm_corpus = v.get<std::string>();
      else if (key == "lm_order") c.lm_order = v.get<int>();
      else if (key == "lm_k") c.lm_k = v.get<double>();
      else if (key == "score_columns") {
        c.score_columns.clear();
        for (const auto& p : v.get<std::vector<std::string>>()) c.score_columns.emplace_back(p);
      } else if (key == "ensembles") c.ensembles = v.get<std::vector<std::string>>();
      else if (key == "comb1_bertscore") c.comb1_bertscore = v.get<std::string>();
      else if (key == "sigma") {
        const auto s = v.get<std::string>();
        if (s == "population") c.sigma = SigmaMode::kPopulation;
        else if (s == "sample") c.sigma = SigmaMode::kSample;
        else bad(key);
      } else if (key == "out_dir") c.out_dir = v.get<std::string>();
      else if (key == "jobs") c.jobs = v.get<unsigned>();
      else throw Error(Errc::kConfigError, "unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kConfigError, e.what());
  }
}

namespace pipeline_detail {

struct MetricFamily {
  std::string name;
  bool needs_embeddings = false;
  bool needs_lexicon = false;
  bool needs_kge = false;
};

inline const std::vector<MetricFamily>& KnownMetrics() {
  static const std::vector<MetricFamily> kKnown = {
      {"rouge-1"},          {"rouge-2"},
      {"rouge-l"},          {"bertscore", true},
      {"bertscore-sp", true}, {"medbertscore", true, true},
      {"medbertscore-sp", true, true}, {"mist", false, true, true},
      {"bartscore"},        {"medbartscore", false, true}};
  return kKnown;
}

inline std::vector<std::string> ColumnsFor(const std::string& metric, const RunConfig& c) {
  if (metric.rfind("bartscore", 0) == 0 || metric.rfind("medbartscore", 0) == 0) {
    std::vector<std::string> out;
    for (auto d : c.directions) out.push_back(metric + "-" + std::string(DirectionTag(d)));
    return out;
  }
  if (metric == "mist") return {"mist"};
  return {metric + "-p", metric + "-r", metric + "-f"};
}

inline std::optional<EnsembleConfig> ParseEnsembleSpec(const std::string& spec,
                                                       const RunConfig& c) {
  if (spec == "mist-comb1") return MistComb1(c.comb1_bertscore);
  if (auto preset = FindPreset(spec)) return preset;
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) return std::nullopt;
  EnsembleConfig e;
  e.name = spec.substr(0, eq);
  std::string rest = spec.substr(eq + 1);
  std::size_t pos = 0;
  while (pos <= rest.size()) {
    auto plus = rest.find('+', pos);
    if (plus == std::string::npos) plus = rest.size();
    if (plus > pos) e.members.push_back(rest.substr(pos, plus - pos));
    pos = plus + 1;
  }
  return e;
}

}  // namespace pipeline_detail

struct PairError {
  std::string pair_id;
  std::string metric;
  std::string message;
};

struct ScoreRun {
  ScoreTable table;
  std::vector<PairError> errors;  // per pair; the run continues past them
  std::vector<std::string> run_errors;
  nlohmann::json manifest;

  int exit_code() const {
    return errors.empty() && run_errors.empty() ? kExitOk : kExitPartial;
  }
};

// Checks everything that can be checked without reading input contents.
// Throws Error(kConfigError).
inline void ValidateConfig(const RunConfig& c) {
  using pipeline_detail::KnownMetrics;
  auto fail = [](const std::string& why) { throw Error(Errc::kConfigError, why); };
  if (c.dataset.empty()) fail("--dataset is required");
  if (!std::filesystem::exists(c.dataset)) fail("dataset not found: " + c.dataset.string());
  if (c.out_dir.empty()) fail("--out is required");
  if (c.metrics.empty() && c.score_columns.empty()) fail("no metrics requested");
  if (c.overlap >= c.max_len) fail("overlap must be smaller than max_len");
  if (c.lm_order < 1) fail("lm order must be >= 1");
  if (!(c.lm_k > 0.0)) fail("lm k must be > 0");
  if (c.alpha < 0.0) fail("alpha must be >= 0");
  if (c.directions.empty()) fail("at least one direction is required");
  std::set<std::string> seen;
  bool need_emb = false;
  bool need_lex = false;
  bool need_kge = false;
  for (const auto& m : c.metrics) {
    auto it = std::find_if(KnownMetrics().begin(), KnownMetrics().end(),
                           [&](const auto& f) { return f.name == m; });
    if (it == KnownMetrics().end()) fail("unknown metric '" + m + "'");
    if (!seen.insert(m).second) fail("metric listed twice: " + m);
    need_emb |= it->needs_embeddings;
    need_lex |= it->needs_lexicon && (c.alpha != 0.0 || m == "mist");
    need_kge |= it->needs_kge;
  }
  if (need_emb && c.embeddings.empty() && c.contextual.empty()) {
    fail("embedding metrics need --embeddings or --contextual");
  }
  if (need_lex && c.lexicon.empty()) fail("medical metrics need --lexicon");
  if (need_kge && c.kge.empty()) fail("mist needs --kge");
  for (const auto* p : {&c.embeddings, &c.contextual, &c.kge, &c.lexicon, &c.logprobs,
                        &c.lm_corpus}) {
    if (!p->empty() && !std::filesystem::exists(*p)) fail("input not found: " + p->string());
  }
  for (const auto& p : c.score_columns) {
    if (!std::filesystem::exists(p)) fail("score column not found: " + p.string());
  }
  for (const auto& spec : c.ensembles) {
    auto e = pipeline_detail::ParseEnsembleSpec(spec, c);
    if (!e) fail("unknown ensemble '" + spec + "'");
    if (e->members.size() < 2) fail("ensemble '" + spec + "' needs at least 2 members");
  }
}

namespace pipeline_detail {

struct Resources {
  Dataset dataset;
  std::optional<EmbeddingStore> store;
  std::unique_ptr<StaticProvider> static_provider;
  std::optional<ContextualFileProvider> contextual;
  std::optional<ConceptLexicon> lexicon;
  std::optional<EmbeddingStore> kge;
  std::optional<LogProbFileProvider> logprob_file;
  std::optional<NGramLM> lm;
  std::unique_ptr<NGramProvider> lm_provider;
  std::vector<ScoreColumn> external;

  const EmbeddingProvider* embedder() const {
    if (contextual) return &*contextual;
    return static_provider.get();
  }
  const LikelihoodProvider* likelihood() const {
    if (logprob_file) return &*logprob_file;
    return lm_provider.get();
  }
};

inline bool Wants(const RunConfig& c, std::string_view m) {
  return std::find(c.metrics.begin(), c.metrics.end(), m) != c.metrics.end();
}

inline std::unique_ptr<Resources> LoadResources(const RunConfig& c) {
  auto r = std::make_unique<Resources>();
  r->dataset = c.format ? LoadDataset(c.dataset, *c.format) : LoadDataset(c.dataset);
  if (!c.contextual.empty()) {
    r->contextual = ContextualFileProvider::Load(c.contextual);
  } else if (!c.embeddings.empty()) {
    r->store = LoadStore(c.embeddings, EmbeddingKind::kToken);
    r->static_provider = std::make_unique<StaticProvider>(*r->store);
  }
  if (!c.lexicon.empty()) r->lexicon = LoadLexicon(c.lexicon);
  if (!c.kge.empty()) r->kge = LoadStore(c.kge, EmbeddingKind::kConcept);
  if (Wants(c, "bartscore") || Wants(c, "medbartscore")) {
    if (!c.logprobs.empty()) {
      r->logprob_file = LogProbFileProvider::Load(c.logprobs);
    } else {
      std::vector<std::vector<std::string>> corpus;
      if (!c.lm_corpus.empty()) {
        for (const auto& line : SplitLines(ReadFile(c.lm_corpus))) {
          corpus.push_back(Tokenize(line, c.tokenizer).surfaces());
        }
      } else {
        for (const auto& p : r->dataset.pairs) {
          corpus.push_back(Tokenize(p.reference, c.tokenizer).surfaces());
        }
      }
      r->lm = NGramLM::Train(corpus, c.lm_order, c.lm_k);
      r->lm_provider = std::make_unique<NGramProvider>(*r->lm);
    }
  }
  for (const auto& p : c.score_columns) r->external.push_back(LoadScoreColumn(p, &r->dataset));
  return r;
}

struct PairScores {
  std::vector<std::optional<double>> values;  // aligned with the column list
  std::vector<PairError> errors;
};

inline PairScores ScorePair(const SummaryPair& pair, const RunConfig& c, const Resources& r,
                            const std::vector<std::string>& columns) {
  PairScores out;
  out.values.assign(columns.size(), std::nullopt);
  auto put = [&](const std::string& name, double v) {
    auto it = std::find(columns.begin(), columns.end(), name);
    out.values[static_cast<std::size_t>(it - columns.begin())] = v;
  };
  auto put_prf = [&](const std::string& metric, const PRF& prf) {
    put(metric + "-p", prf.precision);
    put(metric + "-r", prf.recall);
    put(metric + "-f", prf.f1);
  };
  const auto sys_tokens = Tokenize(pair.system, c.tokenizer).surfaces();
  const auto ref_tokens = Tokenize(pair.reference, c.tokenizer).surfaces();
  for (const auto& metric : c.metrics) {
    try {
      if (metric == "rouge-1") {
        put_prf(metric, RougeN(sys_tokens, ref_tokens, 1));
      } else if (metric == "rouge-2") {
        put_prf(metric, RougeN(sys_tokens, ref_tokens, 2));
      } else if (metric == "rouge-l") {
        put_prf(metric, RougeL(sys_tokens, ref_tokens));
      } else if (metric == "bertscore" || metric == "bertscore-sp" || metric == "medbertscore" ||
                 metric == "medbertscore-sp") {
        GreedyOptions opts;
        opts.alpha = metric.rfind("med", 0) == 0 ? c.alpha : 0.0;
        opts.normalize = c.normalize;
        opts.windowed = c.window && metric.size() > 3 && metric.substr(metric.size() - 3) == "-sp";
        opts.max_len = c.max_len;
        opts.overlap = c.overlap;
        opts.tokenizer = c.tokenizer;
        const ConceptLexicon* lex = r.lexicon ? &*r.lexicon : nullptr;
        put_prf(metric, MedBertScore(pair, *r.embedder(), lex, opts));
      } else if (metric == "mist") {
        const auto sys = LinkConcepts(sys_tokens, *r.lexicon);
        const auto ref = LinkConcepts(ref_tokens, *r.lexicon);
        put("mist", Mist(sys, ref, *r.kge, c.mist_mode).value);
      } else if (metric == "bartscore" || metric == "medbartscore") {
        for (auto d : c.directions) {
          const std::string name = metric + "-" + std::string(DirectionTag(d));
          try {
            const bool to_ref = d == Direction::kSysToRef;
            const auto& target = to_ref ? ref_tokens : sys_tokens;
            std::string_view cond = d == Direction::kSrcToSys   ? pair.source
                                    : d == Direction::kRefToSys ? pair.reference
                                                                : pair.system;
            const auto lp = ScoreLogProbs(pair.pair_id, d, target, *r.likelihood(), cond);
            if (metric == "bartscore") {
              put(name, BartScore(lp));
            } else {
              const auto w = r.lexicon && c.alpha != 0.0
                                 ? MedicalWeights(lp.target_tokens, *r.lexicon, c.alpha)
                                 : UniformWeights(lp.size());
              put(name, MedBartScore(lp, w, c.bart_normalize));
            }
          } catch (const Error& e) {
            out.errors.push_back({pair.pair_id, name, e.what()});
          }
        }
      }
    } catch (const Error& e) {
      out.errors.push_back({pair.pair_id, metric, e.what()});
    }
  }
  return out;
}

inline std::string FileDigest(const std::filesystem::path& p) {
  return HexDigest(Fnv1a64(ReadFile(p)));
}

}  // namespace pipeline_detail

// Runs the whole scoring pass. Config problems throw kConfigError before any
// input is read; unreadable inputs throw their data error. Nothing is
// written here.
inline ScoreRun RunScore(const RunConfig& c) {
  using namespace pipeline_detail;
  ValidateConfig(c);
  const auto res = LoadResources(c);
  const Dataset& ds = res->dataset;

  std::vector<std::string> columns;
  for (const auto& m : c.metrics) {
    for (auto& col : ColumnsFor(m, c)) columns.push_back(std::move(col));
  }
  std::set<std::string> known(columns.begin(), columns.end());
  for (const auto& ext : res->external) {
    if (!known.insert(ext.metric_name).second) {
      throw Error(Errc::kConfigError, "duplicate column name '" + ext.metric_name + "'");
    }
  }
  std::vector<EnsembleConfig> ensembles;
  for (const auto& spec : c.ensembles) {
    auto e = *ParseEnsembleSpec(spec, c);
    for (const auto& m : e.members) {
      if (!known.count(m)) {
        throw Error(Errc::kConfigError, "ensemble " + e.name + " member '" + m +
                                            "' is neither requested nor supplied");
      }
    }
    if (!known.insert(e.name).second) {
      throw Error(Errc::kConfigError, "duplicate column name '" + e.name + "'");
    }
    ensembles.push_back(std::move(e));
  }

  std::vector<PairScores> results(ds.pairs.size());
  const std::size_t jobs = std::clamp<std::size_t>(c.jobs, 1, std::max<std::size_t>(1, ds.pairs.size()));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < ds.pairs.size(); i = next++) {
      results[i] = ScorePair(ds.pairs[i], c, *res, columns);
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
  }

  ScoreRun run;
  run.table.pair_ids.reserve(ds.pairs.size());
  for (const auto& p : ds.pairs) run.table.pair_ids.push_back(p.pair_id);
  for (std::size_t k = 0; k < columns.size(); ++k) {
    ScoreColumn col(columns[k]);
    for (std::size_t i = 0; i < ds.pairs.size(); ++i) {
      if (results[i].values[k]) col.Set(ds.pairs[i].pair_id, *results[i].values[k]);
    }
    run.table.columns.push_back(std::move(col));
  }
  for (const auto& r : results) {
    run.errors.insert(run.errors.end(), r.errors.begin(), r.errors.end());
  }
  for (const auto& ext : res->external) run.table.columns.push_back(ext);
  for (const auto& e : ensembles) {
    try {
      run.table.columns.push_back(Ensemble(run.table, e, c.sigma));
    } catch (const Error& err) {
      run.run_errors.push_back(e.name + ": " + err.what());
    }
  }

  nlohmann::json manifest;
  const auto config_json = ConfigToJson(c);
  manifest["config"] = config_json;
  manifest["config_hash"] = HexDigest(Fnv1a64(config_json.dump()));
  nlohmann::json digests = nlohmann::json::object();
  digests[c.dataset.string()] = FileDigest(c.dataset);
  for (const auto* p : {&c.embeddings, &c.contextual, &c.kge, &c.lexicon, &c.logprobs,
                        &c.lm_corpus}) {
    if (!p->empty()) digests[p->string()] = FileDigest(*p);
  }
  for (const auto& p : c.score_columns) digests[p.string()] = FileDigest(p);
  manifest["input_digests"] = digests;
  manifest["dataset_id"] = ds.dataset_id;
  manifest["pairs"] = ds.pairs.size();
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& col : run.table.columns) {
    nlohmann::json entry = {{"name", col.metric_name}, {"covered", col.size()}};
    if (col.size() < ds.pairs.size()) entry["missing"] = MissingIds(col, ds);
    cols.push_back(entry);
  }
  manifest["columns"] = cols;
  nlohmann::json errs = nlohmann::json::array();
  for (const auto& e : run.errors) {
    errs.push_back({{"pair_id", e.pair_id}, {"metric", e.metric}, {"error", e.message}});
  }
  manifest["pair_errors"] = errs;
  manifest["run_errors"] = run.run_errors;
  run.manifest = std::move(manifest);
  return run;
}

inline std::string SafeFileName(std::string_view name) {
  std::string out;
  for (char ch : name) {
    const auto u = static_cast<unsigned char>(ch);
    out.push_back(std::isalnum(u) || ch == '-' || ch == '_' || ch == '.' || ch == '@' ? ch : '_');
  }
  return out;
}

// scores.csv (wide table), columns/<metric>.csv and manifest.json.
inline void WriteScoreRun(const ScoreRun& run, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir / "columns");
  WriteFile(out_dir / "scores.csv", SerializeScoreTable(run.table));
  for (const auto& col : run.table.columns) {
    WriteFile(out_dir / "columns" / (SafeFileName(col.metric_name) + ".csv"),
              SerializeScoreColumn(col));
  }
  WriteFile(out_dir / "manifest.json", run.manifest.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Reference scores, correlation and reporting.

struct PairErrorCounts {
  std::string pair_id;
  ErrorCounts counts;
};

// Header `pair_id,critical,non_critical,spelling_grammar`.
inline std::vector<PairErrorCounts> ParseErrorCounts(std::string_view data) {
  auto records = ParseCsv(data);
  const std::vector<std::string> expected{"pair_id", "critical", "non_critical",
                                          "spelling_grammar"};
  if (records.empty() || records.front().fields != expected) {
    throw Error(Errc::kHeaderMismatch, "expected header pair_id,critical,non_critical,spelling_grammar");
  }
  std::vector<PairErrorCounts> out;
  std::set<std::string> seen;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != 4) {
      throw Error(Errc::kParseError, "line " + std::to_string(rec.line) + ": expected 4 fields");
    }
    PairErrorCounts e;
    e.pair_id = rec.fields[0];
    std::int64_t* slots[] = {&e.counts.critical, &e.counts.non_critical,
                             &e.counts.spelling_grammar};
    for (int k = 0; k < 3; ++k) {
      double v = 0;
      if (!ParseDouble(rec.fields[k + 1], v) || v != std::floor(v)) {
        throw Error(Errc::kParseError, "line " + std::to_string(rec.line) + ": bad count");
      }
      if (v < 0) throw Error(Errc::kNegativeCount, e.pair_id);
      *slots[k] = static_cast<std::int64_t>(v);
    }
    if (!seen.insert(e.pair_id).second) throw Error(Errc::kDuplicateId, e.pair_id);
    out.push_back(std::move(e));
  }
  return out;
}

inline ScoreColumn QualityScoreColumn(const std::vector<PairErrorCounts>& counts,
                                      const Dataset& ds, bool clamp01) {
  ScoreColumn col("quality", true);
  for (const auto& e : counts) {
    const SummaryPair* p = ds.Find(e.pair_id);
    if (!p) throw Error(Errc::kUnknownPair, e.pair_id);
    col.Set(e.pair_id, QualityScore(e.counts, p->system, p->reference, clamp01));
  }
  return col;
}

inline void WriteColumns(const std::vector<ScoreColumn>& cols, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& c : cols) {
    WriteFile(dir / (SafeFileName(c.metric_name) + ".csv"), SerializeScoreColumn(c));
  }
}

// Criterion columns in report order: the known criteria first, then the
// rest by name.
inline void SortCriteria(std::vector<ScoreColumn>& cols) {
  using namespace criteria;
  const std::string_view order[] = {kFactualP,   kFactualR,     kFactualF1,  kHallucRate,
                                    kOmissionRate, kHallucCount, kOmissionCount};
  auto rank = [&](const ScoreColumn& c) {
    for (std::size_t i = 0; i < std::size(order); ++i) {
      if (c.metric_name == order[i]) return i;
    }
    return std::size(order);
  };
  std::stable_sort(cols.begin(), cols.end(), [&](const ScoreColumn& a, const ScoreColumn& b) {
    const auto ra = rank(a);
    const auto rb = rank(b);
    return ra != rb ? ra < rb : (ra == std::size(order) && a.metric_name < b.metric_name);
  });
}

// Loads criterion columns from files or directories of *.csv files.
inline std::vector<ScoreColumn> LoadCriterionColumns(
    const std::vector<std::filesystem::path>& paths) {
  std::vector<ScoreColumn> cols;
  for (const auto& p : paths) {
    if (std::filesystem::is_directory(p)) {
      std::vector<std::filesystem::path> files;
      for (const auto& entry : std::filesystem::directory_iterator(p)) {
        if (entry.is_regular_file() && entry.path().extension() == ".csv") {
          files.push_back(entry.path());
        }
      }
      std::sort(files.begin(), files.end());
      for (const auto& f : files) cols.push_back(LoadScoreColumn(f));
    } else {
      cols.push_back(LoadScoreColumn(p));
    }
  }
  SortCriteria(cols);
  return cols;
}

// Correlation report; throws NoOverlap when no metric/criterion pair shares
// a single pair id.
inline CorrelationReport Correlate(const ScoreTable& table, const std::vector<ScoreColumn>& refs,
                                   std::string dataset_id = "") {
  if (refs.empty()) throw Error(Errc::kNoOverlap, "no criterion columns");
  auto report = BuildCorrelationReport(table, refs, std::move(dataset_id));
  bool any = false;
  for (const auto& row : report.cells) {
    for (const auto& cell : row) any |= cell.n > 0;
  }
  if (!any) throw Error(Errc::kNoOverlap, "scores and criteria share no pair ids");
  return report;
}

// report.csv, report.txt and, optionally, plot/<metric>__<criterion>.csv.
inline void WriteReport(const CorrelationReport& report, const std::filesystem::path& out_dir,
                        const ScoreTable* table = nullptr,
                        const std::vector<ScoreColumn>* refs = nullptr) {
  std::filesystem::create_directories(out_dir);
  WriteFile(out_dir / "report.csv", SerializeReportCsv(report));
  WriteFile(out_dir / "report.txt", FormatReportTable(report));
  if (table && refs) {
    std::filesystem::create_directories(out_dir / "plot");
    for (const auto& m : table->columns) {
      for (const auto& c : *refs) {
        WriteFile(out_dir / "plot" /
                      (SafeFileName(m.metric_name) + "__" + SafeFileName(c.metric_name) + ".csv"),
                  ScatterCsv(m, c));
      }
    }
  }
}

}  // namespace clineval

#endif  // CLINEVAL_PIPELINE_HPP_
