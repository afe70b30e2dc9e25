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

// clineval command-line tool.
//
//   clineval score      --dataset D --metrics rouge-1,mist ... --out DIR
//   clineval refscores  --facts F | --keyphrases K --dataset D --out DIR
//   clineval ensemble   --scores scores.csv --preset mist-comb1 --out DIR
//   clineval correlate  --scores scores.csv --annotations F --kind facts --out DIR
//   clineval average    r1.csv r2.csv r3.csv --out DIR
//   clineval iaa        --annotations F --tolerances 0,1,2
//   clineval validate   --kind dataset FILE
//
// Exit codes: 0 ok, 1 configuration error, 2 data error, 3 partial run.

#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "clineval/clineval.hpp"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;
using clineval::Errc;
using clineval::Error;

struct ScoreArgs {
  std::string config, dataset, format, tokenizer, normalize, bart_normalize, mist_mode, sigma;
  std::string embeddings, contextual, kge, lexicon, logprobs, lm_corpus, comb1, out;
  std::vector<std::string> metrics, directions, score_columns, ensembles;
  double alpha = 0, lm_k = 0;
  bool window = true;
  std::size_t max_len = 0, overlap = 0;
  int lm_order = 0;
  unsigned jobs = 1;
  std::vector<std::pair<CLI::Option*, std::string>> opts;
};

void AddScore(CLI::App& app, ScoreArgs& a) {
  auto* sub = app.add_subcommand("score", "Score every pair with the requested metrics");
  auto reg = [&](CLI::Option* o, const char* key) { a.opts.emplace_back(o, key); return o; };
  sub->add_option("--config", a.config, "JSON config file; flags override its values")
      ->check(CLI::ExistingFile);
  reg(sub->add_option("--dataset", a.dataset, "Dataset (JSONL or CSV)"), "dataset");
  reg(sub->add_option("--format", a.format)->check(CLI::IsMember({"auto", "jsonl", "csv"})),
      "format");
  reg(sub->add_option("--metrics", a.metrics,
                      "rouge-1, rouge-2, rouge-l, bertscore, bertscore-sp, medbertscore, "
                      "medbertscore-sp, mist, bartscore, medbartscore")
          ->delimiter(','),
      "metrics");
  reg(sub->add_option("--tokenizer", a.tokenizer)->check(CLI::IsMember({"lower-alnum", "whitespace"})),
      "tokenizer");
  reg(sub->add_option("--alpha", a.alpha, "Medical weight boost (0 = unweighted)"), "alpha");
  reg(sub->add_option("--normalize", a.normalize)
          ->check(CLI::IsMember({"weight-sum", "token-count"})),
      "normalize");
  reg(sub->add_option("--bart-normalize", a.bart_normalize)
          ->check(CLI::IsMember({"weight-sum", "raw-sum"})),
      "bart_normalize");
  reg(sub->add_flag("--window,!--no-window", a.window, "Sliding windows for -sp metrics"),
      "window");
  reg(sub->add_option("--max-len", a.max_len), "max_len");
  reg(sub->add_option("--overlap", a.overlap), "overlap");
  reg(sub->add_option("--mist-mode", a.mist_mode)->check(CLI::IsMember({"recall", "verbatim"})),
      "mist_mode");
  reg(sub->add_option("--direction", a.directions, "src_to_sys, ref_to_sys, sys_to_ref")
          ->delimiter(','),
      "directions");
  reg(sub->add_option("--embeddings", a.embeddings, "Static token embedding store"),
      "embeddings");
  reg(sub->add_option("--contextual", a.contextual, "Per-document contextual vectors (JSONL)"),
      "contextual");
  reg(sub->add_option("--kge", a.kge, "Concept embedding store"), "kge");
  reg(sub->add_option("--lexicon", a.lexicon, "Concept lexicon (TSV)"), "lexicon");
  reg(sub->add_option("--logprobs", a.logprobs, "Token log-probabilities (JSONL)"), "logprobs");
  reg(sub->add_option("--lm-order", a.lm_order), "lm_order");
  reg(sub->add_option("--lm-k", a.lm_k), "lm_k");
  reg(sub->add_option("--lm-corpus", a.lm_corpus, "LM training text, one document per line"),
      "lm_corpus");
  reg(sub->add_option("--score-column", a.score_columns, "External score column CSV"),
      "score_columns");
  reg(sub->add_option("--ensemble", a.ensembles, "Preset (mist-comb1, mist-comb2) or name=a+b+c"),
      "ensembles");
  reg(sub->add_option("--comb1-bertscore", a.comb1), "comb1_bertscore");
  reg(sub->add_option("--sigma", a.sigma)->check(CLI::IsMember({"population", "sample"})),
      "sigma");
  reg(sub->add_option("--out", a.out, "Output directory"), "out_dir");
  reg(sub->add_option("--jobs", a.jobs, "Worker threads")->check(CLI::PositiveNumber), "jobs");
}

nlohmann::json ScoreOverlay(const ScoreArgs& a) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [opt, key] : a.opts) {
    if (opt->count() == 0) continue;
    if (key == "dataset") j[key] = a.dataset;
    else if (key == "format") j[key] = a.format;
    else if (key == "metrics") j[key] = a.metrics;
    else if (key == "tokenizer") j[key] = a.tokenizer;
    else if (key == "alpha") j[key] = a.alpha;
    else if (key == "normalize") j[key] = a.normalize;
    else if (key == "bart_normalize") j[key] = a.bart_normalize;
    else if (key == "window") j[key] = a.window;
    else if (key == "max_len") j[key] = a.max_len;
    else if (key == "overlap") j[key] = a.overlap;
    else if (key == "mist_mode") j[key] = a.mist_mode;
    else if (key == "directions") j[key] = a.directions;
    else if (key == "embeddings") j[key] = a.embeddings;
    else if (key == "contextual") j[key] = a.contextual;
    else if (key == "kge") j[key] = a.kge;
    else if (key == "lexicon") j[key] = a.lexicon;
    else if (key == "logprobs") j[key] = a.logprobs;
    else if (key == "lm_order") j[key] = a.lm_order;
    else if (key == "lm_k") j[key] = a.lm_k;
    else if (key == "lm_corpus") j[key] = a.lm_corpus;
    else if (key == "score_columns") j[key] = a.score_columns;
    else if (key == "ensembles") j[key] = a.ensembles;
    else if (key == "comb1_bertscore") j[key] = a.comb1;
    else if (key == "sigma") j[key] = a.sigma;
    else if (key == "out_dir") j[key] = a.out;
    else if (key == "jobs") j[key] = a.jobs;
  }
  return j;
}

int RunScoreCmd(const ScoreArgs& a) {
  clineval::RunConfig cfg;
  if (!a.config.empty()) {
    nlohmann::json file;
    try {
      file = nlohmann::json::parse(clineval::ReadFile(a.config));
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::kConfigError, a.config + ": " + e.what());
    }
    clineval::ApplyConfigJson(file, cfg);
  }
  clineval::ApplyConfigJson(ScoreOverlay(a), cfg);
  const auto run = clineval::RunScore(cfg);
  clineval::WriteScoreRun(run, cfg.out_dir);
  std::cerr << "scored " << run.table.pair_ids.size() << " pairs into "
            << run.table.columns.size() << " columns";
  if (!run.errors.empty() || !run.run_errors.empty()) {
    std::cerr << "; " << run.errors.size() << " pair errors, " << run.run_errors.size()
              << " run errors (see manifest.json)";
  }
  std::cerr << "\n";
  return run.exit_code();
}

clineval::AnnotatorCombine ParseCombine(const std::string& s) {
  if (s == "first") return clineval::AnnotatorCombine::kFirst;
  if (s == "per-annotator") return clineval::AnnotatorCombine::kPerAnnotator;
  return clineval::AnnotatorCombine::kMean;
}

clineval::SigmaMode ParseSigma(const std::string& s) {
  return s == "sample" ? clineval::SigmaMode::kSample : clineval::SigmaMode::kPopulation;
}

std::optional<clineval::Dataset> MaybeDataset(const std::string& path) {
  if (path.empty()) return std::nullopt;
  return clineval::LoadDataset(path);
}

void PrintWarnings(const std::vector<clineval::FactAnnotation>& anns) {
  for (const auto& a : anns) {
    for (const auto& w : clineval::FactAnnotationWarnings(a)) {
      std::cerr << "warning: " << a.pair_id << "/" << a.annotator_id << ": " << w << "\n";
    }
  }
}

std::string FormatIaa(const clineval::IaaTable& t) {
  std::ostringstream os;
  auto fmt = [](const std::optional<double>& v) {
    if (!v) return std::string("-");
    std::ostringstream c;
    c << std::fixed << std::setprecision(2) << *v;
    return c.str();
  };
  os << std::left << std::setw(16) << "annotations" << std::right << std::setw(8) << "kappa";
  for (auto tol : t.tolerances) os << std::setw(11) << clineval::ToleranceColumn(tol);
  os << std::setw(9) << "pearson" << "\n";
  for (const auto& r : t.rows) {
    os << std::left << std::setw(16) << r.field << std::right << std::setw(8) << fmt(r.kappa);
    for (const auto& v : r.f1) os << std::setw(11) << fmt(v);
    os << std::setw(9) << fmt(r.pearson) << "\n";
  }
  return os.str();
}

int Validate(const std::string& kind, const std::string& path, const std::string& dataset_path) {
  using namespace clineval;
  const auto ds = MaybeDataset(dataset_path);
  const Dataset* dsp = ds ? &*ds : nullptr;
  std::size_t n = 0;
  if (kind == "dataset") {
    n = LoadDataset(path).pairs.size();
  } else if (kind == "facts") {
    const auto anns = LoadFactAnnotations(path, dsp);
    PrintWarnings(anns);
    n = anns.size();
  } else if (kind == "keyphrases") {
    n = LoadKeyPhraseAnnotations(path, dsp).size();
  } else if (kind == "scores") {
    const auto col = LoadScoreColumn(path, dsp);
    n = col.size();
    if (dsp) {
      const auto missing = MissingIds(col, *dsp);
      if (!missing.empty()) {
        std::cerr << "coverage: " << col.size() << " of " << dsp->pairs.size()
                  << " pairs; missing:";
        for (const auto& m : missing) std::cerr << " " << m;
        std::cerr << "\n";
      }
    }
  } else if (kind == "table") {
    n = LoadScoreTable(path).pair_ids.size();
  } else if (kind == "embeddings") {
    n = LoadStore(path, EmbeddingKind::kToken).size();
  } else if (kind == "kge") {
    n = LoadStore(path, EmbeddingKind::kConcept).size();
  } else if (kind == "contextual") {
    n = ContextualFileProvider::Load(path).size();
  } else if (kind == "logprobs") {
    n = LogProbFileProvider::Load(path).size();
  } else if (kind == "lexicon") {
    n = LoadLexicon(path).size();
  } else if (kind == "report") {
    n = ParseReportCsv(ReadFile(path)).metrics.size();
  } else if (kind == "errors") {
    n = ParseErrorCounts(ReadFile(path)).size();
  }
  std::cout << "ok " << kind << " " << path << ": " << n << " records\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"clineval: clinical note evaluation toolkit"};
  app.require_subcommand(1);

  ScoreArgs score;
  AddScore(app, score);

  std::string rs_facts, rs_kp, rs_dataset, rs_errors, rs_combine = "mean", rs_out;
  bool rs_clamp = false;
  auto* refs = app.add_subcommand("refscores", "Per-criterion reference score columns");
  refs->add_option("--facts", rs_facts, "Fact annotations (JSONL or CSV)")->check(CLI::ExistingFile);
  refs->add_option("--keyphrases", rs_kp, "Key-phrase annotations (JSONL)")->check(CLI::ExistingFile);
  refs->add_option("--errors", rs_errors, "Error counts CSV for the quality score")
      ->check(CLI::ExistingFile);
  refs->add_option("--dataset", rs_dataset, "Dataset the annotations refer to")
      ->check(CLI::ExistingFile);
  refs->add_option("--combine", rs_combine)
      ->check(CLI::IsMember({"mean", "first", "per-annotator"}));
  refs->add_flag("--clamp01", rs_clamp, "Clamp the quality score to [0,1]");
  refs->add_option("--out", rs_out, "Output directory")->required();

  std::string en_scores, en_name, en_sigma = "population", en_comb1 = "bertscore-r", en_out;
  std::vector<std::string> en_presets, en_members;
  auto* ens = app.add_subcommand("ensemble", "Z-score ensembles over a score table");
  ens->add_option("--scores", en_scores, "Wide score table")->required()->check(CLI::ExistingFile);
  ens->add_option("--preset", en_presets, "mist-comb1, mist-comb2");
  ens->add_option("--members", en_members, "Custom member columns")->delimiter(',');
  ens->add_option("--name", en_name, "Name of the custom ensemble");
  ens->add_option("--comb1-bertscore", en_comb1);
  ens->add_option("--sigma", en_sigma)->check(CLI::IsMember({"population", "sample"}));
  ens->add_option("--out", en_out, "Output directory")->required();

  std::string co_scores, co_ann, co_kind = "facts", co_dataset, co_combine = "mean", co_out, co_id;
  std::vector<std::string> co_refs, co_average;
  bool co_plot = false;
  auto* cor = app.add_subcommand("correlate", "Pearson report of metrics against criteria");
  cor->add_option("--scores", co_scores, "Wide score table")->check(CLI::ExistingFile);
  cor->add_option("--annotations", co_ann, "Fact or key-phrase annotations")
      ->check(CLI::ExistingFile);
  cor->add_option("--kind", co_kind)->check(CLI::IsMember({"facts", "keyphrases"}));
  cor->add_option("--refs", co_refs, "Criterion column files or directories");
  cor->add_option("--dataset", co_dataset, "Dataset (required for key phrases)")
      ->check(CLI::ExistingFile);
  cor->add_option("--combine", co_combine)
      ->check(CLI::IsMember({"mean", "first", "per-annotator"}));
  cor->add_option("--dataset-id", co_id, "Label printed above the table");
  cor->add_flag("--emit-plot-data", co_plot, "Write per-cell scatter CSVs");
  cor->add_option("--average", co_average, "Average existing report CSVs instead")
      ->check(CLI::ExistingFile);
  cor->add_option("--out", co_out, "Output directory")->required();

  std::vector<std::string> av_reports;
  std::string av_out;
  auto* avg = app.add_subcommand("average", "Unweighted mean of correlation reports");
  avg->add_option("reports", av_reports, "Report CSVs")->required()->check(CLI::ExistingFile);
  avg->add_option("--out", av_out, "Output directory")->required();

  std::string ia_ann, ia_out;
  std::vector<std::int64_t> ia_tol{0, 1, 2};
  auto* iaa = app.add_subcommand("iaa", "Averaged pairwise inter-annotator agreement");
  iaa->add_option("--annotations", ia_ann, "Fact annotations")->required()->check(CLI::ExistingFile);
  iaa->add_option("--tolerances", ia_tol, "F1 tolerances")->delimiter(',');
  iaa->add_option("--out", ia_out, "CSV output file");

  std::string va_kind, va_path, va_dataset;
  auto* val = app.add_subcommand("validate", "Check a file against its format");
  val->add_option("--kind", va_kind)
      ->required()
      ->check(CLI::IsMember({"dataset", "facts", "keyphrases", "scores", "table", "embeddings",
                             "kge", "contextual", "logprobs", "lexicon", "report", "errors"}));
  val->add_option("file", va_path)->required()->check(CLI::ExistingFile);
  val->add_option("--dataset", va_dataset, "Cross-check pair ids against this dataset")
      ->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? clineval::kExitOk : clineval::kExitConfigError;
  }

  try {
    if (*app.get_subcommand("score")) return RunScoreCmd(score);

    if (*refs) {
      if (rs_facts.empty() && rs_kp.empty() && rs_errors.empty()) {
        throw Error(Errc::kConfigError, "give --facts, --keyphrases or --errors");
      }
      if ((!rs_kp.empty() || !rs_errors.empty()) && rs_dataset.empty()) {
        throw Error(Errc::kConfigError, "--keyphrases and --errors need --dataset");
      }
      const auto ds = MaybeDataset(rs_dataset);
      std::vector<clineval::ScoreColumn> cols;
      if (!rs_facts.empty()) {
        const auto anns = clineval::LoadFactAnnotations(rs_facts, ds ? &*ds : nullptr);
        PrintWarnings(anns);
        for (auto& c : clineval::FactScoreColumns(anns, ParseCombine(rs_combine))) {
          cols.push_back(std::move(c));
        }
      }
      if (!rs_kp.empty()) {
        const auto anns = clineval::LoadKeyPhraseAnnotations(rs_kp, &*ds);
        for (auto& c : clineval::KeyPhraseScoreColumns(anns, *ds, ParseCombine(rs_combine))) {
          cols.push_back(std::move(c));
        }
      }
      if (!rs_errors.empty()) {
        cols.push_back(clineval::QualityScoreColumn(
            clineval::ParseErrorCounts(clineval::ReadFile(rs_errors)), *ds, rs_clamp));
      }
      clineval::WriteColumns(cols, rs_out);
      return clineval::kExitOk;
    }

    if (*ens) {
      auto table = clineval::LoadScoreTable(en_scores);
      std::vector<clineval::EnsembleConfig> configs;
      for (const auto& p : en_presets) {
        auto e = p == "mist-comb1" ? std::optional(clineval::MistComb1(en_comb1))
                                   : clineval::FindPreset(p);
        if (!e) throw Error(Errc::kConfigError, "unknown preset '" + p + "'");
        configs.push_back(*e);
      }
      if (!en_members.empty()) {
        if (en_name.empty()) throw Error(Errc::kConfigError, "--members needs --name");
        configs.push_back({en_name, en_members});
      }
      if (configs.empty()) throw Error(Errc::kConfigError, "give --preset or --members");
      std::vector<clineval::ScoreColumn> out;
      for (const auto& c : configs) out.push_back(clineval::Ensemble(table, c, ParseSigma(en_sigma)));
      clineval::WriteColumns(out, en_out);
      for (auto& c : out) table.Add(std::move(c));
      clineval::WriteFile(fs::path(en_out) / "scores.csv", clineval::SerializeScoreTable(table));
      return clineval::kExitOk;
    }

    if (*cor) {
      if (!co_average.empty()) {
        std::vector<clineval::CorrelationReport> reports;
        for (const auto& p : co_average) reports.push_back(clineval::ParseReportCsv(clineval::ReadFile(p)));
        const auto avg_report = clineval::AverageReports(reports);
        clineval::WriteReport(avg_report, co_out);
        std::cout << clineval::FormatReportTable(avg_report);
        return clineval::kExitOk;
      }
      if (co_scores.empty()) throw Error(Errc::kConfigError, "--scores is required");
      if (co_ann.empty() && co_refs.empty()) {
        throw Error(Errc::kConfigError, "give --annotations or --refs");
      }
      if (co_kind == "keyphrases" && !co_ann.empty() && co_dataset.empty()) {
        throw Error(Errc::kConfigError, "key-phrase annotations need --dataset");
      }
      const auto table = clineval::LoadScoreTable(co_scores);
      std::vector<clineval::ScoreColumn> criteria;
      if (!co_ann.empty()) {
        if (co_kind == "facts") {
          criteria = clineval::FactScoreColumns(clineval::LoadFactAnnotations(co_ann),
                                                ParseCombine(co_combine));
        } else {
          const auto ds = clineval::LoadDataset(co_dataset);
          criteria = clineval::KeyPhraseScoreColumns(
              clineval::LoadKeyPhraseAnnotations(co_ann, &ds), ds, ParseCombine(co_combine));
        }
      }
      {
        std::vector<fs::path> paths(co_refs.begin(), co_refs.end());
        for (auto& c : clineval::LoadCriterionColumns(paths)) criteria.push_back(std::move(c));
      }
      const auto report = clineval::Correlate(table, criteria, co_id);
      clineval::WriteReport(report, co_out, co_plot ? &table : nullptr,
                            co_plot ? &criteria : nullptr);
      std::cout << clineval::FormatReportTable(report);
      return clineval::kExitOk;
    }

    if (*avg) {
      std::vector<clineval::CorrelationReport> reports;
      for (const auto& p : av_reports) reports.push_back(clineval::ParseReportCsv(clineval::ReadFile(p)));
      const auto avg_report = clineval::AverageReports(reports);
      clineval::WriteReport(avg_report, av_out);
      std::cout << clineval::FormatReportTable(avg_report);
      return clineval::kExitOk;
    }

    if (*iaa) {
      const auto anns = clineval::LoadFactAnnotations(ia_ann);
      const auto table = clineval::PairwiseFactIaa(anns, ia_tol);
      if (!ia_out.empty()) clineval::WriteFile(ia_out, clineval::SerializeIaaCsv(table));
      std::cout << FormatIaa(table);
      return clineval::kExitOk;
    }

    if (*val) return Validate(va_kind, va_path, va_dataset);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == Errc::kConfigError ? clineval::kExitConfigError : clineval::kExitDataError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return clineval::kExitDataError;
  }
  return clineval::kExitOk;
}
