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

#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "clineval/data.hpp"

namespace clineval {
namespace {

Errc CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no Error thrown";
  return Errc::kIoError;
}

constexpr const char* kTwoPairs =
    R"({"pair_id":"a","reference":"Ref one.","system":"Sys one."})"
    "\n"
    R"({"pair_id":"b","reference":"Ref two.","system":"Sys two.","section":"EXAM","source":"x"})"
    "\n";

TEST(Dataset, LoadsJsonl) {
  const auto ds = ParseDataset(kTwoPairs, DataFormat::kJsonl, "toy");
  ASSERT_EQ(ds.pairs.size(), 2u);
  EXPECT_EQ(ds.dataset_id, "toy");
  EXPECT_EQ(ds.annotation_kind, AnnotationKind::kNone);
  EXPECT_EQ(ds.pairs[0].pair_id, "a");
  EXPECT_FALSE(ds.pairs[0].section.has_value());
  EXPECT_EQ(ds.pairs[1].section, Section::kExam);
  EXPECT_EQ(ds.Find("b")->source, "x");
}

TEST(Dataset, NullSectionIsAbsent) {
  const auto ds = ParseDataset(R"({"pair_id":"a","reference":"r","system":"s","section":null})",
                               DataFormat::kJsonl);
  EXPECT_FALSE(ds.pairs[0].section.has_value());
}

TEST(Dataset, Errors) {
  EXPECT_EQ(CodeOf([] {
              ParseDataset(R"({"pair_id":"a","reference":"r","system":"s"})"
                           "\n"
                           R"({"pair_id":"a","reference":"r","system":"s"})",
                           DataFormat::kJsonl);
            }),
            Errc::kDuplicateId);
  EXPECT_EQ(CodeOf([] { ParseDataset(R"({"pair_id":"a","system":"s"})", DataFormat::kJsonl); }),
            Errc::kMissingField);
  EXPECT_EQ(CodeOf([] { ParseDataset("{not json", DataFormat::kJsonl); }), Errc::kParseError);
  EXPECT_EQ(CodeOf([] { ParseDataset(R"({"pair_id":"a","reference":"","system":"s"})",
                                     DataFormat::kJsonl); }),
            Errc::kParseError);
  EXPECT_EQ(CodeOf([] { ParseDataset("pair_id,reference,system\na,r\n", DataFormat::kCsv); }),
            Errc::kParseError);
}

TEST(Dataset, ErrorMessagesCarryLine) {
  try {
    ParseDataset("\n{\"pair_id\":\"a\",\"reference\":\"r\",\"system\":\"s\"}\n[1]\n",
                 DataFormat::kJsonl);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

std::string RandomNote(std::mt19937& rng) {
  static const std::vector<std::string> parts = {
      "Pt c/o pain",  ", radiating",   "\"quoted\"", "\n",  "\r\n", "BP 120/80", " ",
      "temp 37.2",    "caf\xC3\xA9",   ";",          "  ",  "\t",   "\"\"",      "end."};
  std::string s;
  const std::size_t n = 1 + rng() % 12;
  for (std::size_t i = 0; i < n; ++i) s += parts[rng() % parts.size()];
  return s;
}

// Load -> serialize -> load preserves every field byte for byte, and the
// second serialization equals the first.
TEST(Dataset, CsvRoundTripOfRandomNotes) {
  std::mt19937 rng(20);
  Dataset ds;
  ds.dataset_id = "rt";
  for (int i = 0; i < 20; ++i) {
    SummaryPair p;
    p.pair_id = "n" + std::to_string(i);
    p.source = i % 3 ? RandomNote(rng) : "";
    p.reference = RandomNote(rng);
    p.system = RandomNote(rng);
    if (i % 2) p.section = Section::kAssessment;
    ds.Add(p);
  }
  for (auto fmt : {DataFormat::kCsv, DataFormat::kJsonl}) {
    const auto text = SerializeDataset(ds, fmt);
    const auto back = ParseDataset(text, fmt);
    ASSERT_EQ(back.pairs.size(), ds.pairs.size());
    for (std::size_t i = 0; i < ds.pairs.size(); ++i) {
      EXPECT_EQ(back.pairs[i].source, ds.pairs[i].source);
      EXPECT_EQ(back.pairs[i].reference, ds.pairs[i].reference);
      EXPECT_EQ(back.pairs[i].system, ds.pairs[i].system);
      EXPECT_EQ(back.pairs[i].section, ds.pairs[i].section);
    }
    EXPECT_EQ(SerializeDataset(back, fmt), text);
  }
}

TEST(Dataset, FormatFromExtension) {
  EXPECT_EQ(FormatFromPath("x/data.csv"), DataFormat::kCsv);
  EXPECT_EQ(FormatFromPath("x/data.jsonl"), DataFormat::kJsonl);
}

constexpr const char* kFact =
    R"({"pair_id":"a","annotator_id":"u1","correct":3,"incorrect":1,"hallucinated":1,"omitted":2,"reference_facts":6})";

TEST(Facts, AcceptsConsistentRecord) {
  const auto anns = ParseFactAnnotations(kFact, DataFormat::kJsonl);
  ASSERT_EQ(anns.size(), 1u);
  EXPECT_EQ(anns[0].system_facts(), 5);
  EXPECT_TRUE(FactAnnotationWarnings(anns[0]).empty());
}

TEST(Facts, RejectsInconsistentCounts) {
  EXPECT_EQ(CodeOf([] {
              ParseFactAnnotations(
                  R"({"pair_id":"a","correct":3,"incorrect":1,"hallucinated":1,"omitted":7,"reference_facts":6})",
                  DataFormat::kJsonl);
            }),
            Errc::kCountInconsistent);
  EXPECT_EQ(CodeOf([] {
              ParseFactAnnotations(
                  R"({"pair_id":"a","correct":7,"incorrect":1,"hallucinated":1,"omitted":0,"reference_facts":6})",
                  DataFormat::kJsonl);
            }),
            Errc::kCountInconsistent);
  EXPECT_EQ(CodeOf([] {
              ParseFactAnnotations(
                  R"({"pair_id":"a","correct":-1,"incorrect":1,"hallucinated":1,"omitted":0,"reference_facts":6})",
                  DataFormat::kJsonl);
            }),
            Errc::kNegativeCount);
}

TEST(Facts, WarnsWhenCorrectPlusOmittedExceedsReference) {
  const auto anns = ParseFactAnnotations(
      R"({"pair_id":"a","correct":4,"incorrect":0,"hallucinated":0,"omitted":3,"reference_facts":6})",
      DataFormat::kJsonl);
  EXPECT_EQ(FactAnnotationWarnings(anns[0]).size(), 1u);
}

TEST(Facts, TwoAnnotatorsKept) {
  const std::string two = std::string(kFact) + "\n" +
                          R"({"pair_id":"a","annotator_id":"u2","correct":2,"incorrect":0,"hallucinated":0,"omitted":1,"reference_facts":6})";
  const auto anns = ParseFactAnnotations(two, DataFormat::kJsonl);
  ASSERT_EQ(anns.size(), 2u);
  EXPECT_EQ(anns[1].annotator_id, "u2");
  EXPECT_EQ(CodeOf([&] { ParseFactAnnotations(std::string(kFact) + "\n" + kFact, DataFormat::kJsonl); }),
            Errc::kDuplicateId);
}

TEST(Facts, UnknownPairAgainstDataset) {
  const auto ds = ParseDataset(kTwoPairs, DataFormat::kJsonl);
  EXPECT_NO_THROW(ParseFactAnnotations(kFact, DataFormat::kJsonl, &ds));
  EXPECT_EQ(CodeOf([&] {
              ParseFactAnnotations(
                  R"({"pair_id":"zz","correct":0,"incorrect":0,"hallucinated":0,"omitted":0,"reference_facts":0})",
                  DataFormat::kJsonl, &ds);
            }),
            Errc::kUnknownPair);
}

TEST(Facts, CsvAndRoundTrip) {
  const auto anns = ParseFactAnnotations(
      "pair_id,annotator_id,correct,incorrect,hallucinated,omitted,reference_facts\n"
      "a,u1,3,1,1,2,6\n",
      DataFormat::kCsv);
  ASSERT_EQ(anns.size(), 1u);
  EXPECT_EQ(anns[0].omitted_facts, 2);
  const auto back = ParseFactAnnotations(SerializeFactAnnotations(anns), DataFormat::kJsonl);
  EXPECT_EQ(back[0].reference_facts, 6);
}

TEST(KeyPhrases, BoundsCheckedAgainstSystemText) {
  const auto ds = ParseDataset(kTwoPairs, DataFormat::kJsonl);
  const auto ok = ParseKeyPhraseAnnotations(
      R"({"pair_id":"a","hallucinations":[{"start":0,"end":3,"label":"x"},{"start":0,"end":3}],"omissions":[{"pos":8}]})",
      &ds);
  ASSERT_EQ(ok.size(), 1u);
  EXPECT_EQ(ok[0].hallucinated_spans.size(), 2u);  // repeats count twice
  EXPECT_EQ(CodeOf([&] {
              ParseKeyPhraseAnnotations(R"({"pair_id":"a","hallucinations":[{"start":2,"end":99}]})",
                                        &ds);
            }),
            Errc::kParseError);
  EXPECT_EQ(CodeOf([&] {
              ParseKeyPhraseAnnotations(R"({"pair_id":"a","hallucinations":[{"start":3,"end":3}]})",
                                        &ds);
            }),
            Errc::kParseError);
  const auto back = ParseKeyPhraseAnnotations(SerializeKeyPhraseAnnotations(ok), &ds);
  EXPECT_EQ(back[0].omission_markers[0].position, 8u);
}

TEST(ScoreColumn, LoadsHeaderAndRows) {
  const auto col = ParseScoreColumn("bleurt,higher\na,0.5\nb,0.25\nc,-1\n");
  EXPECT_EQ(col.metric_name, "bleurt");
  EXPECT_TRUE(col.higher_is_better);
  EXPECT_EQ(col.size(), 3u);
  EXPECT_EQ(col.Get("b"), 0.25);
  EXPECT_FALSE(ParseScoreColumn("err,lower\n").higher_is_better);
}

TEST(ScoreColumn, Errors) {
  EXPECT_EQ(CodeOf([] { ParseScoreColumn("m,higher\na,nan\n"); }), Errc::kNaNValue);
  EXPECT_EQ(CodeOf([] { ParseScoreColumn("m,higher\na,abc\n"); }), Errc::kParseError);
  EXPECT_EQ(CodeOf([] { ParseScoreColumn("m,sideways\n"); }), Errc::kParseError);
  EXPECT_EQ(CodeOf([] { ParseScoreColumn("m,higher\na,1\na,2\n"); }), Errc::kDuplicateId);
}

TEST(ScoreColumn, CoverageReportListsMissingIds) {
  Dataset ds;
  std::string csv = "bleurt,higher\n";
  for (int i = 0; i < 182; ++i) {
    ds.Add({"p" + std::to_string(i), "d", std::nullopt, "", "r", "s"});
    if (i != 17 && i != 90) csv += "p" + std::to_string(i) + ",0.5\n";
  }
  const auto col = ParseScoreColumn(csv, &ds);
  EXPECT_EQ(col.size(), 180u);
  EXPECT_EQ(MissingIds(col, ds), (std::vector<std::string>{"p17", "p90"}));
}

TEST(ScoreTable, RoundTripWithGaps) {
  ScoreTable t;
  ScoreColumn a("a");
  a.Set("x", 0.1);
  a.Set("y", 0.2);
  ScoreColumn b("b", false);
  b.Set("y", -3.5);
  b.Set("z", 1e-17);
  t.Add(a);
  t.Add(b);
  EXPECT_EQ(t.pair_ids, (std::vector<std::string>{"x", "y", "z"}));
  const auto text = SerializeScoreTable(t);
  const auto back = ParseScoreTable(text);
  EXPECT_EQ(back.pair_ids, t.pair_ids);
  EXPECT_FALSE(back.Find("b")->higher_is_better);
  EXPECT_FALSE(back.Find("a")->Contains("z"));
  EXPECT_EQ(back.Find("b")->Get("z"), 1e-17);
  EXPECT_EQ(SerializeScoreTable(back), text);
  EXPECT_EQ(CodeOf([&] { t.Add(a); }), Errc::kDuplicateKey);
}

}  // namespace
}  // namespace clineval
