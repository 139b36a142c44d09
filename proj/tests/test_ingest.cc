// Copyright 2026 The HCF Authors.
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


#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <set>
#include <sstream>

#include "hcf/ingest.h"
#include "hcf/rng.h"
#include "test_util.h"

namespace hcf::ingest {
namespace {

using testing::Matrix;

// Item k is held by the first counts[k] entities.
InteractionMatrix WithCounts(size_t m, const std::vector<size_t>& counts) {
  std::vector<Interaction> entries;
  for (uint32_t i = 0; i < counts.size(); ++i) {
    for (uint32_t u = 0; u < counts[i]; ++u) entries.push_back({u, i});
  }
  return Matrix(m, counts.size(), std::move(entries));
}

LoadedInteractions Parse(const std::string& text) {
  std::istringstream in(text);
  return ParseInteractions(in);
}

TEST(LoadInteractions, ParsesPairsInFileOrder) {
  const auto loaded = Parse("acme,docker\nacme,mysql\n");
  EXPECT_EQ(loaded.matrix.num_entities(), 1u);
  EXPECT_EQ(loaded.matrix.num_items(), 2u);
  EXPECT_EQ(loaded.matrix.nnz(), 2u);
  EXPECT_EQ(loaded.matrix.item_ids().Id(0), "docker");
  EXPECT_EQ(loaded.duplicates, 0u);
}

TEST(LoadInteractions, MissingItemNamesLine) {
  try {
    Parse("acme\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1u);
    EXPECT_NE(std::string(e.what()).find("line 1"), std::string::npos);
  }
}

TEST(LoadInteractions, LineNumbersCountSkippedLines) {
  try {
    Parse("# header comment\n\nacme,docker\nacme,,x\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
  }
  EXPECT_THROW(Parse("acme, \n"), ParseError);
}

TEST(LoadInteractions, CollapsesDuplicates) {
  const auto loaded = Parse("acme,docker\nacme,docker\n acme , docker \n");
  EXPECT_EQ(loaded.matrix.nnz(), 1u);
  EXPECT_EQ(loaded.duplicates, 2u);
}

TEST(LoadInteractions, EmptyInputIsAnError) {
  EXPECT_THROW(Parse(""), ParseError);
  EXPECT_THROW(Parse("# only a comment\n\n"), ParseError);
}

TEST(LoadInteractions, MissingFileIsNotFound) {
  EXPECT_THROW(LoadInteractions("/nonexistent/interactions.csv"), NotFoundError);
}

TEST(LoadInteractions, WriteThenLoadRoundTrips) {
  Rng rng(3);
  const auto matrix = testing::RandomMatrix(rng, 20, 15, 0.3);
  const auto path = std::filesystem::temp_directory_path() / "hcf_ingest_roundtrip.csv";
  WriteInteractions(matrix, path);
  const auto loaded = LoadInteractions(path);
  std::filesystem::remove(path);
  ASSERT_EQ(loaded.matrix.nnz(), matrix.nnz());
  for (const auto& e : matrix.entries()) {
    const auto u = loaded.matrix.entity_ids().IndexOf(matrix.entity_ids().Id(e.entity));
    const auto i = loaded.matrix.item_ids().IndexOf(matrix.item_ids().Id(e.item));
    EXPECT_TRUE(loaded.matrix.Contains(u, i));
  }
}

TEST(OccurrenceDensity, Examples) {
  EXPECT_DOUBLE_EQ(OccurrenceDensity(WithCounts(100, {9}), 0u), 0.09);
  EXPECT_DOUBLE_EQ(OccurrenceDensity(WithCounts(100, {100}), 0u), 1.0);
  EXPECT_DOUBLE_EQ(OccurrenceDensity(WithCounts(4, {1}), "i0"), 0.25);
}

TEST(OccurrenceDensity, UnknownItem) {
  const auto matrix = WithCounts(4, {1});
  EXPECT_THROW(OccurrenceDensity(matrix, "nope"), NotFoundError);
  EXPECT_THROW(OccurrenceDensity(matrix, 7u), NotFoundError);
}

TEST(FilterItems, BoundsAreInclusive) {
  const auto result = FilterItems(WithCounts(10, {1, 5, 9}), {});
  EXPECT_EQ(result.report.kept, (std::vector<std::string>{"i0", "i1"}));
  ASSERT_EQ(result.report.dropped.size(), 1u);
  EXPECT_EQ(result.report.dropped[0].id, "i2");
  EXPECT_EQ(result.report.dropped[0].reason, DropReason::kTooCommon);
  EXPECT_DOUBLE_EQ(result.report.dropped[0].rho, 0.9);
  EXPECT_EQ(result.matrix.num_items(), 2u);
  EXPECT_EQ(result.matrix.num_entities(), 10u);

  const auto upper = FilterItems(WithCounts(100, {9, 10, 85, 86}), {});
  EXPECT_EQ(upper.report.kept, (std::vector<std::string>{"i1", "i2"}));
  ASSERT_EQ(upper.report.dropped.size(), 2u);
  EXPECT_EQ(upper.report.dropped[0].reason, DropReason::kTooRare);
  EXPECT_EQ(upper.report.dropped[1].reason, DropReason::kTooCommon);
}

TEST(FilterItems, ReportJson) {
  const auto json = FilterItems(WithCounts(10, {1, 5, 9}), {}).report.ToJson();
  EXPECT_EQ(json["kept"].size(), 2u);
  EXPECT_EQ(json["dropped"][0]["id"], "i2");
  EXPECT_EQ(json["dropped"][0]["reason"], "too_common");
  EXPECT_DOUBLE_EQ(json["dropped"][0]["rho"].get<double>(), 0.9);
}

TEST(FilterItems, ConfigValidation) {
  EXPECT_NO_THROW((DensityFilterConfig{0.0, 1.0}.Validate()));
  EXPECT_THROW((DensityFilterConfig{0.5, 0.5}.Validate()), Error);
  EXPECT_THROW((DensityFilterConfig{0.9, 0.1}.Validate()), Error);
  EXPECT_THROW((DensityFilterConfig{-0.1, 1.0}.Validate()), Error);
  EXPECT_THROW((DensityFilterConfig{0.1, 1.5}.Validate()), Error);
  EXPECT_THROW((DensityFilterConfig{std::nan(""), 0.5}.Validate()), Error);
}

TEST(FilterItems, AllDroppedIsAnError) {
  try {
    FilterItems(WithCounts(10, {0, 10}), {});
    FAIL() << "expected Error";
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "empty matrix after density filter");
  }
}

TEST(FilterItems, KeepsEntitiesWithoutItems) {
  const auto result = FilterItems(WithCounts(10, {9, 3}), {});
  EXPECT_EQ(result.matrix.num_entities(), 10u);
  EXPECT_EQ(result.matrix.num_items(), 1u);
  EXPECT_TRUE(result.matrix.ItemsOf(5).empty());
}

TEST(FilterItemsProperty, IdempotentMonotoneAndSound) {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const size_t m = 5 + rng.UniformIndex(40);
    const size_t n = 2 + rng.UniformIndex(30);
    const auto matrix = testing::RandomMatrix(rng, m, n, rng.Uniform());
    double lo = 0.3 * rng.Uniform();
    double hi = 0.5 + 0.5 * rng.Uniform();
    const DensityFilterConfig cfg{lo, hi};
    FilterResult once;
    try {
      once = FilterItems(matrix, cfg);
    } catch (const Error&) {
      continue;
    }
    for (const auto& id : once.report.kept) {
      const double rho = OccurrenceDensity(matrix, id);
      EXPECT_GE(rho, lo);
      EXPECT_LE(rho, hi);
    }
    for (const auto& d : once.report.dropped) EXPECT_TRUE(d.rho < lo || d.rho > hi);
    EXPECT_EQ(once.report.kept.size() + once.report.dropped.size(), n);

    const auto twice = FilterItems(once.matrix, cfg);
    EXPECT_EQ(twice.matrix, once.matrix);
    EXPECT_TRUE(twice.report.dropped.empty());

    const DensityFilterConfig wider{lo * rng.Uniform(), hi + (1.0 - hi) * rng.Uniform()};
    const auto widened = FilterItems(matrix, wider);
    const std::set<std::string> kept(widened.report.kept.begin(), widened.report.kept.end());
    for (const auto& id : once.report.kept) EXPECT_TRUE(kept.count(id)) << id;
  }
}

TEST(CapItems, KeepsMostFrequentInOriginalOrder) {
  const auto matrix = WithCounts(10, {2, 7, 5, 7, 1});
  const auto capped = CapItems(matrix, 3);
  EXPECT_EQ(capped.item_ids().ids(), (std::vector<std::string>{"i1", "i2", "i3"}));
  EXPECT_EQ(CapItems(matrix, 9), matrix);
  // Ties on count go to the lower index.
  EXPECT_EQ(CapItems(matrix, 1).item_ids().ids(), (std::vector<std::string>{"i1"}));
}

std::vector<CorpusRecord> ParseCorpusText(const std::string& text) {
  std::istringstream in(text);
  return ParseCorpus(in);
}

TEST(LoadCorpus, TwoRecordsInFileOrder) {
  const auto corpus = ParseCorpusText(
      "{\"id\": \"globex\", \"text\": \"widgets\"}\n{\"id\": \"acme\", \"text\": \"anvils\"}\n");
  ASSERT_EQ(corpus.size(), 2u);
  EXPECT_EQ(corpus[0], (CorpusRecord{"globex", "widgets"}));
  EXPECT_EQ(corpus[1].id, "acme");
}

TEST(LoadCorpus, DuplicateIdNamesTheId) {
  try {
    ParseCorpusText("{\"id\": \"acme\", \"text\": \"a\"}\n{\"id\": \"acme\", \"text\": \"b\"}\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("acme"), std::string::npos);
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(LoadCorpus, MalformedRecords) {
  EXPECT_THROW(ParseCorpusText("not json\n"), ParseError);
  EXPECT_THROW(ParseCorpusText("{\"id\": 3, \"text\": \"a\"}\n"), ParseError);
  EXPECT_THROW(ParseCorpusText("{\"id\": \"a\"}\n"), ParseError);
  EXPECT_THROW(ParseCorpusText("\n"), ParseError);
  EXPECT_THROW(LoadCorpus("/nonexistent/corpus.jsonl"), NotFoundError);
}

TEST(AlignCorpus, CoverageReport) {
  const auto corpus = ParseCorpusText(
      "{\"id\": \"u1\", \"text\": \"\"}\n{\"id\": \"u0\", \"text\": \"text\"}\n"
      "{\"id\": \"zz\", \"text\": \"orphan\"}\n");
  const auto entities = testing::Ids('u', 3);
  const auto aligned = AlignCorpus(corpus, *entities);
  ASSERT_EQ(aligned.records.size(), 3u);
  EXPECT_EQ(aligned.records[0], (CorpusRecord{"u0", "text"}));
  EXPECT_EQ(aligned.records[2], (CorpusRecord{"u2", ""}));
  EXPECT_EQ(aligned.coverage.missing, (std::vector<std::string>{"u2"}));
  EXPECT_EQ(aligned.coverage.empty_text, (std::vector<std::string>{"u1"}));
  EXPECT_EQ(aligned.coverage.extra, (std::vector<std::string>{"zz"}));
  EXPECT_EQ(aligned.coverage.ToJson()["missing"][0], "u2");
}

TEST(LoadCorpus, WriteThenLoadRoundTrips) {
  const std::vector<CorpusRecord> corpus{{"a", "x \"quoted\"\nnewline"}, {"b", ""}};
  const auto path = std::filesystem::temp_directory_path() / "hcf_corpus_roundtrip.jsonl";
  WriteCorpus(corpus, path);
  EXPECT_EQ(LoadCorpus(path), corpus);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace hcf::ingest
