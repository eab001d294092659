// Copyright 2026 The Fablegen Authors.
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

#include "fablegen/corpus.h"

#include <gtest/gtest.h>

#include <cmath>

#include "fablegen/error.h"
#include "json.hpp"
#include "test_util.h"

namespace fablegen::corpus {
namespace {

using nlohmann::json;
using testing::FixtureCorpus;
using testing::FixtureDir;

json Manifest() {
  return json::parse(testing::ReadFile(FixtureDir() / "corpus" / "manifest.json"));
}

TEST(CorpusTest, FixtureMatchesManifestCounts) {
  const Corpus &c = FixtureCorpus();
  const json m = Manifest();
  EXPECT_EQ(static_cast<int>(c.stories().size()), m["book_count"].get<int>());
  EXPECT_EQ(static_cast<int>(c.pairs().size()), m["qa_count"].get<int>());
  for (auto &[name, split] : m["splits"].items()) {
    const Split s = ParseSplit(name);
    EXPECT_EQ(static_cast<int>(c.StoriesIn(s).size()), split["book_count"].get<int>()) << name;
    EXPECT_EQ(static_cast<int>(c.PairsIn(s).size()), split["qa_count"].get<int>()) << name;
  }
}

TEST(CorpusTest, FixtureStatsMatchManifest) {
  const Corpus &c = FixtureCorpus();
  const json m = Manifest();
  for (auto &[name, expected] : m["splits"].items()) {
    const json actual = StatsToJson(ComputeStats(c, ParseSplit(name)));
    for (auto &[stat, values] : expected.items()) {
      if (stat == "categories" || !values.is_object()) continue;
      for (const char *field : {"mean", "sd", "min", "max"}) {
        EXPECT_NEAR(actual[stat][field].get<double>(), values[field].get<double>(), 1e-9)
            << name << " " << stat << " " << field;
      }
    }
  }
}

TEST(CorpusTest, FixtureCategoriesMatchManifest) {
  const Corpus &c = FixtureCorpus();
  for (auto &[name, expected] : Manifest()["splits"].items()) {
    const auto dist = CategoryDistribution(c, ParseSplit(name));
    for (auto e : kAllNarrativeElements) {
      EXPECT_EQ(dist.at(e).count, expected["categories"][std::string(ElementName(e))].get<int>())
          << name << " " << ElementName(e);
    }
  }
}

TEST(CorpusTest, CategoryCountsSumToQaCount) {
  const Corpus &c = FixtureCorpus();
  for (Split s : {Split::kTrain, Split::kTest}) {
    int total = 0;
    double fraction = 0;
    for (const auto &[e, cc] : CategoryDistribution(c, s)) {
      total += cc.count;
      fraction += cc.fraction;
    }
    EXPECT_EQ(total, ComputeStats(c, s).qa_count);
    EXPECT_NEAR(fraction, 1.0, 1e-9);
  }
}

TEST(CorpusTest, StatsOrdering) {
  const SplitStats s = ComputeStats(FixtureCorpus(), Split::kTrain);
  for (const auto &[name, v] : StatsToJson(s).items()) {
    if (!v.is_object()) continue;
    EXPECT_LE(v["min"].get<double>(), v["mean"].get<double>()) << name;
    EXPECT_LE(v["mean"].get<double>(), v["max"].get<double>()) << name;
    EXPECT_GE(v["sd"].get<double>(), 0.0) << name;
  }
}

TEST(CorpusTest, SingleStorySplitHasZeroSd) {
  Story story{"one", "One", Split::kTest, {}};
  for (int i = 1; i <= 4; ++i) story.sections.push_back({"one", i, "text " + std::to_string(i)});
  std::vector<QAPair> pairs;
  for (int i = 1; i <= 4; ++i) {
    pairs.push_back({"p" + std::to_string(i), "one", {i}, "q?", "a",
                     NarrativeElement::kAction, Origin::kGroundTruth, std::nullopt});
  }
  const Corpus c({story}, pairs);
  const SplitStats s = ComputeStats(c, Split::kTest);
  EXPECT_EQ(s.sections_per_story.mean, 4);
  EXPECT_EQ(s.sections_per_story.sd, 0);
  EXPECT_EQ(s.sections_per_story.min, 4);
  EXPECT_EQ(s.sections_per_story.max, 4);
}

TEST(CorpusTest, SampleSdDiffersFromPopulation) {
  const Stat pop = Summarize({1, 2, 3, 4}, SdMode::kPopulation);
  const Stat sample = Summarize({1, 2, 3, 4}, SdMode::kSample);
  EXPECT_NEAR(pop.sd, std::sqrt(1.25), 1e-12);
  EXPECT_NEAR(sample.sd, std::sqrt(5.0 / 3.0), 1e-12);
}

TEST(CorpusTest, MissingSplitIsAnError) {
  EXPECT_THROW(ComputeStats(FixtureCorpus(), Split::kValidation), Error);
}

TEST(CorpusTest, CanonicalRoundTrip) {
  testing::TempDir dir;
  SaveCanonical(FixtureCorpus(), dir.path());
  const Corpus reloaded = LoadCorpus(dir.path(), FormatProfile::kCanonicalJson);
  EXPECT_EQ(reloaded, FixtureCorpus());
}

TEST(CorpusTest, EmptyDirectoryReportsNoStories) {
  testing::TempDir dir;
  try {
    LoadCorpus(dir.path(), FormatProfile::kCanonicalJson);
    FAIL() << "expected a validation error";
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kValidation);
    EXPECT_NE(std::string(e.what()).find("no stories found"), std::string::npos);
  }
}

TEST(CorpusTest, ValidationListsEveryViolation) {
  Story a{"a", "A", Split::kTrain, {{"a", 1, "text"}}};
  std::vector<QAPair> pairs = {
      {"p1", "a", {7}, "q?", "x", NarrativeElement::kAction, Origin::kGroundTruth, std::nullopt},
      {"p2", "ghost", {1}, "q?", "x", NarrativeElement::kAction, Origin::kGroundTruth,
       std::nullopt},
  };
  try {
    Corpus({a}, pairs);
    FAIL() << "expected a validation error";
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kValidation);
    EXPECT_GE(e.details().size(), 2u);
  }
}

TEST(CorpusTest, MalformedFileNamesFileAndRecord) {
  testing::TempDir dir;
  testing::WriteFile(dir.path() / "stories" / "bad.json",
                     R"({"story_id":"bad","title":"Bad","split":"train",
                         "sections":[{"index":1,"text":"x"}],
                         "qa_pairs":[{"pair_id":"p","section_indices":[1],
                                      "question":"q","answer":"a","element":"mood"}]})");
  try {
    LoadCorpus(dir.path(), FormatProfile::kCanonicalJson);
    FAIL() << "expected a parse error";
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
    const std::string msg = e.what();
    EXPECT_NE(msg.find("bad.json"), std::string::npos) << msg;
    EXPECT_NE(msg.find("qa_pairs[0]"), std::string::npos) << msg;
  }
}

TEST(CorpusTest, DuplicateIdenticalStoriesCollapse) {
  const Story &s = FixtureCorpus().stories().front();
  const Corpus c({s, s}, {});
  EXPECT_EQ(c.stories().size(), 1u);
}

TEST(CorpusTest, CsvPerBookProfile) {
  const Corpus c = LoadCorpus(FixtureDir() / "csv_corpus", FormatProfile::kCsvPerBook);
  ASSERT_EQ(c.stories().size(), 2u);
  const Story &tin = c.GetStory("the-tin-cup");
  EXPECT_EQ(tin.title, "the tin cup");
  EXPECT_EQ(tin.split, Split::kTrain);
  ASSERT_EQ(tin.sections.size(), 2u);
  EXPECT_NE(tin.sections[1].text.find("\"Thank you.\""), std::string::npos);
  const auto pairs = c.PairsForStory("the-tin-cup");
  ASSERT_EQ(pairs.size(), 3u);
  EXPECT_EQ(pairs[2]->section_indices, (std::vector<int>{1, 2}));
  EXPECT_EQ(pairs[2]->element, NarrativeElement::kOutcomeResolution);
  EXPECT_EQ(c.PairsIn(Split::kTest).size(), 1u);
}

TEST(CorpusTest, MultiSectionPairsAttributedToEachSection) {
  const auto by_section = FixtureCorpus().PairsBySection(Split::kTrain);
  auto has = [&](int section, const std::string &id) {
    for (const QAPair *p : by_section.at({"maie-and-the-cow", section})) {
      if (p->pair_id == id) return true;
    }
    return false;
  };
  EXPECT_TRUE(has(2, "maie-8"));
  EXPECT_TRUE(has(3, "maie-8"));
  EXPECT_FALSE(has(1, "maie-8"));
}

TEST(CorpusTest, StatsOutputsRender) {
  const SplitStats s = ComputeStats(FixtureCorpus(), Split::kTest);
  const std::string table = StatsToTable(s);
  EXPECT_NE(table.find("questions_per_story"), std::string::npos);
  EXPECT_EQ(StatsToJson(s)["qa_count"], 7);
}

}  // namespace
}  // namespace fablegen::corpus
