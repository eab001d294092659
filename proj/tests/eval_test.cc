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

#include "fablegen/eval.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "fablegen/error.h"
#include "fablegen/text.h"
#include "oracles/oracles.h"
#include "test_util.h"

namespace fablegen::eval {
namespace {

using Tokens = std::vector<std::string>;
using testing::FixtureCorpus;

// All lists over {a,b,c} of length 0..max_len.
std::vector<Tokens> AllLists(int max_len) {
  std::vector<Tokens> out = {{}};
  std::vector<Tokens> frontier = {{}};
  for (int len = 1; len <= max_len; ++len) {
    std::vector<Tokens> next;
    for (const auto &t : frontier) {
      for (const char *s : {"a", "b", "c"}) {
        Tokens u = t;
        u.push_back(s);
        next.push_back(u);
      }
    }
    out.insert(out.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return out;
}

TEST(RougeTest, Examples) {
  const RougeResult r = RougeL({"the", "cat", "sat"}, {"cat", "sat", "down"});
  EXPECT_EQ(r.lcs_length, 2);
  EXPECT_DOUBLE_EQ(r.precision, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.recall, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.f1, 2.0 / 3.0);
  const RougeResult same = RougeL({"x", "y"}, {"x", "y"});
  EXPECT_EQ(same.precision, 1.0);
  EXPECT_EQ(same.f1, 1.0);
  const RougeResult empty = RougeL({}, {"x"});
  EXPECT_EQ(empty.precision, 0.0);
  EXPECT_EQ(empty.recall, 0.0);
  EXPECT_EQ(empty.f1, 0.0);
}

// Length <= 6 here keeps the unit run short; the acceptance binary covers
// length 8 and the long random cases.
TEST(RougeTest, MatchesBruteForceOracleExhaustively) {
  const auto lists = AllLists(6);
  for (const auto &a : lists) {
    for (const auto &b : lists) {
      if (a.size() + b.size() > 9) continue;
      ASSERT_EQ(LcsLength(a, b), oracle::BruteForceLcs(a, b))
          << Join(a, "") << " / " << Join(b, "");
    }
  }
}

TEST(RougeTest, PrecisionDependsOnlyOnLcsAndCandidateLength) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    Tokens cand, ref;
    for (int i = 0; i < 1 + static_cast<int>(rng() % 8); ++i) cand.push_back(std::string(1, 'a' + rng() % 3));
    for (int i = 0; i < static_cast<int>(rng() % 8); ++i) ref.push_back(std::string(1, 'a' + rng() % 3));
    const RougeResult r = RougeL(cand, ref);
    EXPECT_DOUBLE_EQ(r.precision, static_cast<double>(r.lcs_length) / cand.size());
    // Extending the reference with unrelated tokens leaves precision alone.
    Tokens longer = ref;
    longer.push_back("zz");
    EXPECT_DOUBLE_EQ(RougeL(cand, longer).precision, r.precision);
  }
}

TEST(QaConcatTest, Contract) {
  EXPECT_EQ(QaConcat("Q?", "A."), "Q? A.");
  EXPECT_THROW(QaConcat("", "A"), Error);
  EXPECT_THROW(QaConcat("Q", ""), Error);
}

GoldItem Gold(std::string q, std::string a, corpus::SectionKey key = {"s", 1}) {
  return {"g-" + q, {key}, std::move(q), std::move(a)};
}

TEST(MapTest, HandComputedTwoPairFixture) {
  const std::vector<GoldItem> gold = {Gold("q", "a")};
  GeneratedBySection gen;
  gen[{"s", 1}] = {{"q", "a x"}, {"q", "a"}};
  EXPECT_DOUBLE_EQ(MapAtN(gold, gen, 1), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(MapAtN(gold, gen, 2), 1.0);
}

TEST(MapTest, VerbatimGoldScoresOne) {
  const auto gold = GoldItems(FixtureCorpus(), corpus::Split::kTrain);
  GeneratedBySection gen;
  for (const auto &g : gold) gen[g.sections.front()].push_back({g.question, g.answer});
  EXPECT_DOUBLE_EQ(MapAtN(gold, gen, 10), 1.0);
}

TEST(MapTest, MissingSectionsScoreZero) {
  const std::vector<GoldItem> gold = {Gold("q", "a"), Gold("r", "b", {"s", 2})};
  GeneratedBySection gen;
  gen[{"s", 1}] = {{"q", "a"}};
  gen[{"s", 3}] = {{"z", "z"}};  // no gold here; contributes nothing
  EXPECT_DOUBLE_EQ(MapAtN(gold, gen, 1), 0.5);
}

TEST(MapTest, MultiSectionGoldUsesUnion) {
  GoldItem g = Gold("q", "a");
  g.sections = {{"s", 1}, {"s", 2}};
  GeneratedBySection gen;
  gen[{"s", 1}] = {{"x", "y"}};
  gen[{"s", 2}] = {{"q", "a"}};
  const BestMatch m = BestForGold(g, gen, 1);
  EXPECT_DOUBLE_EQ(m.score, 1.0);
  EXPECT_EQ(m.section, (corpus::SectionKey{"s", 2}));
}

struct RandomFixture {
  std::vector<GoldItem> gold;
  GeneratedBySection gen;
};

std::string Words(std::mt19937 &rng, int max) {
  static const char *kWords[] = {"the", "fox", "hen", "ran", "stole", "why", "did", "a"};
  std::string s;
  const int n = 1 + static_cast<int>(rng() % max);
  for (int i = 0; i < n; ++i) s += (i ? " " : "") + std::string(kWords[rng() % 8]);
  return s;
}

RandomFixture MakeFixture(std::mt19937 &rng) {
  RandomFixture f;
  for (int sec = 1; sec <= 3; ++sec) {
    for (int i = 0; i < static_cast<int>(rng() % 3); ++i) {
      f.gold.push_back(Gold(Words(rng, 4), Words(rng, 3), {"s", sec}));
    }
    for (int i = 0; i < static_cast<int>(rng() % 12); ++i) {
      f.gen[{"s", sec}].push_back({Words(rng, 5), Words(rng, 3)});
    }
  }
  return f;
}

TEST(MapTest, MonotoneInN) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const auto f = MakeFixture(rng);
    double prev = 0;
    for (int n = 1; n <= 12; ++n) {
      const double m = MapAtN(f.gold, f.gen, n);
      EXPECT_GE(m, prev - 1e-15);
      EXPECT_LE(m, 1.0);
      prev = m;
    }
  }
}

TEST(MapTest, PermutationInvariance) {
  std::mt19937 rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    auto f = MakeFixture(rng);
    const int n = 1 + static_cast<int>(rng() % 5);
    const double base = MapAtN(f.gold, f.gen, n);
    std::shuffle(f.gold.begin(), f.gold.end(), rng);
    for (auto &[key, list] : f.gen) {
      if (static_cast<int>(list.size()) > n) std::shuffle(list.begin() + n, list.end(), rng);
    }
    EXPECT_DOUBLE_EQ(MapAtN(f.gold, f.gen, n), base);
  }
}

TEST(EvaluateSystemsTest, DominanceAndReport) {
  std::vector<ranker::RankedQAPair> small, big;
  int rank = 0;
  for (const auto *p : FixtureCorpus().PairsIn(corpus::Split::kTest)) {
    ranker::RankedQAPair r;
    r.story_id = p->story_id;
    r.section_index = p->section_indices.front();
    r.question = p->question;
    r.answer = "something else";
    r.rank = ++rank;
    small.push_back(r);
    big.push_back(r);
    // The superset only adds pairs below everything the smaller system has.
    r.answer = p->answer;
    r.rank = 1000 + rank;
    big.push_back(r);
  }
  const EvalReport report = EvaluateSystems(FixtureCorpus(), corpus::Split::kTest,
                                            {{"small", small}, {"big", big}}, {1, 3, 10});
  for (int n : {1, 3, 10}) {
    EXPECT_GE(report.map_at.at("big").at(n), report.map_at.at("small").at(n));
  }
  EXPECT_EQ(report.gold_count, 7);
  EXPECT_EQ(report.diagnostics.size(), 14u);
  const nlohmann::json j = ToJson(report);
  EXPECT_TRUE(j.contains("map"));
  EXPECT_NE(ToTable(report).find("big"), std::string::npos);
}

TEST(EvaluateSystemsTest, SingleCellEqualsMapAtN) {
  std::vector<ranker::RankedQAPair> out;
  for (const auto *p : FixtureCorpus().PairsIn(corpus::Split::kTest)) {
    ranker::RankedQAPair r;
    r.story_id = p->story_id;
    r.section_index = p->section_indices.back();
    r.question = "What happened?";
    r.answer = p->answer;
    out.push_back(r);
  }
  const auto report =
      EvaluateSystems(FixtureCorpus(), corpus::Split::kTest, {{"t", out}}, {5});
  EXPECT_DOUBLE_EQ(report.map_at.at("t").at(5),
                   MapAtN(GoldItems(FixtureCorpus(), corpus::Split::kTest), GroupGenerated(out), 5));
}

TEST(EvaluateSystemsTest, UnknownSectionIsAnError) {
  ranker::RankedQAPair r;
  r.story_id = "maie-and-the-cow";  // train split
  r.question = "q";
  r.answer = "a";
  EXPECT_THROW(EvaluateSystems(FixtureCorpus(), corpus::Split::kTest, {{"t", {r}}}, {1}),
               Error);
}

}  // namespace
}  // namespace fablegen::eval
