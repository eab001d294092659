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

#include "fablegen/session.h"

#include <gtest/gtest.h>

#include <atomic>
#include <set>
#include <thread>

#include "fablegen/error.h"
#include "fablegen/text.h"
#include "test_util.h"

namespace fablegen::session {
namespace {

using nlohmann::json;
using testing::SharedFixtureCorpus;

class SessionTest : public ::testing::Test {
 protected:
  SessionTest() { service_ = MakeService(); }

  std::unique_ptr<SessionService> MakeService() {
    ServiceOptions options;
    options.data_dir = dir_.path();
    options.clock = [this] { return "2026-01-01T00:00:" + Pad(tick_++) + "Z"; };
    options.id_source = [this] { return "sess" + std::to_string(next_id_++); };
    return std::make_unique<SessionService>(bank_, options);
  }

  static std::string Pad(int n) { return (n < 10 ? "0" : "") + std::to_string(n % 60); }

  ErrorCode CodeOf(const std::function<void()> &fn) {
    try {
      fn();
    } catch (const Error &e) {
      return e.code();
    }
    ADD_FAILURE() << "expected an error";
    return ErrorCode::kInternal;
  }

  int LogLines(const std::string &id, const std::string &type) {
    int n = 0;
    for (const auto &line : Split(testing::ReadFile(service_->LogPath(id)), '\n')) {
      if (!line.empty() && json::parse(line)["type"] == type) ++n;
    }
    return n;
  }

  testing::TempDir dir_;
  std::atomic<int> tick_{0};
  int next_id_ = 1;
  std::shared_ptr<QuestionBank> bank_ =
      std::make_shared<QuestionBank>(SharedFixtureCorpus(), pipeline::PipelineConfig{});
  std::unique_ptr<SessionService> service_;
};

TEST_F(SessionTest, CreateAndFirstQuestionIsRankOne) {
  const json created = service_->Create("the-lost-lantern");
  EXPECT_EQ(created["session_id"], "sess1");
  EXPECT_EQ(created["current_section"], 1);
  const json q = service_->Next("sess1");
  EXPECT_EQ(q["status"], "question");
  EXPECT_EQ(q["question_id"], "the-lost-lantern:s1:r1");
  EXPECT_EQ(q["rank"], 1);
  EXPECT_EQ(q["is_followup"], false);
  EXPECT_EQ(q["question"], bank_->Ranked("the-lost-lantern", 1)[0].question);
  // Asking again before answering re-serves the same question.
  EXPECT_EQ(service_->Next("sess1"), q);
  EXPECT_EQ(LogLines("sess1", "served"), 1);
}

// Answers every question of every story with the gold answer and checks
// the serving rules along the way.
TEST_F(SessionTest, FullWalkServesEachQuestionOnceWithFollowups) {
  int followups = 0;
  for (const auto &story : SharedFixtureCorpus()->stories()) {
    const std::string id = service_->Create(story.story_id)["session_id"];
    std::set<std::string> seen;
    for (size_t s = 0; s < story.sections.size(); ++s) {
      const int section = story.sections[s].index;
      const auto &ranked = bank_->Ranked(story.story_id, section);
      std::set<std::string> questions_served;
      for (;;) {
        const json q = service_->Next(id);
        if (q["status"] == "advance") {
          EXPECT_EQ(q["section_index"], section);
          if (s + 1 < story.sections.size()) {
            EXPECT_EQ(q["next_section"], story.sections[s + 1].index);
          } else {
            EXPECT_TRUE(q["next_section"].is_null());
          }
          break;
        }
        const std::string qid = q["question_id"];
        ASSERT_TRUE(seen.insert(qid).second) << qid;
        const ParsedQuestionId parsed = ParseQuestionId(qid);
        EXPECT_EQ(parsed.section_index, section);
        const auto &pair = ranked[parsed.rank - 1];
        EXPECT_TRUE(questions_served.insert(pair.question).second) << pair.question;
        if (q["is_followup"].get<bool>()) {
          ++followups;
          EXPECT_LT(ParseQuestionId(q["followup_of"]).rank, parsed.rank);
        } else {
          EXPECT_LE(parsed.rank, bank_->top_n());
        }
        const json r = service_->Answer(id, qid, pair.answer, "");
        EXPECT_EQ(r["verdict"]["correct"], true);
        EXPECT_EQ(r["verdict"]["feedback_hint"], "exact");
      }
      // Every top-N question text was asked exactly once, some possibly as follow-ups.
      for (int r = 1; r <= std::min<int>(bank_->top_n(), static_cast<int>(ranked.size())); ++r) {
        EXPECT_TRUE(questions_served.count(ranked[r - 1].question))
            << story.story_id << " s" << section << " r" << r;
      }
      if (s + 1 < story.sections.size()) {
        EXPECT_EQ(service_->Advance(id)["section_index"], story.sections[s + 1].index);
      }
    }
    EXPECT_EQ(CodeOf([&] { service_->Advance(id); }), ErrorCode::kConflict);
    const json progress = service_->Progress(id);
    EXPECT_EQ(progress["answered"], progress["correct"]);
    EXPECT_EQ(progress["transcript"].size(), seen.size());
  }
  EXPECT_GT(followups, 0);
}

TEST_F(SessionTest, ReplayRebuildsState) {
  const std::string id = service_->Create("maie-and-the-cow")["session_id"];
  for (int i = 0; i < 2; ++i) {
    const json q = service_->Next(id);
    service_->Answer(id, q["question_id"], i == 0 ? "a cow" : "", "k" + std::to_string(i));
  }
  service_->Advance(id);
  service_->Next(id);
  const ReadingSession live = service_->Snapshot(id);
  EXPECT_EQ(ToJson(ReplayLog(service_->LogPath(id))), ToJson(live));
  // A fresh service over the same directory picks the session up from disk.
  auto restarted = MakeService();
  EXPECT_EQ(restarted->Get(id), service_->Get(id));
  EXPECT_EQ(restarted->Progress(id), service_->Progress(id));
}

TEST_F(SessionTest, IdempotentAnswerRecordsOneAttempt) {
  const std::string id = service_->Create("the-miller-and-the-fox")["session_id"];
  const std::string qid = service_->Next(id)["question_id"];
  const json first = service_->Answer(id, qid, "Hans", "key-1");
  const json second = service_->Answer(id, qid, "something else", "key-1");
  EXPECT_EQ(first, second);
  EXPECT_EQ(LogLines(id, "answered"), 1);
  EXPECT_EQ(service_->Progress(id)["answered"], 1);
  // The stored response survives a restart.
  EXPECT_EQ(MakeService()->Answer(id, qid, "x", "key-1"), first);

  EXPECT_EQ(CodeOf([&] { service_->Answer(id, qid, "Hans", ""); }), ErrorCode::kConflict);
  EXPECT_EQ(CodeOf([&] { service_->Answer(id, qid, "Hans", "key-2"); }), ErrorCode::kConflict);
  const std::string next = service_->Next(id)["question_id"];
  EXPECT_EQ(CodeOf([&] { service_->Answer(id, next, "Hans", "key-1"); }), ErrorCode::kConflict);
}

TEST_F(SessionTest, ConcurrentDoubleSubmitRecordsOneAttempt) {
  const std::string id = service_->Create("the-lost-lantern")["session_id"];
  const std::string qid = service_->Next(id)["question_id"];
  std::vector<json> responses(8);
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&, t] { responses[t] = service_->Answer(id, qid, "her grandmother", "dup"); });
  }
  for (auto &t : threads) t.join();
  for (const auto &r : responses) EXPECT_EQ(r, responses[0]);
  EXPECT_EQ(LogLines(id, "answered"), 1);
}

TEST_F(SessionTest, Errors) {
  EXPECT_EQ(CodeOf([&] { service_->Create("no-such-story"); }), ErrorCode::kNotFound);
  EXPECT_EQ(CodeOf([&] { service_->Get("nope"); }), ErrorCode::kNotFound);
  EXPECT_EQ(CodeOf([&] { service_->Get("../../etc/passwd"); }), ErrorCode::kNotFound);
  const std::string id = service_->Create("the-lost-lantern")["session_id"];
  EXPECT_EQ(CodeOf([&] { service_->Answer(id, "the-lost-lantern:s1:r2", "x", ""); }),
            ErrorCode::kNotFound);
  EXPECT_EQ(CodeOf([&] { service_->Answer(id, "garbage", "x", ""); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([&] { service_->Answer(id, "", "x", ""); }), ErrorCode::kInvalidArgument);
}

TEST(QuestionIdTest, RoundTrip) {
  EXPECT_EQ(MakeQuestionId("the-lost-lantern", 2, 3), "the-lost-lantern:s2:r3");
  const ParsedQuestionId p = ParseQuestionId("a:b:s10:r4");
  EXPECT_EQ(p.story_id, "a:b");
  EXPECT_EQ(p.section_index, 10);
  EXPECT_EQ(p.rank, 4);
  EXPECT_THROW(ParseQuestionId("x:s1:r0"), Error);
  EXPECT_THROW(ParseQuestionId("x:s:r1"), Error);
}

TEST(ApplyEventTest, UnknownEventIsParseError) {
  ReadingSession s;
  try {
    ApplyEvent(&s, {{"type", "teleported"}});
    FAIL() << "expected a parse error";
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
  }
}

TEST(SessionIdTest, RandomIdsAreHex) {
  const std::string id = RandomSessionId();
  EXPECT_EQ(id.size(), 16u);
  EXPECT_EQ(id.find_first_not_of("0123456789abcdef"), std::string::npos);
  EXPECT_NE(RandomSessionId(), id);
  EXPECT_EQ(UtcNow().back(), 'Z');
}

}  // namespace
}  // namespace fablegen::session
