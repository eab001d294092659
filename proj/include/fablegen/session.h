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

// Reading sessions for the interactive storyteller.
//
// Each session is an append-only JSON-lines event log at
// <data_dir>/sessions/<id>.jsonl; the in-memory state is a fold over the
// events, so replaying a log rebuilds the state exactly. Requests for one
// session are serialized by a per-session mutex.
//
// Question ids are "<story>:s<section>:r<rank>" where rank is the 1-based
// position in the section's full ranked list. Questions are served in rank
// order from the top N. After an answer, the first lower-ranked pair not yet
// served whose provenance spans overlap the answered pair's is served once
// as a follow-up.

#ifndef FABLEGEN_SESSION_H_
#define FABLEGEN_SESSION_H_

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fablegen/corpus.h"
#include "fablegen/pipeline.h"
#include "json.hpp"

namespace fablegen::session {

struct AskedEntry {
  std::string question_id;
  std::string question;
  std::string gold_answer;
  std::string user_answer;
  pipeline::Verdict verdict;
  bool is_followup = false;
  std::string answered_at;
};

struct ServedEntry {
  std::string question_id;
  int section_index = 0;
  int rank = 0;
  bool is_followup = false;
  std::string followup_of;
};

struct ReadingSession {
  std::string session_id;
  std::string story_id;
  int current_section = 1;
  std::vector<ServedEntry> served;
  std::vector<AskedEntry> asked;
  std::optional<std::string> pending;
  // Set right after an answer until the next question is served.
  std::optional<std::string> followup_source;
  std::map<std::string, nlohmann::json> idempotent_responses;
  std::string created_at;
  std::string updated_at;

  bool WasServed(const std::string &question_id) const;
  bool WasAnswered(const std::string &question_id) const;
};

nlohmann::json ToJson(const ReadingSession &session);

// Folds one event into the state. Throws kParse on an unknown event.
void ApplyEvent(ReadingSession *session, const nlohmann::json &event);
ReadingSession ReplayLog(const std::filesystem::path &path);

std::string MakeQuestionId(const std::string &story_id, int section_index, int rank);

struct ParsedQuestionId {
  std::string story_id;
  int section_index = 0;
  int rank = 0;
};
ParsedQuestionId ParseQuestionId(const std::string &question_id);

// Ranked question lists per story, computed once on first use.
class QuestionBank {
 public:
  QuestionBank(std::shared_ptr<const corpus::Corpus> corpus, pipeline::PipelineConfig config);

  // Full ranked list for a section (deduped, score order, ranks set).
  const std::vector<ranker::RankedQAPair> &Ranked(const std::string &story_id,
                                                  int section_index);
  int top_n() const { return pipeline_.config().top_n; }
  const corpus::Corpus &corpus() const { return *corpus_; }
  const pipeline::Pipeline &pipeline() const { return pipeline_; }

 private:
  struct StoryPlan {
    std::map<int, std::vector<ranker::RankedQAPair>> sections;
    std::map<int, std::string> errors;
  };
  const StoryPlan &Plan(const std::string &story_id);

  std::shared_ptr<const corpus::Corpus> corpus_;
  pipeline::Pipeline pipeline_;
  std::mutex mu_;
  std::map<std::string, std::shared_ptr<StoryPlan>> plans_;
};

struct ServiceOptions {
  std::filesystem::path data_dir = "fablegen-data";
  std::function<std::string()> clock;       // ISO-8601 UTC timestamps
  std::function<std::string()> id_source;   // new session ids
  double judge_threshold = pipeline::kJudgeThreshold;
};

std::string UtcNow();
std::string RandomSessionId();

class SessionService {
 public:
  SessionService(std::shared_ptr<QuestionBank> bank, ServiceOptions options);

  nlohmann::json Create(const std::string &story_id);
  nlohmann::json Get(const std::string &session_id);
  nlohmann::json Next(const std::string &session_id);
  nlohmann::json Answer(const std::string &session_id, const std::string &question_id,
                        const std::string &user_answer, const std::string &idempotency_key);
  nlohmann::json Advance(const std::string &session_id);
  nlohmann::json Progress(const std::string &session_id);

  ReadingSession Snapshot(const std::string &session_id);
  std::filesystem::path LogPath(const std::string &session_id) const;

 private:
  struct Entry {
    std::mutex mu;
    ReadingSession state;
  };
  std::shared_ptr<Entry> Find(const std::string &session_id);
  void Append(Entry *entry, nlohmann::json event);
  nlohmann::json Serve(Entry *entry, const ranker::RankedQAPair &pair, bool is_followup,
                       const std::string &followup_of);
  nlohmann::json QuestionPayload(const ReadingSession &s, const std::string &question_id);
  const ranker::RankedQAPair &Resolve(const std::string &question_id);

  std::shared_ptr<QuestionBank> bank_;
  ServiceOptions options_;
  std::mutex mu_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
};

}  // namespace fablegen::session

#endif  // FABLEGEN_SESSION_H_
