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

#include <chrono>
#include <climits>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <random>
#include <set>

#include "fablegen/error.h"

namespace fablegen::session {

using nlohmann::json;
using ranker::RankedQAPair;

bool ReadingSession::WasServed(const std::string &question_id) const {
  for (const auto &s : served) {
    if (s.question_id == question_id) return true;
  }
  return false;
}

bool ReadingSession::WasAnswered(const std::string &question_id) const {
  for (const auto &a : asked) {
    if (a.question_id == question_id) return true;
  }
  return false;
}

json ToJson(const ReadingSession &s) {
  json served = json::array();
  for (const auto &e : s.served) {
    served.push_back({{"question_id", e.question_id},
                      {"section_index", e.section_index},
                      {"rank", e.rank},
                      {"is_followup", e.is_followup},
                      {"followup_of", e.followup_of}});
  }
  json asked = json::array();
  for (const auto &a : s.asked) {
    asked.push_back({{"question_id", a.question_id},
                     {"question", a.question},
                     {"gold_answer", a.gold_answer},
                     {"user_answer", a.user_answer},
                     {"verdict", pipeline::ToJson(a.verdict)},
                     {"is_followup", a.is_followup},
                     {"answered_at", a.answered_at}});
  }
  json keys = json::object();
  for (const auto &[k, v] : s.idempotent_responses) keys[k] = v;
  return {{"session_id", s.session_id},
          {"story_id", s.story_id},
          {"current_section", s.current_section},
          {"served", served},
          {"asked", asked},
          {"pending", s.pending ? json(*s.pending) : json(nullptr)},
          {"followup_source", s.followup_source ? json(*s.followup_source) : json(nullptr)},
          {"idempotent_responses", keys},
          {"created_at", s.created_at},
          {"updated_at", s.updated_at}};
}

void ApplyEvent(ReadingSession *s, const json &event) {
  const std::string type = event.at("type").get<std::string>();
  const std::string at = event.value("at", "");
  if (type == "created") {
    s->session_id = event.at("session_id").get<std::string>();
    s->story_id = event.at("story_id").get<std::string>();
    s->current_section = event.at("section_index").get<int>();
    s->created_at = at;
  } else if (type == "served") {
    ServedEntry e;
    e.question_id = event.at("question_id").get<std::string>();
    e.section_index = event.at("section_index").get<int>();
    e.rank = event.at("rank").get<int>();
    e.is_followup = event.at("is_followup").get<bool>();
    e.followup_of = event.value("followup_of", "");
    s->served.push_back(e);
    s->pending = e.question_id;
    s->followup_source.reset();
  } else if (type == "answered") {
    AskedEntry a;
    a.question_id = event.at("question_id").get<std::string>();
    a.question = event.at("question").get<std::string>();
    a.gold_answer = event.at("gold_answer").get<std::string>();
    a.user_answer = event.at("user_answer").get<std::string>();
    a.verdict = pipeline::VerdictFromJson(event.at("verdict"));
    a.is_followup = event.at("is_followup").get<bool>();
    a.answered_at = at;
    s->asked.push_back(a);
    s->pending.reset();
    s->followup_source = a.question_id;
    const std::string key = event.value("idempotency_key", "");
    if (!key.empty()) s->idempotent_responses[key] = event.at("response");
  } else if (type == "advanced") {
    s->current_section = event.at("section_index").get<int>();
    s->pending.reset();
    s->followup_source.reset();
  } else {
    throw Error(ErrorCode::kParse, "unknown session event '" + type + "'");
  }
  if (!at.empty()) s->updated_at = at;
}

ReadingSession ReplayLog(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kNotFound, "no session log at " + path.string());
  ReadingSession s;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json event;
    try {
      event = json::parse(line);
    } catch (const json::exception &e) {
      throw Error(ErrorCode::kParse, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    ApplyEvent(&s, event);
  }
  return s;
}

std::string MakeQuestionId(const std::string &story_id, int section_index, int rank) {
  return story_id + ":s" + std::to_string(section_index) + ":r" + std::to_string(rank);
}

ParsedQuestionId ParseQuestionId(const std::string &question_id) {
  const auto bad = [&] {
    return Error(ErrorCode::kInvalidArgument, "malformed question id '" + question_id + "'");
  };
  const size_t r = question_id.rfind(":r");
  if (r == std::string::npos || r == 0) throw bad();
  const size_t s = question_id.rfind(":s", r - 1);
  if (s == std::string::npos || s == 0) throw bad();
  ParsedQuestionId out;
  out.story_id = question_id.substr(0, s);
  try {
    size_t used = 0;
    const std::string sec = question_id.substr(s + 2, r - s - 2);
    out.section_index = std::stoi(sec, &used);
    if (used != sec.size()) throw bad();
    const std::string rank = question_id.substr(r + 2);
    out.rank = std::stoi(rank, &used);
    if (used != rank.size()) throw bad();
  } catch (const std::logic_error &) {
    throw bad();
  }
  if (out.rank < 1) throw bad();
  return out;
}

// ---------------------------------------------------------------------------

QuestionBank::QuestionBank(std::shared_ptr<const corpus::Corpus> corpus,
                           pipeline::PipelineConfig config)
    : corpus_(std::move(corpus)), pipeline_(std::move(config)) {}

const QuestionBank::StoryPlan &QuestionBank::Plan(const std::string &story_id) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = plans_.find(story_id);
    if (it != plans_.end()) return *it->second;
  }
  const corpus::Story &story = corpus_->GetStory(story_id);
  auto plan = std::make_shared<StoryPlan>();
  for (const auto &section : story.sections) {
    try {
      plan->sections[section.index] =
          ranker::SelectTopN(pipeline_.ScoreSection(story, section), INT_MAX);
    } catch (const Error &e) {
      plan->errors[section.index] = e.what();
    }
  }
  std::lock_guard<std::mutex> lock(mu_);
  // A concurrent first request may have won; keep its plan.
  return *plans_.emplace(story_id, plan).first->second;
}

const std::vector<RankedQAPair> &QuestionBank::Ranked(const std::string &story_id,
                                                      int section_index) {
  const StoryPlan &plan = Plan(story_id);
  auto err = plan.errors.find(section_index);
  if (err != plan.errors.end()) {
    throw Error(ErrorCode::kGeneration, "question generation failed for " + story_id +
                                            " section " + std::to_string(section_index) + ": " +
                                            err->second);
  }
  auto it = plan.sections.find(section_index);
  if (it == plan.sections.end()) {
    throw Error(ErrorCode::kNotFound,
                "story " + story_id + " has no section " + std::to_string(section_index));
  }
  return it->second;
}

// ---------------------------------------------------------------------------

std::string UtcNow() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string RandomSessionId() {
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(rng()));
  return buf;
}

namespace {

bool ValidSessionId(const std::string &id) {
  if (id.empty() || id.size() > 64) return false;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '-' || c == '_';
    if (!ok) return false;
  }
  return true;
}

bool SpansOverlap(const RankedQAPair &a, const RankedQAPair &b) {
  if (!a.provenance || !b.provenance) return false;
  for (const auto &x : a.provenance->provenance_spans) {
    for (const auto &y : b.provenance->provenance_spans) {
      if (x.start < y.end && y.start < x.end) return true;
    }
  }
  return false;
}

}  // namespace

SessionService::SessionService(std::shared_ptr<QuestionBank> bank, ServiceOptions options)
    : bank_(std::move(bank)), options_(std::move(options)) {
  if (!options_.clock) options_.clock = UtcNow;
  if (!options_.id_source) options_.id_source = RandomSessionId;
  std::filesystem::create_directories(options_.data_dir / "sessions");
}

std::filesystem::path SessionService::LogPath(const std::string &session_id) const {
  return options_.data_dir / "sessions" / (session_id + ".jsonl");
}

std::shared_ptr<SessionService::Entry> SessionService::Find(const std::string &session_id) {
  if (!ValidSessionId(session_id)) {
    throw Error(ErrorCode::kNotFound, "unknown session '" + session_id + "'");
  }
  std::lock_guard<std::mutex> lock(mu_);
  auto it = sessions_.find(session_id);
  if (it != sessions_.end()) return it->second;
  const auto path = LogPath(session_id);
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::kNotFound, "unknown session '" + session_id + "'");
  }
  auto entry = std::make_shared<Entry>();
  entry->state = ReplayLog(path);
  sessions_[session_id] = entry;
  return entry;
}

void SessionService::Append(Entry *entry, json event) {
  event["at"] = options_.clock();
  // Fold first so a malformed event never reaches the log.
  ReadingSession next = entry->state;
  ApplyEvent(&next, event);
  std::ofstream out(LogPath(next.session_id), std::ios::app);
  if (!out) throw Error(ErrorCode::kInternal, "cannot write session log for " + next.session_id);
  out << event.dump() << "\n";
  out.flush();
  if (!out) throw Error(ErrorCode::kInternal, "cannot write session log for " + next.session_id);
  entry->state = std::move(next);
}

json SessionService::Create(const std::string &story_id) {
  const corpus::Story &story = bank_->corpus().GetStory(story_id);
  Require(!story.sections.empty(), "story " + story_id + " has no sections");
  auto entry = std::make_shared<Entry>();
  std::string id;
  {
    std::lock_guard<std::mutex> lock(mu_);
    for (int attempt = 0;; ++attempt) {
      id = options_.id_source();
      if (!ValidSessionId(id)) {
        throw Error(ErrorCode::kInternal, "session id source produced '" + id + "'");
      }
      if (sessions_.count(id) == 0 && !std::filesystem::exists(LogPath(id))) break;
      if (attempt > 8) throw Error(ErrorCode::kConflict, "could not allocate a session id");
    }
    sessions_[id] = entry;
  }
  std::lock_guard<std::mutex> lock(entry->mu);
  Append(entry.get(), {{"type", "created"},
                       {"session_id", id},
                       {"story_id", story_id},
                       {"section_index", story.sections.front().index}});
  return ToJson(entry->state);
}

json SessionService::Get(const std::string &session_id) {
  auto entry = Find(session_id);
  std::lock_guard<std::mutex> lock(entry->mu);
  return ToJson(entry->state);
}

ReadingSession SessionService::Snapshot(const std::string &session_id) {
  auto entry = Find(session_id);
  std::lock_guard<std::mutex> lock(entry->mu);
  return entry->state;
}

const RankedQAPair &SessionService::Resolve(const std::string &question_id) {
  const ParsedQuestionId q = ParseQuestionId(question_id);
  const auto &ranked = bank_->Ranked(q.story_id, q.section_index);
  if (q.rank > static_cast<int>(ranked.size())) {
    throw Error(ErrorCode::kNotFound, "unknown question '" + question_id + "'");
  }
  return ranked[q.rank - 1];
}

json SessionService::QuestionPayload(const ReadingSession &s, const std::string &question_id) {
  const RankedQAPair &pair = Resolve(question_id);
  const ServedEntry *served = nullptr;
  for (const auto &e : s.served) {
    if (e.question_id == question_id) served = &e;
  }
  json j = {{"status", "question"},
            {"session_id", s.session_id},
            {"question_id", question_id},
            {"section_index", pair.section_index},
            {"rank", pair.rank},
            {"question", pair.question},
            {"is_followup", served != nullptr && served->is_followup}};
  if (served != nullptr && served->is_followup) j["followup_of"] = served->followup_of;
  return j;
}

json SessionService::Serve(Entry *entry, const RankedQAPair &pair, bool is_followup,
                           const std::string &followup_of) {
  const std::string qid = MakeQuestionId(pair.story_id, pair.section_index, pair.rank);
  json event = {{"type", "served"},
                {"question_id", qid},
                {"section_index", pair.section_index},
                {"rank", pair.rank},
                {"is_followup", is_followup}};
  if (is_followup) event["followup_of"] = followup_of;
  Append(entry, event);
  return QuestionPayload(entry->state, qid);
}

json SessionService::Next(const std::string &session_id) {
  auto entry = Find(session_id);
  std::lock_guard<std::mutex> lock(entry->mu);
  const ReadingSession &s = entry->state;
  if (s.pending) return QuestionPayload(s, *s.pending);

  const auto &ranked = bank_->Ranked(s.story_id, s.current_section);
  // A pair is covered once it or another pair with the same question was served.
  std::set<std::string> asked_questions;
  for (const auto &e : s.served) {
    const ParsedQuestionId id = ParseQuestionId(e.question_id);
    if (id.story_id == s.story_id && id.section_index == s.current_section &&
        id.rank <= static_cast<int>(ranked.size())) {
      asked_questions.insert(ranked[id.rank - 1].question);
    }
  }
  auto covered = [&](const RankedQAPair &p) {
    return asked_questions.count(p.question) > 0 ||
           s.WasServed(MakeQuestionId(p.story_id, p.section_index, p.rank));
  };
  if (s.followup_source) {
    const ParsedQuestionId src = ParseQuestionId(*s.followup_source);
    if (src.story_id == s.story_id && src.section_index == s.current_section &&
        src.rank <= static_cast<int>(ranked.size())) {
      const RankedQAPair &answered = ranked[src.rank - 1];
      for (size_t i = src.rank; i < ranked.size(); ++i) {
        const RankedQAPair &p = ranked[i];
        if (covered(p)) continue;
        if (SpansOverlap(answered, p)) return Serve(entry.get(), p, true, *s.followup_source);
      }
    }
  }
  const size_t limit = std::min(ranked.size(), static_cast<size_t>(bank_->top_n()));
  for (size_t i = 0; i < limit; ++i) {
    const RankedQAPair &p = ranked[i];
    if (!covered(p)) return Serve(entry.get(), p, false, "");
  }
  const corpus::Story &story = bank_->corpus().GetStory(s.story_id);
  const corpus::Section *next = nullptr;
  for (const auto &sec : story.sections) {
    if (sec.index > s.current_section) {
      next = &sec;
      break;
    }
  }
  return {{"status", "advance"},
          {"session_id", s.session_id},
          {"section_index", s.current_section},
          {"next_section", next != nullptr ? json(next->index) : json(nullptr)}};
}

json SessionService::Answer(const std::string &session_id, const std::string &question_id,
                            const std::string &user_answer, const std::string &idempotency_key) {
  Require(!question_id.empty(), "question_id is required");
  ParseQuestionId(question_id);
  auto entry = Find(session_id);
  std::lock_guard<std::mutex> lock(entry->mu);
  const ReadingSession &s = entry->state;
  if (!idempotency_key.empty()) {
    auto it = s.idempotent_responses.find(idempotency_key);
    if (it != s.idempotent_responses.end()) {
      if (it->second.at("question_id") != question_id) {
        throw Error(ErrorCode::kConflict,
                    "idempotency key '" + idempotency_key + "' was used for another question");
      }
      return it->second;
    }
  }
  if (!s.pending || *s.pending != question_id) {
    if (s.WasAnswered(question_id)) {
      throw Error(ErrorCode::kConflict, "question '" + question_id + "' was already answered");
    }
    throw Error(s.WasServed(question_id) ? ErrorCode::kConflict : ErrorCode::kNotFound,
                "question '" + question_id + "' is not pending in session " + session_id);
  }
  const RankedQAPair &pair = Resolve(question_id);
  const pipeline::Verdict verdict =
      pipeline::JudgeAnswer(user_answer, pair.answer, options_.judge_threshold);
  bool is_followup = false;
  for (const auto &e : s.served) {
    if (e.question_id == question_id) is_followup = e.is_followup;
  }
  json response = {{"session_id", s.session_id},
                   {"question_id", question_id},
                   {"verdict", pipeline::ToJson(verdict)},
                   {"gold_answer", pair.answer},
                   {"answered", static_cast<int>(s.asked.size()) + 1}};
  Append(entry.get(), {{"type", "answered"},
                       {"question_id", question_id},
                       {"question", pair.question},
                       {"gold_answer", pair.answer},
                       {"user_answer", user_answer},
                       {"verdict", pipeline::ToJson(verdict)},
                       {"is_followup", is_followup},
                       {"idempotency_key", idempotency_key},
                       {"response", response}});
  return response;
}

json SessionService::Advance(const std::string &session_id) {
  auto entry = Find(session_id);
  std::lock_guard<std::mutex> lock(entry->mu);
  const ReadingSession &s = entry->state;
  const corpus::Story &story = bank_->corpus().GetStory(s.story_id);
  for (const auto &sec : story.sections) {
    if (sec.index > s.current_section) {
      Append(entry.get(), {{"type", "advanced"}, {"section_index", sec.index}});
      return {{"session_id", s.session_id}, {"section_index", sec.index}, {"finished", false}};
    }
  }
  throw Error(ErrorCode::kConflict, "session " + session_id + " is already at the last section");
}

json SessionService::Progress(const std::string &session_id) {
  auto entry = Find(session_id);
  std::lock_guard<std::mutex> lock(entry->mu);
  const ReadingSession &s = entry->state;
  std::map<int, std::pair<int, int>> per_section;
  json transcript = json::array();
  int correct = 0;
  for (const auto &a : s.asked) {
    const ParsedQuestionId q = ParseQuestionId(a.question_id);
    auto &[answered, right] = per_section[q.section_index];
    ++answered;
    if (a.verdict.correct) {
      ++right;
      ++correct;
    }
    transcript.push_back({{"question_id", a.question_id},
                          {"section_index", q.section_index},
                          {"question", a.question},
                          {"user_answer", a.user_answer},
                          {"gold_answer", a.gold_answer},
                          {"correct", a.verdict.correct},
                          {"similarity", a.verdict.similarity},
                          {"is_followup", a.is_followup}});
  }
  json sections = json::array();
  for (const auto &[index, counts] : per_section) {
    sections.push_back(
        {{"section_index", index}, {"answered", counts.first}, {"correct", counts.second}});
  }
  return {{"session_id", s.session_id},
          {"story_id", s.story_id},
          {"current_section", s.current_section},
          {"answered", static_cast<int>(s.asked.size())},
          {"correct", correct},
          {"sections", sections},
          {"transcript", transcript}};
}

}  // namespace fablegen::session
