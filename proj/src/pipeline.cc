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

#include "fablegen/pipeline.h"

#include <algorithm>
#include <atomic>
#include <climits>
#include <cstdio>
#include <mutex>
#include <thread>

#include "fablegen/csv.h"
#include "fablegen/eval.h"
#include "fablegen/shuffle.h"
#include "fablegen/text.h"

namespace fablegen::pipeline {

using nlohmann::json;
using ranker::RankedQAPair;

std::string_view ModeName(Mode mode) {
  return mode == Mode::kThreeStage ? "three_stage" : "two_step";
}

Mode ParseMode(std::string_view name) {
  if (name == "three_stage") return Mode::kThreeStage;
  if (name == "two_step" || name == "two_step_baseline") return Mode::kTwoStep;
  throw Error(ErrorCode::kInvalidArgument, "unknown pipeline mode '" + std::string(name) + "'");
}

void ValidateConfig(const PipelineConfig &config) {
  std::vector<std::string> problems;
  if (config.top_n < 1) problems.push_back("top_n must be at least 1");
  if (config.limits.max_candidates_per_section < 1) {
    problems.push_back("max_candidates_per_section must be at least 1");
  }
  if (config.workers < 1) problems.push_back("workers must be at least 1");
  if (config.layout.separator.empty()) problems.push_back("ranker separator must be non-empty");
  if (config.generation.max_output_tokens < 1) {
    problems.push_back("max_output_tokens must be at least 1");
  }
  if (config.generation.beam_k < 1) problems.push_back("beam k must be at least 1");
  if (!problems.empty()) {
    throw Error(ErrorCode::kValidation, "invalid pipeline config: " + problems.front(), problems);
  }
}

Backends LoadBackends(const PipelineConfig &config) {
  Backends b;
  b.annotator = lingann::MakeBackend(config.annotation_backend);
  b.qg = qgen::MakeQgBackend(config.qg_backend);
  if (config.mode == Mode::kThreeStage) b.ranker = ranker::MakeRanker(config.ranker);
  return b;
}

Pipeline::Pipeline(PipelineConfig config) : config_(std::move(config)) {
  ValidateConfig(config_);
  backends_ = LoadBackends(config_);
}

Pipeline::Pipeline(PipelineConfig config, Backends backends)
    : config_(std::move(config)), backends_(std::move(backends)) {
  ValidateConfig(config_);
}

namespace {

std::string Tag(const PipelineConfig &config) {
  return config.system_tag.empty() ? std::string(ModeName(config.mode)) : config.system_tag;
}

}  // namespace

std::vector<RankedQAPair> Pipeline::ThreeStage(const corpus::Story &story,
                                               const corpus::Section &section) const {
  const auto candidates =
      answer_extract::ExtractCandidateAnswers(section, *backends_.annotator, config_.limits);
  std::vector<RankedQAPair> out;
  out.reserve(candidates.size());
  for (const auto &c : candidates) {
    RankedQAPair p;
    p.story_id = story.story_id;
    p.section_index = section.index;
    p.answer = c.text;
    p.question = qgen::GenerateQuestion({section.text, c.text, c}, *backends_.qg,
                                        config_.generation);
    p.score = ranker::Score(section.text, p.question, p.answer, *backends_.ranker,
                            config_.layout);
    p.rank_hint = c.rank_hint;
    p.system_tag = Tag(config_);
    p.provenance = c;
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<RankedQAPair> Pipeline::TwoStep(const corpus::Story &story,
                                            const corpus::Section &section) const {
  std::vector<std::string> questions =
      qgen::GenerateQuestionsFromSection(section.text, *backends_.qg, config_.generation);
  if (static_cast<int>(questions.size()) > config_.top_n) questions.resize(config_.top_n);
  std::vector<RankedQAPair> out;
  for (size_t i = 0; i < questions.size(); ++i) {
    RankedQAPair p;
    p.story_id = story.story_id;
    p.section_index = section.index;
    p.question = questions[i];
    p.answer = qgen::GenerateAnswer(section.text, p.question, *backends_.qg, config_.generation);
    // Generation order is the only ranking signal.
    p.score = 1.0 / static_cast<double>(i + 1);
    p.rank_hint = static_cast<int>(i);
    p.system_tag = Tag(config_);
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<RankedQAPair> Pipeline::ScoreSection(const corpus::Story &story,
                                                 const corpus::Section &section) const {
  return config_.mode == Mode::kThreeStage ? ThreeStage(story, section)
                                           : TwoStep(story, section);
}

std::vector<RankedQAPair> Pipeline::RunSection(const corpus::Story &story,
                                               const corpus::Section &section) const {
  return ranker::SelectTopN(ScoreSection(story, section), config_.top_n);
}

int Pipeline::EffectiveWorkers() const {
  int w = config_.workers;
  for (int limit : {backends_.annotator ? backends_.annotator->max_concurrency() : 0,
                    backends_.qg ? backends_.qg->max_concurrency() : 0}) {
    if (limit > 0) w = std::min(w, limit);
  }
  return std::max(1, w);
}

QagResult Pipeline::Run(const corpus::Story &story) const {
  const int n = static_cast<int>(story.sections.size());
  std::vector<std::vector<RankedQAPair>> outputs(n);
  std::vector<std::optional<SectionError>> errors(n);
  std::atomic<int> next{0};
  auto work = [&] {
    for (int i = next++; i < n; i = next++) {
      const corpus::Section &section = story.sections[i];
      try {
        outputs[i] = RunSection(story, section);
      } catch (const Error &e) {
        errors[i] = SectionError{section.index, e.code(), e.what()};
      } catch (const std::exception &e) {
        errors[i] = SectionError{section.index, ErrorCode::kInternal, e.what()};
      }
    }
  };
  const int workers = std::min(EffectiveWorkers(), std::max(1, n));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> threads;
    for (int t = 0; t < workers; ++t) threads.emplace_back(work);
    for (auto &t : threads) t.join();
  }
  QagResult result;
  for (int i = 0; i < n; ++i) {
    if (errors[i]) {
      result.errors.push_back(*errors[i]);
    } else {
      result.sections[story.sections[i].index] = std::move(outputs[i]);
    }
  }
  return result;
}

QagResult RunQag(const corpus::Story &story, const PipelineConfig &config) {
  return Pipeline(config).Run(story);
}

QagResult RunTwoStep(const corpus::Story &story, const PipelineConfig &config) {
  Require(config.mode == Mode::kTwoStep, "run_two_step needs mode two_step");
  return Pipeline(config).Run(story);
}

void WriteJsonl(const QagResult &result, std::ostream &out) {
  for (const auto &[index, pairs] : result.sections) ranker::WriteJsonl(pairs, out);
}

json ToJson(const QagResult &result, std::string_view story_id) {
  json sections = json::array();
  for (const auto &[index, pairs] : result.sections) {
    json list = json::array();
    for (const auto &p : pairs) list.push_back(ranker::ToJson(p));
    sections.push_back({{"section_index", index}, {"pairs", list}});
  }
  json errors = json::array();
  for (const auto &e : result.errors) {
    errors.push_back({{"section_index", e.section_index},
                      {"code", ErrorCodeName(e.code)},
                      {"message", e.message}});
  }
  return {{"story_id", story_id}, {"sections", sections}, {"errors", errors}};
}

// ---------------------------------------------------------------------------
// Judging.

std::string_view FeedbackHintName(FeedbackHint hint) {
  switch (hint) {
    case FeedbackHint::kExact: return "exact";
    case FeedbackHint::kPartial: return "partial";
    case FeedbackHint::kMiss: return "miss";
  }
  return "miss";
}

Verdict JudgeAnswer(std::string_view user_answer, std::string_view gold_answer, double threshold) {
  Require(!Trim(gold_answer).empty(), "gold answer must be non-empty");
  Verdict v;
  if (Trim(user_answer).empty()) return v;
  v.similarity = eval::RougeL(eval::TokenizeForRouge(user_answer),
                              eval::TokenizeForRouge(gold_answer))
                     .f1;
  v.correct = v.similarity >= threshold;
  if (v.similarity >= 1.0) {
    v.feedback_hint = FeedbackHint::kExact;
  } else if (v.similarity < kMissBelow) {
    v.feedback_hint = FeedbackHint::kMiss;
  } else {
    v.feedback_hint = FeedbackHint::kPartial;
  }
  return v;
}

json ToJson(const Verdict &v) {
  return {{"correct", v.correct},
          {"similarity", v.similarity},
          {"feedback_hint", FeedbackHintName(v.feedback_hint)}};
}

Verdict VerdictFromJson(const json &j) {
  Verdict v;
  v.correct = j.at("correct").get<bool>();
  v.similarity = j.at("similarity").get<double>();
  const std::string hint = j.at("feedback_hint").get<std::string>();
  v.feedback_hint = hint == "exact"     ? FeedbackHint::kExact
                    : hint == "partial" ? FeedbackHint::kPartial
                                        : FeedbackHint::kMiss;
  return v;
}

// ---------------------------------------------------------------------------
// Rating sheet.

RatingSheet ExportRatingSheet(const corpus::Corpus &corpus,
                              const std::vector<RankedQAPair> &pairs, uint64_t seed) {
  std::vector<const RankedQAPair *> order;
  for (const auto &p : pairs) order.push_back(&p);
  SeededShuffle(&order, seed);
  RatingSheet sheet;
  sheet.sheet_csv = CsvRow({"item_id", "story_id", "section_index", "section_text", "question",
                            "answer", "readability", "question_relevancy", "answer_relevancy"});
  sheet.key_csv = CsvRow({"item_id", "system_tag"});
  char id[32];
  for (size_t i = 0; i < order.size(); ++i) {
    const RankedQAPair &p = *order[i];
    const corpus::Section *section = corpus.GetStory(p.story_id).FindSection(p.section_index);
    if (section == nullptr) {
      throw Error(ErrorCode::kNotFound,
                  "pair references unknown section " + p.story_id + ":" +
                      std::to_string(p.section_index));
    }
    std::snprintf(id, sizeof(id), "item-%04zu", i + 1);
    sheet.sheet_csv += CsvRow({id, p.story_id, std::to_string(p.section_index), section->text,
                               p.question, p.answer, "", "", ""});
    sheet.key_csv += CsvRow({id, p.system_tag});
  }
  return sheet;
}

}  // namespace fablegen::pipeline
