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

// Book-level orchestration. three_stage runs extract -> question per
// candidate -> score -> top N; two_step asks questions from the section
// alone and answers each one, with no ranking.

#ifndef FABLEGEN_PIPELINE_H_
#define FABLEGEN_PIPELINE_H_

#include <map>
#include <memory>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "fablegen/answer_extract.h"
#include "fablegen/corpus.h"
#include "fablegen/error.h"
#include "fablegen/lingann.h"
#include "fablegen/qgen.h"
#include "fablegen/ranker.h"

namespace fablegen::pipeline {

enum class Mode { kThreeStage, kTwoStep };
std::string_view ModeName(Mode mode);
// "three_stage", "two_step" or "two_step_baseline".
Mode ParseMode(std::string_view name);

struct PipelineConfig {
  Mode mode = Mode::kThreeStage;
  int top_n = 3;
  answer_extract::ExtractionLimits limits;
  std::string qg_backend = "template";
  std::string ranker = "fallback";
  std::string annotation_backend = "reference";
  ranker::RankerInputLayout layout;
  qgen::GenerationConfig generation;
  int workers = 1;
  // Defaults to the mode name.
  std::string system_tag;
};

// Throws kValidation naming the bad field.
void ValidateConfig(const PipelineConfig &config);

struct Backends {
  std::shared_ptr<const lingann::AnnotationBackend> annotator;
  std::shared_ptr<const qgen::QgBackend> qg;
  std::shared_ptr<const ranker::Ranker> ranker;
};

Backends LoadBackends(const PipelineConfig &config);

struct SectionError {
  int section_index = 0;
  ErrorCode code = ErrorCode::kInternal;
  std::string message;
};

struct QagResult {
  std::map<int, std::vector<ranker::RankedQAPair>> sections;
  std::vector<SectionError> errors;
};

class Pipeline {
 public:
  explicit Pipeline(PipelineConfig config);
  Pipeline(PipelineConfig config, Backends backends);

  const PipelineConfig &config() const { return config_; }

  // Every scored pair of a section before selection (three_stage), or the
  // answered question list (two_step), in generation order.
  std::vector<ranker::RankedQAPair> ScoreSection(const corpus::Story &story,
                                                 const corpus::Section &section) const;
  // ScoreSection followed by SelectTopN.
  std::vector<ranker::RankedQAPair> RunSection(const corpus::Story &story,
                                               const corpus::Section &section) const;
  // Sections run concurrently; a failing section is recorded in `errors` and
  // the others proceed.
  QagResult Run(const corpus::Story &story) const;

 private:
  std::vector<ranker::RankedQAPair> ThreeStage(const corpus::Story &story,
                                               const corpus::Section &section) const;
  std::vector<ranker::RankedQAPair> TwoStep(const corpus::Story &story,
                                            const corpus::Section &section) const;
  int EffectiveWorkers() const;

  PipelineConfig config_;
  Backends backends_;
};

QagResult RunQag(const corpus::Story &story, const PipelineConfig &config);
QagResult RunTwoStep(const corpus::Story &story, const PipelineConfig &config);

// Sections in index order, pairs in rank order.
void WriteJsonl(const QagResult &result, std::ostream &out);
nlohmann::json ToJson(const QagResult &result, std::string_view story_id);

// ---------------------------------------------------------------------------
// Answer judging.

enum class FeedbackHint { kExact, kPartial, kMiss };
std::string_view FeedbackHintName(FeedbackHint hint);

struct Verdict {
  bool correct = false;
  double similarity = 0;
  FeedbackHint feedback_hint = FeedbackHint::kMiss;
};

inline constexpr double kJudgeThreshold = 0.5;
inline constexpr double kMissBelow = 0.2;

// similarity = Rouge-L F1 of the tokenized answers.
Verdict JudgeAnswer(std::string_view user_answer, std::string_view gold_answer,
                    double threshold = kJudgeThreshold);
nlohmann::json ToJson(const Verdict &verdict);
Verdict VerdictFromJson(const nlohmann::json &j);

// ---------------------------------------------------------------------------
// Human-rating export.

struct RatingSheet {
  std::string sheet_csv;  // blinded: no system column
  std::string key_csv;    // item_id -> system_tag
};

// Shuffled with `seed`; each row leaves readability, question_relevancy and
// answer_relevancy blank for raters.
RatingSheet ExportRatingSheet(const corpus::Corpus &corpus,
                              const std::vector<ranker::RankedQAPair> &pairs, uint64_t seed);

}  // namespace fablegen::pipeline

#endif  // FABLEGEN_PIPELINE_H_
