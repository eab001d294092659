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

// Answer-conditioned question generation, the question-first and answer
// passes of the two-step baseline, and a small trainable seq2seq backend.
//
// Backends:
//   template            rule table over candidate answers; pure, unlimited
//   loglinear           untrained log-linear seq2seq (train it with Finetune)
//   loglinear:<dir>     a model saved by SaveModel
// Any other spec fails with kBackendUnavailable.

#ifndef FABLEGEN_QGEN_H_
#define FABLEGEN_QGEN_H_

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fablegen/answer_extract.h"
#include "fablegen/corpus.h"
#include "json.hpp"

namespace fablegen::qgen {

struct QgRequest {
  std::string section_text;
  std::string answer_text;
  // The extracted candidate the answer came from. Template generation
  // re-derives it from the section when absent.
  std::optional<answer_extract::CandidateAnswer> candidate;
};

enum class Decoding { kGreedy, kBeam };

struct GenerationConfig {
  std::string backend_id = "template";
  int max_output_tokens = 32;
  Decoding decoding = Decoding::kGreedy;
  int beam_k = 1;
  uint64_t seed = 0;
};

void ValidateConfig(const GenerationConfig &config);

enum class TrainSource { kFairytaleOnly, kExternalOnly, kBoth };
std::string_view TrainSourceName(TrainSource source);
TrainSource ParseTrainSource(std::string_view name);

struct FinetuneConfig {
  double learning_rate = 5e-6;
  int batch_size = 1;
  int epochs = 3;
  TrainSource train_source = TrainSource::kFairytaleOnly;
  uint64_t seed = 13;
};

class QgBackend {
 public:
  virtual ~QgBackend() = default;
  virtual std::string id() const = 0;
  // Zero means unlimited.
  virtual int max_concurrency() const { return 0; }
  virtual std::string Question(const QgRequest &request,
                               const GenerationConfig &config) const = 0;
  virtual std::string Answer(std::string_view section_text, std::string_view question,
                             const GenerationConfig &config) const = 0;
  // Question-first generation from the section alone, in generation order.
  virtual std::vector<std::string> QuestionsFromSection(
      std::string_view section_text, const GenerationConfig &config) const = 0;
};

// Rule-based backend over the reference annotator.
class TemplateBackend : public QgBackend {
 public:
  std::string id() const override { return "template"; }
  std::string Question(const QgRequest &request,
                       const GenerationConfig &config) const override;
  std::string Answer(std::string_view section_text, std::string_view question,
                     const GenerationConfig &config) const override;
  std::vector<std::string> QuestionsFromSection(
      std::string_view section_text, const GenerationConfig &config) const override;
};

// Template question for a candidate. Total over every source/target
// combination; see docs/templates.md for the table.
std::string TemplateQuestion(const answer_extract::CandidateAnswer &candidate);

// ---------------------------------------------------------------------------
// Training data.

enum class Direction { kAnswerToQuestion, kQuestionToAnswer };
std::string_view DirectionName(Direction direction);
Direction ParseDirection(std::string_view name);

inline constexpr std::string_view kSeparator = "<sep>";

struct TrainingPair {
  std::string input;
  std::string target;
  bool operator==(const TrainingPair &) const = default;
};

// answer_to_question: input "<answer> <sep> <section>", target question.
// question_to_answer swaps answer and question. Multi-section pairs use the
// referenced sections joined by a newline.
std::vector<TrainingPair> BuildQgTrainingPairs(const corpus::Corpus &corpus,
                                               corpus::Split split, Direction direction);

struct QgTriple {
  std::string section;
  std::string question;
  std::string answer;
};

// Inverse of BuildQgTrainingPairs for one pair.
QgTriple RecoverTriple(const TrainingPair &pair, Direction direction);

// ---------------------------------------------------------------------------
// Log-linear seq2seq.

// Next-token model p(y_t | y_<t, source) = softmax(w . f(y_t, context)) over
// the target vocabulary plus source tokens, with hashed features for the
// previous token, source bag of words, output position, position-aligned
// source token and source successors of the previous token.
class LoglinearModel {
 public:
  static constexpr int kHashBits = 20;

  LoglinearModel();

  // Mean per-token negative log likelihood over `pairs`.
  double Loss(const std::vector<TrainingPair> &pairs) const;
  // One pass of minibatch SGD in a seeded shuffled order.
  void TrainEpoch(const std::vector<TrainingPair> &pairs, const FinetuneConfig &config,
                  uint64_t epoch_seed);
  void AddVocabulary(const std::vector<TrainingPair> &pairs);

  std::vector<std::string> Decode(std::string_view input,
                                  const GenerationConfig &config) const;
  std::string Generate(std::string_view input, const GenerationConfig &config) const;

  void Save(const std::filesystem::path &dir) const;
  static LoglinearModel Load(const std::filesystem::path &dir);

  size_t vocabulary_size() const { return vocab_.size(); }

 private:
  struct Context;
  Context MakeContext(std::string_view input) const;
  void Scores(const Context &ctx, const std::vector<std::string> &prefix,
              std::vector<double> *out) const;
  template <typename Fn>
  void ForEachFeature(const Context &ctx, const std::vector<std::string> &prefix,
                      int candidate, Fn &&fn) const;
  std::vector<std::string> Candidates(const Context &ctx) const;

  std::vector<double> weights_;
  std::vector<std::string> vocab_;
};

// Model tokens: lowercase words and single punctuation marks.
std::vector<std::string> ModelTokens(std::string_view text);
std::string Detokenize(const std::vector<std::string> &tokens);

class LoglinearBackend : public QgBackend {
 public:
  LoglinearBackend(std::shared_ptr<const LoglinearModel> question_model,
                   std::shared_ptr<const LoglinearModel> answer_model, std::string id);
  std::string id() const override { return id_; }
  std::string Question(const QgRequest &request,
                       const GenerationConfig &config) const override;
  std::string Answer(std::string_view section_text, std::string_view question,
                     const GenerationConfig &config) const override;
  std::vector<std::string> QuestionsFromSection(
      std::string_view section_text, const GenerationConfig &config) const override;

 private:
  std::shared_ptr<const LoglinearModel> question_model_;
  std::shared_ptr<const LoglinearModel> answer_model_;
  std::string id_;
};

struct FinetuneResult {
  std::shared_ptr<LoglinearModel> model;
  double initial_loss = 0;
  std::vector<double> loss_curve;  // one entry per epoch, after the epoch
  int examples = 0;
  double seconds = 0;
};

// Trains a fresh model for `backend_spec`. Only "loglinear" is trainable
// here; anything else fails with kBackendUnavailable.
FinetuneResult Finetune(std::string_view backend_spec, const std::vector<TrainingPair> &pairs,
                        const FinetuneConfig &config);

nlohmann::json MetricsJson(const FinetuneResult &result, const FinetuneConfig &config,
                           std::string_view backend_spec, Direction direction);

// Registry. A loglinear directory holds question/ and answer/ model
// subdirectories; either may be missing.
std::unique_ptr<QgBackend> MakeQgBackend(std::string_view backend_id);

// ---------------------------------------------------------------------------
// Entry points with post-processing and error wrapping.

// Single line, trimmed, ending in "?". Throws kGeneration on empty output.
std::string GenerateQuestion(const QgRequest &request, const QgBackend &backend,
                             const GenerationConfig &config);
std::string GenerateAnswer(std::string_view section_text, std::string_view question,
                           const QgBackend &backend, const GenerationConfig &config);
std::vector<std::string> GenerateQuestionsFromSection(std::string_view section_text,
                                                      const QgBackend &backend,
                                                      const GenerationConfig &config);

std::string NormalizeQuestion(std::string_view raw);

}  // namespace fablegen::qgen

#endif  // FABLEGEN_QGEN_H_
