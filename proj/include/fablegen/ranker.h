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

// Scoring generated QA pairs and picking the top N per section.
//
// The learned ranker is a binary classifier (expert-written = 1,
// generated = 0) over the serialized (section, question, answer) text; its
// positive-class probability is the ranking score. The fallback ranker is a
// fixed formula needing no training:
//
//   score = cos(counts(tokens(question + " " + answer)), counts(tokens(section)))
//
// clamped to [0, 1], with tokens from eval::TokenizeForRouge.

#ifndef FABLEGEN_RANKER_H_
#define FABLEGEN_RANKER_H_

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fablegen/answer_extract.h"
#include "fablegen/corpus.h"
#include "json.hpp"

namespace fablegen::ranker {

struct RankedQAPair {
  std::string story_id;
  int section_index = 1;
  std::string question;
  std::string answer;
  double score = 0;
  int rank_hint = 0;
  // 1-based position after selection; 0 before.
  int rank = 0;
  std::string system_tag;
  std::optional<answer_extract::CandidateAnswer> provenance;

  bool operator==(const RankedQAPair &) const = default;
};

nlohmann::json ToJson(const RankedQAPair &pair);
RankedQAPair RankedPairFromJson(const nlohmann::json &j);
std::vector<RankedQAPair> ReadJsonl(const std::filesystem::path &path);
void WriteJsonl(const std::vector<RankedQAPair> &pairs, std::ostream &out);

struct RankingExample {
  std::string section_text;
  std::string question;
  std::string answer;
  int label = 0;      // 1 = expert-written, 0 = generated
  std::string group;  // "<story>:<section>", used for held-out splits
};

// Positives are all gold pairs, negatives all generated pairs, shuffled with
// `seed`. Every generated pair must come from a section that has gold pairs.
std::vector<RankingExample> BuildRankingDataset(
    const corpus::Corpus &corpus, const std::vector<const corpus::QAPair *> &gold,
    const std::vector<RankedQAPair> &generated, uint64_t seed = 17);

enum class LayoutOrder { kSectionQuestionAnswer, kSectionAnswer };
std::string_view LayoutOrderName(LayoutOrder order);
LayoutOrder ParseLayoutOrder(std::string_view name);

struct RankerInputLayout {
  LayoutOrder order = LayoutOrder::kSectionQuestionAnswer;
  std::string separator = "[SEP]";

  bool operator==(const RankerInputLayout &) const = default;
};

std::string Serialize(const RankerInputLayout &layout, std::string_view section,
                      std::string_view question, std::string_view answer);

class Ranker {
 public:
  virtual ~Ranker() = default;
  virtual std::string id() const = 0;
  virtual const RankerInputLayout &layout() const = 0;
  // In [0, 1]; deterministic.
  virtual double Score(std::string_view section, std::string_view question,
                       std::string_view answer) const = 0;
};

class FallbackRanker : public Ranker {
 public:
  std::string id() const override { return "fallback"; }
  const RankerInputLayout &layout() const override { return layout_; }
  double Score(std::string_view section, std::string_view question,
               std::string_view answer) const override;

 private:
  RankerInputLayout layout_;
};

struct TrainHyperparams {
  int epochs = 20;
  double learning_rate = 0.1;
  double l2 = 1e-4;
  double held_out_fraction = 0.1;
  uint64_t seed = 29;
};

struct ClassifierMetrics {
  double accuracy = 0;
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  int train_examples = 0;
  int held_out_examples = 0;
};

nlohmann::json ToJson(const ClassifierMetrics &metrics);

// Logistic regression over hashed segment-aware unigrams of the serialized
// input.
class LogisticRanker : public Ranker {
 public:
  static constexpr int kHashBits = 18;

  explicit LogisticRanker(RankerInputLayout layout);
  std::string id() const override { return "logistic"; }
  const RankerInputLayout &layout() const override { return layout_; }
  double Score(std::string_view section, std::string_view question,
               std::string_view answer) const override;

  void Save(const std::filesystem::path &dir) const;
  static std::unique_ptr<LogisticRanker> Load(const std::filesystem::path &dir);

 private:
  friend struct Trainer;
  std::vector<uint32_t> Features(std::string_view section, std::string_view question,
                                 std::string_view answer) const;
  RankerInputLayout layout_;
  std::vector<double> weights_;
  double bias_ = 0;
};

struct TrainResult {
  std::unique_ptr<LogisticRanker> ranker;
  ClassifierMetrics metrics;
};

// Holds out a fraction of sections (not examples) for the metrics.
TrainResult TrainRanker(const std::vector<RankingExample> &examples,
                        const RankerInputLayout &layout, const TrainHyperparams &params = {});

// Throws kRanker when `layout` differs from the ranker's training layout.
double Score(std::string_view section, std::string_view question, std::string_view answer,
             const Ranker &ranker, const RankerInputLayout &layout);

// "fallback" or "logistic:<dir>".
std::unique_ptr<Ranker> MakeRanker(std::string_view ranker_id);

// Dedups on (question, answer) keeping the higher score, then lower
// rank_hint; orders by score desc, rank_hint asc, question asc, answer asc;
// keeps n.
std::vector<RankedQAPair> SelectTopN(std::vector<RankedQAPair> candidates, int n);

}  // namespace fablegen::ranker

#endif  // FABLEGEN_RANKER_H_
