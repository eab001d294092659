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

// Storybook corpus model: stories split into numbered sections, and QA
// pairs grounded in one or more sections. A Corpus is immutable once
// loaded and may be read from any number of threads.

#ifndef FABLEGEN_CORPUS_H_
#define FABLEGEN_CORPUS_H_

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fablegen/narrative.h"
#include "json.hpp"

namespace fablegen::corpus {

enum class Split { kTrain, kValidation, kTest };

inline constexpr std::array<Split, 3> kAllSplits = {
    Split::kTrain, Split::kValidation, Split::kTest};

std::string_view SplitName(Split split);
// Accepts "train", "validation", "val", "valid", "dev", "test".
Split ParseSplit(std::string_view name);

enum class Origin { kGroundTruth, kGenerated };

struct Section {
  std::string story_id;
  int index = 0;  // 1-based
  std::string text;

  bool operator==(const Section &) const = default;
};

struct Story {
  std::string story_id;
  std::string title;
  Split split = Split::kTrain;
  std::vector<Section> sections;

  const Section *FindSection(int index) const;
  bool operator==(const Story &) const = default;
};

struct QAPair {
  std::string pair_id;
  std::string story_id;
  std::vector<int> section_indices;
  std::string question;
  std::string answer;
  NarrativeElement element = NarrativeElement::kCharacter;
  Origin origin = Origin::kGroundTruth;
  std::optional<std::string> system_tag;

  bool operator==(const QAPair &) const = default;
};

// (story_id, section index); the unit QA pairs are grouped and scored by.
using SectionKey = std::pair<std::string, int>;

class Corpus {
 public:
  Corpus() = default;
  // Validates every invariant and throws kValidation listing all
  // violations. Stories with identical duplicate ids are collapsed.
  Corpus(std::vector<Story> stories, std::vector<QAPair> pairs);

  const std::vector<Story> &stories() const { return stories_; }
  const std::vector<QAPair> &pairs() const { return pairs_; }

  std::vector<const Story *> StoriesIn(Split split) const;
  std::vector<const QAPair *> PairsIn(Split split) const;
  bool HasSplit(Split split) const;

  const Story *FindStory(std::string_view story_id) const;
  const Story &GetStory(std::string_view story_id) const;  // throws kNotFound
  std::vector<const QAPair *> PairsForStory(std::string_view story_id) const;

  // Multi-section pairs are attributed to every section they reference.
  std::map<SectionKey, std::vector<const QAPair *>> PairsBySection(
      Split split) const;

  bool operator==(const Corpus &other) const {
    return stories_ == other.stories_ && pairs_ == other.pairs_;
  }

 private:
  std::vector<Story> stories_;
  std::vector<QAPair> pairs_;
  std::map<std::string, size_t, std::less<>> story_index_;
};

// Returns every invariant violation; empty when the inputs are valid.
std::vector<std::string> Validate(const std::vector<Story> &stories,
                                  const std::vector<QAPair> &pairs);

enum class FormatProfile { kCanonicalJson, kCsvPerBook };
FormatProfile ParseFormatProfile(std::string_view name);

Corpus LoadCorpus(const std::filesystem::path &root, FormatProfile profile);

// Loads one story file of the canonical profile; the split defaults to
// train unless the file carries a "split" field.
std::pair<Story, std::vector<QAPair>> LoadStoryFile(
    const std::filesystem::path &path);

// Writes the canonical profile: splits.json plus stories/<id>.json.
void SaveCanonical(const Corpus &corpus, const std::filesystem::path &root);

nlohmann::json StoryToJson(const Story &story,
                           const std::vector<const QAPair *> &pairs);
nlohmann::json QAPairToJson(const QAPair &pair);
QAPair QAPairFromJson(const nlohmann::json &j, std::string_view story_id);

// ---------------------------------------------------------------------------
// Statistics.

struct Stat {
  double mean = 0;
  double sd = 0;
  double min = 0;
  double max = 0;
};

enum class SdMode { kPopulation, kSample };

Stat Summarize(const std::vector<double> &values, SdMode mode);

struct SplitStats {
  Stat sections_per_story;
  Stat tokens_per_story;
  Stat tokens_per_section;
  Stat questions_per_story;
  Stat questions_per_section;
  Stat tokens_per_question;
  Stat tokens_per_answer;
  int book_count = 0;
  int qa_count = 0;
};

// Token counts use eval::TokenizeForRouge. Population sd by default.
SplitStats ComputeStats(const Corpus &corpus, Split split,
                        SdMode mode = SdMode::kPopulation);

nlohmann::json StatsToJson(const SplitStats &stats);
std::string StatsToTable(const SplitStats &stats);

struct CategoryCount {
  int count = 0;
  double fraction = 0;
};

std::map<NarrativeElement, CategoryCount> CategoryDistribution(
    const Corpus &corpus, Split split);

}  // namespace fablegen::corpus

#endif  // FABLEGEN_CORPUS_H_
