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

// Heuristic answer candidates. Entities and noun chunks target the
// character/setting/feeling elements; predicate frames rendered as
// subject-verb-object events target the other four.

#ifndef FABLEGEN_ANSWER_EXTRACT_H_
#define FABLEGEN_ANSWER_EXTRACT_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fablegen/corpus.h"
#include "fablegen/lingann.h"
#include "fablegen/narrative.h"
#include "json.hpp"

namespace fablegen::answer_extract {

enum class Source { kEntity, kNounChunk, kSvoEvent };

std::string_view SourceName(Source source);
Source ParseSource(std::string_view name);

// Pieces of the frame an event candidate came from, kept so question
// templates can reorder them.
struct EventParts {
  std::string subject;        // empty when the frame has none
  bool subject_proper = false;
  std::string trigger;        // surface form of the trigger verb
  std::string trigger_lemma;
  bool past = false;
  bool auxiliary = false;     // be/have/do or a modal
  bool modal = false;
  int verb_group_size = 1;
  std::string tail;           // rest of the verb phrase after the trigger

  bool operator==(const EventParts &) const = default;
};

struct AnswerHint {
  std::optional<lingann::EntityLabel> entity_label;
  std::optional<EventParts> event;
  // Subject of the first frame in the candidate's sentence; used to ask
  // about feelings.
  std::string context_subject;
  bool context_subject_proper = false;
  // Tense of the first verb in the candidate's sentence.
  bool context_past = false;

  bool operator==(const AnswerHint &) const = default;
};

struct CandidateAnswer {
  std::string text;
  int section_index = 1;
  Source source = Source::kNounChunk;
  ElementSet target_elements;
  std::vector<lingann::TokenSpan> provenance_spans;
  int rank_hint = 0;
  AnswerHint hint;

  bool operator==(const CandidateAnswer &) const = default;
};

struct ExtractionLimits {
  int max_candidates_per_section = 32;
};

std::vector<CandidateAnswer> ExtractEntityChunkAnswers(
    const lingann::Annotation &annotation, int section_index = 1);

// Per frame: the full subject+verb+object rendering, plus the bare verb
// phrase when a subject exists.
std::vector<CandidateAnswer> ExtractEventAnswers(
    const lingann::Annotation &annotation, int section_index = 1);

// Union of both extractors on an existing annotation.
std::vector<CandidateAnswer> MergeCandidates(
    const lingann::Annotation &annotation, int section_index,
    const ExtractionLimits &limits);

std::vector<CandidateAnswer> ExtractCandidateAnswers(
    const corpus::Section &section, const lingann::AnnotationBackend &backend,
    const ExtractionLimits &limits = {});

// Text rebuilt from the provenance spans with the gaps used at extraction.
std::string RenderFromProvenance(const lingann::Annotation &annotation,
                                 const CandidateAnswer &candidate);

nlohmann::json ToJson(const CandidateAnswer &candidate);
CandidateAnswer CandidateFromJson(const nlohmann::json &j);
nlohmann::json ToJson(const std::vector<CandidateAnswer> &candidates);

}  // namespace fablegen::answer_extract

#endif  // FABLEGEN_ANSWER_EXTRACT_H_
