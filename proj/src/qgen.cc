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

#include "fablegen/qgen.h"

#include <algorithm>
#include <set>

#include "fablegen/error.h"
#include "fablegen/text.h"
#include "fablegen/tokenize.h"

namespace fablegen::qgen {

using answer_extract::CandidateAnswer;
using answer_extract::EventParts;
using answer_extract::Source;
using lingann::EntityLabel;

void ValidateConfig(const GenerationConfig &config) {
  Require(config.max_output_tokens >= 1, "max_output_tokens must be positive");
  Require(config.beam_k >= 1, "beam k must be at least 1");
}

std::string_view TrainSourceName(TrainSource source) {
  switch (source) {
    case TrainSource::kFairytaleOnly: return "fairytale_only";
    case TrainSource::kExternalOnly: return "external_only";
    case TrainSource::kBoth: return "both";
  }
  return "fairytale_only";
}

TrainSource ParseTrainSource(std::string_view name) {
  for (auto s : {TrainSource::kFairytaleOnly, TrainSource::kExternalOnly, TrainSource::kBoth}) {
    if (TrainSourceName(s) == name) return s;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown train source '" + std::string(name) + "'");
}

std::string_view DirectionName(Direction direction) {
  return direction == Direction::kAnswerToQuestion ? "answer_to_question"
                                                   : "question_to_answer";
}

Direction ParseDirection(std::string_view name) {
  if (name == "answer_to_question") return Direction::kAnswerToQuestion;
  if (name == "question_to_answer") return Direction::kQuestionToAnswer;
  throw Error(ErrorCode::kInvalidArgument, "unknown direction '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Templates.

namespace {

std::string LowerFirst(std::string s) {
  if (!s.empty() && s[0] >= 'A' && s[0] <= 'Z') s[0] = static_cast<char>(s[0] - 'A' + 'a');
  return s;
}

// Subject as it appears mid-question.
std::string SubjectForm(const std::string &subject, bool proper) {
  if (ToLower(subject) == "i") return "I";
  return proper ? subject : LowerFirst(subject);
}

bool PluralSubject(const std::string &subject, bool proper) {
  static const std::set<std::string> kPlural = {"they", "we", "you", "i", "these", "those"};
  const std::string lower = ToLower(subject);
  if (kPlural.count(lower) > 0) return true;
  if (proper) return false;
  auto words = SplitWhitespace(lower);
  if (words.empty()) return false;
  const std::string &last = words.back();
  return last.size() > 2 && last.back() == 's' && last[last.size() - 2] != 's' &&
         last[last.size() - 2] != 'u';
}

std::string DoForm(const EventParts &e) {
  if (e.past) return "did";
  return PluralSubject(e.subject, e.subject_proper) ? "do" : "does";
}

std::string WhatDo(const EventParts &e) {
  const std::string s = SubjectForm(e.subject, e.subject_proper);
  if (e.modal) return "What " + ToLower(e.trigger) + " " + s + " do?";
  return "What " + DoForm(e) + " " + s + " do?";
}

std::string WhyDid(const EventParts &e) {
  const std::string s = SubjectForm(e.subject, e.subject_proper);
  const std::string tail = e.tail.empty() ? "" : " " + e.tail;
  const bool invert =
      e.modal || e.trigger_lemma == "be" || (e.auxiliary && e.verb_group_size > 1);
  if (invert) return "Why " + ToLower(e.trigger) + " " + s + tail + "?";
  return "Why " + DoForm(e) + " " + s + " " + ToLower(e.trigger_lemma) + tail + "?";
}

std::string EventQuestion(const CandidateAnswer &c) {
  if (!c.hint.event || c.hint.event->subject.empty()) {
    const bool past = c.hint.event && c.hint.event->past;
    return past ? "What happened?" : "What happens?";
  }
  // Alternate question types by document position.
  return c.rank_hint % 2 == 0 ? WhatDo(*c.hint.event) : WhyDid(*c.hint.event);
}

// "The fox" at the start of a sentence reads "the fox" mid-question.
std::string ChunkForm(const std::string &text) {
  static const std::set<std::string> kFunctionWords = {
      "the", "a", "an", "his", "her", "their", "its", "my", "our", "your",
      "this", "that", "these", "those", "some", "every", "each", "no"};
  const auto words = SplitWhitespace(text);
  if (!words.empty() && kFunctionWords.count(ToLower(words.front())) > 0) return LowerFirst(text);
  return text;
}

std::string NominalQuestion(const CandidateAnswer &c) {
  const std::string x = c.hint.entity_label ? c.text : ChunkForm(c.text);
  const std::string be = c.hint.context_past ? "was" : "is";
  if (c.target_elements.contains(NarrativeElement::kFeeling)) {
    std::string s = c.hint.context_subject.empty()
                        ? "they"
                        : SubjectForm(c.hint.context_subject, c.hint.context_subject_proper);
    return "How did " + s + " feel?";
  }
  if (c.hint.entity_label) {
    switch (*c.hint.entity_label) {
      case EntityLabel::kPerson: return "Who is " + x + "?";
      case EntityLabel::kLocation: return "Where " + be + " " + x + "?";
      case EntityLabel::kTime: return "When " + be + " " + x + "?";
      default: return "What is " + x + "?";
    }
  }
  const bool character = c.target_elements.contains(NarrativeElement::kCharacter);
  const bool setting = c.target_elements.contains(NarrativeElement::kSetting);
  if (character && !setting) return "Who is " + x + "?";
  if (setting && !character) return "Where " + be + " " + x + "?";
  return "What is " + x + "?";
}

std::string StripTrailingPunct(std::string_view text) {
  std::u32string u = DecodeUtf8(Trim(text));
  while (!u.empty() && (IsPunct(u.back()) || IsSpace(u.back()))) u.pop_back();
  return EncodeUtf8(u);
}

CandidateAnswer RecoverCandidate(std::string_view section_text, std::string_view answer) {
  lingann::ReferenceBackend backend;
  const std::string key = ToLower(StripTrailingPunct(answer));
  if (!Trim(section_text).empty()) {
    lingann::Annotation a = lingann::Annotate(section_text, backend);
    for (auto &c : answer_extract::MergeCandidates(a, 1, {1 << 20})) {
      if (ToLower(c.text) == key) return c;
    }
  }
  CandidateAnswer c;
  c.text = StripTrailingPunct(answer);
  if (SplitWhitespace(c.text).size() > 4) {
    c.source = Source::kSvoEvent;
    c.target_elements = kEventElements;
    EventParts e;
    e.past = true;
    c.hint.event = e;
  } else {
    c.source = Source::kNounChunk;
    c.target_elements = {NarrativeElement::kCharacter, NarrativeElement::kSetting};
  }
  return c;
}

}  // namespace

std::string TemplateQuestion(const CandidateAnswer &candidate) {
  if (candidate.source == Source::kSvoEvent) return EventQuestion(candidate);
  return NominalQuestion(candidate);
}

std::string TemplateBackend::Question(const QgRequest &request,
                                      const GenerationConfig &) const {
  if (request.candidate) return TemplateQuestion(*request.candidate);
  return TemplateQuestion(RecoverCandidate(request.section_text, request.answer_text));
}

std::string TemplateBackend::Answer(std::string_view section_text, std::string_view question,
                                    const GenerationConfig &) const {
  lingann::ReferenceBackend backend;
  lingann::Annotation a = lingann::Annotate(section_text, backend);
  std::set<std::string> q;
  for (auto &t : eval::TokenizeForRouge(question)) q.insert(std::move(t));

  int best_sentence = 0;
  size_t best_overlap = 0;
  for (size_t s = 0; s < a.sentences.size(); ++s) {
    std::set<std::string> words;
    for (auto &t : eval::TokenizeForRouge(a.SpanText(a.sentences[s]))) words.insert(std::move(t));
    size_t overlap = 0;
    for (const auto &w : words) overlap += q.count(w);
    if (overlap > best_overlap) {
      best_overlap = overlap;
      best_sentence = static_cast<int>(s);
    }
  }
  const lingann::TokenSpan sentence = a.sentences[best_sentence];
  const lingann::NounChunk *longest = nullptr;
  for (const auto &c : a.chunks) {
    if (!sentence.contains(c.span)) continue;
    if (longest == nullptr || c.span.size() > longest->span.size()) longest = &c;
  }
  if (longest != nullptr) return a.SpanText(longest->span);
  return StripTrailingPunct(a.SpanText(sentence));
}

std::vector<std::string> TemplateBackend::QuestionsFromSection(
    std::string_view section_text, const GenerationConfig &) const {
  lingann::ReferenceBackend backend;
  lingann::Annotation a = lingann::Annotate(section_text, backend);
  std::vector<CandidateAnswer> candidates = answer_extract::MergeCandidates(a, 1, {1 << 20});
  std::vector<std::string> out;
  for (const auto &sentence : a.sentences) {
    bool has_word = false;
    for (int i = sentence.start; i < sentence.end; ++i) {
      has_word |= a.tokens[i].pos != lingann::Pos::kPunct;
    }
    if (!has_word) continue;
    const CandidateAnswer *event = nullptr;
    const CandidateAnswer *nominal = nullptr;
    for (const auto &c : candidates) {
      if (!sentence.contains(c.provenance_spans.front().start)) continue;
      if (c.source == Source::kSvoEvent) {
        if (!event && c.hint.event && !c.hint.event->subject.empty()) event = &c;
      } else if (!nominal) {
        nominal = &c;
      }
    }
    if (event) {
      out.push_back(WhatDo(*event->hint.event));
    } else if (nominal) {
      out.push_back(NominalQuestion(*nominal));
    } else {
      out.push_back("What happens next?");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Training pairs.

std::vector<TrainingPair> BuildQgTrainingPairs(const corpus::Corpus &corpus,
                                               corpus::Split split, Direction direction) {
  Require(corpus.HasSplit(split),
          "split '" + std::string(corpus::SplitName(split)) + "' not in corpus");
  std::vector<TrainingPair> out;
  const std::string sep = " " + std::string(kSeparator) + " ";
  for (const corpus::QAPair *p : corpus.PairsIn(split)) {
    const corpus::Story &story = corpus.GetStory(p->story_id);
    std::vector<std::string> texts;
    for (int idx : p->section_indices) texts.push_back(story.FindSection(idx)->text);
    const std::string section = Join(texts, "\n");
    if (direction == Direction::kAnswerToQuestion) {
      out.push_back({p->answer + sep + section, p->question});
    } else {
      out.push_back({p->question + sep + section, p->answer});
    }
  }
  return out;
}

QgTriple RecoverTriple(const TrainingPair &pair, Direction direction) {
  const std::string sep = " " + std::string(kSeparator) + " ";
  size_t at = pair.input.find(sep);
  if (at == std::string::npos) {
    throw Error(ErrorCode::kParse, "training input lacks the separator");
  }
  QgTriple t;
  t.section = pair.input.substr(at + sep.size());
  std::string first = pair.input.substr(0, at);
  if (direction == Direction::kAnswerToQuestion) {
    t.answer = first;
    t.question = pair.target;
  } else {
    t.question = first;
    t.answer = pair.target;
  }
  return t;
}

// ---------------------------------------------------------------------------
// Entry points.

namespace {

std::string CollapseLines(std::string_view raw) {
  return Join(SplitWhitespace(raw), " ");
}

template <typename Fn>
auto GuardBackend(const QgBackend &backend, std::string_view what, Fn &&fn) {
  try {
    return fn();
  } catch (const Error &e) {
    if (e.code() == ErrorCode::kBackendUnavailable ||
        e.code() == ErrorCode::kInvalidArgument) {
      throw;
    }
    throw Error(ErrorCode::kGeneration, std::string(what) + " failed in backend '" +
                                            backend.id() + "': " + e.what());
  } catch (const std::exception &e) {
    throw Error(ErrorCode::kGeneration, std::string(what) + " failed in backend '" +
                                            backend.id() + "': " + e.what());
  }
}

}  // namespace

std::string NormalizeQuestion(std::string_view raw) {
  std::string q = CollapseLines(raw);
  while (!q.empty() && (q.back() == '.' || q.back() == '!' || q.back() == ',' ||
                        q.back() == ';' || q.back() == ':' || q.back() == ' ')) {
    q.pop_back();
  }
  if (q.empty()) throw Error(ErrorCode::kGeneration, "generated question is empty");
  if (q.back() != '?') q += '?';
  return q;
}

std::string GenerateQuestion(const QgRequest &request, const QgBackend &backend,
                             const GenerationConfig &config) {
  Require(!Trim(request.section_text).empty(), "section text must be non-empty");
  Require(!Trim(request.answer_text).empty(), "answer text must be non-empty");
  ValidateConfig(config);
  std::string raw =
      GuardBackend(backend, "question generation", [&] { return backend.Question(request, config); });
  return NormalizeQuestion(raw);
}

std::string GenerateAnswer(std::string_view section_text, std::string_view question,
                           const QgBackend &backend, const GenerationConfig &config) {
  Require(!Trim(section_text).empty(), "section text must be non-empty");
  Require(!Trim(question).empty(), "question must be non-empty");
  ValidateConfig(config);
  std::string raw = GuardBackend(backend, "answer generation", [&] {
    return backend.Answer(section_text, question, config);
  });
  std::string answer = CollapseLines(raw);
  if (answer.empty()) throw Error(ErrorCode::kGeneration, "generated answer is empty");
  return answer;
}

std::vector<std::string> GenerateQuestionsFromSection(std::string_view section_text,
                                                      const QgBackend &backend,
                                                      const GenerationConfig &config) {
  Require(!Trim(section_text).empty(), "section text must be non-empty");
  ValidateConfig(config);
  auto raw = GuardBackend(backend, "question generation", [&] {
    return backend.QuestionsFromSection(section_text, config);
  });
  std::vector<std::string> out;
  out.reserve(raw.size());
  for (const auto &q : raw) out.push_back(NormalizeQuestion(q));
  return out;
}

}  // namespace fablegen::qgen
