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

#include "fablegen/answer_extract.h"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "fablegen/error.h"
#include "fablegen/lexicon.h"
#include "fablegen/text.h"

namespace fablegen::answer_extract {

using lingann::Annotation;
using lingann::EntityLabel;
using lingann::Pos;
using lingann::Role;
using lingann::TokenSpan;
using nlohmann::json;

std::string_view SourceName(Source source) {
  switch (source) {
    case Source::kEntity: return "entity";
    case Source::kNounChunk: return "noun_chunk";
    case Source::kSvoEvent: return "svo_event";
  }
  return "noun_chunk";
}

Source ParseSource(std::string_view name) {
  for (auto s : {Source::kEntity, Source::kNounChunk, Source::kSvoEvent}) {
    if (SourceName(s) == name) return s;
  }
  throw Error(ErrorCode::kParse, "unknown candidate source '" + std::string(name) + "'");
}

namespace {

// Text between the end of token `a` and the start of token `b`.
std::string Gap(const Annotation &a, const std::u32string &chars, int left, int right) {
  int b = a.tokens[left].char_end;
  int e = a.tokens[right].char_start;
  return EncodeUtf8(std::u32string_view(chars).substr(b, e - b));
}

std::string SpanText(const Annotation &a, const std::u32string &chars,
                     const TokenSpan &span) {
  int b = a.tokens[span.start].char_start;
  int e = a.tokens[span.end - 1].char_end;
  return EncodeUtf8(std::u32string_view(chars).substr(b, e - b));
}

// Spans joined by their original gap when adjacent, otherwise one space.
std::string Render(const Annotation &a, const std::u32string &chars,
                   const std::vector<TokenSpan> &spans) {
  std::string out;
  for (size_t i = 0; i < spans.size(); ++i) {
    if (i > 0) {
      if (spans[i - 1].end == spans[i].start) {
        out += Gap(a, chars, spans[i - 1].end - 1, spans[i].start);
      } else {
        out += ' ';
      }
    }
    out += SpanText(a, chars, spans[i]);
  }
  return out;
}

bool IsProper(const Annotation &a, const TokenSpan &span) {
  return a.tokens[span.start].pos == Pos::kPropn;
}

// Subject of the first frame inside `sentence`, if any.
const lingann::Argument *FirstSubject(const Annotation &a, const TokenSpan &sentence) {
  for (const auto &f : a.frames) {
    if (!sentence.contains(f.trigger)) continue;
    if (const auto *s = f.Find(Role::kSubject)) return s;
  }
  return nullptr;
}

void AttachContext(const Annotation &a, const std::u32string &chars,
                   CandidateAnswer *c) {
  int sent = a.SentenceOf(c->provenance_spans.front().start);
  if (sent < 0) return;
  for (int i = a.sentences[sent].start; i < a.sentences[sent].end; ++i) {
    if (a.tokens[i].pos == Pos::kVerb) {
      c->hint.context_past = lingann::GuessTense(a.tokens[i]) == lingann::Tense::kPast;
      break;
    }
  }
  if (const auto *s = FirstSubject(a, a.sentences[sent])) {
    if (s->span.overlaps(c->provenance_spans.front())) return;
    c->hint.context_subject = SpanText(a, chars, s->span);
    c->hint.context_subject_proper = IsProper(a, s->span);
  }
}

std::string DedupKey(const std::string &text) { return ToLower(text); }

}  // namespace

std::vector<CandidateAnswer> ExtractEntityChunkAnswers(const Annotation &a,
                                                       int section_index) {
  const std::u32string chars = DecodeUtf8(a.text);
  const auto &lex = lingann::Lexicon::Get();
  std::vector<CandidateAnswer> raw;
  for (const auto &e : a.entities) {
    CandidateAnswer c;
    c.text = SpanText(a, chars, e.span);
    c.section_index = section_index;
    c.source = Source::kEntity;
    c.provenance_spans = {e.span};
    c.rank_hint = e.span.start;
    c.hint.entity_label = e.label;
    AttachContext(a, chars, &c);
    switch (e.label) {
      case EntityLabel::kPerson:
        c.target_elements = {NarrativeElement::kCharacter};
        break;
      case EntityLabel::kLocation:
      case EntityLabel::kTime:
        c.target_elements = {NarrativeElement::kSetting};
        break;
      default:
        c.target_elements = {NarrativeElement::kCharacter, NarrativeElement::kSetting};
    }
    raw.push_back(std::move(c));
  }
  for (const auto &ch : a.chunks) {
    CandidateAnswer c;
    c.text = SpanText(a, chars, ch.span);
    c.section_index = section_index;
    c.source = Source::kNounChunk;
    c.provenance_spans = {ch.span};
    c.rank_hint = ch.span.start;
    const auto &head = a.tokens[ch.head];
    if (lex.IsEmotion(ToLower(head.text)) || lex.IsEmotion(ToLower(head.lemma))) {
      c.target_elements = {NarrativeElement::kFeeling};
    } else {
      c.target_elements = {NarrativeElement::kCharacter, NarrativeElement::kSetting};
    }
    AttachContext(a, chars, &c);
    raw.push_back(std::move(c));
  }
  // Document order; an entity wins over a chunk starting at the same token.
  std::stable_sort(raw.begin(), raw.end(), [](const auto &x, const auto &y) {
    return std::make_tuple(x.rank_hint, x.source) < std::make_tuple(y.rank_hint, y.source);
  });
  std::vector<CandidateAnswer> out;
  std::set<std::string> seen;
  for (auto &c : raw) {
    if (seen.insert(DedupKey(c.text)).second) out.push_back(std::move(c));
  }
  return out;
}

std::vector<CandidateAnswer> ExtractEventAnswers(const Annotation &a, int section_index) {
  const std::u32string chars = DecodeUtf8(a.text);
  std::vector<CandidateAnswer> out;
  std::set<std::string> seen;
  auto emit = [&](CandidateAnswer c) {
    if (c.text.empty()) return;
    if (seen.insert(DedupKey(c.text)).second) out.push_back(std::move(c));
  };
  for (const auto &f : a.frames) {
    const lingann::Argument *subject = f.Find(Role::kSubject);
    int end = f.verb_group.end;
    for (const auto &arg : f.arguments) {
      if (arg.role != Role::kSubject && arg.span.start >= f.trigger) {
        end = std::max(end, arg.span.end);
      }
    }
    // The verb phrase never ends on punctuation by construction, but a
    // backend may hand us spans that do.
    while (end > f.trigger + 1 && a.tokens[end - 1].pos == Pos::kPunct) --end;
    const TokenSpan vp{f.trigger, end};

    const auto &trigger = a.tokens[f.trigger];
    EventParts parts;
    parts.trigger = trigger.text;
    parts.trigger_lemma = trigger.lemma.empty() ? ToLower(trigger.text) : trigger.lemma;
    parts.past = lingann::GuessTense(trigger) == lingann::Tense::kPast;
    parts.auxiliary = lingann::IsAuxiliary(trigger);
    parts.modal = lingann::IsModal(trigger);
    parts.verb_group_size = f.verb_group.size();
    if (vp.size() > 1) parts.tail = SpanText(a, chars, {f.trigger + 1, vp.end});
    if (subject) {
      parts.subject = SpanText(a, chars, subject->span);
      parts.subject_proper = IsProper(a, subject->span);
    }

    CandidateAnswer full;
    full.section_index = section_index;
    full.source = Source::kSvoEvent;
    full.target_elements = kEventElements;
    full.hint.event = parts;
    if (subject && subject->span.end <= vp.start) {
      full.provenance_spans = {subject->span, vp};
    } else {
      full.provenance_spans = {vp};
    }
    full.text = Render(a, chars, full.provenance_spans);
    full.rank_hint = full.provenance_spans.front().start;
    const std::string full_text = full.text;
    emit(std::move(full));

    if (subject) {
      CandidateAnswer verb_phrase;
      verb_phrase.section_index = section_index;
      verb_phrase.source = Source::kSvoEvent;
      verb_phrase.target_elements = kEventElements;
      verb_phrase.hint.event = parts;
      verb_phrase.provenance_spans = {vp};
      verb_phrase.text = Render(a, chars, verb_phrase.provenance_spans);
      verb_phrase.rank_hint = vp.start;
      if (verb_phrase.text != full_text) emit(std::move(verb_phrase));
    }
  }
  return out;
}

std::vector<CandidateAnswer> MergeCandidates(const Annotation &a, int section_index,
                                             const ExtractionLimits &limits) {
  Require(limits.max_candidates_per_section >= 1,
          "max_candidates_per_section must be positive");
  std::vector<CandidateAnswer> events = ExtractEventAnswers(a, section_index);
  std::set<std::string> event_keys;
  for (const auto &e : events) event_keys.insert(DedupKey(e.text));
  std::vector<CandidateAnswer> all;
  for (auto &c : ExtractEntityChunkAnswers(a, section_index)) {
    if (event_keys.count(DedupKey(c.text)) == 0) all.push_back(std::move(c));
  }
  for (auto &e : events) all.push_back(std::move(e));
  std::sort(all.begin(), all.end(), [](const auto &x, const auto &y) {
    return std::tie(x.rank_hint, x.source, x.text) < std::tie(y.rank_hint, y.source, y.text);
  });
  if (static_cast<int>(all.size()) > limits.max_candidates_per_section) {
    all.resize(limits.max_candidates_per_section);
  }
  return all;
}

std::vector<CandidateAnswer> ExtractCandidateAnswers(
    const corpus::Section &section, const lingann::AnnotationBackend &backend,
    const ExtractionLimits &limits) {
  Require(!Trim(section.text).empty(), "section text must be non-empty");
  Annotation a = lingann::Annotate(section.text, backend);
  return MergeCandidates(a, section.index, limits);
}

std::string RenderFromProvenance(const Annotation &a, const CandidateAnswer &c) {
  return Render(a, DecodeUtf8(a.text), c.provenance_spans);
}

// ---------------------------------------------------------------------------
// JSON.

json ToJson(const CandidateAnswer &c) {
  json targets = json::array();
  for (auto e : kAllNarrativeElements) {
    if (c.target_elements.contains(e)) targets.push_back(ElementName(e));
  }
  json spans = json::array();
  for (const auto &s : c.provenance_spans) spans.push_back({s.start, s.end});
  json j = {{"text", c.text},
            {"section_index", c.section_index},
            {"source", SourceName(c.source)},
            {"target_elements", targets},
            {"provenance_spans", spans},
            {"rank_hint", c.rank_hint}};
  json hint = json::object();
  if (c.hint.entity_label) hint["entity_label"] = EntityLabelName(*c.hint.entity_label);
  if (c.hint.event) {
    const auto &e = *c.hint.event;
    hint["event"] = {{"subject", e.subject},     {"subject_proper", e.subject_proper},
                     {"trigger", e.trigger},     {"trigger_lemma", e.trigger_lemma},
                     {"past", e.past},           {"auxiliary", e.auxiliary},
                     {"modal", e.modal},         {"verb_group_size", e.verb_group_size},
                     {"tail", e.tail}};
  }
  if (!c.hint.context_subject.empty()) {
    hint["context_subject"] = c.hint.context_subject;
    hint["context_subject_proper"] = c.hint.context_subject_proper;
  }
  if (c.source != Source::kSvoEvent) hint["context_past"] = c.hint.context_past;
  if (!hint.empty()) j["hint"] = hint;
  return j;
}

CandidateAnswer CandidateFromJson(const json &j) {
  CandidateAnswer c;
  try {
    c.text = j.at("text").get<std::string>();
    c.section_index = j.value("section_index", 1);
    c.source = ParseSource(j.at("source").get<std::string>());
    for (const auto &t : j.at("target_elements")) {
      c.target_elements.insert(ParseElement(t.get<std::string>()));
    }
    for (const auto &s : j.value("provenance_spans", json::array())) {
      c.provenance_spans.push_back({s.at(0).get<int>(), s.at(1).get<int>()});
    }
    c.rank_hint = j.value("rank_hint", 0);
    if (j.contains("hint")) {
      const json &h = j["hint"];
      if (h.contains("entity_label")) {
        c.hint.entity_label = lingann::ParseEntityLabel(h["entity_label"].get<std::string>());
      }
      if (h.contains("event")) {
        const json &e = h["event"];
        EventParts p;
        p.subject = e.value("subject", "");
        p.subject_proper = e.value("subject_proper", false);
        p.trigger = e.value("trigger", "");
        p.trigger_lemma = e.value("trigger_lemma", "");
        p.past = e.value("past", false);
        p.auxiliary = e.value("auxiliary", false);
        p.modal = e.value("modal", false);
        p.verb_group_size = e.value("verb_group_size", 1);
        p.tail = e.value("tail", "");
        c.hint.event = p;
      }
      c.hint.context_subject = h.value("context_subject", "");
      c.hint.context_subject_proper = h.value("context_subject_proper", false);
      c.hint.context_past = h.value("context_past", false);
    }
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kParse, std::string("bad candidate json: ") + e.what());
  }
  return c;
}

json ToJson(const std::vector<CandidateAnswer> &candidates) {
  json out = json::array();
  for (const auto &c : candidates) out.push_back(ToJson(c));
  return out;
}

}  // namespace fablegen::answer_extract
