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

// Linguistic annotation contract consumed by answer extraction: tokens with
// coarse part of speech, sentences, entity mentions, noun chunks and
// predicate frames (trigger verb plus subject/object/modifier arguments).
//
// Two backends implement it. ReferenceBackend is a frozen rule-based
// annotator that is pure and bit-identical across runs and platforms; every
// heuristic and pipeline test runs on it. CommandBackend delegates to an
// external process (e.g. a spaCy-based script) speaking the Annotation JSON
// format on stdout.

#ifndef FABLEGEN_LINGANN_H_
#define FABLEGEN_LINGANN_H_

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace fablegen::lingann {

enum class Pos {
  kNoun,
  kPropn,
  kVerb,
  kAdj,
  kAdv,
  kPron,
  kDet,
  kAdp,
  kNum,
  kPunct,
  kOther,
};

std::string_view PosName(Pos pos);
Pos ParsePos(std::string_view name);

// Character offsets count Unicode scalar values, not bytes.
struct Token {
  std::string text;
  std::string lemma;
  Pos pos = Pos::kOther;
  int char_start = 0;
  int char_end = 0;

  bool operator==(const Token &) const = default;
};

// Half-open token range [start, end).
struct TokenSpan {
  int start = 0;
  int end = 0;

  int size() const { return end - start; }
  bool empty() const { return end <= start; }
  bool contains(int token) const { return token >= start && token < end; }
  bool contains(const TokenSpan &o) const {
    return o.start >= start && o.end <= end;
  }
  bool overlaps(const TokenSpan &o) const {
    return start < o.end && o.start < end;
  }
  bool operator==(const TokenSpan &) const = default;
  auto operator<=>(const TokenSpan &) const = default;
};

enum class EntityLabel { kPerson, kLocation, kTime, kOrg, kMisc };

std::string_view EntityLabelName(EntityLabel label);
EntityLabel ParseEntityLabel(std::string_view name);

struct EntityMention {
  TokenSpan span;
  EntityLabel label = EntityLabel::kPerson;

  bool operator==(const EntityMention &) const = default;
};

struct NounChunk {
  TokenSpan span;
  int head = 0;

  bool operator==(const NounChunk &) const = default;
};

enum class Role { kSubject, kObject, kModifier };

std::string_view RoleName(Role role);

struct Argument {
  Role role = Role::kSubject;
  TokenSpan span;

  bool operator==(const Argument &) const = default;
};

struct PredicateFrame {
  int trigger = 0;
  // Extent of the verb group the trigger starts ("could not give",
  // "wanted to get"). Always begins at the trigger.
  TokenSpan verb_group;
  std::vector<Argument> arguments;

  const Argument *Find(Role role) const;
  bool operator==(const PredicateFrame &) const = default;
};

struct Annotation {
  std::string text;
  std::vector<Token> tokens;
  std::vector<TokenSpan> sentences;
  std::vector<EntityMention> entities;
  std::vector<NounChunk> chunks;
  std::vector<PredicateFrame> frames;

  // Surface text for a token span, inner whitespace preserved.
  std::string SpanText(const TokenSpan &span) const;
  // Index of the sentence containing `token`, or -1.
  int SentenceOf(int token) const;

  bool operator==(const Annotation &) const = default;
};

// Lists every invariant violation; empty for a valid annotation.
std::vector<std::string> ValidateAnnotation(const Annotation &annotation);

nlohmann::json ToJson(const Annotation &annotation);
Annotation AnnotationFromJson(const nlohmann::json &j);

class AnnotationBackend {
 public:
  virtual ~AnnotationBackend() = default;
  virtual std::string id() const = 0;
  // Zero means unlimited concurrent Annotate calls.
  virtual int max_concurrency() const { return 0; }
  virtual Annotation Annotate(std::string_view text) const = 0;
};

class ReferenceBackend : public AnnotationBackend {
 public:
  ReferenceBackend();
  std::string id() const override { return "reference"; }
  Annotation Annotate(std::string_view text) const override;

 private:
  struct Tables;
  std::shared_ptr<const Tables> tables_;
};

// Runs `command` with the text on stdin and parses an Annotation JSON
// document from stdout. Calls are serialized (max_concurrency 1).
class CommandBackend : public AnnotationBackend {
 public:
  explicit CommandBackend(std::string command) : command_(std::move(command)) {}
  std::string id() const override { return "command:" + command_; }
  int max_concurrency() const override { return 1; }
  Annotation Annotate(std::string_view text) const override;

 private:
  std::string command_;
};

// Checks the precondition, runs the backend, and validates the result.
// Backend failures and invalid output surface as kAnnotation errors naming
// the backend.
Annotation Annotate(std::string_view text, const AnnotationBackend &backend);

// "reference" or "command:<shell command>".
std::unique_ptr<AnnotationBackend> MakeBackend(std::string_view backend_id);

}  // namespace fablegen::lingann

#endif  // FABLEGEN_LINGANN_H_
