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

#include "fablegen/lexicon.h"

#include "embedded_data.h"
#include "fablegen/text.h"

namespace fablegen::lingann {

namespace {

std::unordered_set<std::string> ReadWordList(std::string_view data) {
  std::unordered_set<std::string> out;
  for (const auto &line : Split(data, '\n')) {
    std::string word = Trim(line);
    if (word.empty() || word[0] == '#') continue;
    out.insert(ToLower(word));
  }
  return out;
}

uint32_t ParseFlags(std::string_view field) {
  uint32_t flags = 0;
  for (const auto &f : Split(field, ',')) {
    std::string name = Trim(f);
    if (name == "past") flags |= kFlagPast;
    else if (name == "pres") flags |= kFlagPres;
    else if (name == "part") flags |= kFlagPart;
    else if (name == "modal") flags |= kFlagModal;
    else if (name == "aux") flags |= kFlagAux;
    else if (name == "poss") flags |= kFlagPoss;
    else if (name == "coord") flags |= kFlagCoord;
    else if (name == "sub") flags |= kFlagSub;
    else if (name == "plural") flags |= kFlagPlural;
  }
  return flags;
}

}  // namespace

Lexicon::Lexicon() {
  for (const auto &line : Split(data::kLexiconTsv, '\n')) {
    if (line.empty() || line[0] == '#') continue;
    auto fields = Split(line, '\t');
    if (fields.size() < 3) continue;
    LexEntry entry;
    entry.pos = ParsePos(fields[1]);
    entry.lemma = fields[2];
    if (fields.size() > 3) entry.flags = ParseFlags(fields[3]);
    // First definition wins.
    entries_.emplace(fields[0], std::move(entry));
  }
  emotions_ = ReadWordList(data::kEmotionsTxt);
  places_ = ReadWordList(data::kPlacesTxt);
  times_ = ReadWordList(data::kTimesTxt);
}

const Lexicon &Lexicon::Get() {
  static const Lexicon *lexicon = new Lexicon();
  return *lexicon;
}

const LexEntry *Lexicon::Find(std::string_view lower) const {
  auto it = entries_.find(std::string(lower));
  return it == entries_.end() ? nullptr : &it->second;
}

bool Lexicon::IsEmotion(std::string_view lower) const {
  return emotions_.count(std::string(lower)) > 0;
}

bool Lexicon::IsPlaceWord(std::string_view lower) const {
  return places_.count(std::string(lower)) > 0;
}

bool Lexicon::IsTimeWord(std::string_view lower) const {
  return times_.count(std::string(lower)) > 0;
}

Tense GuessTense(const Token &token) {
  std::string lower = ToLower(token.text);
  if (const LexEntry *e = Lexicon::Get().Find(lower);
      e != nullptr && e->pos == Pos::kVerb) {
    if (e->flags & kFlagPast) return Tense::kPast;
    if (e->flags & kFlagPart) return Tense::kNonFinite;
    if (lower.ends_with("ing")) return Tense::kNonFinite;
    return Tense::kPresent;
  }
  if (lower.ends_with("ed")) return Tense::kPast;
  if (lower.ends_with("ing")) return Tense::kNonFinite;
  return Tense::kPresent;
}

bool IsAuxiliary(const Token &token) {
  const LexEntry *e = Lexicon::Get().Find(ToLower(token.text));
  return e != nullptr && e->pos == Pos::kVerb &&
         (e->flags & (kFlagAux | kFlagModal)) != 0;
}

bool IsModal(const Token &token) {
  const LexEntry *e = Lexicon::Get().Find(ToLower(token.text));
  return e != nullptr && (e->flags & kFlagModal) != 0;
}

}  // namespace fablegen::lingann
