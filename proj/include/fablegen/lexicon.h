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

// Frozen word lists shipped under data/ and compiled into the library.

#ifndef FABLEGEN_LEXICON_H_
#define FABLEGEN_LEXICON_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

#include "fablegen/lingann.h"

namespace fablegen::lingann {

enum LexFlag : uint32_t {
  kFlagPast = 1u << 0,
  kFlagPres = 1u << 1,
  kFlagPart = 1u << 2,
  kFlagModal = 1u << 3,
  kFlagAux = 1u << 4,
  kFlagPoss = 1u << 5,
  kFlagCoord = 1u << 6,
  kFlagSub = 1u << 7,
  kFlagPlural = 1u << 8,
};

struct LexEntry {
  Pos pos = Pos::kOther;
  std::string lemma;
  uint32_t flags = 0;
};

class Lexicon {
 public:
  // The process-wide lexicon built from the embedded data files.
  static const Lexicon &Get();

  const LexEntry *Find(std::string_view lower) const;
  bool IsEmotion(std::string_view lower) const;
  bool IsPlaceWord(std::string_view lower) const;
  bool IsTimeWord(std::string_view lower) const;

  size_t size() const { return entries_.size(); }
  size_t emotion_count() const { return emotions_.size(); }

 private:
  Lexicon();

  std::unordered_map<std::string, LexEntry> entries_;
  std::unordered_set<std::string> emotions_;
  std::unordered_set<std::string> places_;
  std::unordered_set<std::string> times_;
};

enum class Tense { kPast, kPresent, kNonFinite };

// Works for tokens from any backend: lexicon flags first, then suffixes.
Tense GuessTense(const Token &token);
// be/have/do forms and modals.
bool IsAuxiliary(const Token &token);
bool IsModal(const Token &token);

}  // namespace fablegen::lingann

#endif  // FABLEGEN_LEXICON_H_
