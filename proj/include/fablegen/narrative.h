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

#ifndef FABLEGEN_NARRATIVE_H_
#define FABLEGEN_NARRATIVE_H_

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace fablegen {

// The seven narrative-comprehension categories a QA pair can assess.
enum class NarrativeElement : uint8_t {
  kCharacter,
  kSetting,
  kFeeling,
  kAction,
  kCausalRelationship,
  kOutcomeResolution,
  kPrediction,
};

inline constexpr std::array<NarrativeElement, 7> kAllNarrativeElements = {
    NarrativeElement::kCharacter,          NarrativeElement::kSetting,
    NarrativeElement::kFeeling,            NarrativeElement::kAction,
    NarrativeElement::kCausalRelationship, NarrativeElement::kOutcomeResolution,
    NarrativeElement::kPrediction,
};

// Canonical snake_case name, e.g. "causal_relationship".
std::string_view ElementName(NarrativeElement element);

// Accepts the canonical name plus the space/hyphen spellings used by the
// released CSV files ("causal relationship"), case-insensitively. Anything
// else throws a kParse error.
NarrativeElement ParseElement(std::string_view label);

// Bit set over NarrativeElement; iteration order follows the enum.
class ElementSet {
 public:
  constexpr ElementSet() = default;
  constexpr ElementSet(std::initializer_list<NarrativeElement> elements) {
    for (auto e : elements) insert(e);
  }

  constexpr void insert(NarrativeElement e) { bits_ |= Bit(e); }
  constexpr bool contains(NarrativeElement e) const {
    return (bits_ & Bit(e)) != 0;
  }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr int size() const { return __builtin_popcount(bits_); }
  constexpr bool subset_of(ElementSet other) const {
    return (bits_ & ~other.bits_) == 0;
  }
  constexpr ElementSet operator|(ElementSet other) const {
    ElementSet s;
    s.bits_ = bits_ | other.bits_;
    return s;
  }
  constexpr bool operator==(const ElementSet &) const = default;
  constexpr uint8_t bits() const { return bits_; }

 private:
  static constexpr uint8_t Bit(NarrativeElement e) {
    return static_cast<uint8_t>(1u << static_cast<unsigned>(e));
  }
  uint8_t bits_ = 0;
};

inline constexpr ElementSet kEventElements = {
    NarrativeElement::kAction, NarrativeElement::kCausalRelationship,
    NarrativeElement::kOutcomeResolution, NarrativeElement::kPrediction};
inline constexpr ElementSet kNominalElements = {NarrativeElement::kCharacter,
                                                NarrativeElement::kSetting,
                                                NarrativeElement::kFeeling};

}  // namespace fablegen

#endif  // FABLEGEN_NARRATIVE_H_
