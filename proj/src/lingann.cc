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

#include "fablegen/lingann.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <set>
#include <unordered_map>

#include "fablegen/error.h"
#include "fablegen/lexicon.h"
#include "fablegen/text.h"

namespace fablegen::lingann {

using nlohmann::json;

std::string_view PosName(Pos pos) {
  switch (pos) {
    case Pos::kNoun: return "noun";
    case Pos::kPropn: return "propn";
    case Pos::kVerb: return "verb";
    case Pos::kAdj: return "adj";
    case Pos::kAdv: return "adv";
    case Pos::kPron: return "pron";
    case Pos::kDet: return "det";
    case Pos::kAdp: return "adp";
    case Pos::kNum: return "num";
    case Pos::kPunct: return "punct";
    case Pos::kOther: return "other";
  }
  return "other";
}

Pos ParsePos(std::string_view name) {
  static const std::pair<std::string_view, Pos> kNames[] = {
      {"noun", Pos::kNoun},   {"propn", Pos::kPropn}, {"verb", Pos::kVerb},
      {"adj", Pos::kAdj},     {"adv", Pos::kAdv},     {"pron", Pos::kPron},
      {"det", Pos::kDet},     {"adp", Pos::kAdp},     {"num", Pos::kNum},
      {"punct", Pos::kPunct}, {"other", Pos::kOther},
  };
  for (const auto &[n, p] : kNames) {
    if (n == name) return p;
  }
  throw Error(ErrorCode::kParse, "unknown part of speech '" + std::string(name) + "'");
}

std::string_view EntityLabelName(EntityLabel label) {
  switch (label) {
    case EntityLabel::kPerson: return "person";
    case EntityLabel::kLocation: return "location";
    case EntityLabel::kTime: return "time";
    case EntityLabel::kOrg: return "org";
    case EntityLabel::kMisc: return "misc";
  }
  return "misc";
}

EntityLabel ParseEntityLabel(std::string_view name) {
  for (auto l : {EntityLabel::kPerson, EntityLabel::kLocation, EntityLabel::kTime,
                 EntityLabel::kOrg, EntityLabel::kMisc}) {
    if (EntityLabelName(l) == name) return l;
  }
  throw Error(ErrorCode::kParse, "unknown entity label '" + std::string(name) + "'");
}

std::string_view RoleName(Role role) {
  switch (role) {
    case Role::kSubject: return "subject";
    case Role::kObject: return "object";
    case Role::kModifier: return "modifier";
  }
  return "modifier";
}

namespace {
Role ParseRole(std::string_view name) {
  for (auto r : {Role::kSubject, Role::kObject, Role::kModifier}) {
    if (RoleName(r) == name) return r;
  }
  throw Error(ErrorCode::kParse, "unknown role '" + std::string(name) + "'");
}
}  // namespace

const Argument *PredicateFrame::Find(Role role) const {
  for (const auto &a : arguments) {
    if (a.role == role) return &a;
  }
  return nullptr;
}

std::string Annotation::SpanText(const TokenSpan &span) const {
  if (span.empty()) return "";
  std::u32string chars = DecodeUtf8(text);
  int b = tokens[span.start].char_start;
  int e = tokens[span.end - 1].char_end;
  return EncodeUtf8(std::u32string_view(chars).substr(b, e - b));
}

int Annotation::SentenceOf(int token) const {
  for (size_t i = 0; i < sentences.size(); ++i) {
    if (sentences[i].contains(token)) return static_cast<int>(i);
  }
  return -1;
}

std::vector<std::string> ValidateAnnotation(const Annotation &a) {
  std::vector<std::string> v;
  std::u32string chars = DecodeUtf8(a.text);
  const int n = static_cast<int>(a.tokens.size());
  int prev_end = 0;
  for (int i = 0; i < n; ++i) {
    const Token &t = a.tokens[i];
    const std::string where = "token " + std::to_string(i);
    if (t.char_start >= t.char_end) {
      v.push_back(where + ": empty character range");
      continue;
    }
    if (t.char_start < prev_end) v.push_back(where + ": overlaps previous token");
    if (t.char_end > static_cast<int>(chars.size())) {
      v.push_back(where + ": extends past end of text");
      continue;
    }
    prev_end = t.char_end;
    std::string surface = EncodeUtf8(
        std::u32string_view(chars).substr(t.char_start, t.char_end - t.char_start));
    if (surface != t.text) {
      v.push_back(where + ": text '" + t.text + "' does not match source '" +
                  surface + "'");
    }
  }
  auto in_one_sentence = [&](const TokenSpan &s, const std::string &what) {
    if (s.empty() || s.start < 0 || s.end > n) {
      v.push_back(what + ": span [" + std::to_string(s.start) + "," +
                  std::to_string(s.end) + ") out of bounds or empty");
      return;
    }
    int count = 0;
    for (const auto &sent : a.sentences) {
      if (sent.contains(s)) ++count;
    }
    if (count != 1) {
      v.push_back(what + ": span not inside exactly one sentence");
    }
  };
  for (size_t i = 0; i < a.sentences.size(); ++i) {
    const auto &s = a.sentences[i];
    if (s.empty() || s.start < 0 || s.end > n) {
      v.push_back("sentence " + std::to_string(i) + ": bad span");
    }
  }
  for (size_t i = 0; i < a.entities.size(); ++i) {
    in_one_sentence(a.entities[i].span, "entity " + std::to_string(i));
  }
  for (size_t i = 0; i < a.chunks.size(); ++i) {
    const auto &c = a.chunks[i];
    in_one_sentence(c.span, "chunk " + std::to_string(i));
    if (!c.span.contains(c.head)) {
      v.push_back("chunk " + std::to_string(i) + ": head outside span");
    }
  }
  for (size_t i = 0; i < a.frames.size(); ++i) {
    const auto &f = a.frames[i];
    const std::string where = "frame " + std::to_string(i);
    if (f.trigger < 0 || f.trigger >= n) {
      v.push_back(where + ": trigger out of bounds");
      continue;
    }
    if (a.tokens[f.trigger].pos != Pos::kVerb) {
      v.push_back(where + ": trigger is not a verb");
    }
    for (const auto &arg : f.arguments) {
      in_one_sentence(arg.span, where + " " + std::string(RoleName(arg.role)));
      if (arg.span.contains(f.trigger)) {
        v.push_back(where + ": argument span contains the trigger");
      }
    }
  }
  return v;
}

// ---------------------------------------------------------------------------
// JSON.

namespace {
json SpanJson(const TokenSpan &s) { return json::array({s.start, s.end}); }
TokenSpan SpanFromJson(const json &j) {
  return {j.at(0).get<int>(), j.at(1).get<int>()};
}
}  // namespace

json ToJson(const Annotation &a) {
  json tokens = json::array();
  for (const auto &t : a.tokens) {
    tokens.push_back({{"text", t.text},
                      {"lemma", t.lemma},
                      {"pos", PosName(t.pos)},
                      {"start", t.char_start},
                      {"end", t.char_end}});
  }
  json sentences = json::array();
  for (const auto &s : a.sentences) sentences.push_back(SpanJson(s));
  json entities = json::array();
  for (const auto &e : a.entities) {
    entities.push_back({{"span", SpanJson(e.span)}, {"label", EntityLabelName(e.label)}});
  }
  json chunks = json::array();
  for (const auto &c : a.chunks) {
    chunks.push_back({{"span", SpanJson(c.span)}, {"head", c.head}});
  }
  json frames = json::array();
  for (const auto &f : a.frames) {
    json args = json::array();
    for (const auto &arg : f.arguments) {
      args.push_back({{"role", RoleName(arg.role)}, {"span", SpanJson(arg.span)}});
    }
    frames.push_back({{"trigger", f.trigger},
                      {"verb_group", SpanJson(f.verb_group)},
                      {"arguments", args}});
  }
  return {{"text", a.text},         {"tokens", tokens}, {"sentences", sentences},
          {"entities", entities},   {"chunks", chunks}, {"frames", frames}};
}

Annotation AnnotationFromJson(const json &j) {
  Annotation a;
  try {
    a.text = j.at("text").get<std::string>();
    for (const auto &t : j.at("tokens")) {
      Token tok;
      tok.text = t.at("text").get<std::string>();
      tok.lemma = t.value("lemma", ToLower(tok.text));
      tok.pos = ParsePos(t.at("pos").get<std::string>());
      tok.char_start = t.at("start").get<int>();
      tok.char_end = t.at("end").get<int>();
      a.tokens.push_back(std::move(tok));
    }
    for (const auto &s : j.at("sentences")) a.sentences.push_back(SpanFromJson(s));
    for (const auto &e : j.value("entities", json::array())) {
      a.entities.push_back(
          {SpanFromJson(e.at("span")), ParseEntityLabel(e.at("label").get<std::string>())});
    }
    for (const auto &c : j.value("chunks", json::array())) {
      a.chunks.push_back({SpanFromJson(c.at("span")), c.at("head").get<int>()});
    }
    for (const auto &f : j.value("frames", json::array())) {
      PredicateFrame frame;
      frame.trigger = f.at("trigger").get<int>();
      frame.verb_group = f.contains("verb_group")
                             ? SpanFromJson(f["verb_group"])
                             : TokenSpan{frame.trigger, frame.trigger + 1};
      for (const auto &arg : f.value("arguments", json::array())) {
        frame.arguments.push_back(
            {ParseRole(arg.at("role").get<std::string>()), SpanFromJson(arg.at("span"))});
      }
      a.frames.push_back(std::move(frame));
    }
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kParse, std::string("bad annotation json: ") + e.what());
  }
  return a;
}

// ---------------------------------------------------------------------------
// Reference backend.

struct ReferenceBackend::Tables {
  const Lexicon &lexicon = Lexicon::Get();
};

ReferenceBackend::ReferenceBackend() : tables_(std::make_shared<Tables>()) {}

namespace {

bool IsApostrophe(char32_t c) { return c == '\'' || c == 0x2019; }
bool IsWordChar(char32_t c) { return !IsSpace(c) && !IsPunct(c); }
bool IsTerminal(const std::string &t) {
  return t == "." || t == "!" || t == "?" || t == "…";
}
bool IsClosing(const std::string &t) {
  return t == "'" || t == "\"" || t == "’" || t == "”" || t == ")" ||
         t == "]" || t == "»";
}
bool IsQuote(const std::string &t) {
  return t == "'" || t == "\"" || t == "‘" || t == "’" ||
         t == "“" || t == "”" || t == "«" || t == "»";
}

const std::set<std::string> &Abbreviations() {
  static const std::set<std::string> kAbbrev = {"mr", "mrs", "ms", "dr", "st", "mt"};
  return kAbbrev;
}

// Lowercased lookup key; curly apostrophes fold to ASCII.
std::string Key(std::string_view text) {
  std::u32string u = DecodeUtf8(text);
  for (auto &c : u) {
    if (c == 0x2019) c = '\'';
    c = ToLower(c);
  }
  return EncodeUtf8(u);
}

struct RawToken {
  int start;
  int end;
};

std::vector<RawToken> Tokenize(const std::u32string &chars) {
  std::vector<RawToken> out;
  const int n = static_cast<int>(chars.size());
  int i = 0;
  while (i < n) {
    if (IsSpace(chars[i])) {
      ++i;
      continue;
    }
    if (!IsWordChar(chars[i])) {
      out.push_back({i, i + 1});
      ++i;
      continue;
    }
    int j = i;
    while (j < n) {
      if (IsWordChar(chars[j])) {
        ++j;
      } else if ((IsApostrophe(chars[j]) || chars[j] == '-') && j + 1 < n &&
                 IsWordChar(chars[j + 1])) {
        j += 2;
      } else {
        break;
      }
    }
    if (j < n && chars[j] == '.') {
      std::u32string word = chars.substr(i, j - i);
      if (Abbreviations().count(Key(EncodeUtf8(word))) > 0) ++j;
    }
    out.push_back({i, j});
    i = j;
  }
  return out;
}

std::vector<TokenSpan> SplitSentences(const std::vector<Token> &tokens) {
  std::vector<TokenSpan> out;
  const int n = static_cast<int>(tokens.size());
  int start = 0;
  int i = 0;
  while (i < n) {
    if (IsTerminal(tokens[i].text)) {
      int j = i + 1;
      while (j < n && IsTerminal(tokens[j].text)) ++j;
      while (j < n && IsClosing(tokens[j].text)) ++j;
      out.push_back({start, j});
      start = j;
      i = j;
    } else {
      ++i;
    }
  }
  if (start < n) out.push_back({start, n});
  return out;
}

bool EndsWith(const std::string &s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

bool IsVowel(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

bool IsKnownVerb(const Lexicon &lex, const std::string &w) {
  const LexEntry *e = lex.Find(w);
  return e != nullptr && e->pos == Pos::kVerb;
}

// Verb lemma for an inflected form not listed in the lexicon.
std::string VerbLemma(const Lexicon &lex, const std::string &w) {
  auto pick = [&](std::initializer_list<std::string> options,
                  const std::string &fallback) {
    for (const auto &o : options) {
      if (!o.empty() && IsKnownVerb(lex, o)) return lex.Find(o)->lemma;
    }
    return fallback;
  };
  auto undouble = [](const std::string &stem) {
    if (stem.size() >= 3 && stem[stem.size() - 1] == stem[stem.size() - 2] &&
        !IsVowel(stem.back()) && stem.back() != 'l' && stem.back() != 's') {
      return stem.substr(0, stem.size() - 1);
    }
    return stem;
  };
  if (EndsWith(w, "ied") && w.size() > 4) {
    std::string y = w.substr(0, w.size() - 3) + "y";
    return pick({y}, y);
  }
  if (EndsWith(w, "ed") && w.size() > 3) {
    std::string stem = w.substr(0, w.size() - 2);
    std::string e = w.substr(0, w.size() - 1);
    std::string u = undouble(stem);
    std::string fallback = u;
    if (!stem.empty() && (stem.back() == 'v' || stem.back() == 'c' ||
                          stem.back() == 'z' || stem.back() == 'u')) {
      fallback = e;
    }
    // "named", "hoped": short consonant-vowel-consonant stems; "guided".
    const size_t k = stem.size();
    if (u == stem && k >= 3 && k <= 4 && !IsVowel(stem[k - 3]) && IsVowel(stem[k - 2]) &&
        !IsVowel(stem[k - 1]) && std::string_view("wxy").find(stem[k - 1]) == std::string::npos &&
        !EndsWith(stem, "en") && !EndsWith(stem, "er") && !EndsWith(stem, "el") &&
        !EndsWith(stem, "on")) {
      fallback = e;
    }
    for (std::string_view tail : {"uid", "vid", "cid"}) {
      if (EndsWith(stem, tail)) fallback = e;
    }
    return pick({stem, e, u}, fallback);
  }
  if (EndsWith(w, "ing") && w.size() > 4) {
    std::string stem = w.substr(0, w.size() - 3);
    std::string u = undouble(stem);
    return pick({stem, stem + "e", u}, u);
  }
  if (EndsWith(w, "ies") && w.size() > 4) {
    std::string y = w.substr(0, w.size() - 3) + "y";
    return pick({y}, y);
  }
  if (EndsWith(w, "es") && w.size() > 3) {
    std::string s1 = w.substr(0, w.size() - 1);
    std::string s2 = w.substr(0, w.size() - 2);
    return pick({s1, s2}, s1);
  }
  if (EndsWith(w, "s") && w.size() > 2 && !EndsWith(w, "ss")) {
    std::string s1 = w.substr(0, w.size() - 1);
    return pick({s1}, s1);
  }
  return pick({w}, w);
}

std::string NounLemma(const std::string &w) {
  if (w.size() <= 3 || EndsWith(w, "ss") || EndsWith(w, "us") || EndsWith(w, "is")) {
    return w;
  }
  if (EndsWith(w, "ies")) return w.substr(0, w.size() - 3) + "y";
  if (EndsWith(w, "ches") || EndsWith(w, "shes") || EndsWith(w, "xes") ||
      EndsWith(w, "sses") || EndsWith(w, "zes")) {
    return w.substr(0, w.size() - 2);
  }
  if (EndsWith(w, "s")) return w.substr(0, w.size() - 1);
  return w;
}

enum class Origin { kLexicon, kSuffixIng, kSuffixEd, kSuffixS, kOther };

struct Tagged {
  Pos pos;
  std::string lemma;
  uint32_t flags;
  Origin origin;
};

// Suffix rules for lowercase words absent from the lexicon.
std::optional<Tagged> SuffixTag(const Lexicon &lex, const std::string &w) {
  if (EndsWith(w, "ly") && w.size() > 3) return Tagged{Pos::kAdv, w, 0, Origin::kOther};
  if (EndsWith(w, "ing") && w.size() > 4) {
    return Tagged{Pos::kVerb, VerbLemma(lex, w), 0, Origin::kSuffixIng};
  }
  if (EndsWith(w, "ed") && w.size() > 3) {
    return Tagged{Pos::kVerb, VerbLemma(lex, w), kFlagPast, Origin::kSuffixEd};
  }
  for (std::string_view adj : {"ous", "ful", "less", "ish", "able", "ible", "ive"}) {
    if (EndsWith(w, adj) && w.size() > adj.size() + 2) {
      return Tagged{Pos::kAdj, w, 0, Origin::kOther};
    }
  }
  return std::nullopt;
}

bool IsNominal(Pos p) { return p == Pos::kNoun || p == Pos::kPropn; }

class Annotator {
 public:
  Annotator(const Lexicon &lex, std::string_view text) : lex_(lex) {
    a_.text = std::string(text);
    chars_ = DecodeUtf8(text);
  }

  Annotation Run() {
    BuildTokens();
    a_.sentences = SplitSentences(a_.tokens);
    Tag();
    for (const auto &s : a_.sentences) {
      FindEntities(s);
      FindChunks(s);
    }
    for (const auto &s : a_.sentences) FindFrames(s);
    return std::move(a_);
  }

 private:
  void BuildTokens() {
    for (const auto &raw : Tokenize(chars_)) {
      Token t;
      t.char_start = raw.start;
      t.char_end = raw.end;
      t.text = EncodeUtf8(std::u32string_view(chars_).substr(raw.start, raw.end - raw.start));
      a_.tokens.push_back(std::move(t));
    }
    flags_.assign(a_.tokens.size(), 0);
    origin_.assign(a_.tokens.size(), Origin::kOther);
    consumed_.assign(a_.tokens.size(), false);
  }

  bool IsPunctToken(int i) const {
    const std::u32string u = DecodeUtf8(a_.tokens[i].text);
    return u.size() == 1 && IsPunct(u[0]);
  }

  bool Capitalized(int i) const {
    const std::u32string u = DecodeUtf8(a_.tokens[i].text);
    return !u.empty() && IsUpper(u[0]);
  }

  // First word of a sentence, or first word after an opening quote.
  bool InitialPosition(int i, const TokenSpan &sentence) const {
    int k = i - 1;
    if (k < sentence.start) return true;
    if (IsQuote(a_.tokens[k].text)) return true;
    for (int j = sentence.start; j < i; ++j) {
      if (!IsPunctToken(j)) return false;
    }
    return true;
  }

  void Tag() {
    const int n = static_cast<int>(a_.tokens.size());
    std::vector<bool> initial(n, false);
    std::set<std::string> capitalized_elsewhere;
    for (const auto &s : a_.sentences) {
      for (int i = s.start; i < s.end; ++i) {
        initial[i] = InitialPosition(i, s);
        if (!initial[i] && !IsPunctToken(i) && Capitalized(i)) {
          capitalized_elsewhere.insert(a_.tokens[i].text);
        }
      }
    }
    for (int i = 0; i < n; ++i) {
      Token &t = a_.tokens[i];
      const std::string key = Key(t.text);
      if (IsPunctToken(i)) {
        Set(i, Pos::kPunct, t.text, 0, Origin::kOther);
        continue;
      }
      if (std::all_of(key.begin(), key.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        Set(i, Pos::kNum, key, 0, Origin::kOther);
        continue;
      }
      const LexEntry *entry = lex_.Find(key);
      if (Capitalized(i)) {
        if (key == "i") {
          Set(i, Pos::kPron, "i", 0, Origin::kLexicon);
          continue;
        }
        if (!initial[i]) {
          Set(i, Pos::kPropn, t.text, 0, Origin::kOther);
          continue;
        }
        if (entry != nullptr) {
          Set(i, entry->pos, entry->lemma, entry->flags, Origin::kLexicon);
          continue;
        }
        if (capitalized_elsewhere.count(t.text) > 0) {
          Set(i, Pos::kPropn, t.text, 0, Origin::kOther);
          continue;
        }
        if (auto s = SuffixTag(lex_, key)) {
          Set(i, s->pos, s->lemma, s->flags, s->origin);
          continue;
        }
        Set(i, Pos::kPropn, t.text, 0, Origin::kOther);
        continue;
      }
      if (entry != nullptr) {
        Set(i, entry->pos, entry->lemma, entry->flags, Origin::kLexicon);
        continue;
      }
      if (auto s = SuffixTag(lex_, key)) {
        Set(i, s->pos, s->lemma, s->flags, s->origin);
        continue;
      }
      if (EndsWith(key, "s") && key.size() > 2 && !EndsWith(key, "ss")) {
        Set(i, Pos::kNoun, NounLemma(key), kFlagPlural, Origin::kSuffixS);
        continue;
      }
      Set(i, Pos::kNoun, key, 0, Origin::kOther);
    }
    ApplyContext();
  }

  void Set(int i, Pos pos, std::string lemma, uint32_t flags, Origin origin) {
    a_.tokens[i].pos = pos;
    a_.tokens[i].lemma = std::move(lemma);
    flags_[i] = flags;
    origin_[i] = origin;
  }

  bool IsDeterminerLike(int i) const {
    const Pos p = a_.tokens[i].pos;
    return p == Pos::kDet || (p == Pos::kPron && (flags_[i] & kFlagPoss));
  }

  void ApplyContext() {
    const int n = static_cast<int>(a_.tokens.size());
    for (int i = 0; i < n; ++i) {
      Token &t = a_.tokens[i];
      const Pos prev = i > 0 ? a_.tokens[i - 1].pos : Pos::kPunct;
      const bool after_det = i > 0 && (IsDeterminerLike(i - 1) || prev == Pos::kAdj);
      const Pos next = i + 1 < n ? a_.tokens[i + 1].pos : Pos::kPunct;
      // "a boating excursion", "the tired man", "the building".
      if ((origin_[i] == Origin::kSuffixIng || origin_[i] == Origin::kSuffixEd) &&
          after_det) {
        if (IsNominal(next) || next == Pos::kAdj) {
          t.pos = Pos::kAdj;
          t.lemma = Key(t.text);
        } else if (origin_[i] == Origin::kSuffixIng) {
          t.pos = Pos::kNoun;
          t.lemma = Key(t.text);
        } else {
          t.pos = Pos::kAdj;
          t.lemma = Key(t.text);
        }
        continue;
      }
      // "the answer", "a walk": base-form verbs after a determiner.
      if (origin_[i] == Origin::kLexicon && t.pos == Pos::kVerb && i > 0 &&
          IsDeterminerLike(i - 1) && !(flags_[i] & (kFlagAux | kFlagModal | kFlagPast)) &&
          Key(t.text) == t.lemma) {
        t.pos = Pos::kNoun;
        continue;
      }
      // "the fairy stops": plural-looking word after a subject.
      if (origin_[i] == Origin::kSuffixS &&
          (prev == Pos::kPron || prev == Pos::kPropn || prev == Pos::kNoun)) {
        const std::string key = Key(t.text);
        std::string stem = VerbLemma(lex_, key);
        if (IsKnownVerb(lex_, stem) && !(i > 0 && a_.tokens[i - 1].pos == Pos::kPron &&
                                         (flags_[i - 1] & kFlagPoss))) {
          t.pos = Pos::kVerb;
          t.lemma = stem;
          flags_[i] = kFlagPres;
        }
      }
    }
  }

  void FindEntities(const TokenSpan &s) {
    int i = s.start;
    while (i < s.end) {
      if (a_.tokens[i].pos != Pos::kPropn) {
        ++i;
        continue;
      }
      int j = i;
      while (j < s.end && a_.tokens[j].pos == Pos::kPropn) ++j;
      a_.entities.push_back({{i, j}, LabelFor(i, j, s)});
      i = j;
    }
  }

  EntityLabel LabelFor(int b, int e, const TokenSpan &s) const {
    for (int k = b; k < e; ++k) {
      if (lex_.IsTimeWord(Key(a_.tokens[k].text))) return EntityLabel::kTime;
    }
    for (int k = b; k < e; ++k) {
      if (lex_.IsPlaceWord(Key(a_.tokens[k].text))) return EntityLabel::kLocation;
    }
    if (b > s.start) {
      const std::string prev = Key(a_.tokens[b - 1].text);
      if (prev == "in" || prev == "at" || prev == "into" || prev == "near" ||
          prev == "from") {
        return EntityLabel::kLocation;
      }
    }
    return EntityLabel::kPerson;
  }

  // (det)? (adj | num)* (noun | propn)+
  void FindChunks(const TokenSpan &s) {
    int i = s.start;
    while (i < s.end) {
      int j = i;
      if (IsDeterminerLike(j) && j + 1 < s.end) ++j;
      while (j < s.end && (a_.tokens[j].pos == Pos::kAdj || a_.tokens[j].pos == Pos::kNum)) ++j;
      int noun_start = j;
      while (j < s.end && IsNominal(a_.tokens[j].pos)) ++j;
      if (j > noun_start) {
        a_.chunks.push_back({{i, j}, j - 1});
        i = j;
      } else {
        ++i;
      }
    }
  }

  bool IsBoundary(int i) const {
    return a_.tokens[i].pos == Pos::kPunct || (flags_[i] & (kFlagCoord | kFlagSub));
  }

  // Longest chunk or entity starting at `i`, or a pronoun token.
  std::optional<TokenSpan> NominalAt(int i) const {
    std::optional<TokenSpan> best;
    for (const auto &c : a_.chunks) {
      if (c.span.start == i && (!best || c.span.end > best->end)) best = c.span;
    }
    for (const auto &e : a_.entities) {
      if (e.span.start == i && (!best || e.span.end > best->end)) best = e.span;
    }
    if (!best && a_.tokens[i].pos == Pos::kPron) best = TokenSpan{i, i + 1};
    return best;
  }

  // Longest chunk or entity ending at `end`, or a pronoun token there.
  std::optional<TokenSpan> NominalEndingAt(int end) const {
    std::optional<TokenSpan> best;
    for (const auto &c : a_.chunks) {
      if (c.span.end == end && (!best || c.span.start < best->start)) best = c.span;
    }
    for (const auto &e : a_.entities) {
      if (e.span.end == end && (!best || e.span.start < best->start)) best = e.span;
    }
    if (!best && a_.tokens[end - 1].pos == Pos::kPron &&
        !(flags_[end - 1] & kFlagPoss && end < static_cast<int>(a_.tokens.size()) &&
          IsNominal(a_.tokens[end].pos))) {
      best = TokenSpan{end - 1, end};
    }
    return best;
  }

  bool StartsVerb(int i, const TokenSpan &s) const {
    return i < s.end && a_.tokens[i].pos == Pos::kVerb;
  }

  // verb (verb | adv* verb | "to" verb)*
  TokenSpan VerbGroup(int i, const TokenSpan &s) const {
    int j = i + 1;
    while (j < s.end) {
      if (a_.tokens[j].pos == Pos::kVerb) {
        ++j;
        continue;
      }
      if (a_.tokens[j].pos == Pos::kAdv) {
        int k = j;
        while (k < s.end && a_.tokens[k].pos == Pos::kAdv) ++k;
        if (StartsVerb(k, s)) {
          j = k;
          continue;
        }
        break;
      }
      if (Key(a_.tokens[j].text) == "to" && StartsVerb(j + 1, s)) {
        j += 2;
        continue;
      }
      break;
    }
    return {i, j};
  }

  // Nearest nominal after `from` inside the clause, skipping adpositions,
  // adverbs and stray determiners.
  std::optional<TokenSpan> ObjectAfter(int from, const TokenSpan &s) const {
    for (int k = from; k < s.end; ++k) {
      if (IsBoundary(k) || a_.tokens[k].pos == Pos::kVerb) return std::nullopt;
      if (auto nom = NominalAt(k)) return nom;
      const Pos p = a_.tokens[k].pos;
      if (p != Pos::kAdp && p != Pos::kAdv && p != Pos::kDet) return std::nullopt;
    }
    return std::nullopt;
  }

  // adv* adj+ directly after the verb group, not starting a chunk.
  std::optional<TokenSpan> PredicativeAt(int from, const TokenSpan &s) const {
    int k = from;
    while (k < s.end && a_.tokens[k].pos == Pos::kAdv) ++k;
    if (k >= s.end || a_.tokens[k].pos != Pos::kAdj || NominalAt(k)) return std::nullopt;
    int e = k;
    while (e < s.end && a_.tokens[e].pos == Pos::kAdj) ++e;
    return TokenSpan{from, e};
  }

  std::optional<TokenSpan> SubjectBefore(int group_start, const TokenSpan &s) const {
    int k = group_start;
    while (k > s.start) {
      if (IsBoundary(k - 1)) return std::nullopt;
      if (auto nom = NominalEndingAt(k)) {
        bool prepositional = nom->start > s.start && a_.tokens[nom->start - 1].pos == Pos::kAdp;
        if (!prepositional) return nom;
        k = nom->start;
        continue;
      }
      --k;
    }
    return std::nullopt;
  }

  // True when only adverbs separate `group_start` from a coordinator.
  bool CoordinatedClause(int group_start, const TokenSpan &s) const {
    int k = group_start - 1;
    while (k >= s.start && a_.tokens[k].pos == Pos::kAdv && !(flags_[k] & kFlagCoord)) --k;
    return k >= s.start && (flags_[k] & kFlagCoord);
  }

  // "a couple named Maie": a suffix -ed verb right after a noun, in a clause
  // whose finite verb came earlier.
  bool ReducedRelative(int i, int last_group_end, const TokenSpan &s) const {
    if (origin_[i] != Origin::kSuffixEd || last_group_end < 0 || i == s.start) return false;
    if (!IsNominal(a_.tokens[i - 1].pos)) return false;
    for (int k = last_group_end; k < i; ++k) {
      if (IsBoundary(k) || (flags_[k] & (kFlagCoord | kFlagSub))) return false;
    }
    return true;
  }

  void FindFrames(const TokenSpan &s) {
    std::optional<TokenSpan> last_subject;
    int last_group_end = -1;
    for (int i = s.start; i < s.end; ++i) {
      if (a_.tokens[i].pos != Pos::kVerb || consumed_[i]) continue;
      PredicateFrame frame;
      frame.trigger = i;
      if (ReducedRelative(i, last_group_end, s)) continue;
      TokenSpan group = VerbGroup(i, s);
      for (int k = group.start; k < group.end; ++k) consumed_[k] = true;
      last_group_end = group.end;

      std::optional<TokenSpan> subject = SubjectBefore(group.start, s);
      if (!subject && CoordinatedClause(group.start, s)) subject = last_subject;
      if (subject) {
        frame.arguments.push_back({Role::kSubject, *subject});
        last_subject = subject;
      }

      int end = group.end;
      if (auto pred = PredicativeAt(group.end, s)) {
        frame.arguments.push_back({Role::kModifier, *pred});
        end = pred->end;
      } else {
        if (auto obj = ObjectAfter(group.end, s)) {
          frame.arguments.push_back({Role::kObject, *obj});
          end = obj->end;
          // Double object: "bring us a junket", "gave Greta a lantern".
          bool all_proper = true;
          for (int k = obj->start; k < obj->end; ++k) {
            all_proper = all_proper && a_.tokens[k].pos == Pos::kPropn;
          }
          if ((obj->size() == 1 && a_.tokens[obj->start].pos == Pos::kPron) || all_proper) {
            if (end < s.end && !IsBoundary(end)) {
              if (auto second = NominalAt(end); second && a_.tokens[end].pos != Pos::kPron) {
                frame.arguments.push_back({Role::kObject, *second});
                end = second->end;
              }
            }
          }
        }
        if (auto mod = ModifierAt(end, s)) {
          frame.arguments.push_back({Role::kModifier, *mod});
          end = mod->end;
        }
      }
      frame.verb_group = group;
      a_.frames.push_back(std::move(frame));
      i = group.end - 1;
    }
  }

  // "to" + verb group (+ its object), or adposition + nominal.
  std::optional<TokenSpan> ModifierAt(int m, const TokenSpan &s) {
    if (m >= s.end) return std::nullopt;
    if (Key(a_.tokens[m].text) == "to" && StartsVerb(m + 1, s)) {
      TokenSpan inner = VerbGroup(m + 1, s);
      for (int k = inner.start; k < inner.end; ++k) consumed_[k] = true;
      int end = inner.end;
      if (inner.end < s.end && !IsBoundary(inner.end)) {
        if (auto obj = NominalAt(inner.end)) end = obj->end;
      }
      return TokenSpan{m, end};
    }
    if (a_.tokens[m].pos == Pos::kAdp && m + 1 < s.end && !IsBoundary(m + 1)) {
      if (auto nom = NominalAt(m + 1)) return TokenSpan{m, nom->end};
    }
    return std::nullopt;
  }

  const Lexicon &lex_;
  Annotation a_;
  std::u32string chars_;
  std::vector<uint32_t> flags_;
  std::vector<Origin> origin_;
  std::vector<bool> consumed_;
};

}  // namespace

Annotation ReferenceBackend::Annotate(std::string_view text) const {
  return Annotator(tables_->lexicon, text).Run();
}

// ---------------------------------------------------------------------------
// Command backend.

Annotation CommandBackend::Annotate(std::string_view text) const {
  namespace fs = std::filesystem;
  std::mt19937_64 rng(std::random_device{}());
  fs::path input = fs::temp_directory_path() /
                   ("fablegen-ann-" + std::to_string(rng()) + ".txt");
  {
    std::ofstream out(input, std::ios::binary);
    out << text;
  }
  std::string cmd = command_ + " < '" + input.string() + "'";
  FILE *pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) {
    fs::remove(input);
    throw Error(ErrorCode::kAnnotation, "cannot start '" + command_ + "'");
  }
  std::string output;
  char buf[4096];
  size_t got;
  while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) output.append(buf, got);
  int status = pclose(pipe);
  fs::remove(input);
  if (status != 0) {
    throw Error(ErrorCode::kAnnotation,
                "'" + command_ + "' exited with status " + std::to_string(status));
  }
  json j;
  try {
    j = json::parse(output);
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kAnnotation, std::string("unparseable output: ") + e.what());
  }
  return AnnotationFromJson(j);
}

Annotation Annotate(std::string_view text, const AnnotationBackend &backend) {
  Require(!Trim(text).empty(), "annotate: text must be non-empty");
  Annotation a;
  try {
    a = backend.Annotate(text);
  } catch (const Error &e) {
    throw Error(ErrorCode::kAnnotation,
                "annotation backend '" + backend.id() + "' failed: " + e.what());
  } catch (const std::exception &e) {
    throw Error(ErrorCode::kAnnotation,
                "annotation backend '" + backend.id() + "' failed: " + e.what());
  }
  if (a.text != text) {
    throw Error(ErrorCode::kAnnotation,
                "annotation backend '" + backend.id() + "' returned a different text");
  }
  auto violations = ValidateAnnotation(a);
  if (!violations.empty()) {
    throw Error(ErrorCode::kAnnotation,
                "annotation backend '" + backend.id() +
                    "' produced an invalid annotation: " + violations.front(),
                violations);
  }
  return a;
}

std::unique_ptr<AnnotationBackend> MakeBackend(std::string_view backend_id) {
  if (backend_id == "reference") return std::make_unique<ReferenceBackend>();
  if (StartsWith(backend_id, "command:")) {
    return std::make_unique<CommandBackend>(std::string(backend_id.substr(8)));
  }
  throw Error(ErrorCode::kNotFound,
              "unknown annotation backend '" + std::string(backend_id) + "'");
}

}  // namespace fablegen::lingann
