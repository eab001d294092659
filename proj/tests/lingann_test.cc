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

#include <gtest/gtest.h>

#include "fablegen/error.h"
#include "fablegen/text.h"
#include "test_util.h"

namespace fablegen::lingann {
namespace {

using testing::FixtureCorpus;

const ReferenceBackend &Reference() {
  static const ReferenceBackend backend;
  return backend;
}

Annotation Ann(std::string_view text) { return Annotate(text, Reference()); }

std::string StudentsText() {
  return testing::ReadFile(testing::FixtureDir() / "students_section.txt");
}

const PredicateFrame *FrameWithTrigger(const Annotation &a, const std::string &word) {
  for (const auto &f : a.frames) {
    if (a.tokens[f.trigger].text == word) return &f;
  }
  return nullptr;
}

std::string ArgText(const Annotation &a, const PredicateFrame &f, Role role) {
  const Argument *arg = f.Find(role);
  return arg == nullptr ? "" : a.SpanText(arg->span);
}

TEST(LingannTest, ShortSentence) {
  const Annotation a = Ann("Maie sighed.");
  ASSERT_EQ(a.tokens.size(), 3u);
  ASSERT_EQ(a.entities.size(), 1u);
  EXPECT_EQ(a.SpanText(a.entities[0].span), "Maie");
  EXPECT_EQ(a.entities[0].label, EntityLabel::kPerson);
  ASSERT_EQ(a.frames.size(), 1u);
  EXPECT_EQ(a.tokens[a.frames[0].trigger].text, "sighed");
  EXPECT_EQ(ArgText(a, a.frames[0], Role::kSubject), "Maie");
}

TEST(LingannTest, MultiwordSubjectAndPrepositionalObject) {
  const Annotation a = Ann("Ali Baba goes to the cave.");
  const PredicateFrame *f = FrameWithTrigger(a, "goes");
  ASSERT_NE(f, nullptr);
  EXPECT_EQ(ArgText(a, *f, Role::kSubject), "Ali Baba");
  EXPECT_EQ(ArgText(a, *f, Role::kObject), "the cave");
}

TEST(LingannTest, BareNounPhrase) {
  const Annotation a = Ann("the cow");
  ASSERT_EQ(a.chunks.size(), 1u);
  EXPECT_EQ(a.SpanText(a.chunks[0].span), "the cow");
  EXPECT_TRUE(a.frames.empty());
}

TEST(LingannTest, InheritedSubjectAcrossCoordination) {
  const Annotation a = Ann(StudentsText());
  const PredicateFrame *f = FrameWithTrigger(a, "wanted");
  ASSERT_NE(f, nullptr);
  EXPECT_EQ(a.SpanText(f->verb_group), "wanted to get");
  EXPECT_EQ(ArgText(a, *f, Role::kSubject), "they");
  EXPECT_EQ(ArgText(a, *f, Role::kObject), "something");
  EXPECT_EQ(ArgText(a, *f, Role::kModifier), "to eat");
}

TEST(LingannTest, LocationAndTimeEntities) {
  const Annotation a =
      Ann("Hans lived beside the Old Mill. One morning in December he left.");
  std::map<std::string, EntityLabel> found;
  for (const auto &e : a.entities) found[a.SpanText(e.span)] = e.label;
  EXPECT_EQ(found.at("Hans"), EntityLabel::kPerson);
  EXPECT_EQ(found.at("Old Mill"), EntityLabel::kLocation);
  EXPECT_EQ(found.at("December"), EntityLabel::kTime);
}

TEST(LingannTest, DoubleObjectWithProperNoun) {
  const Annotation a = Ann("The fishermen gave Greta a new lantern.");
  const PredicateFrame *f = FrameWithTrigger(a, "gave");
  ASSERT_NE(f, nullptr);
  int objects = 0;
  for (const auto &arg : f->arguments) objects += arg.role == Role::kObject;
  EXPECT_EQ(objects, 2);
}

TEST(LingannTest, ReducedRelativeIsNotAFrame) {
  const Annotation a = Ann("There lived a poor couple named Maie.");
  EXPECT_EQ(FrameWithTrigger(a, "named"), nullptr);
  EXPECT_NE(FrameWithTrigger(a, "lived"), nullptr);
}

TEST(LingannTest, OffsetsPointIntoText) {
  for (const auto &story : FixtureCorpus().stories()) {
    for (const auto &section : story.sections) {
      const Annotation a = Ann(section.text);
      const std::u32string chars = DecodeUtf8(section.text);
      for (const auto &t : a.tokens) {
        ASSERT_LE(t.char_end, static_cast<int>(chars.size()));
        EXPECT_EQ(EncodeUtf8(chars.substr(t.char_start, t.char_end - t.char_start)), t.text);
      }
    }
  }
}

// Every annotation of the fixture satisfies the structural invariants and
// survives JSON serialization unchanged.
TEST(LingannTest, FixtureAnnotationsValidateAndRoundTrip) {
  for (const auto &story : FixtureCorpus().stories()) {
    for (const auto &section : story.sections) {
      const Annotation a = Ann(section.text);
      EXPECT_TRUE(ValidateAnnotation(a).empty()) << story.story_id << ":" << section.index;
      EXPECT_EQ(AnnotationFromJson(ToJson(a)), a);
    }
  }
}

TEST(LingannTest, Deterministic) {
  const std::string text = StudentsText();
  EXPECT_EQ(ToJson(Ann(text)).dump(), ToJson(Ann(text)).dump());
}

TEST(LingannTest, ValidationCatchesBrokenSpans) {
  Annotation a = Ann("Maie sighed.");
  a.chunks.push_back({{2, 9}, 3});
  a.frames[0].trigger = 7;
  EXPECT_GE(ValidateAnnotation(a).size(), 2u);
}

TEST(LingannTest, EmptyTextIsRejected) {
  EXPECT_THROW(Ann("   "), Error);
}

struct GoldenCase {
  const char *name;
  const char *story;
  int section;
};

class AnnotationGoldenTest : public ::testing::TestWithParam<GoldenCase> {};

TEST_P(AnnotationGoldenTest, MatchesCommittedFile) {
  const GoldenCase &g = GetParam();
  const std::string text =
      g.story == nullptr ? StudentsText()
                         : FixtureCorpus().GetStory(g.story).FindSection(g.section)->text;
  const std::string actual = ToJson(Ann(text)).dump(2) + "\n";
  EXPECT_EQ(actual, testing::Golden(testing::GoldenDir() / (std::string(g.name) + ".ann.json"),
                                    actual));
}

INSTANTIATE_TEST_SUITE_P(
    Fixture, AnnotationGoldenTest,
    ::testing::Values(GoldenCase{"students", nullptr, 0},
                      GoldenCase{"maie-and-the-cow-s1", "maie-and-the-cow", 1},
                      GoldenCase{"the-lost-lantern-s2", "the-lost-lantern", 2},
                      GoldenCase{"the-miller-and-the-fox-s1", "the-miller-and-the-fox", 1}),
    [](const auto &info) {
      std::string n = info.param.name;
      for (char &c : n) {
        if (c == '-') c = '_';
      }
      return n;
    });

TEST(CommandBackendTest, ReadsAnnotationFromProgramOutput) {
  const auto golden = testing::GoldenDir() / "students.ann.json";
  CommandBackend backend("cat '" + golden.string() + "'");
  const Annotation a = Annotate(StudentsText(), backend);
  EXPECT_EQ(a, Ann(StudentsText()));
}

TEST(CommandBackendTest, FailuresBecomeAnnotationErrors) {
  CommandBackend failing("false");
  try {
    Annotate("Maie sighed.", failing);
    FAIL() << "expected an annotation error";
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kAnnotation);
    EXPECT_NE(std::string(e.what()).find("command:false"), std::string::npos);
  }
  // Output for a different text is refused.
  const auto golden = testing::GoldenDir() / "students.ann.json";
  CommandBackend mismatched("cat '" + golden.string() + "'");
  EXPECT_THROW(Annotate("Maie sighed.", mismatched), Error);
}

TEST(MakeBackendTest, Ids) {
  EXPECT_EQ(MakeBackend("reference")->id(), "reference");
  EXPECT_EQ(MakeBackend("command:cat")->id(), "command:cat");
  EXPECT_THROW(MakeBackend("spacy"), Error);
}

}  // namespace
}  // namespace fablegen::lingann
