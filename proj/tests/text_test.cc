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

#include <gtest/gtest.h>

#include <random>

#include "fablegen/csv.h"
#include "fablegen/error.h"
#include "fablegen/narrative.h"
#include "fablegen/text.h"
#include "fablegen/tokenize.h"

namespace fablegen {
namespace {

using eval::TokenizeForRouge;
using Tokens = std::vector<std::string>;

TEST(TextTest, Utf8RoundTrip) {
  const std::string s = "caf\xc3\xa9 \xe2\x80\x9cquoted\xe2\x80\x9d";
  EXPECT_EQ(EncodeUtf8(DecodeUtf8(s)), s);
  EXPECT_EQ(DecodeUtf8("\xff").front(), U'�');
}

TEST(TextTest, TrimSplitJoin) {
  EXPECT_EQ(Trim("  a b \n"), "a b");
  EXPECT_EQ(SplitWhitespace(" a  b\tc "), (Tokens{"a", "b", "c"}));
  EXPECT_EQ(Split("a,,b", ','), (Tokens{"a", "", "b"}));
  EXPECT_EQ(Join({"x", "y"}, "-"), "x-y");
}

TEST(TextTest, Fnv1aIsStable) {
  EXPECT_EQ(Fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(Fnv1a("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(TokenizeTest, Examples) {
  EXPECT_EQ(TokenizeForRouge("A junket."), (Tokens{"a", "junket"}));
  EXPECT_TRUE(TokenizeForRouge("").empty());
  const Tokens t = TokenizeForRouge("Why did the three young men want a junket?");
  EXPECT_EQ(t.size(), 9u);
  EXPECT_EQ(t.back(), "junket");
}

TEST(TokenizeTest, StripsOnlyOuterPunctuation) {
  EXPECT_EQ(TokenizeForRouge("'bring us,' --- don't!"), (Tokens{"bring", "us", "don't"}));
  EXPECT_EQ(TokenizeForRouge("\xe2\x80\x9cHello\xe2\x80\x9d"), (Tokens{"hello"}));
}

// Property: tokenize(q + " " + a) == tokenize(q) ++ tokenize(a).
TEST(TokenizeTest, ConcatenationProperty) {
  std::mt19937 rng(5);
  const std::string alphabet = "ab .,!?'\t";
  for (int trial = 0; trial < 2000; ++trial) {
    std::string q, a;
    for (int i = 0; i < static_cast<int>(rng() % 12); ++i) q += alphabet[rng() % alphabet.size()];
    for (int i = 0; i < static_cast<int>(rng() % 12); ++i) a += alphabet[rng() % alphabet.size()];
    Tokens expected = TokenizeForRouge(q);
    const Tokens ta = TokenizeForRouge(a);
    expected.insert(expected.end(), ta.begin(), ta.end());
    ASSERT_EQ(TokenizeForRouge(q + " " + a), expected) << "q=[" << q << "] a=[" << a << "]";
  }
}

TEST(CsvTest, QuotedFieldsAndEscapes) {
  const auto rows = ParseCsv("a,\"b,c\",\"say \"\"hi\"\"\"\n\"multi\nline\",x\n");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], (Tokens{"a", "b,c", "say \"hi\""}));
  EXPECT_EQ(rows[1], (Tokens{"multi\nline", "x"}));
}

TEST(CsvTest, UnterminatedQuoteIsParseError) {
  try {
    ParseCsv("a,\"open\n");
    FAIL() << "expected a parse error";
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
  }
}

TEST(CsvTest, RowRoundTrip) {
  const Tokens fields = {"plain", "with,comma", "with \"quote\"", "line\nbreak", ""};
  const auto rows = ParseCsv(CsvRow(fields));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0], fields);
}

TEST(CsvTest, TableColumnsAreCaseInsensitive) {
  const CsvTable t = ParseCsvTable("Section,Text\n1,hello\n2\n");
  EXPECT_EQ(t.Column("section"), 0);
  EXPECT_EQ(t.Column("TEXT"), 1);
  EXPECT_EQ(t.Column("missing"), -1);
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[1].size(), 2u);
}

TEST(NarrativeTest, NamesRoundTrip) {
  for (auto e : kAllNarrativeElements) EXPECT_EQ(ParseElement(ElementName(e)), e);
  EXPECT_EQ(ParseElement("Causal Relationship"), NarrativeElement::kCausalRelationship);
  EXPECT_EQ(ParseElement("outcome-resolution"), NarrativeElement::kOutcomeResolution);
  EXPECT_THROW(ParseElement("mood"), Error);
}

}  // namespace
}  // namespace fablegen
