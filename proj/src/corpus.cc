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

#include "fablegen/corpus.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "fablegen/csv.h"
#include "fablegen/error.h"
#include "fablegen/text.h"
#include "fablegen/tokenize.h"

namespace fablegen {

std::string_view ElementName(NarrativeElement element) {
  switch (element) {
    case NarrativeElement::kCharacter: return "character";
    case NarrativeElement::kSetting: return "setting";
    case NarrativeElement::kFeeling: return "feeling";
    case NarrativeElement::kAction: return "action";
    case NarrativeElement::kCausalRelationship: return "causal_relationship";
    case NarrativeElement::kOutcomeResolution: return "outcome_resolution";
    case NarrativeElement::kPrediction: return "prediction";
  }
  return "unknown";
}

NarrativeElement ParseElement(std::string_view label) {
  std::string key = ToLower(Trim(label));
  for (char &c : key) {
    if (c == ' ' || c == '-') c = '_';
  }
  for (auto e : kAllNarrativeElements) {
    if (ElementName(e) == key) return e;
  }
  throw Error(ErrorCode::kParse,
              "unknown narrative element '" + std::string(label) + "'");
}

namespace corpus {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view SplitName(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kValidation: return "validation";
    case Split::kTest: return "test";
  }
  return "unknown";
}

Split ParseSplit(std::string_view name) {
  std::string key = ToLower(Trim(name));
  if (key == "train") return Split::kTrain;
  if (key == "validation" || key == "val" || key == "valid" || key == "dev") {
    return Split::kValidation;
  }
  if (key == "test") return Split::kTest;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown split '" + std::string(name) + "'");
}

FormatProfile ParseFormatProfile(std::string_view name) {
  if (name == "canonical_json") return FormatProfile::kCanonicalJson;
  if (name == "csv_per_book") return FormatProfile::kCsvPerBook;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown format profile '" + std::string(name) + "'");
}

const Section *Story::FindSection(int index) const {
  for (const auto &s : sections) {
    if (s.index == index) return &s;
  }
  return nullptr;
}

std::vector<std::string> Validate(const std::vector<Story> &stories,
                                  const std::vector<QAPair> &pairs) {
  std::vector<std::string> violations;
  std::map<std::string, const Story *> by_id;
  for (const auto &story : stories) {
    const std::string where = "story '" + story.story_id + "'";
    if (story.story_id.empty()) violations.push_back("story with empty id");
    by_id.emplace(story.story_id, &story);
    if (story.sections.size() < 2) {
      violations.push_back(where + ": has " +
                           std::to_string(story.sections.size()) +
                           " section(s), at least 2 required");
    }
    for (size_t i = 0; i < story.sections.size(); ++i) {
      const auto &s = story.sections[i];
      if (s.index != static_cast<int>(i) + 1) {
        violations.push_back(where + ": section at position " +
                             std::to_string(i + 1) + " has index " +
                             std::to_string(s.index) +
                             " (sections must be numbered 1..n without gaps)");
      }
      if (s.story_id != story.story_id) {
        violations.push_back(where + ": section " + std::to_string(s.index) +
                             " belongs to story '" + s.story_id + "'");
      }
      if (Trim(s.text).empty()) {
        violations.push_back(where + ": section " + std::to_string(s.index) +
                             " has empty text");
      }
    }
  }
  std::set<std::pair<std::string, std::string>> seen_pairs;
  for (const auto &p : pairs) {
    const std::string where = "qa pair '" + p.pair_id + "'";
    if (!seen_pairs.emplace(p.story_id, p.pair_id).second) {
      violations.push_back(where + ": duplicate pair id in story '" +
                           p.story_id + "'");
    }
    if (Trim(p.question).empty()) violations.push_back(where + ": empty question");
    if (Trim(p.answer).empty()) violations.push_back(where + ": empty answer");
    if (p.origin == Origin::kGroundTruth && p.system_tag) {
      violations.push_back(where + ": ground-truth pair carries a system tag");
    }
    if (p.origin == Origin::kGenerated && !p.system_tag) {
      violations.push_back(where + ": generated pair lacks a system tag");
    }
    if (p.section_indices.empty()) {
      violations.push_back(where + ": no section references");
    }
    auto it = by_id.find(p.story_id);
    if (it == by_id.end()) {
      violations.push_back(where + ": unknown story '" + p.story_id + "'");
      continue;
    }
    for (int idx : p.section_indices) {
      if (it->second->FindSection(idx) == nullptr) {
        violations.push_back(where + ": references missing section " +
                             std::to_string(idx) + " of story '" +
                             p.story_id + "'");
      }
    }
  }
  return violations;
}

Corpus::Corpus(std::vector<Story> stories, std::vector<QAPair> pairs) {
  std::vector<std::string> violations;
  std::vector<Story> unique;
  std::map<std::string, size_t> first;
  for (auto &story : stories) {
    auto [it, inserted] = first.emplace(story.story_id, unique.size());
    if (inserted) {
      unique.push_back(std::move(story));
    } else if (!(unique[it->second] == story)) {
      violations.push_back("story '" + story.story_id +
                           "': conflicting duplicate definitions");
    }
  }
  if (unique.empty()) violations.push_back("no stories found");
  auto more = Validate(unique, pairs);
  violations.insert(violations.end(), more.begin(), more.end());
  if (!violations.empty()) {
    throw Error(ErrorCode::kValidation,
                "corpus validation failed: " + violations.front() +
                    (violations.size() > 1
                         ? " (+" + std::to_string(violations.size() - 1) +
                               " more)"
                         : ""),
                violations);
  }
  std::sort(unique.begin(), unique.end(), [](const Story &a, const Story &b) {
    return a.story_id < b.story_id;
  });
  stories_ = std::move(unique);
  for (size_t i = 0; i < stories_.size(); ++i) {
    story_index_.emplace(stories_[i].story_id, i);
  }
  pairs_ = std::move(pairs);
}

std::vector<const Story *> Corpus::StoriesIn(Split split) const {
  std::vector<const Story *> out;
  for (const auto &s : stories_) {
    if (s.split == split) out.push_back(&s);
  }
  return out;
}

std::vector<const QAPair *> Corpus::PairsIn(Split split) const {
  std::vector<const QAPair *> out;
  for (const auto &p : pairs_) {
    const Story *s = FindStory(p.story_id);
    if (s != nullptr && s->split == split) out.push_back(&p);
  }
  return out;
}

bool Corpus::HasSplit(Split split) const {
  return std::any_of(stories_.begin(), stories_.end(),
                     [&](const Story &s) { return s.split == split; });
}

const Story *Corpus::FindStory(std::string_view story_id) const {
  auto it = story_index_.find(story_id);
  return it == story_index_.end() ? nullptr : &stories_[it->second];
}

const Story &Corpus::GetStory(std::string_view story_id) const {
  const Story *s = FindStory(story_id);
  if (s == nullptr) {
    throw Error(ErrorCode::kNotFound,
                "unknown story '" + std::string(story_id) + "'");
  }
  return *s;
}

std::vector<const QAPair *> Corpus::PairsForStory(
    std::string_view story_id) const {
  std::vector<const QAPair *> out;
  for (const auto &p : pairs_) {
    if (p.story_id == story_id) out.push_back(&p);
  }
  return out;
}

std::map<SectionKey, std::vector<const QAPair *>> Corpus::PairsBySection(
    Split split) const {
  std::map<SectionKey, std::vector<const QAPair *>> out;
  for (const Story *story : StoriesIn(split)) {
    for (const auto &section : story->sections) {
      out[{story->story_id, section.index}];
    }
  }
  for (const QAPair *p : PairsIn(split)) {
    for (int idx : p->section_indices) out[{p->story_id, idx}].push_back(p);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Canonical JSON profile.

json QAPairToJson(const QAPair &pair) {
  json j = {{"pair_id", pair.pair_id},
            {"section_indices", pair.section_indices},
            {"question", pair.question},
            {"answer", pair.answer},
            {"element", ElementName(pair.element)},
            {"origin", pair.origin == Origin::kGroundTruth ? "ground_truth"
                                                           : "generated"}};
  if (pair.system_tag) j["system_tag"] = *pair.system_tag;
  return j;
}

QAPair QAPairFromJson(const json &j, std::string_view story_id) {
  QAPair p;
  p.pair_id = j.at("pair_id").get<std::string>();
  p.story_id = std::string(story_id);
  p.section_indices = j.at("section_indices").get<std::vector<int>>();
  p.question = j.at("question").get<std::string>();
  p.answer = j.at("answer").get<std::string>();
  p.element = ParseElement(j.at("element").get<std::string>());
  std::string origin = j.value("origin", "ground_truth");
  if (origin == "ground_truth") {
    p.origin = Origin::kGroundTruth;
  } else if (origin == "generated") {
    p.origin = Origin::kGenerated;
  } else {
    throw Error(ErrorCode::kParse, "unknown origin '" + origin + "'");
  }
  if (j.contains("system_tag") && !j["system_tag"].is_null()) {
    p.system_tag = j["system_tag"].get<std::string>();
  }
  return p;
}

json StoryToJson(const Story &story, const std::vector<const QAPair *> &pairs) {
  json sections = json::array();
  for (const auto &s : story.sections) {
    sections.push_back({{"index", s.index}, {"text", s.text}});
  }
  json qa = json::array();
  for (const QAPair *p : pairs) qa.push_back(QAPairToJson(*p));
  return {{"story_id", story.story_id},
          {"title", story.title},
          {"split", SplitName(story.split)},
          {"sections", sections},
          {"qa_pairs", qa}};
}

namespace {

std::string ReadFile(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kParse, "cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

[[noreturn]] void ParseFailure(const fs::path &path, const std::string &record,
                               const std::string &what) {
  throw Error(ErrorCode::kParse,
              "parse error in " + path.string() + " at " + record + ": " + what);
}

std::pair<Story, std::vector<QAPair>> StoryFromJson(const json &j,
                                                     const fs::path &path) {
  Story story;
  std::vector<QAPair> pairs;
  std::string record = "story";
  try {
    story.story_id = j.at("story_id").get<std::string>();
    story.title = j.value("title", story.story_id);
    if (j.contains("split")) story.split = ParseSplit(j["split"].get<std::string>());
    const auto &sections = j.at("sections");
    for (size_t i = 0; i < sections.size(); ++i) {
      record = "sections[" + std::to_string(i) + "]";
      Section s;
      s.story_id = story.story_id;
      s.index = sections[i].at("index").get<int>();
      s.text = sections[i].at("text").get<std::string>();
      story.sections.push_back(std::move(s));
    }
    if (j.contains("qa_pairs")) {
      const auto &qa = j["qa_pairs"];
      for (size_t i = 0; i < qa.size(); ++i) {
        record = "qa_pairs[" + std::to_string(i) + "]";
        pairs.push_back(QAPairFromJson(qa[i], story.story_id));
      }
    }
  } catch (const json::exception &e) {
    ParseFailure(path, record, e.what());
  } catch (const Error &e) {
    ParseFailure(path, record, e.what());
  }
  return {std::move(story), std::move(pairs)};
}

Corpus LoadCanonical(const fs::path &root) {
  std::vector<Story> stories;
  std::vector<QAPair> pairs;
  const fs::path manifest = root / "splits.json";
  std::map<std::string, Split> split_of;
  if (fs::exists(manifest)) {
    json m;
    try {
      m = json::parse(ReadFile(manifest));
      for (auto &[name, ids] : m.items()) {
        Split split = ParseSplit(name);
        for (const auto &id : ids) split_of[id.get<std::string>()] = split;
      }
    } catch (const json::exception &e) {
      ParseFailure(manifest, "manifest", e.what());
    } catch (const Error &e) {
      ParseFailure(manifest, "manifest", e.what());
    }
  }
  const fs::path dir = root / "stories";
  if (!fs::is_directory(dir)) return Corpus({}, {});
  std::vector<fs::path> files;
  for (const auto &entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<std::string> violations;
  for (const auto &file : files) {
    auto [story, story_pairs] = LoadStoryFile(file);
    auto it = split_of.find(story.story_id);
    if (it != split_of.end()) {
      story.split = it->second;
    } else if (!split_of.empty()) {
      violations.push_back("story '" + story.story_id +
                           "' is missing from splits.json");
    }
    stories.push_back(std::move(story));
    for (auto &p : story_pairs) pairs.push_back(std::move(p));
  }
  for (const auto &[id, split] : split_of) {
    bool found = std::any_of(stories.begin(), stories.end(),
                             [&](const Story &s) { return s.story_id == id; });
    if (!found) {
      violations.push_back("splits.json lists story '" + id +
                           "' but no story file exists");
    }
  }
  if (!violations.empty()) {
    auto rest = Validate(stories, pairs);
    violations.insert(violations.end(), rest.begin(), rest.end());
    throw Error(ErrorCode::kValidation,
                "corpus validation failed: " + violations.front(), violations);
  }
  return Corpus(std::move(stories), std::move(pairs));
}

std::vector<int> ParseSectionRefs(const std::string &field) {
  std::vector<int> out;
  std::string cur;
  auto flush = [&]() {
    if (cur.empty()) return;
    size_t pos = 0;
    int v = std::stoi(cur, &pos);
    if (pos != cur.size()) throw std::invalid_argument(cur);
    out.push_back(v);
    cur.clear();
  };
  for (char c : field) {
    if (c == ',' || c == ' ' || c == ';') {
      flush();
    } else {
      cur.push_back(c);
    }
  }
  flush();
  if (out.empty()) throw std::invalid_argument("empty section reference");
  return out;
}

// Released layout: section-stories/<split>/<book>-story.csv (columns
// section,text) and questions/<split>/<book>-questions.csv.
Corpus LoadCsvPerBook(const fs::path &root) {
  std::vector<Story> stories;
  std::vector<QAPair> pairs;
  const fs::path stories_root = root / "section-stories";
  if (!fs::is_directory(stories_root)) return Corpus({}, {});
  std::vector<fs::path> split_dirs;
  for (const auto &entry : fs::directory_iterator(stories_root)) {
    if (entry.is_directory()) split_dirs.push_back(entry.path());
  }
  std::sort(split_dirs.begin(), split_dirs.end());
  for (const auto &split_dir : split_dirs) {
    Split split = ParseSplit(split_dir.filename().string());
    std::vector<fs::path> files;
    for (const auto &entry : fs::directory_iterator(split_dir)) {
      const std::string name = entry.path().filename().string();
      if (name.size() > 10 && name.ends_with("-story.csv")) {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    for (const auto &file : files) {
      const std::string name = file.filename().string();
      Story story;
      story.story_id = name.substr(0, name.size() - 10);
      story.title = story.story_id;
      std::replace(story.title.begin(), story.title.end(), '-', ' ');
      story.split = split;
      CsvTable table;
      try {
        table = ParseCsvTable(ReadFile(file));
      } catch (const Error &e) {
        ParseFailure(file, "file", e.what());
      }
      int col_section = table.Column("section");
      int col_text = table.Column("text");
      if (col_section < 0 || col_text < 0) {
        ParseFailure(file, "header", "expected columns 'section' and 'text'");
      }
      for (size_t r = 0; r < table.rows.size(); ++r) {
        const auto &row = table.rows[r];
        Section s;
        s.story_id = story.story_id;
        try {
          s.index = std::stoi(row[col_section]);
        } catch (const std::exception &) {
          ParseFailure(file, "row " + std::to_string(r + 2),
                       "bad section number '" + row[col_section] + "'");
        }
        s.text = row[col_text];
        story.sections.push_back(std::move(s));
      }

      const fs::path qfile = root / "questions" / split_dir.filename() /
                             (story.story_id + "-questions.csv");
      if (fs::exists(qfile)) {
        CsvTable q;
        try {
          q = ParseCsvTable(ReadFile(qfile));
        } catch (const Error &e) {
          ParseFailure(qfile, "file", e.what());
        }
        int col_id = q.Column("question_id");
        int col_sec = q.Column("cor_section");
        int col_attr = q.Column("attribute1");
        if (col_attr < 0) col_attr = q.Column("attribute");
        int col_q = q.Column("question");
        int col_a = q.Column("answer1");
        if (col_a < 0) col_a = q.Column("answer");
        if (col_sec < 0 || col_attr < 0 || col_q < 0 || col_a < 0) {
          ParseFailure(qfile, "header",
                       "expected columns cor_section, attribute1, question, "
                       "answer1");
        }
        for (size_t r = 0; r < q.rows.size(); ++r) {
          const auto &row = q.rows[r];
          const std::string record = "row " + std::to_string(r + 2);
          QAPair p;
          p.story_id = story.story_id;
          p.pair_id = col_id >= 0 && !Trim(row[col_id]).empty()
                          ? Trim(row[col_id])
                          : story.story_id + "-q" + std::to_string(r + 1);
          try {
            p.section_indices = ParseSectionRefs(row[col_sec]);
          } catch (const std::exception &) {
            ParseFailure(qfile, record,
                         "bad cor_section '" + row[col_sec] + "'");
          }
          try {
            p.element = ParseElement(row[col_attr]);
          } catch (const Error &e) {
            ParseFailure(qfile, record, e.what());
          }
          p.question = row[col_q];
          p.answer = row[col_a];
          pairs.push_back(std::move(p));
        }
      }
      stories.push_back(std::move(story));
    }
  }
  return Corpus(std::move(stories), std::move(pairs));
}

}  // namespace

std::pair<Story, std::vector<QAPair>> LoadStoryFile(const fs::path &path) {
  json j;
  try {
    j = json::parse(ReadFile(path));
  } catch (const json::exception &e) {
    ParseFailure(path, "document", e.what());
  }
  return StoryFromJson(j, path);
}

Corpus LoadCorpus(const fs::path &root, FormatProfile profile) {
  if (!fs::is_directory(root)) {
    throw Error(ErrorCode::kInvalidArgument,
                "corpus root is not a directory: " + root.string());
  }
  return profile == FormatProfile::kCanonicalJson ? LoadCanonical(root)
                                                  : LoadCsvPerBook(root);
}

void SaveCanonical(const Corpus &corpus, const fs::path &root) {
  fs::create_directories(root / "stories");
  json manifest = json::object();
  for (Split split : kAllSplits) manifest[std::string(SplitName(split))] = json::array();
  for (const auto &story : corpus.stories()) {
    manifest[std::string(SplitName(story.split))].push_back(story.story_id);
    std::ofstream out(root / "stories" / (story.story_id + ".json"));
    out << StoryToJson(story, corpus.PairsForStory(story.story_id)).dump(2)
        << "\n";
  }
  std::ofstream out(root / "splits.json");
  out << manifest.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Statistics.

Stat Summarize(const std::vector<double> &values, SdMode mode) {
  Stat s;
  if (values.empty()) return s;
  double sum = 0;
  s.min = values.front();
  s.max = values.front();
  for (double v : values) {
    sum += v;
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
  }
  const double n = static_cast<double>(values.size());
  s.mean = sum / n;
  double ss = 0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  double denom = mode == SdMode::kSample ? n - 1 : n;
  s.sd = denom > 0 ? std::sqrt(ss / denom) : 0.0;
  return s;
}

SplitStats ComputeStats(const Corpus &corpus, Split split, SdMode mode) {
  auto stories = corpus.StoriesIn(split);
  if (stories.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "split '" + std::string(SplitName(split)) + "' is empty");
  }
  std::vector<double> sections_per_story, tokens_per_story, tokens_per_section,
      questions_per_story, questions_per_section, tokens_per_question,
      tokens_per_answer;
  auto by_section = corpus.PairsBySection(split);
  for (const Story *story : stories) {
    sections_per_story.push_back(static_cast<double>(story->sections.size()));
    double story_tokens = 0;
    for (const auto &section : story->sections) {
      double n = static_cast<double>(eval::TokenizeForRouge(section.text).size());
      story_tokens += n;
      tokens_per_section.push_back(n);
      questions_per_section.push_back(static_cast<double>(
          by_section[{story->story_id, section.index}].size()));
    }
    tokens_per_story.push_back(story_tokens);
    questions_per_story.push_back(
        static_cast<double>(corpus.PairsForStory(story->story_id).size()));
  }
  auto pairs = corpus.PairsIn(split);
  for (const QAPair *p : pairs) {
    tokens_per_question.push_back(
        static_cast<double>(eval::TokenizeForRouge(p->question).size()));
    tokens_per_answer.push_back(
        static_cast<double>(eval::TokenizeForRouge(p->answer).size()));
  }
  SplitStats stats;
  stats.sections_per_story = Summarize(sections_per_story, mode);
  stats.tokens_per_story = Summarize(tokens_per_story, mode);
  stats.tokens_per_section = Summarize(tokens_per_section, mode);
  stats.questions_per_story = Summarize(questions_per_story, mode);
  stats.questions_per_section = Summarize(questions_per_section, mode);
  stats.tokens_per_question = Summarize(tokens_per_question, mode);
  stats.tokens_per_answer = Summarize(tokens_per_answer, mode);
  stats.book_count = static_cast<int>(stories.size());
  stats.qa_count = static_cast<int>(pairs.size());
  return stats;
}

namespace {

const std::vector<std::pair<const char *, Stat SplitStats::*>> &StatFields() {
  static const std::vector<std::pair<const char *, Stat SplitStats::*>> fields =
      {{"sections_per_story", &SplitStats::sections_per_story},
       {"tokens_per_story", &SplitStats::tokens_per_story},
       {"tokens_per_section", &SplitStats::tokens_per_section},
       {"questions_per_story", &SplitStats::questions_per_story},
       {"questions_per_section", &SplitStats::questions_per_section},
       {"tokens_per_question", &SplitStats::tokens_per_question},
       {"tokens_per_answer", &SplitStats::tokens_per_answer}};
  return fields;
}

}  // namespace

json StatsToJson(const SplitStats &stats) {
  json j = {{"book_count", stats.book_count}, {"qa_count", stats.qa_count}};
  for (const auto &[name, field] : StatFields()) {
    const Stat &s = stats.*field;
    j[name] = {{"mean", s.mean}, {"sd", s.sd}, {"min", s.min}, {"max", s.max}};
  }
  return j;
}

std::string StatsToTable(const SplitStats &stats) {
  std::ostringstream out;
  out << stats.book_count << " books with " << stats.qa_count
      << " QA pairs\n";
  out << std::left << std::setw(24) << "statistic" << std::right
      << std::setw(10) << "mean" << std::setw(10) << "sd" << std::setw(8)
      << "min" << std::setw(8) << "max" << "\n";
  out << std::fixed;
  for (const auto &[name, field] : StatFields()) {
    const Stat &s = stats.*field;
    out << std::left << std::setw(24) << name << std::right
        << std::setprecision(1) << std::setw(10) << s.mean << std::setw(10)
        << s.sd << std::setprecision(0) << std::setw(8) << s.min
        << std::setw(8) << s.max << "\n";
  }
  return out.str();
}

std::map<NarrativeElement, CategoryCount> CategoryDistribution(
    const Corpus &corpus, Split split) {
  if (!corpus.HasSplit(split)) {
    throw Error(ErrorCode::kInvalidArgument,
                "split '" + std::string(SplitName(split)) + "' is empty");
  }
  std::map<NarrativeElement, CategoryCount> out;
  for (auto e : kAllNarrativeElements) out[e] = {};
  auto pairs = corpus.PairsIn(split);
  for (const QAPair *p : pairs) ++out[p->element].count;
  if (!pairs.empty()) {
    for (auto &[e, c] : out) {
      c.fraction = static_cast<double>(c.count) / static_cast<double>(pairs.size());
    }
  }
  return out;
}

}  // namespace corpus
}  // namespace fablegen
