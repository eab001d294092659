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

#include "fablegen/eval.h"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

#include "fablegen/error.h"
#include "fablegen/text.h"

namespace fablegen::eval {

using nlohmann::json;

int LcsLength(const std::vector<std::string> &a, const std::vector<std::string> &b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<int> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (size_t i = 1; i <= a.size(); ++i) {
    for (size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

RougeResult RougeL(const std::vector<std::string> &candidate,
                   const std::vector<std::string> &reference) {
  RougeResult r;
  r.lcs_length = LcsLength(candidate, reference);
  r.precision = candidate.empty() ? 0.0 : static_cast<double>(r.lcs_length) / candidate.size();
  r.recall = reference.empty() ? 0.0 : static_cast<double>(r.lcs_length) / reference.size();
  // Harmonic mean of P and R, written so that values such as 0.2 come out
  // exact at the judge thresholds.
  r.f1 = r.lcs_length == 0 ? 0.0
                           : 2.0 * r.lcs_length /
                                 static_cast<double>(candidate.size() + reference.size());
  return r;
}

std::string QaConcat(std::string_view question, std::string_view answer) {
  Require(!question.empty(), "qa_concat: question must be non-empty");
  Require(!answer.empty(), "qa_concat: answer must be non-empty");
  return std::string(question) + " " + std::string(answer);
}

std::vector<GoldItem> GoldItems(const corpus::Corpus &corpus, corpus::Split split) {
  Require(corpus.HasSplit(split),
          "split '" + std::string(corpus::SplitName(split)) + "' not in corpus");
  std::vector<GoldItem> out;
  for (const corpus::QAPair *p : corpus.PairsIn(split)) {
    GoldItem g;
    g.pair_id = p->pair_id;
    for (int idx : p->section_indices) g.sections.emplace_back(p->story_id, idx);
    g.question = p->question;
    g.answer = p->answer;
    out.push_back(std::move(g));
  }
  return out;
}

GeneratedBySection GroupGenerated(const std::vector<ranker::RankedQAPair> &pairs) {
  std::map<corpus::SectionKey, std::vector<const ranker::RankedQAPair *>> grouped;
  for (const auto &p : pairs) grouped[{p.story_id, p.section_index}].push_back(&p);
  GeneratedBySection out;
  for (auto &[key, list] : grouped) {
    std::stable_sort(list.begin(), list.end(), [](const auto *a, const auto *b) {
      if (a->rank > 0 && b->rank > 0) return a->rank < b->rank;
      return false;
    });
    auto &dest = out[key];
    for (const auto *p : list) dest.push_back({p->question, p->answer});
  }
  return out;
}

BestMatch BestForGold(const GoldItem &gold, const GeneratedBySection &generated, int n) {
  Require(n >= 1, "n must be at least 1");
  const auto reference = TokenizeForRouge(QaConcat(gold.question, gold.answer));
  BestMatch best;
  if (!gold.sections.empty()) best.section = gold.sections.front();
  for (const auto &key : gold.sections) {
    auto it = generated.find(key);
    if (it == generated.end()) continue;
    const auto &list = it->second;
    const size_t limit = std::min(list.size(), static_cast<size_t>(n));
    for (size_t i = 0; i < limit; ++i) {
      const double p =
          RougeL(TokenizeForRouge(QaConcat(list[i].question, list[i].answer)), reference)
              .precision;
      if (!best.pair || p > best.score) {
        best.score = p;
        best.pair = list[i];
        best.section = key;
      }
    }
  }
  return best;
}

double MapAtN(const std::vector<GoldItem> &gold, const GeneratedBySection &generated, int n) {
  Require(n >= 1, "n must be at least 1");
  if (gold.empty()) return 0.0;
  double total = 0;
  for (const auto &g : gold) total += BestForGold(g, generated, n).score;
  return total / static_cast<double>(gold.size());
}

EvalReport EvaluateSystems(
    const corpus::Corpus &corpus, corpus::Split split,
    const std::map<std::string, std::vector<ranker::RankedQAPair>> &outputs,
    const std::vector<int> &ns) {
  Require(!ns.empty(), "at least one N is required");
  for (int n : ns) Require(n >= 1, "every N must be at least 1");
  std::vector<GoldItem> gold = GoldItems(corpus, split);

  std::set<corpus::SectionKey> known;
  for (const corpus::Story *s : corpus.StoriesIn(split)) {
    for (const auto &sec : s->sections) known.emplace(s->story_id, sec.index);
  }
  std::vector<std::string> unknown;
  for (const auto &[tag, pairs] : outputs) {
    for (const auto &p : pairs) {
      if (known.count({p.story_id, p.section_index}) == 0) {
        unknown.push_back(tag + ": " + p.story_id + " section " + std::to_string(p.section_index));
      }
    }
  }
  if (!unknown.empty()) {
    throw Error(ErrorCode::kValidation,
                std::to_string(unknown.size()) + " generated pair(s) reference sections not in the '" +
                    std::string(corpus::SplitName(split)) + "' split: " + unknown.front(),
                unknown);
  }

  EvalReport report;
  report.ns = ns;
  std::sort(report.ns.begin(), report.ns.end());
  report.ns.erase(std::unique(report.ns.begin(), report.ns.end()), report.ns.end());
  report.gold_count = static_cast<int>(gold.size());
  const int largest = report.ns.back();
  for (const auto &[tag, pairs] : outputs) {
    GeneratedBySection grouped = GroupGenerated(pairs);
    for (int n : report.ns) report.map_at[tag][n] = MapAtN(gold, grouped, n);
    for (const auto &g : gold) {
      BestMatch b = BestForGold(g, grouped, largest);
      report.diagnostics.push_back(
          {tag, g.pair_id, b.section, g.question, g.answer, b.pair, b.score});
    }
  }
  return report;
}

json ToJson(const EvalReport &report) {
  json table = json::object();
  for (const auto &[tag, by_n] : report.map_at) {
    json row = json::object();
    for (const auto &[n, v] : by_n) row["MAP@" + std::to_string(n)] = v;
    table[tag] = row;
  }
  json diags = json::array();
  for (const auto &d : report.diagnostics) {
    json j = {{"system_tag", d.system_tag},
              {"pair_id", d.pair_id},
              {"story_id", d.section.first},
              {"section_index", d.section.second},
              {"gold_question", d.gold_question},
              {"gold_answer", d.gold_answer},
              {"best_score", d.best_score}};
    if (d.best) {
      j["best_question"] = d.best->question;
      j["best_answer"] = d.best->answer;
    } else {
      j["best_question"] = nullptr;
      j["best_answer"] = nullptr;
    }
    diags.push_back(std::move(j));
  }
  return {{"ns", report.ns},
          {"gold_pairs", report.gold_count},
          {"map", table},
          {"diagnostics", diags}};
}

std::string ToTable(const EvalReport &report) {
  size_t width = 6;
  for (const auto &[tag, _] : report.map_at) width = std::max(width, tag.size());
  std::ostringstream out;
  char buf[64];
  out << std::string(width, ' ');
  for (int n : report.ns) {
    std::snprintf(buf, sizeof(buf), "  %8s", ("MAP@" + std::to_string(n)).c_str());
    out << buf;
  }
  out << "\n";
  for (const auto &[tag, by_n] : report.map_at) {
    out << tag << std::string(width - tag.size(), ' ');
    for (int n : report.ns) {
      std::snprintf(buf, sizeof(buf), "  %8.4f", by_n.at(n));
      out << buf;
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace fablegen::eval
