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

// Rouge-L and MAP@N over question+answer strings.
//
// MAP@N: for every gold pair g, best(g) is the highest Rouge-L precision of
// qa_concat(p) (candidate) against qa_concat(g) (reference) over the first N
// generated pairs p of g's section(s); the result is the mean of best(g)
// over all gold pairs. Sections without generated pairs score 0 for their
// gold pairs; sections without gold pairs do not contribute.

#ifndef FABLEGEN_EVAL_H_
#define FABLEGEN_EVAL_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fablegen/corpus.h"
#include "fablegen/ranker.h"
#include "fablegen/tokenize.h"
#include "json.hpp"

namespace fablegen::eval {

struct RougeResult {
  int lcs_length = 0;
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

int LcsLength(const std::vector<std::string> &a, const std::vector<std::string> &b);
RougeResult RougeL(const std::vector<std::string> &candidate,
                   const std::vector<std::string> &reference);

// question + " " + answer; both must be non-empty.
std::string QaConcat(std::string_view question, std::string_view answer);

struct GoldItem {
  std::string pair_id;
  std::vector<corpus::SectionKey> sections;
  std::string question;
  std::string answer;
};

struct GeneratedQA {
  std::string question;
  std::string answer;
};

using GeneratedBySection = std::map<corpus::SectionKey, std::vector<GeneratedQA>>;

// One item per gold pair of the split; multi-section pairs list every
// referenced section and are matched against the union of their top lists.
std::vector<GoldItem> GoldItems(const corpus::Corpus &corpus, corpus::Split split);

// Groups pairs by section keeping the given order; pairs carrying a rank are
// ordered by it.
GeneratedBySection GroupGenerated(const std::vector<ranker::RankedQAPair> &pairs);

struct BestMatch {
  double score = 0;
  std::optional<GeneratedQA> pair;
  corpus::SectionKey section;
};

BestMatch BestForGold(const GoldItem &gold, const GeneratedBySection &generated, int n);

double MapAtN(const std::vector<GoldItem> &gold, const GeneratedBySection &generated, int n);

struct Diagnostic {
  std::string system_tag;
  std::string pair_id;
  corpus::SectionKey section;
  std::string gold_question;
  std::string gold_answer;
  std::optional<GeneratedQA> best;
  double best_score = 0;
};

struct EvalReport {
  std::vector<int> ns;
  std::map<std::string, std::map<int, double>> map_at;
  std::vector<Diagnostic> diagnostics;  // at the largest N
  int gold_count = 0;
};

// `outputs` maps a system tag to its generated pairs for sections of
// `split`. A pair pointing at a section outside the split is an error.
EvalReport EvaluateSystems(const corpus::Corpus &corpus, corpus::Split split,
                           const std::map<std::string, std::vector<ranker::RankedQAPair>> &outputs,
                           const std::vector<int> &ns);

nlohmann::json ToJson(const EvalReport &report);
std::string ToTable(const EvalReport &report);

}  // namespace fablegen::eval

#endif  // FABLEGEN_EVAL_H_
