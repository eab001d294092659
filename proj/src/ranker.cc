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

#include "fablegen/ranker.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <tuple>

#include "fablegen/error.h"
#include "fablegen/shuffle.h"
#include "fablegen/text.h"
#include "fablegen/tokenize.h"

namespace fablegen::ranker {

using nlohmann::json;

json ToJson(const RankedQAPair &p) {
  json j = {{"story_id", p.story_id},     {"section_index", p.section_index},
            {"question", p.question},     {"answer", p.answer},
            {"score", p.score},           {"rank", p.rank},
            {"rank_hint", p.rank_hint},   {"system_tag", p.system_tag}};
  if (p.provenance) j["provenance"] = answer_extract::ToJson(*p.provenance);
  return j;
}

RankedQAPair RankedPairFromJson(const json &j) {
  RankedQAPair p;
  try {
    p.story_id = j.at("story_id").get<std::string>();
    p.section_index = j.at("section_index").get<int>();
    p.question = j.at("question").get<std::string>();
    p.answer = j.at("answer").get<std::string>();
    p.score = j.value("score", 0.0);
    p.rank = j.value("rank", 0);
    p.rank_hint = j.value("rank_hint", 0);
    p.system_tag = j.value("system_tag", "");
    if (j.contains("provenance") && !j["provenance"].is_null()) {
      p.provenance = answer_extract::CandidateFromJson(j["provenance"]);
    }
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kParse, std::string("bad ranked pair: ") + e.what());
  }
  return p;
}

std::vector<RankedQAPair> ReadJsonl(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot open " + path.string());
  std::vector<RankedQAPair> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    try {
      out.push_back(RankedPairFromJson(json::parse(line)));
    } catch (const std::exception &e) {
      throw Error(ErrorCode::kParse,
                  path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void WriteJsonl(const std::vector<RankedQAPair> &pairs, std::ostream &out) {
  for (const auto &p : pairs) out << ToJson(p).dump() << "\n";
}

// ---------------------------------------------------------------------------
// Dataset.

std::vector<RankingExample> BuildRankingDataset(const corpus::Corpus &corpus,
                                                const std::vector<const corpus::QAPair *> &gold,
                                                const std::vector<RankedQAPair> &generated,
                                                uint64_t seed) {
  Require(!gold.empty(), "ranking dataset needs at least one gold pair");
  std::vector<RankingExample> out;
  std::set<std::string> gold_groups;
  for (const corpus::QAPair *p : gold) {
    const corpus::Story &story = corpus.GetStory(p->story_id);
    std::vector<std::string> texts;
    for (int idx : p->section_indices) {
      texts.push_back(story.FindSection(idx)->text);
      gold_groups.insert(p->story_id + ":" + std::to_string(idx));
    }
    out.push_back({Join(texts, "\n"), p->question, p->answer, 1,
                   p->story_id + ":" + std::to_string(p->section_indices.front())});
  }
  for (const auto &g : generated) {
    const std::string group = g.story_id + ":" + std::to_string(g.section_index);
    const corpus::Story &story = corpus.GetStory(g.story_id);
    const corpus::Section *section = story.FindSection(g.section_index);
    if (section == nullptr) {
      throw Error(ErrorCode::kNotFound, "generated pair references unknown section " + group);
    }
    if (gold_groups.count(group) == 0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "generated pair from section " + group + " which has no gold pairs");
    }
    out.push_back({section->text, g.question, g.answer, 0, group});
  }
  SeededShuffle(&out, seed);
  return out;
}

// ---------------------------------------------------------------------------
// Layout.

std::string_view LayoutOrderName(LayoutOrder order) {
  return order == LayoutOrder::kSectionQuestionAnswer ? "section_question_answer"
                                                      : "section_answer";
}

LayoutOrder ParseLayoutOrder(std::string_view name) {
  if (name == "section_question_answer") return LayoutOrder::kSectionQuestionAnswer;
  if (name == "section_answer") return LayoutOrder::kSectionAnswer;
  throw Error(ErrorCode::kInvalidArgument, "unknown layout order '" + std::string(name) + "'");
}

std::string Serialize(const RankerInputLayout &layout, std::string_view section,
                      std::string_view question, std::string_view answer) {
  Require(!layout.separator.empty(), "layout separator must be non-empty");
  const std::string sep = " " + layout.separator + " ";
  std::string out(Trim(section));
  if (layout.order == LayoutOrder::kSectionQuestionAnswer) out += sep + Trim(question);
  out += sep + Trim(answer);
  return out;
}

// ---------------------------------------------------------------------------
// Fallback.

namespace {

std::map<std::string, double> Counts(std::string_view text) {
  std::map<std::string, double> out;
  for (auto &t : eval::TokenizeForRouge(text)) out[t] += 1;
  return out;
}

double Cosine(const std::map<std::string, double> &a, const std::map<std::string, double> &b) {
  double dot = 0, na = 0, nb = 0;
  for (const auto &[k, v] : a) {
    na += v * v;
    if (auto it = b.find(k); it != b.end()) dot += v * it->second;
  }
  for (const auto &[k, v] : b) nb += v * v;
  if (na == 0 || nb == 0) return 0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace

double FallbackRanker::Score(std::string_view section, std::string_view question,
                             std::string_view answer) const {
  const std::string qa = std::string(question) + " " + std::string(answer);
  return std::clamp(Cosine(Counts(qa), Counts(section)), 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Logistic ranker.

namespace {

constexpr uint64_t kRankerMask = (1ull << LogisticRanker::kHashBits) - 1;

double Sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

LogisticRanker::LogisticRanker(RankerInputLayout layout)
    : layout_(std::move(layout)), weights_(size_t{1} << kHashBits, 0.0) {}

std::vector<uint32_t> LogisticRanker::Features(std::string_view section,
                                               std::string_view question,
                                               std::string_view answer) const {
  const std::string serialized = Serialize(layout_, section, question, answer);
  const std::string sep = " " + layout_.separator + " ";
  std::vector<uint32_t> out;
  size_t begin = 0;
  uint64_t segment = 0;
  while (true) {
    size_t at = serialized.find(sep, begin);
    std::string_view piece = std::string_view(serialized).substr(
        begin, at == std::string::npos ? std::string::npos : at - begin);
    std::set<std::string> seen;
    for (auto &t : eval::TokenizeForRouge(piece)) {
      if (!seen.insert(t).second) continue;
      out.push_back(static_cast<uint32_t>(Fnv1a(t, Fnv1a(std::to_string(segment))) & kRankerMask));
    }
    if (at == std::string::npos) break;
    begin = at + sep.size();
    ++segment;
  }
  return out;
}

double LogisticRanker::Score(std::string_view section, std::string_view question,
                             std::string_view answer) const {
  double z = bias_;
  for (uint32_t f : Features(section, question, answer)) z += weights_[f];
  return std::clamp(Sigmoid(z), 0.0, 1.0);
}

void LogisticRanker::Save(const std::filesystem::path &dir) const {
  std::filesystem::create_directories(dir);
  json weights = json::array();
  for (size_t i = 0; i < weights_.size(); ++i) {
    if (weights_[i] != 0) weights.push_back({i, weights_[i]});
  }
  std::ofstream w(dir / "weights.json");
  std::ofstream l(dir / "layout.json");
  if (!w || !l) throw Error(ErrorCode::kInvalidArgument, "cannot write ranker to " + dir.string());
  w << json{{"format", "logistic-v1"},
            {"hash_bits", kHashBits},
            {"bias", bias_},
            {"weights", weights}}
           .dump()
    << "\n";
  l << json{{"order", LayoutOrderName(layout_.order)}, {"separator", layout_.separator}}.dump(2)
    << "\n";
}

std::unique_ptr<LogisticRanker> LogisticRanker::Load(const std::filesystem::path &dir) {
  std::ifstream w(dir / "weights.json");
  std::ifstream l(dir / "layout.json");
  if (!w || !l) {
    throw Error(ErrorCode::kNotFound, "no ranker (weights.json + layout.json) in " + dir.string());
  }
  try {
    json lj = json::parse(l);
    RankerInputLayout layout{ParseLayoutOrder(lj.at("order").get<std::string>()),
                             lj.at("separator").get<std::string>()};
    auto r = std::make_unique<LogisticRanker>(layout);
    json wj = json::parse(w);
    if (wj.at("format") != "logistic-v1" || wj.at("hash_bits") != kHashBits) {
      throw Error(ErrorCode::kParse, "unsupported ranker format in " + dir.string());
    }
    r->bias_ = wj.at("bias").get<double>();
    for (const auto &e : wj.at("weights")) r->weights_.at(e.at(0).get<size_t>()) = e.at(1).get<double>();
    return r;
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kParse, "bad ranker files in " + dir.string() + ": " + e.what());
  }
}

json ToJson(const ClassifierMetrics &m) {
  return {{"accuracy", m.accuracy},
          {"precision", m.precision},
          {"recall", m.recall},
          {"f1", m.f1},
          {"train_examples", m.train_examples},
          {"held_out_examples", m.held_out_examples}};
}

struct Trainer {
  static void Fit(LogisticRanker *r, const std::vector<const RankingExample *> &train,
                  const TrainHyperparams &p) {
    std::vector<std::vector<uint32_t>> feats;
    feats.reserve(train.size());
    for (const auto *e : train) feats.push_back(r->Features(e->section_text, e->question, e->answer));
    std::vector<size_t> order(train.size());
    std::iota(order.begin(), order.end(), 0);
    for (int epoch = 0; epoch < p.epochs; ++epoch) {
      SeededShuffle(&order, p.seed + static_cast<uint64_t>(epoch));
      for (size_t i : order) {
        const auto &f = feats[i];
        double z = r->bias_;
        for (uint32_t k : f) z += r->weights_[k];
        const double g = Sigmoid(z) - train[i]->label;
        r->bias_ -= p.learning_rate * g;
        for (uint32_t k : f) {
          r->weights_[k] -= p.learning_rate * (g + p.l2 * r->weights_[k]);
        }
      }
    }
  }
};

TrainResult TrainRanker(const std::vector<RankingExample> &examples,
                        const RankerInputLayout &layout, const TrainHyperparams &params) {
  Require(!examples.empty(), "ranker training needs examples");
  Require(params.epochs >= 1 && params.learning_rate > 0, "bad ranker hyperparameters");
  Require(!layout.separator.empty(), "layout separator must be non-empty");
  bool pos = false, neg = false;
  for (const auto &e : examples) (e.label == 1 ? pos : neg) = true;
  if (!pos || !neg) {
    throw Error(ErrorCode::kRanker, "ranker training needs both gold and generated examples");
  }

  // Hold out whole sections in a seeded order.
  std::set<std::string> group_set;
  for (const auto &e : examples) group_set.insert(e.group);
  std::vector<std::string> groups(group_set.begin(), group_set.end());
  SeededShuffle(&groups, params.seed);
  size_t n_hold = 0;
  if (groups.size() >= 2 && params.held_out_fraction > 0) {
    n_hold = std::max<size_t>(1, static_cast<size_t>(std::llround(params.held_out_fraction *
                                                                  groups.size())));
    n_hold = std::min(n_hold, groups.size() - 1);
  }
  std::set<std::string> held(groups.begin(), groups.begin() + n_hold);
  std::vector<const RankingExample *> train, test;
  for (const auto &e : examples) (held.count(e.group) ? test : train).push_back(&e);
  bool tpos = false, tneg = false;
  for (const auto *e : train) (e->label == 1 ? tpos : tneg) = true;
  if (!tpos || !tneg) {
    // The held-out sections took every example of one class.
    train.clear();
    test.clear();
    for (const auto &e : examples) train.push_back(&e);
  }

  TrainResult result;
  result.ranker = std::make_unique<LogisticRanker>(layout);
  Trainer::Fit(result.ranker.get(), train, params);

  const auto &eval_set = test.empty() ? train : test;
  int tp = 0, fp = 0, fn = 0, correct = 0;
  for (const auto *e : eval_set) {
    const bool predicted = result.ranker->Score(e->section_text, e->question, e->answer) >= 0.5;
    const bool actual = e->label == 1;
    correct += predicted == actual;
    tp += predicted && actual;
    fp += predicted && !actual;
    fn += !predicted && actual;
  }
  ClassifierMetrics &m = result.metrics;
  m.train_examples = static_cast<int>(train.size());
  m.held_out_examples = static_cast<int>(test.size());
  m.accuracy = eval_set.empty() ? 0 : static_cast<double>(correct) / eval_set.size();
  m.precision = tp + fp == 0 ? 0 : static_cast<double>(tp) / (tp + fp);
  m.recall = tp + fn == 0 ? 0 : static_cast<double>(tp) / (tp + fn);
  m.f1 = m.precision + m.recall == 0 ? 0 : 2 * m.precision * m.recall / (m.precision + m.recall);
  return result;
}

double Score(std::string_view section, std::string_view question, std::string_view answer,
             const Ranker &ranker, const RankerInputLayout &layout) {
  if (!(layout == ranker.layout())) {
    throw Error(ErrorCode::kRanker,
                "layout mismatch: ranker '" + ranker.id() + "' expects " +
                    std::string(LayoutOrderName(ranker.layout().order)) + " with separator '" +
                    ranker.layout().separator + "'");
  }
  return ranker.Score(section, question, answer);
}

std::unique_ptr<Ranker> MakeRanker(std::string_view ranker_id) {
  if (ranker_id == "fallback") return std::make_unique<FallbackRanker>();
  if (StartsWith(ranker_id, "logistic:")) {
    return LogisticRanker::Load(std::string(ranker_id.substr(9)));
  }
  throw Error(ErrorCode::kNotFound, "unknown ranker '" + std::string(ranker_id) + "'");
}

// ---------------------------------------------------------------------------
// Selection.

std::vector<RankedQAPair> SelectTopN(std::vector<RankedQAPair> candidates, int n) {
  Require(n >= 1, "top_n must be at least 1");
  auto better = [](const RankedQAPair &a, const RankedQAPair &b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.rank_hint != b.rank_hint) return a.rank_hint < b.rank_hint;
    if (a.question != b.question) return a.question < b.question;
    return a.answer < b.answer;
  };
  std::stable_sort(candidates.begin(), candidates.end(), better);
  std::vector<RankedQAPair> out;
  std::set<std::pair<std::string, std::string>> seen;
  for (auto &c : candidates) {
    if (static_cast<int>(out.size()) >= n) break;
    if (!seen.emplace(c.question, c.answer).second) continue;
    out.push_back(std::move(c));
  }
  for (size_t i = 0; i < out.size(); ++i) out[i].rank = static_cast<int>(i) + 1;
  return out;
}

}  // namespace fablegen::ranker
