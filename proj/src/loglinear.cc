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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "fablegen/error.h"
#include "fablegen/qgen.h"
#include "fablegen/shuffle.h"
#include "fablegen/text.h"

namespace fablegen::qgen {

using nlohmann::json;

namespace {

constexpr std::string_view kBos = "<s>";
constexpr std::string_view kEos = "</s>";
constexpr int kBagLimit = 16;
constexpr uint64_t kMask = (1ull << LoglinearModel::kHashBits) - 1;

enum Template : uint64_t {
  kUnigram = 1,
  kBigram,
  kInSource,
  kInSourceWord,
  kAligned,
  kFollows,
  kPosition,
  kBag,
  kEosOffset,
  kRepeat,
};

uint64_t Mix(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint32_t Feature(uint64_t tmpl, uint64_t a, uint64_t b = 0) {
  return static_cast<uint32_t>(Mix(Mix(tmpl * 0x100000001b3ULL ^ a) ^ b) & kMask);
}

uint64_t Id(std::string_view token) { return Fnv1a(token); }

}  // namespace

std::vector<std::string> ModelTokens(std::string_view text) {
  std::vector<std::string> out;
  for (const auto &chunk : SplitWhitespace(text)) {
    if (chunk == kSeparator) {
      out.push_back(chunk);
      continue;
    }
    std::u32string u = DecodeUtf8(chunk);
    std::u32string word;
    for (size_t i = 0; i < u.size(); ++i) {
      char32_t c = u[i];
      bool inner_apostrophe = (c == '\'' || c == 0x2019) && !word.empty() && i + 1 < u.size() &&
                              !IsPunct(u[i + 1]);
      if (IsPunct(c) && !inner_apostrophe) {
        if (!word.empty()) out.push_back(EncodeUtf8(word));
        word.clear();
        out.push_back(EncodeUtf8(std::u32string(1, c)));
      } else {
        word.push_back(ToLower(c));
      }
    }
    if (!word.empty()) out.push_back(EncodeUtf8(word));
  }
  return out;
}

std::string Detokenize(const std::vector<std::string> &tokens) {
  std::string out;
  for (const auto &t : tokens) {
    bool attach = t == "." || t == "," || t == "?" || t == "!" || t == ";" || t == ":" ||
                  t == ")" || t == "'s";
    if (!out.empty() && !attach) out += ' ';
    out += t;
  }
  if (!out.empty() && out[0] >= 'a' && out[0] <= 'z') out[0] = static_cast<char>(out[0] - 32);
  return out;
}

struct LoglinearModel::Context {
  std::vector<std::string> source;
  std::vector<uint64_t> answer_ids;  // tokens before the separator
  std::vector<uint64_t> bag;
  std::unordered_set<uint64_t> in_source;
  std::unordered_map<uint64_t, std::unordered_set<uint64_t>> successors;
  std::vector<std::string> candidates;
  std::vector<uint64_t> candidate_ids;
};

LoglinearModel::LoglinearModel() : weights_(size_t{1} << kHashBits, 0.0) {}

LoglinearModel::Context LoglinearModel::MakeContext(std::string_view input) const {
  Context ctx;
  ctx.source = ModelTokens(input);
  auto sep = std::find(ctx.source.begin(), ctx.source.end(), kSeparator);
  for (auto it = ctx.source.begin(); it != sep; ++it) ctx.answer_ids.push_back(Id(*it));
  std::unordered_set<uint64_t> bag_seen;
  for (uint64_t id : ctx.answer_ids) {
    if (static_cast<int>(ctx.bag.size()) >= kBagLimit) break;
    if (bag_seen.insert(id).second) ctx.bag.push_back(id);
  }
  uint64_t prev = Id(kBos);
  for (const auto &t : ctx.source) {
    if (t == kSeparator) {
      prev = Id(kBos);
      continue;
    }
    uint64_t id = Id(t);
    ctx.in_source.insert(id);
    ctx.successors[prev].insert(id);
    prev = id;
  }
  ctx.candidates = Candidates(ctx);
  for (const auto &c : ctx.candidates) ctx.candidate_ids.push_back(Id(c));
  return ctx;
}

std::vector<std::string> LoglinearModel::Candidates(const Context &ctx) const {
  std::vector<std::string> out = vocab_;
  std::unordered_set<std::string> have(vocab_.begin(), vocab_.end());
  for (const auto &t : ctx.source) {
    if (t != kSeparator && have.insert(t).second) out.push_back(t);
  }
  if (have.insert(std::string(kEos)).second) out.push_back(std::string(kEos));
  return out;
}

template <typename Fn>
void LoglinearModel::ForEachFeature(const Context &ctx, const std::vector<std::string> &prefix,
                                    int candidate, Fn &&fn) const {
  const uint64_t w = ctx.candidate_ids[candidate];
  const size_t t = prefix.size();
  const uint64_t prev = t == 0 ? Id(kBos) : Id(prefix.back());
  fn(Feature(kUnigram, w));
  fn(Feature(kBigram, prev, w));
  if (ctx.in_source.count(w) > 0) {
    fn(Feature(kInSource, 0));
    fn(Feature(kInSourceWord, w));
  }
  if (t < ctx.answer_ids.size() && ctx.answer_ids[t] == w) fn(Feature(kAligned, 0));
  if (auto it = ctx.successors.find(prev); it != ctx.successors.end() && it->second.count(w)) {
    fn(Feature(kFollows, 0));
  }
  fn(Feature(kPosition, std::min<size_t>(t, 15), w));
  for (uint64_t s : ctx.bag) fn(Feature(kBag, s, w));
  if (ctx.candidates[candidate] == kEos) {
    long offset = static_cast<long>(t) - static_cast<long>(ctx.answer_ids.size());
    fn(Feature(kEosOffset, static_cast<uint64_t>(std::clamp(offset, -8L, 8L) + 8)));
  }
  if (t > 0 && prev == w) fn(Feature(kRepeat, 0));
}

void LoglinearModel::Scores(const Context &ctx, const std::vector<std::string> &prefix,
                            std::vector<double> *out) const {
  const int n = static_cast<int>(ctx.candidates.size());
  out->assign(n, 0.0);
  for (int c = 0; c < n; ++c) {
    double s = 0;
    ForEachFeature(ctx, prefix, c, [&](uint32_t f) { s += weights_[f]; });
    (*out)[c] = s;
  }
}

namespace {

// In-place log-softmax.
void LogSoftmax(std::vector<double> *v) {
  double m = *std::max_element(v->begin(), v->end());
  double z = 0;
  for (double x : *v) z += std::exp(x - m);
  double lz = m + std::log(z);
  for (double &x : *v) x -= lz;
}

int IndexOf(const std::vector<std::string> &v, const std::string &t) {
  auto it = std::find(v.begin(), v.end(), t);
  return it == v.end() ? -1 : static_cast<int>(it - v.begin());
}

}  // namespace

void LoglinearModel::AddVocabulary(const std::vector<TrainingPair> &pairs) {
  std::set<std::string> all(vocab_.begin(), vocab_.end());
  for (const auto &p : pairs) {
    for (auto &t : ModelTokens(p.target)) all.insert(std::move(t));
  }
  all.insert(std::string(kEos));
  vocab_.assign(all.begin(), all.end());
}

double LoglinearModel::Loss(const std::vector<TrainingPair> &pairs) const {
  double total = 0;
  long count = 0;
  std::vector<double> scores;
  for (const auto &p : pairs) {
    Context ctx = MakeContext(p.input);
    std::vector<std::string> target = ModelTokens(p.target);
    target.emplace_back(kEos);
    std::vector<std::string> prefix;
    for (const auto &y : target) {
      int gold = IndexOf(ctx.candidates, y);
      if (gold >= 0) {
        Scores(ctx, prefix, &scores);
        LogSoftmax(&scores);
        total -= scores[gold];
        ++count;
      }
      prefix.push_back(y);
    }
  }
  return count == 0 ? 0.0 : total / static_cast<double>(count);
}

void LoglinearModel::TrainEpoch(const std::vector<TrainingPair> &pairs,
                                const FinetuneConfig &config, uint64_t epoch_seed) {
  std::vector<size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  SeededShuffle(&order, epoch_seed);
  std::unordered_map<uint32_t, double> grad;
  std::vector<double> scores;
  int in_batch = 0;
  auto flush = [&] {
    if (in_batch == 0) return;
    const double step = config.learning_rate / in_batch;
    for (const auto &[f, g] : grad) weights_[f] -= step * g;
    grad.clear();
    in_batch = 0;
  };
  for (size_t idx : order) {
    const auto &p = pairs[idx];
    Context ctx = MakeContext(p.input);
    std::vector<std::string> target = ModelTokens(p.target);
    target.emplace_back(kEos);
    std::vector<std::string> prefix;
    for (const auto &y : target) {
      int gold = IndexOf(ctx.candidates, y);
      if (gold >= 0) {
        Scores(ctx, prefix, &scores);
        LogSoftmax(&scores);
        for (int c = 0; c < static_cast<int>(scores.size()); ++c) {
          double g = std::exp(scores[c]) - (c == gold ? 1.0 : 0.0);
          if (g == 0) continue;
          ForEachFeature(ctx, prefix, c, [&](uint32_t f) { grad[f] += g; });
        }
      }
      prefix.push_back(y);
    }
    if (++in_batch == config.batch_size) flush();
  }
  flush();
}

std::vector<std::string> LoglinearModel::Decode(std::string_view input,
                                                const GenerationConfig &config) const {
  Context ctx = MakeContext(input);
  const int k = config.decoding == Decoding::kBeam ? config.beam_k : 1;
  struct Hyp {
    std::vector<std::string> tokens;
    double score = 0;
  };
  std::vector<Hyp> beam = {{}};
  std::vector<Hyp> finished;
  std::vector<double> scores;
  for (int step = 0; step < config.max_output_tokens && !beam.empty(); ++step) {
    std::vector<Hyp> next;
    for (const auto &h : beam) {
      Scores(ctx, h.tokens, &scores);
      LogSoftmax(&scores);
      std::vector<int> idx(scores.size());
      std::iota(idx.begin(), idx.end(), 0);
      const int take = std::min<int>(k, static_cast<int>(idx.size()));
      std::partial_sort(idx.begin(), idx.begin() + take, idx.end(), [&](int a, int b) {
        return scores[a] > scores[b] || (scores[a] == scores[b] && a < b);
      });
      for (int j = 0; j < take; ++j) {
        Hyp n = h;
        n.score += scores[idx[j]];
        n.tokens.push_back(ctx.candidates[idx[j]]);
        next.push_back(std::move(n));
      }
    }
    std::stable_sort(next.begin(), next.end(),
                     [](const Hyp &a, const Hyp &b) { return a.score > b.score; });
    beam.clear();
    for (auto &h : next) {
      if (static_cast<int>(beam.size()) >= k) break;
      if (h.tokens.back() == kEos) {
        h.tokens.pop_back();
        finished.push_back(std::move(h));
      } else {
        beam.push_back(std::move(h));
      }
    }
    if (static_cast<int>(finished.size()) >= k) break;
  }
  for (auto &h : beam) finished.push_back(std::move(h));
  auto best = std::stable_partition(finished.begin(), finished.end(),
                                    [](const Hyp &h) { return !h.tokens.empty(); });
  if (best == finished.begin()) return {};
  auto top = std::max_element(finished.begin(), best, [](const Hyp &a, const Hyp &b) {
    return a.score < b.score;
  });
  return top->tokens;
}

std::string LoglinearModel::Generate(std::string_view input,
                                     const GenerationConfig &config) const {
  return Detokenize(Decode(input, config));
}

void LoglinearModel::Save(const std::filesystem::path &dir) const {
  std::filesystem::create_directories(dir);
  json weights = json::array();
  for (size_t i = 0; i < weights_.size(); ++i) {
    if (weights_[i] != 0) weights.push_back({i, weights_[i]});
  }
  json j = {{"format", "loglinear-v1"},
            {"hash_bits", kHashBits},
            {"vocab", vocab_},
            {"weights", weights}};
  std::ofstream out(dir / "model.json");
  if (!out) throw Error(ErrorCode::kInvalidArgument, "cannot write " + (dir / "model.json").string());
  out << j.dump() << "\n";
}

LoglinearModel LoglinearModel::Load(const std::filesystem::path &dir) {
  std::ifstream in(dir / "model.json");
  if (!in) {
    throw Error(ErrorCode::kBackendUnavailable,
                "learned backend unavailable: no model at " + dir.string());
  }
  LoglinearModel m;
  try {
    json j = json::parse(in);
    if (j.at("format") != "loglinear-v1" || j.at("hash_bits") != kHashBits) {
      throw Error(ErrorCode::kParse, "unsupported model format in " + dir.string());
    }
    m.vocab_ = j.at("vocab").get<std::vector<std::string>>();
    for (const auto &w : j.at("weights")) {
      m.weights_.at(w.at(0).get<size_t>()) = w.at(1).get<double>();
    }
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kParse, "bad model file in " + dir.string() + ": " + e.what());
  }
  return m;
}

// ---------------------------------------------------------------------------
// Backend.

LoglinearBackend::LoglinearBackend(std::shared_ptr<const LoglinearModel> question_model,
                                   std::shared_ptr<const LoglinearModel> answer_model,
                                   std::string id)
    : question_model_(std::move(question_model)),
      answer_model_(std::move(answer_model)),
      id_(std::move(id)) {}

namespace {

const LoglinearModel &Need(const std::shared_ptr<const LoglinearModel> &m,
                           std::string_view what, const std::string &id) {
  if (!m) {
    throw Error(ErrorCode::kBackendUnavailable,
                "learned backend unavailable: '" + id + "' has no " + std::string(what) +
                    " model");
  }
  return *m;
}

std::string Input(std::string_view first, std::string_view section) {
  return std::string(first) + " " + std::string(kSeparator) + " " + std::string(section);
}

}  // namespace

std::string LoglinearBackend::Question(const QgRequest &request,
                                       const GenerationConfig &config) const {
  return Need(question_model_, "question", id_)
      .Generate(Input(request.answer_text, request.section_text), config);
}

std::string LoglinearBackend::Answer(std::string_view section_text, std::string_view question,
                                     const GenerationConfig &config) const {
  return Need(answer_model_, "answer", id_).Generate(Input(question, section_text), config);
}

std::vector<std::string> LoglinearBackend::QuestionsFromSection(
    std::string_view section_text, const GenerationConfig &config) const {
  const LoglinearModel &m = Need(question_model_, "question", id_);
  lingann::ReferenceBackend annotator;
  lingann::Annotation a = lingann::Annotate(section_text, annotator);
  std::vector<std::string> out;
  for (const auto &s : a.sentences) {
    std::string sentence = a.SpanText(s);
    if (ModelTokens(sentence).empty()) continue;
    std::string q = m.Generate(Input(sentence, section_text), config);
    if (!Trim(q).empty()) out.push_back(q);
  }
  return out;
}

FinetuneResult Finetune(std::string_view backend_spec, const std::vector<TrainingPair> &pairs,
                        const FinetuneConfig &config) {
  Require(config.epochs >= 1, "epochs must be positive");
  Require(config.batch_size >= 1, "batch_size must be positive");
  Require(config.learning_rate > 0, "learning_rate must be positive");
  Require(!pairs.empty(), "finetune needs at least one training pair");
  if (backend_spec != "loglinear") {
    throw Error(ErrorCode::kBackendUnavailable,
                "learned backend unavailable: cannot train '" + std::string(backend_spec) +
                    "' in this build");
  }
  const auto start = std::chrono::steady_clock::now();
  FinetuneResult r;
  r.model = std::make_shared<LoglinearModel>();
  r.model->AddVocabulary(pairs);
  r.examples = static_cast<int>(pairs.size());
  r.initial_loss = r.model->Loss(pairs);
  for (int e = 0; e < config.epochs; ++e) {
    r.model->TrainEpoch(pairs, config, Mix(config.seed + static_cast<uint64_t>(e)));
    r.loss_curve.push_back(r.model->Loss(pairs));
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

json MetricsJson(const FinetuneResult &result, const FinetuneConfig &config,
                 std::string_view backend_spec, Direction direction) {
  return {{"backend", backend_spec},
          {"direction", DirectionName(direction)},
          {"learning_rate", config.learning_rate},
          {"batch_size", config.batch_size},
          {"epochs", config.epochs},
          {"train_source", TrainSourceName(config.train_source)},
          {"seed", config.seed},
          {"examples", result.examples},
          {"initial_loss", result.initial_loss},
          {"loss_curve", result.loss_curve},
          {"seconds", result.seconds}};
}

std::unique_ptr<QgBackend> MakeQgBackend(std::string_view backend_id) {
  if (backend_id == "template") return std::make_unique<TemplateBackend>();
  if (backend_id == "loglinear") {
    auto m = std::make_shared<const LoglinearModel>();
    return std::make_unique<LoglinearBackend>(m, m, "loglinear");
  }
  if (StartsWith(backend_id, "loglinear:")) {
    std::filesystem::path dir(std::string(backend_id.substr(10)));
    std::shared_ptr<const LoglinearModel> q, a;
    if (std::filesystem::exists(dir / "question" / "model.json")) {
      q = std::make_shared<const LoglinearModel>(LoglinearModel::Load(dir / "question"));
    }
    if (std::filesystem::exists(dir / "answer" / "model.json")) {
      a = std::make_shared<const LoglinearModel>(LoglinearModel::Load(dir / "answer"));
    }
    if (!q && !a) {
      throw Error(ErrorCode::kBackendUnavailable,
                  "learned backend unavailable: no models under " + dir.string());
    }
    return std::make_unique<LoglinearBackend>(q, a, std::string(backend_id));
  }
  throw Error(ErrorCode::kBackendUnavailable,
              "learned backend unavailable: '" + std::string(backend_id) +
                  "' is not supported in this build");
}

}  // namespace fablegen::qgen
