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

// fablegen command-line entry point.
//
// Exit codes: 0 success, 1 usage or library error, 3 when a book run
// finished but some sections failed (their errors go to stderr).

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fablegen/answer_extract.h"
#include "fablegen/api.h"
#include "fablegen/corpus.h"
#include "fablegen/error.h"
#include "fablegen/eval.h"
#include "fablegen/lingann.h"
#include "fablegen/pipeline.h"
#include "fablegen/qgen.h"
#include "fablegen/ranker.h"
#include "fablegen/session.h"
#include "fablegen/text.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace fablegen {
namespace {

struct CorpusOptions {
  std::string root;
  std::string profile = "auto";
};

void AddCorpusOptions(CLI::App *app, CorpusOptions *opts, bool required) {
  auto *opt = app->add_option("--corpus", opts->root, "Corpus root directory");
  if (required) opt->required();
  app->add_option("--profile", opts->profile, "canonical_json, csv_per_book or auto")
      ->check(CLI::IsMember({"auto", "canonical_json", "csv_per_book"}));
}

corpus::Corpus LoadFromOptions(const CorpusOptions &opts) {
  corpus::FormatProfile profile;
  if (opts.profile == "auto") {
    profile = fs::is_directory(fs::path(opts.root) / "section-stories")
                  ? corpus::FormatProfile::kCsvPerBook
                  : corpus::FormatProfile::kCanonicalJson;
  } else {
    profile = corpus::ParseFormatProfile(opts.profile);
  }
  return corpus::LoadCorpus(opts.root, profile);
}

// `book` is a story file path, or a story id when a corpus is given.
std::shared_ptr<const corpus::Corpus> LoadBook(const std::string &book,
                                               const CorpusOptions &opts,
                                               std::string *story_id) {
  if (!opts.root.empty()) {
    auto c = std::make_shared<const corpus::Corpus>(LoadFromOptions(opts));
    *story_id = c->GetStory(book).story_id;
    return c;
  }
  if (!fs::is_regular_file(book)) {
    throw Error(ErrorCode::kNotFound,
                "book file not found: " + book + " (pass --corpus to select by story id)");
  }
  auto [story, pairs] = corpus::LoadStoryFile(book);
  *story_id = story.story_id;
  return std::make_shared<const corpus::Corpus>(
      corpus::Corpus({std::move(story)}, std::move(pairs)));
}

std::vector<ranker::RankedQAPair> ReadPairs(const std::vector<std::string> &paths) {
  std::vector<ranker::RankedQAPair> out;
  for (const auto &p : paths) {
    auto pairs = ranker::ReadJsonl(p);
    out.insert(out.end(), pairs.begin(), pairs.end());
  }
  return out;
}

void WriteText(const std::string &path, const std::string &text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kInvalidArgument, "cannot write " + path);
  out << text;
}

struct PipelineOptions {
  std::string mode = "three_stage";
  int top_n = 3;
  std::string qg = "template";
  std::string ranker = "fallback";
  std::string annotator = "reference";
  std::string layout = "section_question_answer";
  int workers = 1;
  int max_candidates = 32;
  std::string system_tag;
  std::string decoding = "greedy";
  int beam_k = 1;
};

void AddPipelineOptions(CLI::App *app, PipelineOptions *o) {
  app->add_option("--mode", o->mode, "three_stage or two_step")
      ->check(CLI::IsMember({"three_stage", "two_step", "two_step_baseline"}));
  app->add_option("--top-n", o->top_n, "Pairs kept per section")->check(CLI::PositiveNumber);
  app->add_option("--qg", o->qg, "template, loglinear:<dir>");
  app->add_option("--ranker", o->ranker, "fallback or logistic:<dir>");
  app->add_option("--annotator", o->annotator, "reference or command:<program>");
  app->add_option("--layout", o->layout, "section_question_answer or section_answer");
  app->add_option("--workers", o->workers, "Concurrent sections")->check(CLI::PositiveNumber);
  app->add_option("--max-candidates", o->max_candidates, "Candidate answers per section")
      ->check(CLI::PositiveNumber);
  app->add_option("--system-tag", o->system_tag, "Tag written on every pair");
  app->add_option("--decoding", o->decoding, "greedy or beam")
      ->check(CLI::IsMember({"greedy", "beam"}));
  app->add_option("--beam-k", o->beam_k, "Beam width")->check(CLI::PositiveNumber);
}

pipeline::PipelineConfig ToConfig(const PipelineOptions &o) {
  pipeline::PipelineConfig c;
  c.mode = pipeline::ParseMode(o.mode);
  c.top_n = o.top_n;
  c.qg_backend = o.qg;
  c.ranker = o.ranker;
  c.annotation_backend = o.annotator;
  c.layout.order = ranker::ParseLayoutOrder(o.layout);
  c.workers = o.workers;
  c.limits.max_candidates_per_section = o.max_candidates;
  c.system_tag = o.system_tag;
  c.generation.backend_id = o.qg;
  c.generation.decoding = o.decoding == "beam" ? qgen::Decoding::kBeam : qgen::Decoding::kGreedy;
  c.generation.beam_k = o.beam_k;
  return c;
}

std::vector<int> ParseNs(const std::string &text) {
  std::vector<int> ns;
  for (const auto &part : Split(text, ',')) {
    const std::string t(Trim(part));
    if (t.empty()) continue;
    size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(t, &used);
    } catch (const std::logic_error &) {
      used = 0;
    }
    if (used != t.size() || v < 1) {
      throw Error(ErrorCode::kInvalidArgument, "bad N value '" + t + "' in --n");
    }
    ns.push_back(v);
  }
  Require(!ns.empty(), "--n needs at least one value");
  return ns;
}

api::HttpServer *g_server = nullptr;

void HandleSignal(int) {
  if (g_server != nullptr) g_server->Stop();
}

}  // namespace
}  // namespace fablegen

int main(int argc, char **argv) {
  using namespace fablegen;
  CLI::App app{"fablegen: question-answer generation for storybooks"};
  app.require_subcommand(1);

  // corpus -----------------------------------------------------------------
  auto *corpus_cmd = app.add_subcommand("corpus", "Corpus tools");
  corpus_cmd->require_subcommand(1);
  CorpusOptions stats_corpus;
  std::string stats_split = "train", stats_format = "table", stats_sd = "population",
              stats_out;
  auto *stats = corpus_cmd->add_subcommand("stats", "Per-split statistics");
  AddCorpusOptions(stats, &stats_corpus, true);
  stats->add_option("--split", stats_split, "train, validation or test");
  stats->add_option("--format", stats_format, "table or json")
      ->check(CLI::IsMember({"table", "json"}));
  stats->add_option("--sd", stats_sd, "population or sample")
      ->check(CLI::IsMember({"population", "sample"}));
  stats->add_option("--out", stats_out, "Output file (default stdout)");

  CorpusOptions convert_corpus;
  std::string convert_out;
  auto *convert = corpus_cmd->add_subcommand("convert", "Write the canonical JSON layout");
  AddCorpusOptions(convert, &convert_corpus, true);
  convert->add_option("--out", convert_out, "Destination root")->required();

  // extract ----------------------------------------------------------------
  CorpusOptions extract_corpus;
  std::string extract_book, extract_annotator = "reference", extract_out;
  int extract_section = 1, extract_max = 32;
  bool extract_json = false, extract_annotation = false;
  auto *extract = app.add_subcommand("extract", "Candidate answers for one section");
  AddCorpusOptions(extract, &extract_corpus, false);
  extract->add_option("--book", extract_book, "Story file, or story id with --corpus")
      ->required();
  extract->add_option("--section", extract_section, "1-based section index")->required();
  extract->add_option("--annotator", extract_annotator, "reference or command:<program>");
  extract->add_option("--max-candidates", extract_max, "Limit")->check(CLI::PositiveNumber);
  extract->add_flag("--json", extract_json, "JSON output");
  extract->add_flag("--annotation", extract_annotation, "Print the annotation instead");
  extract->add_option("--out", extract_out, "Output file (default stdout)");

  // run --------------------------------------------------------------------
  CorpusOptions run_corpus;
  PipelineOptions run_opts;
  std::vector<std::string> run_books;
  std::string run_split, run_out;
  auto *run = app.add_subcommand("run", "Generate ranked QA pairs for books");
  AddCorpusOptions(run, &run_corpus, false);
  AddPipelineOptions(run, &run_opts);
  run->add_option("--book", run_books, "Story file(s), or story id(s) with --corpus");
  run->add_option("--split", run_split, "Every story of a split (needs --corpus)");
  run->add_option("--out", run_out, "JSONL output (default stdout)");

  // rank -------------------------------------------------------------------
  CorpusOptions rank_corpus;
  std::vector<std::string> rank_in;
  std::string rank_ranker = "fallback", rank_layout = "section_question_answer", rank_out;
  int rank_top_n = 3;
  auto *rank = app.add_subcommand("rank", "Re-score QA pairs and keep the top N per section");
  AddCorpusOptions(rank, &rank_corpus, true);
  rank->add_option("--in", rank_in, "Pair JSONL file(s)")->required();
  rank->add_option("--ranker", rank_ranker, "fallback or logistic:<dir>");
  rank->add_option("--layout", rank_layout, "section_question_answer or section_answer");
  rank->add_option("--top-n", rank_top_n, "Pairs kept per section")->check(CLI::PositiveNumber);
  rank->add_option("--out", rank_out, "JSONL output (default stdout)");

  // eval -------------------------------------------------------------------
  CorpusOptions eval_corpus;
  std::vector<std::string> eval_pred;
  std::string eval_split = "test", eval_ns = "1,3,5,10", eval_out;
  auto *eval_cmd = app.add_subcommand("eval", "MAP@N of prediction files against gold pairs");
  eval_cmd->add_option("--gold", eval_corpus.root, "Gold corpus root")->required();
  eval_cmd->add_option("--profile", eval_corpus.profile, "canonical_json, csv_per_book or auto");
  eval_cmd->add_option("--pred", eval_pred, "Prediction JSONL file(s)")->required();
  eval_cmd->add_option("--split", eval_split, "Split to score");
  eval_cmd->add_option("--n", eval_ns, "Comma-separated N values");
  eval_cmd->add_option("--out", eval_out, "JSON report path (table goes to stdout)");

  // serve ------------------------------------------------------------------
  CorpusOptions serve_corpus;
  PipelineOptions serve_opts;
  std::string serve_host = "127.0.0.1", serve_data = "fablegen-data", serve_static;
  int serve_port = 8080;
  double serve_threshold = pipeline::kJudgeThreshold;
  auto *serve = app.add_subcommand("serve", "Run the /v1 HTTP API");
  AddCorpusOptions(serve, &serve_corpus, true);
  AddPipelineOptions(serve, &serve_opts);
  serve->add_option("--host", serve_host, "Bind address");
  serve->add_option("--port", serve_port, "Port (0 picks one)");
  serve->add_option("--data-dir", serve_data, "Session log directory");
  serve->add_option("--static", serve_static, "Static bundle served at /");
  serve->add_option("--judge-threshold", serve_threshold, "Rouge-L F1 needed to be correct")
      ->check(CLI::Range(0.0, 1.0));

  // export-rating-sheet ----------------------------------------------------
  CorpusOptions sheet_corpus;
  std::vector<std::string> sheet_pred;
  std::string sheet_out, sheet_key;
  uint64_t sheet_seed = 7;
  auto *sheet = app.add_subcommand("export-rating-sheet", "Blinded CSV for human rating");
  AddCorpusOptions(sheet, &sheet_corpus, true);
  sheet->add_option("--pred", sheet_pred, "Pair JSONL file(s)")->required();
  sheet->add_option("--out", sheet_out, "Sheet CSV")->required();
  sheet->add_option("--key", sheet_key, "Key CSV mapping item ids to systems")->required();
  sheet->add_option("--seed", sheet_seed, "Shuffle seed");

  // train-qg ---------------------------------------------------------------
  CorpusOptions tqg_corpus;
  std::string tqg_split = "train", tqg_direction = "both", tqg_source = "fairytale_only",
              tqg_external, tqg_backend = "loglinear", tqg_out;
  qgen::FinetuneConfig tqg_cfg;
  auto *tqg = app.add_subcommand("train-qg", "Fine-tune a question/answer generator");
  AddCorpusOptions(tqg, &tqg_corpus, true);
  tqg->add_option("--split", tqg_split, "Training split");
  tqg->add_option("--direction", tqg_direction,
                  "answer_to_question, question_to_answer or both");
  tqg->add_option("--source", tqg_source, "fairytale_only, external_only or both");
  tqg->add_option("--external", tqg_external,
                  "JSONL of {section, question, answer} for external sources");
  tqg->add_option("--backend", tqg_backend, "Trainable backend");
  tqg->add_option("--lr", tqg_cfg.learning_rate, "Learning rate");
  tqg->add_option("--batch-size", tqg_cfg.batch_size, "Batch size");
  tqg->add_option("--epochs", tqg_cfg.epochs, "Epochs");
  tqg->add_option("--seed", tqg_cfg.seed, "Shuffle seed");
  tqg->add_option("--out", tqg_out, "Model directory")->required();

  // train-ranker -----------------------------------------------------------
  CorpusOptions trk_corpus;
  std::vector<std::string> trk_generated;
  std::string trk_split = "train", trk_layout = "section_question_answer", trk_out;
  ranker::TrainHyperparams trk_params;
  auto *trk = app.add_subcommand("train-ranker", "Train the pair classifier");
  AddCorpusOptions(trk, &trk_corpus, true);
  trk->add_option("--generated", trk_generated, "Generated pair JSONL (negatives)")->required();
  trk->add_option("--split", trk_split, "Split providing gold positives");
  trk->add_option("--layout", trk_layout, "section_question_answer or section_answer");
  trk->add_option("--epochs", trk_params.epochs, "Epochs");
  trk->add_option("--lr", trk_params.learning_rate, "Learning rate");
  trk->add_option("--seed", trk_params.seed, "Seed");
  trk->add_option("--out", trk_out, "Ranker directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (stats->parsed()) {
      const corpus::Corpus c = LoadFromOptions(stats_corpus);
      const corpus::Split split = corpus::ParseSplit(stats_split);
      const corpus::SdMode sd =
          stats_sd == "sample" ? corpus::SdMode::kSample : corpus::SdMode::kPopulation;
      const auto s = corpus::ComputeStats(c, split, sd);
      const auto dist = corpus::CategoryDistribution(c, split);
      std::string text;
      if (stats_format == "json") {
        json j = corpus::StatsToJson(s);
        json cats = json::object();
        for (const auto &[e, cc] : dist) {
          cats[std::string(ElementName(e))] = {{"count", cc.count}, {"fraction", cc.fraction}};
        }
        j["split"] = stats_split;
        j["categories"] = cats;
        text = j.dump(2) + "\n";
      } else {
        std::ostringstream out;
        out << corpus::StatsToTable(s) << "\n";
        char line[96];
        for (const auto &[e, cc] : dist) {
          std::snprintf(line, sizeof(line), "%-22s %6d  %5.1f%%\n",
                        std::string(ElementName(e)).c_str(), cc.count, 100 * cc.fraction);
          out << line;
        }
        text = out.str();
      }
      WriteText(stats_out, text);
    } else if (convert->parsed()) {
      corpus::SaveCanonical(LoadFromOptions(convert_corpus), convert_out);
    } else if (extract->parsed()) {
      std::string story_id;
      auto c = LoadBook(extract_book, extract_corpus, &story_id);
      const corpus::Section *section = c->GetStory(story_id).FindSection(extract_section);
      if (section == nullptr) {
        throw Error(ErrorCode::kNotFound, "story " + story_id + " has no section " +
                                              std::to_string(extract_section));
      }
      auto backend = lingann::MakeBackend(extract_annotator);
      if (extract_annotation) {
        WriteText(extract_out, lingann::ToJson(lingann::Annotate(section->text, *backend))
                                       .dump(2) + "\n");
      } else {
        answer_extract::ExtractionLimits limits;
        limits.max_candidates_per_section = extract_max;
        const auto cands = answer_extract::ExtractCandidateAnswers(*section, *backend, limits);
        std::ostringstream out;
        if (extract_json) {
          json list = json::array();
          for (const auto &cand : cands) list.push_back(answer_extract::ToJson(cand));
          out << list.dump(2) << "\n";
        } else {
          for (const auto &cand : cands) {
            std::vector<std::string> elems;
            for (auto e : kAllNarrativeElements) {
              if (cand.target_elements.contains(e)) elems.emplace_back(ElementName(e));
            }
            out << cand.rank_hint << "\t" << answer_extract::SourceName(cand.source) << "\t"
                << cand.text << "\t" << Join(elems, ",") << "\n";
          }
        }
        WriteText(extract_out, out.str());
      }
    } else if (run->parsed()) {
      const pipeline::PipelineConfig config = ToConfig(run_opts);
      std::shared_ptr<const corpus::Corpus> c;
      std::vector<std::string> ids;
      if (!run_split.empty()) {
        Require(!run_corpus.root.empty(), "--split needs --corpus");
        c = std::make_shared<const corpus::Corpus>(LoadFromOptions(run_corpus));
        for (const auto *s : c->StoriesIn(corpus::ParseSplit(run_split))) {
          ids.push_back(s->story_id);
        }
      } else {
        Require(run_books.size() == 1 || !run_corpus.root.empty(),
                "several --book values need --corpus");
        Require(!run_books.empty(), "give --book or --split");
        if (run_corpus.root.empty()) {
          std::string id;
          c = LoadBook(run_books.front(), run_corpus, &id);
          ids.push_back(id);
        } else {
          c = std::make_shared<const corpus::Corpus>(LoadFromOptions(run_corpus));
          for (const auto &b : run_books) ids.push_back(c->GetStory(b).story_id);
        }
      }
      const pipeline::Pipeline pipe(config);
      std::ostringstream out;
      int failed = 0;
      for (const auto &id : ids) {
        const auto result = pipe.Run(c->GetStory(id));
        pipeline::WriteJsonl(result, out);
        for (const auto &e : result.errors) {
          ++failed;
          std::cerr << "error: " << id << " section " << e.section_index << ": "
                    << ErrorCodeName(e.code) << ": " << e.message << "\n";
        }
      }
      WriteText(run_out, out.str());
      if (failed > 0) return 3;
    } else if (rank->parsed()) {
      const corpus::Corpus c = LoadFromOptions(rank_corpus);
      auto r = ranker::MakeRanker(rank_ranker);
      ranker::RankerInputLayout layout;
      layout.order = ranker::ParseLayoutOrder(rank_layout);
      std::map<corpus::SectionKey, std::vector<ranker::RankedQAPair>> grouped;
      for (auto &p : ReadPairs(rank_in)) {
        const corpus::Section *section = c.GetStory(p.story_id).FindSection(p.section_index);
        if (section == nullptr) {
          throw Error(ErrorCode::kNotFound, "pair references unknown section " + p.story_id +
                                                ":" + std::to_string(p.section_index));
        }
        p.score = ranker::Score(section->text, p.question, p.answer, *r, layout);
        grouped[{p.story_id, p.section_index}].push_back(std::move(p));
      }
      std::ostringstream out;
      for (auto &[key, pairs] : grouped) {
        ranker::WriteJsonl(ranker::SelectTopN(std::move(pairs), rank_top_n), out);
      }
      WriteText(rank_out, out.str());
    } else if (eval_cmd->parsed()) {
      const corpus::Corpus c = LoadFromOptions(eval_corpus);
      std::map<std::string, std::vector<ranker::RankedQAPair>> outputs;
      for (const auto &p : ReadPairs(eval_pred)) {
        outputs[p.system_tag.empty() ? "untagged" : p.system_tag].push_back(p);
      }
      const auto report =
          eval::EvaluateSystems(c, corpus::ParseSplit(eval_split), outputs, ParseNs(eval_ns));
      std::cout << eval::ToTable(report);
      if (!eval_out.empty()) WriteText(eval_out, eval::ToJson(report).dump(2) + "\n");
    } else if (serve->parsed()) {
      auto c = std::make_shared<const corpus::Corpus>(LoadFromOptions(serve_corpus));
      session::ServiceOptions options;
      options.data_dir = serve_data;
      options.judge_threshold = serve_threshold;
      api::ApiService service(c, ToConfig(serve_opts), options);
      std::optional<fs::path> static_dir;
      if (!serve_static.empty()) static_dir = serve_static;
      api::HttpServer server(&service, static_dir);
      const int port = server.Bind(serve_host, serve_port);
      g_server = &server;
      std::signal(SIGINT, HandleSignal);
      std::signal(SIGTERM, HandleSignal);
      std::cerr << "fablegen serving " << c->stories().size() << " book(s) on http://"
                << serve_host << ":" << port << "\n";
      server.Listen();
      g_server = nullptr;
    } else if (sheet->parsed()) {
      const corpus::Corpus c = LoadFromOptions(sheet_corpus);
      const auto rs = pipeline::ExportRatingSheet(c, ReadPairs(sheet_pred), sheet_seed);
      WriteText(sheet_out, rs.sheet_csv);
      WriteText(sheet_key, rs.key_csv);
    } else if (tqg->parsed()) {
      const corpus::Corpus c = LoadFromOptions(tqg_corpus);
      tqg_cfg.train_source = qgen::ParseTrainSource(tqg_source);
      std::vector<qgen::Direction> directions;
      if (tqg_direction == "both") {
        directions = {qgen::Direction::kAnswerToQuestion, qgen::Direction::kQuestionToAnswer};
      } else {
        directions = {qgen::ParseDirection(tqg_direction)};
      }
      std::vector<qgen::QgTriple> external;
      if (tqg_cfg.train_source != qgen::TrainSource::kFairytaleOnly) {
        Require(!tqg_external.empty(), "--source " + tqg_source + " needs --external");
        std::ifstream in(tqg_external);
        if (!in) throw Error(ErrorCode::kNotFound, "cannot read " + tqg_external);
        std::string line;
        while (std::getline(in, line)) {
          if (Trim(line).empty()) continue;
          const json j = json::parse(line);
          external.push_back({j.at("section").get<std::string>(),
                              j.at("question").get<std::string>(),
                              j.at("answer").get<std::string>()});
        }
      }
      const std::string sep = " " + std::string(qgen::kSeparator) + " ";
      json metrics = json::array();
      for (const auto direction : directions) {
        std::vector<qgen::TrainingPair> pairs;
        if (tqg_cfg.train_source != qgen::TrainSource::kExternalOnly) {
          pairs = qgen::BuildQgTrainingPairs(c, corpus::ParseSplit(tqg_split), direction);
        }
        for (const auto &t : external) {
          if (direction == qgen::Direction::kAnswerToQuestion) {
            pairs.push_back({t.answer + sep + t.section, t.question});
          } else {
            pairs.push_back({t.question + sep + t.section, t.answer});
          }
        }
        const auto result = qgen::Finetune(tqg_backend, pairs, tqg_cfg);
        const fs::path dir = fs::path(tqg_out) / (direction == qgen::Direction::kAnswerToQuestion
                                                      ? "question"
                                                      : "answer");
        result.model->Save(dir);
        metrics.push_back(qgen::MetricsJson(result, tqg_cfg, tqg_backend, direction));
        std::cerr << qgen::DirectionName(direction) << ": loss " << result.initial_loss
                  << " -> " << result.loss_curve.back() << "\n";
      }
      WriteText((fs::path(tqg_out) / "metrics.json").string(), metrics.dump(2) + "\n");
    } else if (trk->parsed()) {
      const corpus::Corpus c = LoadFromOptions(trk_corpus);
      const auto gold = c.PairsIn(corpus::ParseSplit(trk_split));
      const auto examples =
          ranker::BuildRankingDataset(c, gold, ReadPairs(trk_generated), trk_params.seed);
      ranker::RankerInputLayout layout;
      layout.order = ranker::ParseLayoutOrder(trk_layout);
      const auto result = ranker::TrainRanker(examples, layout, trk_params);
      result.ranker->Save(trk_out);
      const std::string m = ranker::ToJson(result.metrics).dump(2) + "\n";
      WriteText((fs::path(trk_out) / "metrics.json").string(), m);
      std::cout << m;
    }
  } catch (const Error &e) {
    std::cerr << "fablegen: " << ErrorCodeName(e.code()) << ": " << e.what() << "\n";
    for (const auto &d : e.details()) std::cerr << "  " << d << "\n";
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "fablegen: internal: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
