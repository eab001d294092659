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

#include "fablegen/error.h"
#include "fablegen/qgen.h"
#include "fablegen/ranker.h"
#include "synthetic.h"
#include "test_util.h"

namespace fablegen {
namespace {

qgen::FinetuneConfig CopyConfig() {
  qgen::FinetuneConfig config;
  config.learning_rate = 0.05;
  config.epochs = 3;
  return config;
}

TEST(LoglinearTest, CopyTaskLossDecreases) {
  const auto result = qgen::Finetune("loglinear", testing::CopyTask(), CopyConfig());
  ASSERT_EQ(result.loss_curve.size(), 3u);
  EXPECT_LT(result.loss_curve.back(), result.initial_loss);
  EXPECT_EQ(result.examples, 10);
  const auto metrics = qgen::MetricsJson(result, CopyConfig(), "loglinear",
                                         qgen::Direction::kAnswerToQuestion);
  EXPECT_EQ(metrics["loss_curve"].size(), 3u);
}

TEST(LoglinearTest, TrainingIsSeeded) {
  const auto a = qgen::Finetune("loglinear", testing::CopyTask(), CopyConfig());
  const auto b = qgen::Finetune("loglinear", testing::CopyTask(), CopyConfig());
  EXPECT_EQ(a.loss_curve, b.loss_curve);
}

TEST(LoglinearTest, LearnsToCopy) {
  auto config = CopyConfig();
  config.epochs = 30;
  const auto pairs = testing::CopyTask();
  const auto result = qgen::Finetune("loglinear", pairs, config);
  int exact = 0;
  for (const auto &p : pairs) {
    exact += qgen::ModelTokens(result.model->Generate(p.input, {})) == qgen::ModelTokens(p.target);
  }
  EXPECT_GE(exact, 8);
}

TEST(LoglinearTest, SaveLoadAndRegistry) {
  const auto result = qgen::Finetune("loglinear", testing::CopyTask(), CopyConfig());
  testing::TempDir dir;
  result.model->Save(dir.path() / "question");
  const auto loaded = qgen::LoglinearModel::Load(dir.path() / "question");
  EXPECT_DOUBLE_EQ(loaded.Loss(testing::CopyTask()), result.model->Loss(testing::CopyTask()));

  const auto backend = qgen::MakeQgBackend("loglinear:" + dir.path().string());
  const std::string q = qgen::GenerateQuestion({"the fox ran to the mill", "the fox", std::nullopt},
                                               *backend, {});
  EXPECT_EQ(q.back(), '?');
  // No answer model was saved.
  EXPECT_THROW(qgen::GenerateAnswer("the fox ran", "who ran?", *backend, {}), Error);
}

TEST(LoglinearTest, BeamAndGreedyAgreeOnConfidentModel) {
  auto config = CopyConfig();
  config.epochs = 30;
  const auto result = qgen::Finetune("loglinear", testing::CopyTask(), config);
  qgen::GenerationConfig beam;
  beam.decoding = qgen::Decoding::kBeam;
  beam.beam_k = 4;
  const auto p = testing::CopyTask()[0];
  EXPECT_EQ(result.model->Generate(p.input, beam), result.model->Generate(p.input, {}));
}

TEST(LogisticRankerTest, SentinelSeparable) {
  const auto data = testing::SentinelDataset(5);
  const auto with_question = ranker::TrainRanker(data, {});
  EXPECT_GE(with_question.metrics.f1, 0.95);
  EXPECT_GT(with_question.metrics.held_out_examples, 0);

  const auto answer_only =
      ranker::TrainRanker(data, {ranker::LayoutOrder::kSectionAnswer, "[SEP]"});
  EXPECT_GT(with_question.metrics.f1, answer_only.metrics.f1);
}

TEST(LogisticRankerTest, SaveLoadAndLayoutCheck) {
  const auto trained = ranker::TrainRanker(testing::SentinelDataset(6), {});
  testing::TempDir dir;
  trained.ranker->Save(dir.path());
  const auto loaded = ranker::MakeRanker("logistic:" + dir.path().string());
  const double s = loaded->Score("fox hen", "what mill zqxv?", "cow");
  EXPECT_DOUBLE_EQ(s, trained.ranker->Score("fox hen", "what mill zqxv?", "cow"));
  EXPECT_GT(s, loaded->Score("fox hen", "what mill?", "cow"));
  EXPECT_THROW(ranker::Score("a", "b", "c", *loaded,
                             {ranker::LayoutOrder::kSectionAnswer, "[SEP]"}),
               Error);
}

TEST(LogisticRankerTest, RejectsSingleClassData) {
  auto data = testing::SentinelDataset(7);
  for (auto &e : data) e.label = 1;
  EXPECT_THROW(ranker::TrainRanker(data, {}), Error);
}

}  // namespace
}  // namespace fablegen
