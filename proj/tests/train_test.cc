// Copyright 2026 The VGCN Authors
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

#include "vgcn/train.h"

#include <gtest/gtest.h>

#include <random>

#include "support/oracles.h"
#include "vgcn/error.h"

namespace vgcn {
namespace {

using testing::random_frame;
using testing::small_dictionary;

ModelConfig small_model(int classes = 2) {
  ModelConfig cfg;
  cfg.widths = {6, 6};
  cfg.strides = {1, 2};
  cfg.temporal_kernel = 3;
  cfg.caf_width = 6;
  cfg.classes = classes;
  cfg.c_ca = 4;
  cfg.joints = 5;
  cfg.seed = 3;
  return cfg;
}

std::vector<PaddedInstance> random_set(int count, int classes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto dict = small_dictionary();
  std::vector<PaddedInstance> out;
  for (int i = 0; i < count; ++i) {
    std::vector<VariableGraph> frames;
    for (int t = 0; t < 4; ++t) frames.push_back(random_frame(1, 1 + i % 2, 5, dict, rng, t));
    out.push_back(pad_frames(frames, dict.c_ca(), i % classes));
  }
  return out;
}

TrainConfig quick(int epochs = 3) {
  TrainConfig cfg;
  cfg.epochs = epochs;
  cfg.batch_size = 4;
  cfg.lr = 0.01;
  cfg.seed = 5;
  return cfg;
}

std::vector<std::vector<double>> snapshot(const Model& m) {
  std::vector<std::vector<double>> out;
  for (const Tensor& t : m.parameter_tensors()) out.emplace_back(t.values().begin(), t.values().end());
  return out;
}

TEST(TrainConfig, Validation) {
  TrainConfig cfg;
  cfg.epochs = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = TrainConfig{};
  cfg.rna_rate = 1.5;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = TrainConfig{};
  cfg.lambda = -1;
  EXPECT_THROW(cfg.validate(), ConfigError);
  EXPECT_DOUBLE_EQ(TrainConfig{}.lambda, 0.1);
}

TEST(Train, LambdaZeroEqualsDisabledNodeBalance) {
  const auto data = random_set(8, 2, 1);
  Model a(small_model()), b(small_model());
  TrainConfig ca = quick(), cb = quick();
  ca.lambda = 0.0;
  cb.node_balance = false;
  const auto ha = train(a, data, {}, ca);
  const auto hb = train(b, data, {}, cb);
  EXPECT_EQ(snapshot(a), snapshot(b));
  ASSERT_EQ(ha.size(), hb.size());
  for (std::size_t i = 0; i < ha.size(); ++i) EXPECT_EQ(ha[i].loss_ce, hb[i].loss_ce);
}

TEST(Train, OverfitsSingleInstance) {
  const auto data = random_set(1, 2, 2);
  Model model(small_model());
  TrainConfig cfg = quick(60);
  cfg.lr = 0.05;
  const auto history = train(model, data, {}, cfg);
  EXPECT_EQ(history.back().train_acc, 1.0);
  EXPECT_LT(history.back().loss_ce, history.front().loss_ce);
  EXPECT_EQ(evaluate(model, data).accuracy, 1.0);
}

TEST(Train, SameSeedIsBitwiseReproducible) {
  const auto data = random_set(8, 2, 3);
  const auto dict = small_dictionary();
  TrainConfig cfg = quick();
  cfg.rna = AttackConfig{};
  Model a(small_model()), b(small_model());
  const auto ha = train(a, data, data, cfg, &dict);
  const auto hb = train(b, data, data, cfg, &dict);
  ASSERT_EQ(ha.size(), hb.size());
  for (std::size_t i = 0; i < ha.size(); ++i) EXPECT_EQ(ha[i].to_json(), hb[i].to_json());
  EXPECT_EQ(snapshot(a), snapshot(b));
}

TEST(Train, Errors) {
  Model model(small_model());
  EXPECT_THROW(train(model, {}, {}, quick()), ConfigError);
  const auto data = random_set(2, 2, 4);
  TrainConfig cfg = quick();
  cfg.rna = AttackConfig{};
  EXPECT_THROW(train(model, data, {}, cfg), ConfigError);
  const auto wide = random_set(3, 3, 4);
  EXPECT_THROW(train(model, wide, {}, quick()), ConfigError);
}

TEST(Train, EpochCallbackAndSchedule) {
  const auto data = random_set(4, 2, 5);
  Model model(small_model());
  int calls = 0;
  const auto history = train(model, data, {}, quick(4), nullptr,
                             [&](const EpochMetrics& m) { EXPECT_EQ(m.epoch, calls++); });
  EXPECT_EQ(calls, 4);
  EXPECT_DOUBLE_EQ(history[0].lr, 0.01);
  EXPECT_DOUBLE_EQ(history[2].lr, 0.005);
  EXPECT_EQ(history[0].eval_acc, 0.0);
}

TEST(EpochMetrics, JsonLine) {
  EpochMetrics m;
  m.epoch = 2;
  m.lr = 0.5;
  EXPECT_EQ(m.to_json(),
            R"({"epoch":2,"lr":0.5,"loss_ce":0.0,"loss_nb":0.0,"train_acc":0.0,"eval_acc":0.0})");
}

TEST(BatchLoss, TotalCombinesTerms) {
  const auto data = random_set(4, 2, 6);
  const Model model(small_model());
  const PaddedBatch batch = pad_batch(data);
  const BatchLoss with = batch_loss(model, batch, 0.1, true);
  EXPECT_NEAR(with.total.item(), with.report.l_ce + 0.1 * with.report.l_nb, 1e-12);
  EXPECT_GT(with.report.s_sn, 0.0);
  const BatchLoss without = batch_loss(model, batch, 0.1, false);
  EXPECT_EQ(without.total.item(), with.report.l_ce);
}

TEST(ScorePredictions, AccuracyAndPerClass) {
  const auto data = random_set(4, 2, 7);  // labels 0, 1, 0, 1
  const ScoreMatrix scores{4, 2, {0.9, 0.1, 0.2, 0.8, 0.3, 0.7, 0.6, 0.4}};
  const Evaluation e = score_predictions(scores, data);
  EXPECT_EQ(e.accuracy, 0.5);
  EXPECT_EQ(e.per_class, (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(e.predictions, (std::vector<int>{0, 1, 1, 0}));
  EXPECT_THROW(score_predictions(ScoreMatrix{3, 2, std::vector<double>(6)}, data), ShapeError);
}

TEST(PredictScores, RowsSumToOneAcrossBatchSizes) {
  const auto data = random_set(5, 2, 8);
  const Model model(small_model());
  const ScoreMatrix a = predict_scores(model, data, 2);
  const ScoreMatrix b = predict_scores(model, data, 5);
  ASSERT_EQ(a.rows, 5);
  for (int r = 0; r < 5; ++r) {
    EXPECT_NEAR(a.values[2 * r] + a.values[2 * r + 1], 1.0, 1e-12);
    EXPECT_NEAR(a.values[2 * r], b.values[2 * r], 1e-9);
  }
}

}  // namespace
}  // namespace vgcn
