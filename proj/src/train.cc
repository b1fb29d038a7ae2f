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

#include <algorithm>
#include <numeric>
#include <random>

#include "json.hpp"
#include "vgcn/error.h"

namespace vgcn {

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
  if (lr < 0.0) throw ConfigError("learning rate must be >= 0");
  if (momentum < 0.0 || weight_decay < 0.0) {
    throw ConfigError("momentum and weight decay must be >= 0");
  }
  if (lambda < 0.0) throw ConfigError("lambda must be >= 0");
  if (rna) rna->validate();
  if (!(rna_rate >= 0.0 && rna_rate <= 1.0)) {
    throw ConfigError("rna_rate must lie in [0, 1]");
  }
}

std::string EpochMetrics::to_json() const {
  nlohmann::ordered_json line;
  line["epoch"] = epoch;
  line["lr"] = lr;
  line["loss_ce"] = loss_ce;
  line["loss_nb"] = loss_nb;
  line["train_acc"] = train_acc;
  line["eval_acc"] = eval_acc;
  return line.dump();
}

BatchLoss batch_loss(const Model& model, const PaddedBatch& batch,
                     double lambda, bool node_balance) {
  Model::Output out = model.forward(batch);
  Tensor ce = ops::cross_entropy(out.logits, batch.labels);
  BatchLoss result;
  result.logits = out.logits;
  if (!node_balance) {
    result.total = ce;
    result.report = total_loss(ce.item(), 0.0, lambda);
    return result;
  }
  ops::BalanceSums sums;
  Tensor nb = ops::node_balance_loss(out.blocks.back(), out.kind, &sums);
  result.total = ops::add(ce, ops::scale(nb, lambda));
  result.report = total_loss(ce.item(), nb.item(), lambda);
  const double inv = 1.0 / static_cast<double>(batch.size);
  result.report.s_sn =
      std::accumulate(sums.skeleton.begin(), sums.skeleton.end(), 0.0) * inv;
  result.report.s_on =
      std::accumulate(sums.object.begin(), sums.object.end(), 0.0) * inv;
  return result;
}

namespace {

int correct_predictions(const Tensor& logits, std::span<const int> labels) {
  const ScoreMatrix scores{static_cast<int>(logits.extent(0)),
                           static_cast<int>(logits.extent(1)),
                           {logits.values().begin(), logits.values().end()}};
  int correct = 0;
  for (int n = 0; n < scores.rows; ++n) correct += scores.argmax(n) == labels[n];
  return correct;
}

}  // namespace

std::vector<EpochMetrics> train(
    Model& model, std::span<const PaddedInstance> train_set,
    std::span<const PaddedInstance> eval_set, const TrainConfig& config,
    const ClassAttributeDictionary* dict,
    const std::function<void(const EpochMetrics&)>& on_epoch) {
  config.validate();
  if (train_set.empty()) throw ConfigError("training set is empty");
  if (config.rna && dict == nullptr) {
    throw ConfigError("random node attack needs a class attribute dictionary");
  }
  for (const PaddedInstance& inst : train_set) {
    if (inst.label < 0 || inst.label >= model.config().classes) {
      throw ConfigError("training label " + std::to_string(inst.label) +
                        " outside [0, " + std::to_string(model.config().classes) + ")");
    }
  }

  std::mt19937_64 rng(config.seed);
  Sgd optimizer(model.parameter_tensors(), config.momentum, config.weight_decay);
  std::vector<std::size_t> order(train_set.size());
  std::vector<EpochMetrics> history;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const double lr = cosine_lr(epoch, config.epochs, config.lr);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);

    double ce_sum = 0.0, nb_sum = 0.0;
    int correct = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      std::vector<PaddedInstance> members;
      members.reserve(end - begin);
      for (std::size_t i = begin; i < end; ++i) {
        const PaddedInstance& inst = train_set[order[i]];
        const bool attack = config.rna && std::bernoulli_distribution(config.rna_rate)(rng);
        members.push_back(attack ? random_node_attack(inst, *config.rna, *dict, rng) : inst);
      }
      const PaddedBatch batch = pad_batch(members);
      BatchLoss loss = batch_loss(model, batch, config.lambda, config.node_balance);
      optimizer.zero_grad();
      backward(loss.total);
      optimizer.step(lr);
      ce_sum += loss.report.l_ce * batch.size;
      nb_sum += loss.report.l_nb * batch.size;
      correct += correct_predictions(loss.logits, batch.labels);
    }

    EpochMetrics m;
    m.epoch = epoch;
    m.lr = lr;
    m.loss_ce = ce_sum / train_set.size();
    m.loss_nb = nb_sum / train_set.size();
    m.train_acc = static_cast<double>(correct) / train_set.size();
    m.eval_acc = eval_set.empty() ? 0.0 : evaluate(model, eval_set).accuracy;
    history.push_back(m);
    if (on_epoch) on_epoch(m);
  }
  return history;
}

ScoreMatrix predict_scores(const Model& model,
                           std::span<const PaddedInstance> instances,
                           int batch_size) {
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
  NoGradGuard no_grad;
  ScoreMatrix scores{static_cast<int>(instances.size()), model.config().classes, {}};
  scores.values.reserve(instances.size() * scores.cols);
  for (std::size_t begin = 0; begin < instances.size(); begin += batch_size) {
    const std::size_t end = std::min(instances.size(), begin + batch_size);
    const PaddedBatch batch = pad_batch(instances.subspan(begin, end - begin));
    const ScoreMatrix part = softmax_scores(model.forward(batch).logits);
    scores.values.insert(scores.values.end(), part.values.begin(), part.values.end());
  }
  return scores;
}

Evaluation score_predictions(const ScoreMatrix& scores,
                             std::span<const PaddedInstance> instances) {
  if (scores.rows != static_cast<int>(instances.size())) {
    throw ShapeError("score rows", {instances.size()},
                     {static_cast<std::size_t>(scores.rows)});
  }
  Evaluation eval;
  std::vector<int> hits(scores.cols, 0), totals(scores.cols, 0);
  int correct = 0;
  for (int n = 0; n < scores.rows; ++n) {
    const int predicted = scores.argmax(n);
    const int label = instances[n].label;
    eval.predictions.push_back(predicted);
    if (label >= 0 && label < scores.cols) {
      ++totals[label];
      if (predicted == label) ++hits[label];
    }
    correct += predicted == label;
  }
  eval.accuracy = scores.rows ? static_cast<double>(correct) / scores.rows : 0.0;
  for (int c = 0; c < scores.cols; ++c) {
    eval.per_class.push_back(totals[c] ? static_cast<double>(hits[c]) / totals[c] : 0.0);
  }
  return eval;
}

Evaluation evaluate(const Model& model, std::span<const PaddedInstance> instances,
                    int batch_size) {
  return score_predictions(predict_scores(model, instances, batch_size), instances);
}

}  // namespace vgcn
