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

#ifndef VGCN_TRAIN_H_
#define VGCN_TRAIN_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vgcn/attributes.h"
#include "vgcn/augment.h"
#include "vgcn/batching.h"
#include "vgcn/model.h"

namespace vgcn {

struct TrainConfig {
  int epochs = 150;
  int batch_size = 8;
  double lr = 0.00625;
  double momentum = 0.9;
  double weight_decay = 0.0005;
  double lambda = 0.1;
  // When false the node balance term is never computed.
  bool node_balance = true;
  // Random Node Attack on training instances; each instance of a batch is
  // attacked with probability rna_rate, the rest stay clean.
  std::optional<AttackConfig> rna;
  double rna_rate = 0.5;
  std::uint64_t seed = 0;

  void validate() const;
};

struct EpochMetrics {
  int epoch = 0;
  double lr = 0.0;
  double loss_ce = 0.0;
  double loss_nb = 0.0;
  double train_acc = 0.0;
  double eval_acc = 0.0;

  // One NDJSON line without the trailing newline.
  std::string to_json() const;
};

// Loss of one batch through `model`. Records the graph when parameters are
// tracked, so the returned tensor can be passed to backward().
struct BatchLoss {
  Tensor total;
  LossReport report;
  Tensor logits;
};
BatchLoss batch_loss(const Model& model, const PaddedBatch& batch,
                     double lambda, bool node_balance);

// Mini-batch SGD with a cosine schedule. `dict` supplies RNA categories and
// is required when config.rna is set. `eval` may be empty (eval_acc = 0).
std::vector<EpochMetrics> train(
    Model& model, std::span<const PaddedInstance> train_set,
    std::span<const PaddedInstance> eval_set, const TrainConfig& config,
    const ClassAttributeDictionary* dict = nullptr,
    const std::function<void(const EpochMetrics&)>& on_epoch = {});

ScoreMatrix predict_scores(const Model& model,
                           std::span<const PaddedInstance> instances,
                           int batch_size = 16);

struct Evaluation {
  double accuracy = 0.0;
  std::vector<double> per_class;  // NaN-free; 0 for classes with no samples
  std::vector<int> predictions;
};

Evaluation score_predictions(const ScoreMatrix& scores,
                             std::span<const PaddedInstance> instances);
Evaluation evaluate(const Model& model,
                    std::span<const PaddedInstance> instances,
                    int batch_size = 16);

}  // namespace vgcn

#endif  // VGCN_TRAIN_H_
