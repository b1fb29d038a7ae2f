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

#ifndef VGCN_SELFTRAIN_H_
#define VGCN_SELFTRAIN_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "vgcn/graph.h"

namespace vgcn {

struct SelfTrainConfig {
  double threshold = 0.0;  // c
  int max_iterations = 10;  // e
  std::uint64_t seed = 0;

  void validate() const;
};

struct LabeledPoint {
  Point2 point;
  int label = 0;
};

// Pluggable detector for the self-training loop. Models are opaque parameter
// vectors owned by the caller.
class DetectorOracle {
 public:
  using Model = std::vector<double>;

  virtual ~DetectorOracle() = default;

  // Untrained default model M_0.
  virtual Model initial_model() = 0;
  virtual Model train(std::span<const LabeledPoint> labeled,
                      std::span<const LabeledPoint> pseudo) = 0;
  virtual std::vector<LabeledPoint> predict(
      const Model& model, std::span<const Point2> unlabeled) = 0;
  virtual double loss(const Model& model) = 0;
};

struct IterationRecord {
  int iter = 0;
  double loss = 0.0;
  std::size_t pseudo_count = 0;

  std::string to_json() const;
};

struct SelfTrainResult {
  DetectorOracle::Model model;  // M_count at exit
  int count = 0;
  std::vector<IterationRecord> log;  // one record per count, from 0

  // Executions of the loop body.
  int loop_iterations() const { return count - 1; }
};

// Iterative self-training with pseudo-label regeneration. The loop runs while
// count <= e and the loss improvement loss_{count-1} - loss_count exceeds c.
// Oracle failures are rethrown as Error with the iteration index prefixed.
SelfTrainResult self_train(DetectorOracle& oracle,
                           std::span<const LabeledPoint> labeled,
                           std::span<const Point2> unlabeled,
                           const SelfTrainConfig& config);

struct SyntheticDetectorOptions {
  std::size_t train_points = 1000;
  std::size_t held_out_points = 400;
  double labeled_fraction = 0.1;
  // Distance between the two cluster means in units of the cluster spread.
  double separation = 2.5;
};

// Oracle plus the labeled / unlabeled pools it was generated with.
struct SyntheticDetector {
  std::unique_ptr<DetectorOracle> oracle;
  std::vector<LabeledPoint> labeled;
  std::vector<Point2> unlabeled;
};

// Nearest-centroid classifier over two Gaussian clusters of 2-D points. The
// labeled pool keeps `labeled_fraction` of the training points with labels
// flipped at rate `noise`; the loss is the error rate on a clean held-out
// set. ConfigError unless 0 <= noise < 0.5.
SyntheticDetector synthetic_detector(double noise, std::uint64_t seed,
                                     const SyntheticDetectorOptions& options =
                                         {});

}  // namespace vgcn

#endif  // VGCN_SELFTRAIN_H_
