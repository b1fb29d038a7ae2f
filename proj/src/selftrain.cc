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

#include "vgcn/selftrain.h"

#include <algorithm>
#include <random>
#include <string>

#include "json.hpp"
#include "vgcn/error.h"

namespace vgcn {

void SelfTrainConfig::validate() const {
  if (threshold < 0.0) throw ConfigError("convergence threshold must be >= 0");
  if (max_iterations < 1) throw ConfigError("max iterations must be >= 1");
}

std::string IterationRecord::to_json() const {
  nlohmann::ordered_json line;
  line["iter"] = iter;
  line["loss"] = loss;
  line["pseudo_count"] = pseudo_count;
  return line.dump();
}

namespace {

template <typename F>
auto at_iteration(int count, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const std::exception& e) {
    throw Error("self-training iteration " + std::to_string(count) + ": " +
                e.what());
  }
}

}  // namespace

SelfTrainResult self_train(DetectorOracle& oracle,
                           std::span<const LabeledPoint> labeled,
                           std::span<const Point2> unlabeled,
                           const SelfTrainConfig& config) {
  config.validate();
  if (labeled.empty()) throw ConfigError("self-training needs labeled data");

  SelfTrainResult result;
  std::vector<double> losses;

  int count = 0;
  DetectorOracle::Model model = at_iteration(count, [&] { return oracle.initial_model(); });
  losses.push_back(at_iteration(count, [&] { return oracle.loss(model); }));
  result.log.push_back({0, losses.back(), 0});

  count = 1;
  model = at_iteration(count, [&] { return oracle.train(labeled, {}); });
  std::vector<LabeledPoint> pseudo =
      at_iteration(count, [&] { return oracle.predict(model, unlabeled); });
  losses.push_back(at_iteration(count, [&] { return oracle.loss(model); }));
  result.log.push_back({count, losses.back(), pseudo.size()});

  while (count <= config.max_iterations &&
         losses[count - 1] - losses[count] > config.threshold) {
    ++count;
    model = at_iteration(count, [&] { return oracle.train(labeled, pseudo); });
    // The pseudo-label pool is replaced, not extended.
    pseudo = at_iteration(count, [&] { return oracle.predict(model, unlabeled); });
    losses.push_back(at_iteration(count, [&] { return oracle.loss(model); }));
    result.log.push_back({count, losses.back(), pseudo.size()});
  }
  result.model = std::move(model);
  result.count = count;
  return result;
}

namespace {

// Model layout: {c0x, c0y, c1x, c1y}.
class NearestCentroidOracle : public DetectorOracle {
 public:
  explicit NearestCentroidOracle(std::vector<LabeledPoint> held_out)
      : held_out_(std::move(held_out)) {}

  Model initial_model() override { return Model(4, 0.0); }

  Model train(std::span<const LabeledPoint> labeled,
              std::span<const LabeledPoint> pseudo) override {
    double sum[2][2] = {{0, 0}, {0, 0}};
    double n[2] = {0, 0};
    auto add = [&](const LabeledPoint& p) {
      if (p.label != 0 && p.label != 1) {
        throw MalformedInput("detector label " + std::to_string(p.label));
      }
      sum[p.label][0] += p.point.x;
      sum[p.label][1] += p.point.y;
      n[p.label] += 1.0;
    };
    for (const LabeledPoint& p : labeled) add(p);
    for (const LabeledPoint& p : pseudo) add(p);
    Model model(4, 0.0);
    for (int c = 0; c < 2; ++c) {
      if (n[c] == 0) continue;
      model[2 * c] = sum[c][0] / n[c];
      model[2 * c + 1] = sum[c][1] / n[c];
    }
    return model;
  }

  std::vector<LabeledPoint> predict(const Model& model,
                                    std::span<const Point2> unlabeled) override {
    std::vector<LabeledPoint> out;
    out.reserve(unlabeled.size());
    for (const Point2& p : unlabeled) out.push_back({p, classify(model, p)});
    return out;
  }

  double loss(const Model& model) override {
    if (held_out_.empty()) return 0.0;
    std::size_t wrong = 0;
    for (const LabeledPoint& p : held_out_) wrong += classify(model, p.point) != p.label;
    return static_cast<double>(wrong) / held_out_.size();
  }

 private:
  static int classify(const Model& m, const Point2& p) {
    const double d0 = (p.x - m[0]) * (p.x - m[0]) + (p.y - m[1]) * (p.y - m[1]);
    const double d1 = (p.x - m[2]) * (p.x - m[2]) + (p.y - m[3]) * (p.y - m[3]);
    return d1 < d0 ? 1 : 0;
  }

  std::vector<LabeledPoint> held_out_;
};

}  // namespace

SyntheticDetector synthetic_detector(double noise, std::uint64_t seed,
                                     const SyntheticDetectorOptions& options) {
  if (!(noise >= 0.0 && noise < 0.5)) {
    throw ConfigError("detector label noise must lie in [0, 0.5)");
  }
  if (options.labeled_fraction <= 0.0 || options.labeled_fraction > 1.0) {
    throw ConfigError("labeled fraction must lie in (0, 1]");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> spread(0.0, 1.0);
  std::bernoulli_distribution flip(noise);
  const double half = options.separation / 2.0;
  auto draw = [&](int label) {
    const double cx = label == 0 ? -half : half;
    const double x = cx + spread(rng);
    const double y = spread(rng);
    return LabeledPoint{{x, y}, label};
  };

  SyntheticDetector out;
  const std::size_t labeled_count = std::max<std::size_t>(
      2, static_cast<std::size_t>(options.labeled_fraction * options.train_points));
  for (std::size_t i = 0; i < options.train_points; ++i) {
    LabeledPoint p = draw(static_cast<int>(i % 2));
    if (i < labeled_count) {
      if (flip(rng)) p.label = 1 - p.label;
      out.labeled.push_back(p);
    } else {
      out.unlabeled.push_back(p.point);
    }
  }
  std::vector<LabeledPoint> held_out;
  for (std::size_t i = 0; i < options.held_out_points; ++i) {
    held_out.push_back(draw(static_cast<int>(i % 2)));
  }
  out.oracle = std::make_unique<NearestCentroidOracle>(std::move(held_out));
  return out;
}

}  // namespace vgcn
