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

#include "vgcn/model.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support/oracles.h"
#include "vgcn/augment.h"
#include "vgcn/error.h"

namespace vgcn {
namespace {

using testing::max_gradient_error;
using testing::random_frame;
using testing::random_tensor;
using testing::small_dictionary;

ModelConfig small_config(bool use_bias = false) {
  ModelConfig cfg;
  cfg.widths = {4, 4};
  cfg.strides = {1, 2};
  cfg.temporal_kernel = 3;
  cfg.caf_width = 4;
  cfg.classes = 3;
  cfg.c_ca = 4;
  cfg.joints = 5;
  cfg.use_bias = use_bias;
  cfg.seed = 11;
  return cfg;
}

PaddedInstance random_instance(std::mt19937_64& rng, int frames, int max_persons,
                               int max_objects, int label = 0) {
  const auto dict = small_dictionary();
  std::vector<VariableGraph> gs;
  for (int t = 0; t < frames; ++t) {
    const int p = std::uniform_int_distribution<int>(t == 0 ? 1 : 0, max_persons)(rng);
    const int o = std::uniform_int_distribution<int>(0, max_objects)(rng);
    gs.push_back(random_frame(p, o, 5, dict, rng, t));
  }
  return pad_frames(gs, dict.c_ca(), label);
}

std::vector<double> row(const Tensor& logits, std::size_t n) {
  const std::size_t m = logits.extent(1);
  return {logits.values().begin() + n * m, logits.values().begin() + (n + 1) * m};
}

TEST(CafFuse, Examples) {
  const Tensor one({1, 1}, {1.0});
  EXPECT_EQ(caf_fuse(one, one, Tensor({1, 1}, {2.0}), Tensor({1, 1}, {3.0})).item(), 5.0);
  std::mt19937_64 rng(1);
  const Tensor original = random_tensor({2, 3}, rng);
  const Tensor lin_o = random_tensor({3, 4}, rng);
  const Tensor zeros_ca = Tensor::zeros({2, 4});
  const Tensor lin_c = random_tensor({4, 4}, rng);
  const Tensor fused = caf_fuse(original, zeros_ca, lin_o, lin_c);
  const Tensor direct = ops::linear(original, lin_o);
  for (std::size_t i = 0; i < fused.size(); ++i) EXPECT_EQ(fused.values()[i], direct.values()[i]);
  EXPECT_EQ(ops::sum_all(ops::relu(caf_fuse(Tensor::zeros({2, 3}), zeros_ca, lin_o, lin_c)))
                .item(),
            0.0);
  EXPECT_THROW(caf_fuse(original, Tensor::zeros({2, 5}), lin_o, lin_c), ShapeError);
}

TEST(GcnSpatial, SkeletonNodeWithIdentityWeight) {
  const std::uint8_t valid[] = {1};
  const NodeKind kind[] = {NodeKind::kSkeleton};
  const auto adj = batch_adjacency(valid, kind, 1, 1);
  const Tensor x({1, 1, 1, 2}, {0.3, 0.8});
  const Tensor y = gcn_spatial(x, adj, Tensor({2, 2}, {1, 0, 0, 1}));
  EXPECT_EQ(y.values()[0], 0.3);
  EXPECT_EQ(y.values()[1], 0.8);
}

TEST(GcnSpatial, SkeletonAveragesObjectAndObjectKeepsItself) {
  const std::uint8_t valid[] = {1, 1, 0};
  const NodeKind kind[] = {NodeKind::kSkeleton, NodeKind::kObject, NodeKind::kEmpty};
  const auto adj = batch_adjacency(valid, kind, 1, 3);
  const Tensor x({1, 1, 3, 1}, {1.0, 3.0, 7.0});
  const Tensor y = gcn_spatial(x, adj, Tensor({1, 1}, {1.0}));
  EXPECT_EQ(y.values()[0], 2.0);  // ReLU((x_s + x_o) / 2)
  EXPECT_EQ(y.values()[1], 3.0);
  EXPECT_EQ(y.values()[2], 0.0);
  const Tensor empty({1, 1, 3, 1}, {1.0, 3.0, 7.0});
  const std::uint8_t none[] = {0, 0, 0};
  const NodeKind kinds[] = {NodeKind::kEmpty, NodeKind::kEmpty, NodeKind::kEmpty};
  const Tensor z = gcn_spatial(empty, batch_adjacency(none, kinds, 1, 3), Tensor({1, 1}, {1.0}));
  for (double v : z.values()) EXPECT_EQ(v, 0.0);
}

TEST(TcnTemporal, IdentityKernelAndBias) {
  const std::vector<std::uint8_t> valid(3, 1);
  const Tensor x({1, 3, 1, 1}, {1, 2, 3});
  const Tensor y = tcn_temporal(x, Tensor({1, 1, 1}, {1}), 1, valid, Tensor({1}, {0.5}));
  EXPECT_EQ(y.values()[2], 3.5);
  EXPECT_THROW(tcn_temporal(x, Tensor({1, 1, 1}, {1}), 0, valid), ConfigError);
  const std::vector<std::uint8_t> gap = {1, 0, 1};
  const Tensor z = tcn_temporal(x, Tensor({1, 1, 1}, {1}), 1, gap, Tensor({1}, {0.5}));
  EXPECT_EQ(z.values()[1], 0.0);
  EXPECT_EQ(z.values()[2], 3.5);
}

TEST(LayerGradients, CafGcnTcn) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 3; ++trial) {
    EXPECT_LT(max_gradient_error([](const std::vector<Tensor>& in) {
                const Tensor y = caf_fuse(in[0], in[1], in[2], in[3], in[4]);
                return ops::sum_all(ops::mul(y, y));
              }, {random_tensor({2, 3, 3}, rng), random_tensor({2, 3, 4}, rng),
                  random_tensor({3, 2}, rng), random_tensor({4, 2}, rng),
                  random_tensor({2}, rng)}), 1e-6);
    const std::vector<std::uint8_t> valid = {1, 1, 0, 1, 0, 1, 1, 1};
    const std::vector<NodeKind> kind = {NodeKind::kSkeleton, NodeKind::kObject,
                                        NodeKind::kEmpty,    NodeKind::kSkeleton,
                                        NodeKind::kEmpty,    NodeKind::kObject,
                                        NodeKind::kSkeleton, NodeKind::kSkeleton};
    const auto adj = batch_adjacency(valid, kind, 2, 4);
    EXPECT_LT(max_gradient_error([&](const std::vector<Tensor>& in) {
                const Tensor y = gcn_spatial(in[0], adj, in[1], in[2]);
                return ops::sum_all(ops::mul(y, y));
              }, {random_tensor({1, 2, 4, 3}, rng), random_tensor({3, 2}, rng),
                  random_tensor({2}, rng)}), 1e-6);
    EXPECT_LT(max_gradient_error([&](const std::vector<Tensor>& in) {
                const Tensor y = tcn_temporal(in[0], in[1], 2, valid, in[2]);
                return ops::sum_all(ops::mul(y, y));
              }, {random_tensor({1, 2, 4, 3}, rng), random_tensor({3, 3, 2}, rng),
                  random_tensor({2}, rng)}), 1e-6);
  }
}

TEST(TotalLoss, Examples) {
  EXPECT_EQ(total_loss(2.0, 5.0, 0.0).total, 2.0);
  EXPECT_DOUBLE_EQ(total_loss(2.0, 1.0, 0.1).total, 2.1);
  EXPECT_EQ(total_loss(2.0, 0.0, 1.0).total, 2.0);
  EXPECT_THROW(total_loss(1.0, 1.0, -0.1), ConfigError);
}

TEST(FourStreamFuse, Examples) {
  const ScoreMatrix a{1, 2, {0.6, 0.4}}, b{1, 2, {0.2, 0.8}};
  const ScoreMatrix two[] = {a, b};
  const ScoreMatrix fused = four_stream_fuse(two);
  EXPECT_NEAR(fused.values[0], 0.4, 1e-15);
  EXPECT_NEAR(fused.values[1], 0.6, 1e-15);
  const ScoreMatrix one[] = {a};
  EXPECT_EQ(four_stream_fuse(one).values, a.values);
  const ScoreMatrix four[] = {b, b, b, b};
  EXPECT_EQ(four_stream_fuse(four).argmax(0), b.argmax(0));
  EXPECT_THROW(four_stream_fuse({}), MalformedInput);
  const ScoreMatrix bad[] = {a, ScoreMatrix{1, 3, {0.1, 0.2, 0.7}}};
  EXPECT_THROW(four_stream_fuse(bad), ShapeError);
}

TEST(ModelConfig, Validation) {
  ModelConfig cfg = small_config();
  cfg.strides = {1};
  EXPECT_THROW(Model{cfg}, ConfigError);
  cfg = small_config();
  cfg.temporal_kernel = 4;
  EXPECT_THROW(Model{cfg}, ConfigError);
  cfg = small_config();
  cfg.init_gain = 0.0;
  EXPECT_THROW(Model{cfg}, ConfigError);
}

TEST(Model, SameSeedSameParameters) {
  const Model a(small_config()), b(small_config());
  const auto pa = a.parameters(), pb = b.parameters();
  ASSERT_EQ(pa.size(), pb.size());
  for (std::size_t i = 0; i < pa.size(); ++i) {
    EXPECT_EQ(pa[i].name, pb[i].name);
    EXPECT_TRUE(std::equal(pa[i].tensor.values().begin(), pa[i].tensor.values().end(),
                           pb[i].tensor.values().begin()));
  }
}

TEST(Model, DuplicateInstancesGiveIdenticalRows) {
  std::mt19937_64 rng(3);
  const PaddedInstance inst = random_instance(rng, 6, 2, 2);
  const PaddedInstance pair[] = {inst, inst};
  const Model model(small_config());
  const Tensor logits = model.forward(pad_batch(pair)).logits;
  EXPECT_EQ(row(logits, 0), row(logits, 1));
}

TEST(Model, AllEmptyInstanceIsDegenerate) {
  const auto dict = small_dictionary();
  VariableGraph g;
  g.joints = 5;
  const VariableGraph frames[] = {g, g};
  const PaddedInstance inst = pad_frames(frames, dict.c_ca());
  const PaddedInstance one[] = {relayout(inst, {1, 1, 5}, 2)};
  EXPECT_THROW(Model(small_config()).forward(pad_batch(one)), DegenerateInstance);
}

TEST(Model, RejectsMismatchedBatches) {
  std::mt19937_64 rng(4);
  const PaddedInstance inst = random_instance(rng, 3, 1, 1);
  const PaddedInstance one[] = {inst};
  ModelConfig wide = small_config();
  wide.c_ca = 6;
  EXPECT_THROW(Model(wide).forward(pad_batch(one)), ShapeError);
  ModelConfig tight = small_config();
  tight.person_capacity = 0;
  EXPECT_THROW(Model(tight).forward(pad_batch(one)), CapacityError);
}

TEST(Model, PaddingNeutrality) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const Model model(small_config(trial % 2 == 1));
    const PaddedInstance inst = random_instance(rng, 3 + trial % 4, 2, 2);
    const PaddedInstance big = random_instance(rng, 9, 4, 5);
    const PaddedInstance alone[] = {inst};
    const PaddedInstance mixed[] = {big, inst};
    const auto a = row(model.forward(pad_batch(alone)).logits, 0);
    const auto b = row(model.forward(pad_batch(mixed)).logits, 1);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-9);
  }
}

TEST(Model, PaddedSlotsStayZeroAfterEveryBlock) {
  std::mt19937_64 rng(6);
  const Model model(small_config(false));
  const PaddedInstance xs[] = {random_instance(rng, 5, 1, 1), random_instance(rng, 8, 3, 4)};
  const Model::Output out = model.forward(pad_batch(xs));
  for (std::size_t b = 0; b < out.blocks.size(); ++b) {
    const Tensor& x = out.blocks[b];
    const std::size_t C = x.extent(3);
    const auto& valid = out.block_valid[b];
    ASSERT_EQ(valid.size() * C, x.size());
    for (std::size_t i = 0; i < valid.size(); ++i) {
      if (valid[i]) continue;
      for (std::size_t c = 0; c < C; ++c) ASSERT_EQ(x.values()[i * C + c], 0.0);
    }
  }
}

TEST(Model, ObjectFeaturesIgnoreSkeletonsButSkeletonsSeeObjects) {
  std::mt19937_64 rng(7);
  const Model model(small_config());
  PaddedInstance inst = random_instance(rng, 4, 1, 2);
  while (inst.used_object_ranks() == 0) inst = random_instance(rng, 4, 1, 2);
  auto final_block = [&](const PaddedInstance& i) {
    const PaddedInstance one[] = {i};
    const Tensor x = model.forward(pad_batch(one)).blocks.back();
    return std::vector<double>(x.values().begin(), x.values().end());
  };
  const auto base = final_block(inst);
  PaddedInstance moved = inst;
  for (int t = 0; t < moved.frames; ++t) moved.node(t, 0)[0] += 0.25;
  const auto after = final_block(moved);
  const std::size_t C = 4, V = inst.slots(), T = base.size() / (V * C);
  bool skeleton_changed = false;
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t v = 0; v < V; ++v) {
      for (std::size_t c = 0; c < C; ++c) {
        const std::size_t i = (t * V + v) * C + c;
        if (static_cast<int>(v) >= inst.layout.skeleton_slots()) {
          EXPECT_EQ(after[i], base[i]);
        } else if (after[i] != base[i]) {
          skeleton_changed = true;
        }
      }
    }
  }
  EXPECT_TRUE(skeleton_changed);

  PaddedInstance stripped = ablate_objects(inst, ObjectChannels::kNone);
  stripped = relayout(stripped, inst.layout, inst.frames);
  const auto without = final_block(stripped);
  bool differs = false;
  for (std::size_t i = 0; i < T * inst.layout.skeleton_slots() * C; ++i) {
    differs |= without[i] != base[i];
  }
  EXPECT_TRUE(differs);
}

TEST(Model, UniformLogitsGiveLogM) {
  ModelConfig cfg = small_config();
  cfg.classes = 4;
  const Model model(cfg);
  for (NamedTensor& p : model.parameters()) {
    if (p.name == "classifier.weight") {
      for (double& v : p.tensor.mutable_values()) v = 0.0;
    }
  }
  std::mt19937_64 rng(8);
  const PaddedInstance one[] = {random_instance(rng, 4, 1, 1)};
  const int labels[] = {2};
  EXPECT_NEAR(ops::cross_entropy(model.forward(pad_batch(one)).logits, labels).item(),
              std::log(4.0), 1e-12);
}

TEST(Model, FullGradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(9);
  ModelConfig cfg = small_config(true);
  cfg.widths = {3, 3};
  cfg.caf_width = 3;
  const Model model(cfg);
  const PaddedInstance xs[] = {random_instance(rng, 5, 2, 2, 0), random_instance(rng, 4, 1, 2, 2)};
  const PaddedBatch batch = pad_batch(xs);
  const double err = max_gradient_error(
      [&](const std::vector<Tensor>&) {
        const Model::Output out = model.forward(batch);
        const Tensor nb = ops::node_balance_loss(out.blocks.back(), out.kind);
        return ops::add(ops::cross_entropy(out.logits, batch.labels), ops::scale(nb, 0.1));
      },
      model.parameter_tensors());
  EXPECT_LT(err, 1e-4);
}

TEST(Model, LoadParametersChecksNamesAndShapes) {
  Model a(small_config());
  ModelConfig other = small_config();
  other.seed = 99;
  const Model b(other);
  a.load_parameters(b.parameters());
  EXPECT_EQ(a.parameters()[0].tensor.values()[0], b.parameters()[0].tensor.values()[0]);
  auto params = b.parameters();
  params.pop_back();
  EXPECT_THROW(a.load_parameters(params), MalformedInput);
  params = b.parameters();
  params[0].name = "nope";
  EXPECT_THROW(a.load_parameters(params), MalformedInput);
  params = b.parameters();
  params[0].tensor = Tensor({1}, {0.0});
  EXPECT_THROW(a.load_parameters(params), MalformedInput);
}

TEST(Model, SlotWeightsAreCanonical) {
  const Model model(small_config());
  const auto map = model.slot_weights({2, 3, 5});
  EXPECT_EQ(map[9], 9u);
  EXPECT_EQ(map[10], 20u);  // person_capacity 4 * 5 joints
  EXPECT_EQ(map[12], 22u);
}

}  // namespace
}  // namespace vgcn
