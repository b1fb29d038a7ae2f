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

#include "vgcn/augment.h"

#include <gtest/gtest.h>

#include <array>
#include <random>

#include "support/oracles.h"
#include "vgcn/error.h"

namespace vgcn {
namespace {

using testing::random_frame;
using testing::small_dictionary;

PaddedInstance sample_instance(std::uint64_t seed, int frames = 4, int persons = 1,
                               int objects = 1, int joints = 5) {
  std::mt19937_64 rng(seed);
  const auto dict = small_dictionary();
  std::vector<VariableGraph> gs;
  for (int t = 0; t < frames; ++t) {
    gs.push_back(random_frame(persons, objects, joints, dict, rng, t));
  }
  return pad_frames(gs, dict.c_ca(), 1);
}

int injected(const PaddedInstance& before, const PaddedInstance& after) {
  return after.used_object_ranks() - before.used_object_ranks();
}

TEST(RandomNodeAttack, SingleNodeIsDeterministicAndPersistent) {
  const PaddedInstance inst = sample_instance(1);
  const auto dict = small_dictionary();
  AttackConfig cfg;
  cfg.min_nodes = cfg.max_nodes = 1;
  std::mt19937_64 r1(42), r2(42);
  const PaddedInstance a = random_node_attack(inst, cfg, dict, r1);
  const PaddedInstance b = random_node_attack(inst, cfg, dict, r2);
  EXPECT_EQ(a.features, b.features);
  EXPECT_EQ(injected(inst, a), 1);
  const int slot = a.layout.object_slot(1);
  for (int t = 0; t < a.frames; ++t) {
    EXPECT_EQ(a.valid[a.node_index(t, slot)], 1);
    EXPECT_EQ(a.kind[a.node_index(t, slot)], NodeKind::kObject);
    for (int c = 0; c < a.channels; ++c) EXPECT_EQ(a.node(t, slot)[c], a.node(0, slot)[c]);
  }
}

TEST(RandomNodeAttack, NodeCountIsUniform) {
  const PaddedInstance inst = sample_instance(2, 2);
  const auto dict = small_dictionary();
  AttackConfig cfg;  // 1..3
  std::mt19937_64 rng(7);
  std::array<int, 3> counts{};
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    const int k = injected(inst, random_node_attack(inst, cfg, dict, rng));
    ASSERT_GE(k, 1);
    ASSERT_LE(k, 3);
    ++counts[k - 1];
  }
  double chi2 = 0.0;
  const double expected = draws / 3.0;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  EXPECT_LT(chi2, 9.2103);  // chi-square, 2 dof, p = 0.01
}

TEST(RandomNodeAttack, OriginalNodesUntouched) {
  const PaddedInstance inst = sample_instance(3, 5, 2, 2);
  const auto dict = small_dictionary();
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const PaddedInstance out = random_node_attack(inst, {}, dict, rng);
    for (int t = 0; t < inst.frames; ++t) {
      for (int p = 0; p < inst.layout.max_persons; ++p) {
        for (int j = 0; j < inst.layout.joints; ++j) {
          const int s = inst.layout.skeleton_slot(p, j);
          const int d = out.layout.skeleton_slot(p, j);
          for (int c = 0; c < inst.channels; ++c) ASSERT_EQ(out.node(t, d)[c], inst.node(t, s)[c]);
        }
      }
      for (int r = 0; r < inst.layout.max_objects; ++r) {
        const int s = inst.layout.object_slot(r);
        const int d = out.layout.object_slot(r);
        for (int c = 0; c < inst.channels; ++c) ASSERT_EQ(out.node(t, d)[c], inst.node(t, s)[c]);
        ASSERT_EQ(out.valid[out.node_index(t, d)], inst.valid[inst.node_index(t, s)]);
      }
    }
  }
}

TEST(RandomNodeAttack, FixedCategoryAndRanges) {
  const PaddedInstance inst = sample_instance(4);
  const auto dict = small_dictionary();
  AttackConfig cfg;
  cfg.min_nodes = cfg.max_nodes = 3;
  cfg.fixed_category = 2;
  cfg.position_min = 0.25;
  cfg.position_max = 0.5;
  cfg.prob_min = cfg.prob_max = 0.9;
  std::mt19937_64 rng(5);
  const PaddedInstance out = random_node_attack(inst, cfg, dict, rng);
  const auto ca = dict.lookup(2);
  for (int r = 1; r <= 3; ++r) {
    const double* f = out.node(0, out.layout.object_slot(r));
    EXPECT_GE(f[0], 0.25);
    EXPECT_LE(f[0], 0.5);
    EXPECT_EQ(f[2], 0.9);
    EXPECT_TRUE(std::equal(ca.begin(), ca.end(), f + kOriginalChannels));
  }
}

TEST(RandomNodeAttack, Errors) {
  const PaddedInstance inst = sample_instance(5);
  std::mt19937_64 rng(1);
  EXPECT_THROW(random_node_attack(inst, {}, ClassAttributeDictionary(), rng), ConfigError);
  AttackConfig bad;
  bad.min_nodes = 3;
  bad.max_nodes = 1;
  EXPECT_THROW(random_node_attack(inst, bad, small_dictionary(), rng), ConfigError);
  EXPECT_THROW(random_node_attack(inst, {}, small_dictionary(8), rng), ConfigError);
}

TEST(DeriveStream, JointIsIdentity) {
  const PaddedInstance inst = sample_instance(6);
  const auto parents = coco_parent_map();
  EXPECT_EQ(derive_stream(inst, StreamKind::kJoint, parents).features, inst.features);
}

TEST(DeriveStream, StaticSequenceHasZeroMotion) {
  std::mt19937_64 rng(7);
  const auto dict = small_dictionary();
  const std::vector<VariableGraph> frames(5, random_frame(2, 2, 5, dict, rng));
  const PaddedInstance inst = pad_frames(frames, dict.c_ca());
  const std::vector<int> parents = {-1, 0, 1, 2, 3};
  for (StreamKind kind : {StreamKind::kJointMotion, StreamKind::kBoneMotion}) {
    const PaddedInstance out = derive_stream(inst, kind, parents);
    for (int t = 0; t < out.frames; ++t) {
      for (int s = 0; s < out.slots(); ++s) {
        EXPECT_EQ(out.node(t, s)[0], 0.0);
        EXPECT_EQ(out.node(t, s)[1], 0.0);
        for (int c = 2; c < out.channels; ++c) EXPECT_EQ(out.node(t, s)[c], inst.node(t, s)[c]);
      }
    }
  }
}

TEST(DeriveStream, BoneIsChildMinusParent) {
  VariableGraph g;
  g.joints = 2;
  g.persons = {{SkeletonNode{{1, 1}, 0.5, 0, 0}, SkeletonNode{{2, 3}, 0.7, 0, 1}}};
  const VariableGraph frames[] = {g};
  const PaddedInstance inst = pad_frames(frames, 0);
  const std::vector<int> parents = {-1, 0};
  const PaddedInstance out = derive_stream(inst, StreamKind::kBone, parents);
  EXPECT_EQ(out.node(0, 1)[0], 1.0);
  EXPECT_EQ(out.node(0, 1)[1], 2.0);
  EXPECT_EQ(out.node(0, 1)[2], 0.7);
  EXPECT_EQ(out.node(0, 0)[0], 0.0);
  EXPECT_EQ(out.node(0, 0)[1], 0.0);
}

TEST(DeriveStream, BoneLeavesObjectsAlone) {
  const PaddedInstance inst = sample_instance(8, 3, 1, 2, 17);
  const PaddedInstance out = derive_stream(inst, StreamKind::kBone, coco_parent_map());
  for (int t = 0; t < inst.frames; ++t) {
    for (int r = 0; r < 2; ++r) {
      const int s = inst.layout.object_slot(r);
      for (int c = 0; c < inst.channels; ++c) EXPECT_EQ(out.node(t, s)[c], inst.node(t, s)[c]);
    }
  }
}

// On a dyadic grid differences are exact, so bone and motion commute.
TEST(DeriveStream, BoneAndMotionCommuteOnDyadicGrid) {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> cell(0, 64);
  const auto dict = small_dictionary();
  std::vector<VariableGraph> frames;
  for (int t = 0; t < 6; ++t) {
    std::vector<PersonDetection> persons;
    for (int p = 0; p < 2; ++p) {
      PersonDetection d;
      d.person_index = p;
      for (int j = 0; j < 17; ++j) {
        d.joints.push_back({cell(rng) / 64.0, cell(rng) / 64.0});
        d.scores.push_back(0.5);
      }
      persons.push_back(d);
    }
    frames.push_back(order_nodes(persons, {}, 17, t));
  }
  const PaddedInstance inst = pad_frames(frames, dict.c_ca());
  const auto parents = coco_parent_map();
  const PaddedInstance bone_of_motion =
      derive_stream(derive_stream(inst, StreamKind::kJointMotion, parents),
                    StreamKind::kBone, parents);
  const PaddedInstance bone_motion = derive_stream(inst, StreamKind::kBoneMotion, parents);
  EXPECT_EQ(bone_of_motion.features, bone_motion.features);
}

TEST(DeriveStream, MissingParentIsConfigError) {
  const PaddedInstance inst = sample_instance(10);
  const std::vector<int> short_map = {-1, 0};
  EXPECT_THROW(derive_stream(inst, StreamKind::kBone, short_map), ConfigError);
  const std::vector<int> bad = {-1, 0, 9, 1, 2};
  EXPECT_THROW(derive_stream(inst, StreamKind::kBone, bad), ConfigError);
}

TEST(StreamNames, RoundTrip) {
  for (StreamKind k : kAllStreams) EXPECT_EQ(parse_stream_kind(stream_name(k)), k);
  EXPECT_THROW(parse_stream_kind("fuse4"), ConfigError);
}

TEST(AblateObjects, Channels) {
  const PaddedInstance inst = sample_instance(11, 3, 1, 2);
  const int first = inst.layout.object_slot(0);
  const PaddedInstance none = ablate_objects(inst, ObjectChannels::kNone);
  EXPECT_EQ(none.layout.max_objects, 0);
  EXPECT_EQ(none.used_object_ranks(), 0);
  for (int s = 0; s < none.slots(); ++s) {
    for (int c = 0; c < inst.channels; ++c) EXPECT_EQ(none.node(1, s)[c], inst.node(1, s)[c]);
  }
  const PaddedInstance oa = ablate_objects(inst, ObjectChannels::kOriginal);
  const PaddedInstance ca = ablate_objects(inst, ObjectChannels::kClassAttribute);
  for (int c = 0; c < inst.channels; ++c) {
    const bool original = c < kOriginalChannels;
    EXPECT_EQ(oa.node(0, first)[c], original ? inst.node(0, first)[c] : 0.0);
    EXPECT_EQ(ca.node(0, first)[c], original ? 0.0 : inst.node(0, first)[c]);
    EXPECT_EQ(oa.node(0, 0)[c], inst.node(0, 0)[c]);
    EXPECT_EQ(ca.node(0, 0)[c], inst.node(0, 0)[c]);
  }
  EXPECT_EQ(ablate_objects(inst, ObjectChannels::kBoth).features, inst.features);
}

}  // namespace
}  // namespace vgcn
