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

#ifndef VGCN_AUGMENT_H_
#define VGCN_AUGMENT_H_

#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "vgcn/attributes.h"
#include "vgcn/batching.h"

namespace vgcn {

// Random Node Attack settings. When `fixed_category` is set every injected
// node uses that class instead of a uniformly drawn one.
struct AttackConfig {
  int min_nodes = 1;
  int max_nodes = 3;
  double position_min = 0.0;
  double position_max = 1.0;
  double prob_min = 0.0;
  double prob_max = 1.0;
  std::optional<int> fixed_category;

  void validate() const;
};

// Injects k ~ U{min_nodes..max_nodes} object nodes, identical in every frame,
// into fresh object ranks after the last occupied one. The object region is
// grown when it has too few spare ranks. Categories are drawn uniformly from
// `dict`; ConfigError when the dictionary is empty.
PaddedInstance random_node_attack(const PaddedInstance& instance,
                                  const AttackConfig& config,
                                  const ClassAttributeDictionary& dict,
                                  std::mt19937_64& rng);

enum class StreamKind { kJoint, kBone, kJointMotion, kBoneMotion };

StreamKind parse_stream_kind(std::string_view name);
std::string_view stream_name(StreamKind kind);
inline constexpr StreamKind kAllStreams[] = {
    StreamKind::kJoint, StreamKind::kBone, StreamKind::kJointMotion,
    StreamKind::kBoneMotion};

// parent_map[j] is the parent joint of j; the root (joint 0) is ignored.
// Bone streams replace skeleton positions by child - parent; motion streams
// take the forward temporal difference of positions of every node, zero on the
// last frame and wherever the next frame lacks the node. Score and class
// channels pass through.
PaddedInstance derive_stream(const PaddedInstance& instance, StreamKind kind,
                             std::span<const int> parent_map);

// Default COCO-17 parent map rooted at the nose.
std::vector<int> coco_parent_map();

// Object channel ablation used by the object-information experiments.
enum class ObjectChannels { kNone, kOriginal, kClassAttribute, kBoth };

// kNone removes object nodes; kOriginal zeroes class-attribute channels;
// kClassAttribute zeroes position/score channels of object nodes.
PaddedInstance ablate_objects(const PaddedInstance& instance,
                              ObjectChannels keep);

}  // namespace vgcn

#endif  // VGCN_AUGMENT_H_
