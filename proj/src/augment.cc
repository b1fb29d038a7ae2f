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

#include <algorithm>
#include <string>

#include "vgcn/error.h"

namespace vgcn {

void AttackConfig::validate() const {
  if (min_nodes < 1 || max_nodes < min_nodes) {
    throw ConfigError("attack node range must satisfy 1 <= min <= max");
  }
  if (position_max < position_min || prob_max < prob_min || prob_min < 0.0 ||
      prob_max > 1.0) {
    throw ConfigError("attack position/probability ranges are invalid");
  }
}

PaddedInstance random_node_attack(const PaddedInstance& instance,
                                  const AttackConfig& config,
                                  const ClassAttributeDictionary& dict,
                                  std::mt19937_64& rng) {
  config.validate();
  if (dict.size() == 0) throw ConfigError("attack category pool is empty");
  const int c_ca = instance.channels - kOriginalChannels;
  if (c_ca != dict.c_ca()) {
    throw ConfigError("attack dictionary width " + std::to_string(dict.c_ca()) +
                      " does not match instance width " + std::to_string(c_ca));
  }

  const int k = std::uniform_int_distribution<int>(config.min_nodes,
                                                   config.max_nodes)(rng);
  const int first_rank = instance.used_object_ranks();
  PaddedLayout layout = instance.layout;
  layout.max_objects = std::max(layout.max_objects, first_rank + k);
  PaddedInstance out = layout == instance.layout
                           ? instance
                           : relayout(instance, layout, instance.frames);

  std::uniform_int_distribution<int> category(0, dict.size() - 1);
  std::uniform_real_distribution<double> position(config.position_min,
                                                  config.position_max);
  std::uniform_real_distribution<double> prob(config.prob_min, config.prob_max);
  for (int i = 0; i < k; ++i) {
    const int cls = config.fixed_category ? *config.fixed_category : category(rng);
    std::span<const double> ca = dict.lookup(cls);
    const double x = position(rng);
    const double y = position(rng);
    const double p = prob(rng);
    const int slot = layout.object_slot(first_rank + i);
    for (int t = 0; t < out.frames; ++t) {
      double* f = out.node(t, slot);
      f[0] = x;
      f[1] = y;
      f[2] = p;
      std::copy(ca.begin(), ca.end(), f + kOriginalChannels);
      out.valid[out.node_index(t, slot)] = 1;
      out.kind[out.node_index(t, slot)] = NodeKind::kObject;
    }
  }
  return out;
}

StreamKind parse_stream_kind(std::string_view name) {
  if (name == "joint") return StreamKind::kJoint;
  if (name == "bone") return StreamKind::kBone;
  if (name == "joint_motion") return StreamKind::kJointMotion;
  if (name == "bone_motion") return StreamKind::kBoneMotion;
  throw ConfigError("unknown stream '" + std::string(name) + "'");
}

std::string_view stream_name(StreamKind kind) {
  switch (kind) {
    case StreamKind::kJoint: return "joint";
    case StreamKind::kBone: return "bone";
    case StreamKind::kJointMotion: return "joint_motion";
    case StreamKind::kBoneMotion: return "bone_motion";
  }
  return "joint";
}

std::vector<int> coco_parent_map() {
  return {-1, 0, 0, 1, 2, 0, 0, 5, 6, 7, 8, 5, 6, 11, 12, 13, 14};
}

namespace {

PaddedInstance to_bone(const PaddedInstance& in, std::span<const int> parents) {
  const PaddedLayout& layout = in.layout;
  if (static_cast<int>(parents.size()) < layout.joints) {
    throw ConfigError("parent map has " + std::to_string(parents.size()) +
                      " entries, skeleton has " + std::to_string(layout.joints));
  }
  for (int j = 1; j < layout.joints; ++j) {
    if (parents[j] < 0 || parents[j] >= layout.joints) {
      throw ConfigError("missing parent for joint " + std::to_string(j));
    }
  }
  PaddedInstance out = in;
  for (int t = 0; t < in.frames; ++t) {
    for (int p = 0; p < layout.max_persons; ++p) {
      for (int j = 0; j < layout.joints; ++j) {
        const int slot = layout.skeleton_slot(p, j);
        if (!in.valid[in.node_index(t, slot)]) continue;
        double* f = out.node(t, slot);
        if (j == 0) {
          f[0] = 0.0;
          f[1] = 0.0;
          continue;
        }
        const int parent = layout.skeleton_slot(p, parents[j]);
        const double* c = in.node(t, slot);
        const double* q = in.node(t, parent);
        f[0] = c[0] - q[0];
        f[1] = c[1] - q[1];
      }
    }
  }
  return out;
}

PaddedInstance to_motion(const PaddedInstance& in) {
  PaddedInstance out = in;
  for (int t = 0; t < in.frames; ++t) {
    for (int s = 0; s < in.slots(); ++s) {
      const std::size_t i = in.node_index(t, s);
      if (!in.valid[i]) continue;
      double* f = out.node(t, s);
      const bool next = t + 1 < in.frames && in.valid[in.node_index(t + 1, s)] &&
                        in.kind[in.node_index(t + 1, s)] == in.kind[i];
      if (!next) {
        f[0] = 0.0;
        f[1] = 0.0;
        continue;
      }
      const double* a = in.node(t, s);
      const double* b = in.node(t + 1, s);
      f[0] = b[0] - a[0];
      f[1] = b[1] - a[1];
    }
  }
  return out;
}

}  // namespace

PaddedInstance derive_stream(const PaddedInstance& instance, StreamKind kind,
                             std::span<const int> parent_map) {
  switch (kind) {
    case StreamKind::kJoint: return instance;
    case StreamKind::kBone: return to_bone(instance, parent_map);
    case StreamKind::kJointMotion: return to_motion(instance);
    case StreamKind::kBoneMotion:
      return to_motion(to_bone(instance, parent_map));
  }
  return instance;
}

PaddedInstance ablate_objects(const PaddedInstance& instance,
                              ObjectChannels keep) {
  if (keep == ObjectChannels::kBoth) return instance;
  if (keep == ObjectChannels::kNone) {
    PaddedInstance out;
    out.layout = instance.layout;
    out.layout.max_objects = 0;
    out.frames = instance.frames;
    out.channels = instance.channels;
    out.label = instance.label;
    for (int t = 0; t < instance.frames; ++t) {
      for (int s = 0; s < out.layout.slot_count(); ++s) {
        const std::size_t i = instance.node_index(t, s);
        out.valid.push_back(instance.valid[i]);
        out.kind.push_back(instance.kind[i]);
        const double* f = instance.node(t, s);
        out.features.insert(out.features.end(), f, f + instance.channels);
      }
    }
    return out;
  }
  PaddedInstance out = instance;
  const int begin = keep == ObjectChannels::kOriginal ? kOriginalChannels : 0;
  const int end = keep == ObjectChannels::kOriginal ? instance.channels
                                                    : kOriginalChannels;
  for (int t = 0; t < out.frames; ++t) {
    for (int s = out.layout.skeleton_slots(); s < out.slots(); ++s) {
      double* f = out.node(t, s);
      std::fill(f + begin, f + end, 0.0);
    }
  }
  return out;
}

}  // namespace vgcn
