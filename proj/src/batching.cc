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

#include "vgcn/batching.h"

#include <algorithm>
#include <string>

#include "vgcn/error.h"

namespace vgcn {

int PaddedInstance::used_object_ranks() const {
  int used = 0;
  for (int t = 0; t < frames; ++t) {
    for (int r = 0; r < layout.max_objects; ++r) {
      if (valid[node_index(t, layout.object_slot(r))]) used = std::max(used, r + 1);
    }
  }
  return used;
}

PaddedInstance pad_frames(std::span<const VariableGraph> frames, int c_ca,
                          int label) {
  if (frames.empty()) throw MalformedInput("pad_frames: empty frame sequence");
  if (c_ca < 0) throw MalformedInput("pad_frames: negative class width");
  PaddedInstance out;
  out.layout.joints = frames.front().joints;
  for (const VariableGraph& g : frames) {
    if (g.joints != out.layout.joints) {
      throw MalformedInput("pad_frames: frames disagree on joint count");
    }
    out.layout.max_persons = std::max(out.layout.max_persons, g.person_count());
    out.layout.max_objects = std::max(out.layout.max_objects, g.object_count());
  }
  out.frames = static_cast<int>(frames.size());
  out.channels = kOriginalChannels + c_ca;
  out.label = label;
  const std::size_t nodes = static_cast<std::size_t>(out.frames) * out.slots();
  out.features.assign(nodes * out.channels, 0.0);
  out.valid.assign(nodes, 0);
  out.kind.assign(nodes, NodeKind::kEmpty);

  for (int t = 0; t < out.frames; ++t) {
    const VariableGraph& g = frames[t];
    FrameMasks masks = validity_masks(g, out.layout);
    std::copy(masks.valid.begin(), masks.valid.end(),
              out.valid.begin() + out.node_index(t, 0));
    std::copy(masks.kind.begin(), masks.kind.end(),
              out.kind.begin() + out.node_index(t, 0));
    for (int p = 0; p < g.person_count(); ++p) {
      for (int j = 0; j < g.joints; ++j) {
        const SkeletonNode& s = g.persons[p][j];
        double* f = out.node(t, out.layout.skeleton_slot(p, j));
        f[0] = s.position.x;
        f[1] = s.position.y;
        f[2] = s.score;
      }
    }
    int rank = 0;
    for (const ObjectNode* o : g.objects()) {
      const ObjectAttributes& a = o->attributes;
      if (a.pos.size() != 2 || a.prob.size() != 1 ||
          static_cast<int>(a.class_attr.size()) != c_ca) {
        throw MalformedInput("pad_frames: object attributes of dimension " +
                             std::to_string(a.dimension()) +
                             " do not match 3 + " + std::to_string(c_ca));
      }
      double* f = out.node(t, out.layout.object_slot(rank++));
      f[0] = a.pos[0];
      f[1] = a.pos[1];
      f[2] = a.prob[0];
      std::copy(a.class_attr.begin(), a.class_attr.end(), f + kOriginalChannels);
    }
  }
  return out;
}

PaddedInstance relayout(const PaddedInstance& instance,
                        const PaddedLayout& layout, int frames) {
  const PaddedLayout& from = instance.layout;
  if (layout.joints != from.joints || layout.max_persons < from.max_persons ||
      layout.max_objects < from.max_objects || frames < instance.frames) {
    throw CapacityError("relayout: target layout smaller than source");
  }
  PaddedInstance out;
  out.layout = layout;
  out.frames = frames;
  out.channels = instance.channels;
  out.label = instance.label;
  const std::size_t nodes = static_cast<std::size_t>(frames) * out.slots();
  out.features.assign(nodes * out.channels, 0.0);
  out.valid.assign(nodes, 0);
  out.kind.assign(nodes, NodeKind::kEmpty);

  auto move_slot = [&](int t, int src, int dst) {
    const std::size_t si = instance.node_index(t, src);
    const std::size_t di = out.node_index(t, dst);
    out.valid[di] = instance.valid[si];
    out.kind[di] = instance.kind[si];
    std::copy_n(instance.node(t, src), instance.channels, out.node(t, dst));
  };
  for (int t = 0; t < instance.frames; ++t) {
    for (int p = 0; p < from.max_persons; ++p) {
      for (int j = 0; j < from.joints; ++j) {
        move_slot(t, from.skeleton_slot(p, j), layout.skeleton_slot(p, j));
      }
    }
    for (int r = 0; r < from.max_objects; ++r) {
      move_slot(t, from.object_slot(r), layout.object_slot(r));
    }
  }
  return out;
}

PaddedBatch pad_batch(std::span<const PaddedInstance> instances) {
  if (instances.empty()) throw MalformedInput("pad_batch: empty batch");
  PaddedBatch batch;
  batch.layout.joints = instances.front().layout.joints;
  batch.channels = instances.front().channels;
  for (const PaddedInstance& inst : instances) {
    if (inst.channels != batch.channels) {
      throw MalformedInput("pad_batch: mixed channel counts " +
                           std::to_string(inst.channels) + " and " +
                           std::to_string(batch.channels));
    }
    if (inst.layout.joints != batch.layout.joints) {
      throw MalformedInput("pad_batch: mixed joint counts");
    }
    batch.layout.max_persons =
        std::max(batch.layout.max_persons, inst.layout.max_persons);
    batch.layout.max_objects =
        std::max(batch.layout.max_objects, inst.layout.max_objects);
    batch.frames = std::max(batch.frames, inst.frames);
  }
  batch.size = static_cast<int>(instances.size());
  const std::size_t per_instance =
      static_cast<std::size_t>(batch.frames) * batch.slots();
  batch.features.reserve(per_instance * batch.size * batch.channels);
  batch.valid.reserve(per_instance * batch.size);
  batch.kind.reserve(per_instance * batch.size);
  for (const PaddedInstance& inst : instances) {
    const bool same = inst.layout == batch.layout && inst.frames == batch.frames;
    PaddedInstance grown;
    if (!same) grown = relayout(inst, batch.layout, batch.frames);
    const PaddedInstance& src = same ? inst : grown;
    batch.features.insert(batch.features.end(), src.features.begin(),
                          src.features.end());
    batch.valid.insert(batch.valid.end(), src.valid.begin(), src.valid.end());
    batch.kind.insert(batch.kind.end(), src.kind.begin(), src.kind.end());
    batch.labels.push_back(src.label);
  }
  return batch;
}

PaddedInstance unbatch(const PaddedBatch& batch, int n) {
  if (n < 0 || n >= batch.size) throw MalformedInput("unbatch: index out of range");
  PaddedInstance out;
  out.layout = batch.layout;
  out.frames = batch.frames;
  out.channels = batch.channels;
  out.label = batch.labels[n];
  const std::size_t nodes = static_cast<std::size_t>(batch.frames) * batch.slots();
  const std::size_t first = batch.node_index(n, 0, 0);
  out.valid.assign(batch.valid.begin() + first, batch.valid.begin() + first + nodes);
  out.kind.assign(batch.kind.begin() + first, batch.kind.begin() + first + nodes);
  out.features.assign(batch.features.begin() + first * batch.channels,
                      batch.features.begin() + (first + nodes) * batch.channels);
  return out;
}

}  // namespace vgcn
