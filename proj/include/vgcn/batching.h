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

#ifndef VGCN_BATCHING_H_
#define VGCN_BATCHING_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "vgcn/graph.h"

namespace vgcn {

// Per-node input channels: x, y, score, then c_ca class-attribute channels.
// Skeleton nodes carry zeros in the class-attribute channels.
inline constexpr int kOriginalChannels = 3;

// Node-padded sequence for one instance. Features are laid out frame-major:
// (frame, slot, channel).
struct PaddedInstance {
  PaddedLayout layout;
  int frames = 0;
  int channels = 0;
  std::vector<double> features;
  std::vector<std::uint8_t> valid;
  std::vector<NodeKind> kind;
  int label = 0;

  int slots() const { return layout.slot_count(); }
  std::size_t node_index(int t, int slot) const {
    return static_cast<std::size_t>(t) * slots() + slot;
  }
  double* node(int t, int slot) {
    return features.data() + node_index(t, slot) * channels;
  }
  const double* node(int t, int slot) const {
    return features.data() + node_index(t, slot) * channels;
  }
  // Highest occupied object rank + 1 over all frames.
  int used_object_ranks() const;
};

// Rectangular batch: (instance, frame, slot, channel).
struct PaddedBatch {
  PaddedLayout layout;
  int size = 0;
  int frames = 0;
  int channels = 0;
  std::vector<double> features;
  std::vector<std::uint8_t> valid;
  std::vector<NodeKind> kind;
  std::vector<int> labels;

  int slots() const { return layout.slot_count(); }
  std::size_t node_index(int n, int t, int slot) const {
    return (static_cast<std::size_t>(n) * frames + t) * slots() + slot;
  }
  const double* node(int n, int t, int slot) const {
    return features.data() + node_index(n, t, slot) * channels;
  }
};

// Inter-frame padding: embeds every frame into a layout sized to the sequence
// maxima of persons and objects. Throws MalformedInput on an empty sequence or
// mismatched joint counts.
PaddedInstance pad_frames(std::span<const VariableGraph> frames, int c_ca,
                          int label = 0);

// Re-embeds an instance into a layout at least as large in both regions and
// into `frames` >= instance.frames, appending all-empty frames.
PaddedInstance relayout(const PaddedInstance& instance,
                        const PaddedLayout& layout, int frames);

// Intra-batch padding to the region-wise maxima. Throws MalformedInput on an
// empty list or mixed channel/joint counts.
PaddedBatch pad_batch(std::span<const PaddedInstance> instances);

// Extracts instance n back out of a batch (layout and frame count of the
// batch).
PaddedInstance unbatch(const PaddedBatch& batch, int n);

}  // namespace vgcn

#endif  // VGCN_BATCHING_H_
