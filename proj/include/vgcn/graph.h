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

#ifndef VGCN_GRAPH_H_
#define VGCN_GRAPH_H_

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "vgcn/attributes.h"

namespace vgcn {

// COCO keypoint layout.
inline constexpr int kDefaultJoints = 17;

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

struct SkeletonNode {
  Point2 position;
  double score = 0.0;
  int person_index = 0;
  int joint_index = 0;
};

struct ObjectNode {
  ObjectAttributes attributes;
  int category_index = 0;
};

// Raw pose detection for one person, joints in skeleton-standard order.
struct PersonDetection {
  int person_index = 0;
  std::vector<Point2> joints;
  std::vector<double> scores;
};

// Single-frame graph. Node order is concat(persons..., object_groups...).
struct VariableGraph {
  int joints = kDefaultJoints;
  std::vector<std::vector<SkeletonNode>> persons;
  std::vector<std::vector<ObjectNode>> object_groups;
  int frame_index = 0;

  int person_count() const { return static_cast<int>(persons.size()); }
  int skeleton_count() const { return person_count() * joints; }
  int object_count() const;
  int node_count() const { return skeleton_count() + object_count(); }
  // Object nodes flattened in graph order.
  std::vector<const ObjectNode*> objects() const;
};

// Sorts persons by person_index and objects into ascending-category groups,
// each group by descending score then ascending x. Throws MalformedInput when
// a person does not have exactly `joints` joints or a category is negative.
VariableGraph order_nodes(std::vector<PersonDetection> persons,
                          std::vector<ObjectNode> objects,
                          int joints = kDefaultJoints, int frame_index = 0);

using Edge = std::pair<int, int>;  // (source, target) in graph node order

struct EdgeSet {
  std::vector<Edge> e1;  // skeleton -> skeleton, both directions
  std::vector<Edge> e2;  // object -> skeleton, one direction
};

EdgeSet build_edge_sets(const VariableGraph& graph);

// Closed-form |E1| + |E2| for m persons of J joints and K_i objects per
// category.
std::int64_t edge_count(std::int64_t persons, std::int64_t joints,
                        std::span<const std::int64_t> objects_per_category);

enum class NodeKind : std::uint8_t { kEmpty = 0, kSkeleton = 1, kObject = 2 };

// Slot layout shared by all frames of a padded instance or batch: person p's
// joint j lives at p * joints + j, object rank r at max_persons * joints + r.
struct PaddedLayout {
  int max_persons = 0;
  int max_objects = 0;
  int joints = kDefaultJoints;

  int slot_count() const { return max_persons * joints + max_objects; }
  int skeleton_slots() const { return max_persons * joints; }
  int skeleton_slot(int person, int joint) const {
    return person * joints + joint;
  }
  int object_slot(int rank) const { return skeleton_slots() + rank; }

  friend bool operator==(const PaddedLayout&, const PaddedLayout&) = default;
};

struct FrameMasks {
  std::vector<std::uint8_t> valid;
  std::vector<NodeKind> kind;
};

// Throws CapacityError when the graph does not fit `layout`.
FrameMasks validity_masks(const VariableGraph& graph,
                          const PaddedLayout& layout);

// Row-normalized dense adjacency (row = receiving slot), slots x slots.
// Valid nodes carry a self-loop; skeleton rows also receive every other valid
// skeleton slot and every valid object slot; empty rows are zero.
std::vector<double> adjacency_from_masks(std::span<const std::uint8_t> valid,
                                         std::span<const NodeKind> kind);

}  // namespace vgcn

#endif  // VGCN_GRAPH_H_
