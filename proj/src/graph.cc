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

#include "vgcn/graph.h"

#include <algorithm>
#include <map>
#include <numeric>
#include <string>

#include "vgcn/error.h"

namespace vgcn {

int VariableGraph::object_count() const {
  int count = 0;
  for (const auto& group : object_groups) count += static_cast<int>(group.size());
  return count;
}

std::vector<const ObjectNode*> VariableGraph::objects() const {
  std::vector<const ObjectNode*> out;
  for (const auto& group : object_groups) {
    for (const ObjectNode& node : group) out.push_back(&node);
  }
  return out;
}

namespace {

double object_score(const ObjectNode& node) {
  return node.attributes.prob.empty() ? 0.0 : node.attributes.prob.front();
}

double object_x(const ObjectNode& node) {
  return node.attributes.pos.empty() ? 0.0 : node.attributes.pos.front();
}

}  // namespace

VariableGraph order_nodes(std::vector<PersonDetection> persons,
                          std::vector<ObjectNode> objects, int joints,
                          int frame_index) {
  if (joints < 1) throw MalformedInput("joint count must be >= 1");
  VariableGraph graph;
  graph.joints = joints;
  graph.frame_index = frame_index;

  std::stable_sort(persons.begin(), persons.end(),
                   [](const PersonDetection& a, const PersonDetection& b) {
                     return a.person_index < b.person_index;
                   });
  for (const PersonDetection& person : persons) {
    if (static_cast<int>(person.joints.size()) != joints ||
        person.scores.size() != person.joints.size()) {
      throw MalformedInput("person " + std::to_string(person.person_index) +
                           " has " + std::to_string(person.joints.size()) +
                           " joints, expected " + std::to_string(joints));
    }
    if (person.person_index < 0) {
      throw MalformedInput("negative person index");
    }
    std::vector<SkeletonNode> block(joints);
    for (int j = 0; j < joints; ++j) {
      block[j] = {person.joints[j], person.scores[j], person.person_index, j};
    }
    graph.persons.push_back(std::move(block));
  }

  std::map<int, std::vector<ObjectNode>> groups;
  for (ObjectNode& node : objects) {
    if (node.category_index < 0) {
      throw MalformedInput("negative object category index " +
                           std::to_string(node.category_index));
    }
    groups[node.category_index].push_back(std::move(node));
  }
  for (auto& [category, group] : groups) {
    std::sort(group.begin(), group.end(),
              [](const ObjectNode& a, const ObjectNode& b) {
                const double sa = object_score(a), sb = object_score(b);
                if (sa != sb) return sa > sb;
                return object_x(a) < object_x(b);
              });
    graph.object_groups.push_back(std::move(group));
  }
  return graph;
}

EdgeSet build_edge_sets(const VariableGraph& graph) {
  EdgeSet edges;
  const int skeleton = graph.skeleton_count();
  const int total = graph.node_count();
  edges.e1.reserve(static_cast<std::size_t>(skeleton) *
                   std::max(skeleton - 1, 0));
  for (int u = 0; u < skeleton; ++u) {
    for (int v = 0; v < skeleton; ++v) {
      if (u != v) edges.e1.emplace_back(u, v);
    }
  }
  edges.e2.reserve(static_cast<std::size_t>(total - skeleton) * skeleton);
  for (int o = skeleton; o < total; ++o) {
    for (int v = 0; v < skeleton; ++v) edges.e2.emplace_back(o, v);
  }
  return edges;
}

std::int64_t edge_count(std::int64_t persons, std::int64_t joints,
                        std::span<const std::int64_t> objects_per_category) {
  const std::int64_t skeleton = persons * joints;
  const std::int64_t objects = std::accumulate(
      objects_per_category.begin(), objects_per_category.end(),
      std::int64_t{0});
  if (skeleton == 0) return 0;
  return skeleton * (skeleton - 1) + skeleton * objects;
}

FrameMasks validity_masks(const VariableGraph& graph,
                          const PaddedLayout& layout) {
  if (graph.person_count() > 0 && graph.joints != layout.joints) {
    throw CapacityError("graph has " + std::to_string(graph.joints) +
                        " joints per person, layout " +
                        std::to_string(layout.joints));
  }
  if (graph.person_count() > layout.max_persons ||
      graph.object_count() > layout.max_objects) {
    throw CapacityError(
        "graph with " + std::to_string(graph.person_count()) + " persons and " +
        std::to_string(graph.object_count()) + " objects exceeds layout (" +
        std::to_string(layout.max_persons) + ", " +
        std::to_string(layout.max_objects) + ")");
  }
  const int slots = layout.slot_count();
  FrameMasks masks{std::vector<std::uint8_t>(slots, 0),
                   std::vector<NodeKind>(slots, NodeKind::kEmpty)};
  for (int p = 0; p < graph.person_count(); ++p) {
    for (int j = 0; j < layout.joints; ++j) {
      const int slot = layout.skeleton_slot(p, j);
      masks.valid[slot] = 1;
      masks.kind[slot] = NodeKind::kSkeleton;
    }
  }
  for (int r = 0; r < graph.object_count(); ++r) {
    const int slot = layout.object_slot(r);
    masks.valid[slot] = 1;
    masks.kind[slot] = NodeKind::kObject;
  }
  return masks;
}

std::vector<double> adjacency_from_masks(std::span<const std::uint8_t> valid,
                                         std::span<const NodeKind> kind) {
  if (valid.size() != kind.size()) {
    throw ShapeError("adjacency masks", {valid.size()}, {kind.size()});
  }
  const std::size_t n = valid.size();
  std::vector<double> adjacency(n * n, 0.0);
  std::size_t sources = 0;  // valid skeleton + object slots
  for (std::size_t u = 0; u < n; ++u) {
    if (valid[u] && kind[u] != NodeKind::kEmpty) ++sources;
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (!valid[v] || kind[v] == NodeKind::kEmpty) continue;
    double* row = adjacency.data() + v * n;
    if (kind[v] == NodeKind::kObject) {
      row[v] = 1.0;
      continue;
    }
    const double w = 1.0 / static_cast<double>(sources);
    for (std::size_t u = 0; u < n; ++u) {
      if (valid[u] && kind[u] != NodeKind::kEmpty) row[u] = w;
    }
  }
  return adjacency;
}

}  // namespace vgcn
