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

#ifndef VGCN_DATA_IO_H_
#define VGCN_DATA_IO_H_

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vgcn/attributes.h"
#include "vgcn/graph.h"

namespace vgcn {

// One line of an instance file.
struct FrameRecord {
  struct Object {
    std::string class_name;  // empty when the record used a numeric index
    int class_index = kEmptyClass;
    double cx = 0.0;
    double cy = 0.0;
    double score = 0.0;
  };

  int frame = 0;
  // persons[p][j] = {x, y, score}
  std::vector<std::vector<std::array<double, 3>>> persons;
  std::vector<Object> objects;
};

struct LabeledSequence {
  std::vector<VariableGraph> frames;
  int label = 0;
};

struct IndexEntry {
  std::string file;
  std::size_t start = 0;  // first line, 0-based
  std::size_t end = 0;    // one past the last line
  int label = 0;
};

struct InstanceIndex {
  std::vector<IndexEntry> instances;
  std::vector<std::string> label_names;
};

// ParseError (carrying `line_number`) on any schema violation.
FrameRecord parse_frame_record(std::string_view line, std::size_t line_number);
// Canonical single-line form: sorted keys, shortest round-trip numbers.
std::string serialize_frame_record(const FrameRecord& record);

// Resolves class names through `dict` (MissingClass when unknown) and orders
// nodes. ParseError when a person does not have `joints` keypoints.
VariableGraph graph_from_record(const FrameRecord& record,
                                const ClassAttributeDictionary& dict,
                                int joints, std::size_t line_number = 0);
FrameRecord record_from_graph(const VariableGraph& graph,
                              const ClassAttributeDictionary& dict);

InstanceIndex load_index(const std::filesystem::path& path);
std::string serialize_index(const InstanceIndex& index);

// Reads every instance named by the index file; instance files are resolved
// relative to the index's directory.
std::vector<LabeledSequence> load_instances(
    const std::filesystem::path& index_path,
    const ClassAttributeDictionary& dict, int joints = kDefaultJoints);

// Writes `<stem>.ndjson` and `<stem>_index.json` into `dir` and returns the
// index path.
std::filesystem::path write_instances(
    std::span<const LabeledSequence> instances,
    const std::vector<std::string>& label_names,
    const ClassAttributeDictionary& dict, const std::filesystem::path& dir,
    std::string_view stem);

}  // namespace vgcn

#endif  // VGCN_DATA_IO_H_
