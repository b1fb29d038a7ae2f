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

#include "vgcn/data_io.h"

#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "vgcn/error.h"

namespace vgcn {
namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> keys,
                         const char* where, std::size_t line) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* k : keys) known = known || key == k;
    if (!known) throw ParseError(std::string(where) + ": unknown key '" + key + "'", line);
  }
}

double unit_interval(const json& value, const char* what, std::size_t line) {
  if (!value.is_number()) throw ParseError(std::string(what) + " must be a number", line);
  const double v = value.get<double>();
  if (!(v >= 0.0 && v <= 1.0)) {
    throw ParseError(std::string(what) + " " + value.dump() + " outside [0, 1]", line);
  }
  return v;
}

}  // namespace

FrameRecord parse_frame_record(std::string_view line, std::size_t line_number) {
  json doc;
  try {
    doc = json::parse(line);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), line_number);
  }
  if (!doc.is_object()) throw ParseError("frame record must be an object", line_number);
  reject_unknown_keys(doc, {"frame", "persons", "objects"}, "frame record", line_number);
  FrameRecord record;
  if (!doc.contains("frame") || !doc["frame"].is_number_integer()) {
    throw ParseError("missing integer 'frame'", line_number);
  }
  record.frame = doc["frame"].get<int>();

  const json persons = doc.value("persons", json::array());
  if (!persons.is_array()) throw ParseError("'persons' must be an array", line_number);
  for (const json& person : persons) {
    if (!person.is_array()) throw ParseError("person must be an array of joints", line_number);
    std::vector<std::array<double, 3>> joints;
    for (const json& joint : person) {
      if (!joint.is_array() || joint.size() != 3) {
        throw ParseError("joint must be [x, y, score]", line_number);
      }
      joints.push_back({unit_interval(joint[0], "joint x", line_number),
                        unit_interval(joint[1], "joint y", line_number),
                        unit_interval(joint[2], "joint score", line_number)});
    }
    record.persons.push_back(std::move(joints));
  }

  const json objects = doc.value("objects", json::array());
  if (!objects.is_array()) throw ParseError("'objects' must be an array", line_number);
  for (const json& obj : objects) {
    if (!obj.is_object()) throw ParseError("object must be an object", line_number);
    reject_unknown_keys(obj, {"class", "cx", "cy", "score"}, "object", line_number);
    for (const char* key : {"class", "cx", "cy", "score"}) {
      if (!obj.contains(key)) {
        throw ParseError(std::string("object lacks '") + key + "'", line_number);
      }
    }
    FrameRecord::Object o;
    const json& cls = obj["class"];
    if (cls.is_string()) {
      o.class_name = cls.get<std::string>();
    } else if (cls.is_number_integer()) {
      o.class_index = cls.get<int>();
      if (o.class_index < 0) throw ParseError("negative object class", line_number);
    } else {
      throw ParseError("object class must be a name or an index", line_number);
    }
    o.cx = unit_interval(obj["cx"], "object cx", line_number);
    o.cy = unit_interval(obj["cy"], "object cy", line_number);
    o.score = unit_interval(obj["score"], "object score", line_number);
    record.objects.push_back(std::move(o));
  }
  return record;
}

std::string serialize_frame_record(const FrameRecord& record) {
  json doc;
  doc["frame"] = record.frame;
  json persons = json::array();
  for (const auto& person : record.persons) {
    json joints = json::array();
    for (const auto& j : person) joints.push_back({j[0], j[1], j[2]});
    persons.push_back(std::move(joints));
  }
  doc["persons"] = std::move(persons);
  json objects = json::array();
  for (const FrameRecord::Object& o : record.objects) {
    json obj;
    if (o.class_name.empty()) {
      obj["class"] = o.class_index;
    } else {
      obj["class"] = o.class_name;
    }
    obj["cx"] = o.cx;
    obj["cy"] = o.cy;
    obj["score"] = o.score;
    objects.push_back(std::move(obj));
  }
  doc["objects"] = std::move(objects);
  return doc.dump();
}

VariableGraph graph_from_record(const FrameRecord& record,
                                const ClassAttributeDictionary& dict,
                                int joints, std::size_t line_number) {
  std::vector<PersonDetection> persons;
  for (std::size_t p = 0; p < record.persons.size(); ++p) {
    const auto& src = record.persons[p];
    if (static_cast<int>(src.size()) != joints) {
      throw ParseError("person " + std::to_string(p) + " has " +
                           std::to_string(src.size()) + " joints, expected " +
                           std::to_string(joints),
                       line_number);
    }
    PersonDetection det;
    det.person_index = static_cast<int>(p);
    for (const auto& j : src) {
      det.joints.push_back({j[0], j[1]});
      det.scores.push_back(j[2]);
    }
    persons.push_back(std::move(det));
  }
  std::vector<ObjectNode> objects;
  for (const FrameRecord::Object& o : record.objects) {
    const int index = o.class_name.empty() ? o.class_index : dict.index_of(o.class_name);
    ObjectNode node;
    node.category_index = index;
    node.attributes = encode_object_node({index, o.cx, o.cy, o.score}, dict);
    objects.push_back(std::move(node));
  }
  return order_nodes(std::move(persons), std::move(objects), joints, record.frame);
}

FrameRecord record_from_graph(const VariableGraph& graph,
                              const ClassAttributeDictionary& dict) {
  FrameRecord record;
  record.frame = graph.frame_index;
  for (const auto& person : graph.persons) {
    std::vector<std::array<double, 3>> joints;
    for (const SkeletonNode& s : person) {
      joints.push_back({s.position.x, s.position.y, s.score});
    }
    record.persons.push_back(std::move(joints));
  }
  for (const ObjectNode* o : graph.objects()) {
    FrameRecord::Object obj;
    obj.class_name = dict.name_of(o->category_index);
    obj.class_index = o->category_index;
    obj.cx = o->attributes.pos.at(0);
    obj.cy = o->attributes.pos.at(1);
    obj.score = o->attributes.prob.at(0);
    record.objects.push_back(std::move(obj));
  }
  return record;
}

InstanceIndex load_index(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open index " + path.string(), 0);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what(), 0);
  }
  InstanceIndex index;
  try {
    reject_unknown_keys(doc, {"instances", "label_names"}, "index", 0);
    for (const json& entry : doc.at("instances")) {
      reject_unknown_keys(entry, {"file", "start", "end", "label"}, "index entry", 0);
      IndexEntry e{entry.at("file").get<std::string>(),
                   entry.at("start").get<std::size_t>(),
                   entry.at("end").get<std::size_t>(), entry.at("label").get<int>()};
      if (e.end <= e.start) throw ParseError("index entry with no frames", 0);
      index.instances.push_back(std::move(e));
    }
    index.label_names = doc.value("label_names", std::vector<std::string>{});
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what(), 0);
  }
  return index;
}

std::string serialize_index(const InstanceIndex& index) {
  json instances = json::array();
  for (const IndexEntry& e : index.instances) {
    instances.push_back(
        {{"file", e.file}, {"start", e.start}, {"end", e.end}, {"label", e.label}});
  }
  return json{{"instances", instances}, {"label_names", index.label_names}}.dump(1);
}

std::vector<LabeledSequence> load_instances(const std::filesystem::path& index_path,
                                            const ClassAttributeDictionary& dict,
                                            int joints) {
  const InstanceIndex index = load_index(index_path);
  std::map<std::string, std::vector<std::string>> files;
  std::vector<LabeledSequence> out;
  for (const IndexEntry& entry : index.instances) {
    auto it = files.find(entry.file);
    if (it == files.end()) {
      const std::filesystem::path file = index_path.parent_path() / entry.file;
      std::ifstream in(file);
      if (!in) throw ParseError("cannot open instance file " + file.string(), 0);
      std::vector<std::string> lines;
      for (std::string line; std::getline(in, line);) lines.push_back(std::move(line));
      it = files.emplace(entry.file, std::move(lines)).first;
    }
    const std::vector<std::string>& lines = it->second;
    if (entry.end > lines.size()) {
      throw ParseError(entry.file + " has " + std::to_string(lines.size()) +
                           " lines, index asks for " + std::to_string(entry.end),
                       0);
    }
    LabeledSequence seq;
    seq.label = entry.label;
    for (std::size_t i = entry.start; i < entry.end; ++i) {
      const FrameRecord record = parse_frame_record(lines[i], i + 1);
      seq.frames.push_back(graph_from_record(record, dict, joints, i + 1));
    }
    out.push_back(std::move(seq));
  }
  return out;
}

std::filesystem::path write_instances(std::span<const LabeledSequence> instances,
                                      const std::vector<std::string>& label_names,
                                      const ClassAttributeDictionary& dict,
                                      const std::filesystem::path& dir,
                                      std::string_view stem) {
  std::filesystem::create_directories(dir);
  const std::string data_name = std::string(stem) + ".ndjson";
  std::ofstream data(dir / data_name);
  if (!data) throw Error("cannot write " + (dir / data_name).string());
  InstanceIndex index;
  index.label_names = label_names;
  std::size_t line = 0;
  for (const LabeledSequence& seq : instances) {
    IndexEntry entry{data_name, line, line, seq.label};
    for (const VariableGraph& g : seq.frames) {
      data << serialize_frame_record(record_from_graph(g, dict)) << '\n';
      ++line;
    }
    entry.end = line;
    index.instances.push_back(std::move(entry));
  }
  const std::filesystem::path index_path = dir / (std::string(stem) + "_index.json");
  std::ofstream idx(index_path);
  if (!idx) throw Error("cannot write " + index_path.string());
  idx << serialize_index(index) << '\n';
  return index_path;
}

}  // namespace vgcn
