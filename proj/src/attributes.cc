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

#include "vgcn/attributes.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "vgcn/error.h"

namespace vgcn {
namespace {

using nlohmann::json;

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

}  // namespace

std::vector<double> ObjectAttributes::concat() const {
  std::vector<double> out;
  out.reserve(pos.size() + prob.size() + class_attr.size());
  out.insert(out.end(), pos.begin(), pos.end());
  out.insert(out.end(), prob.begin(), prob.end());
  out.insert(out.end(), class_attr.begin(), class_attr.end());
  return out;
}

ObjectAttributes ObjectAttributes::zeros(const AttributeLayout& layout) {
  return {std::vector<double>(layout.c_pos, 0.0),
          std::vector<double>(layout.c_prob, 0.0),
          std::vector<double>(layout.c_ca, 0.0)};
}

std::vector<double> hash_embed(std::string_view text, int dim,
                               std::uint64_t seed) {
  if (text.empty()) throw MalformedInput("hash_embed: empty text");
  if (dim < 1) throw MalformedInput("hash_embed: dim must be >= 1");
  std::uint64_t state = fnv1a(text) ^ (seed * 0x9e3779b97f4a7c15ULL);
  std::vector<double> out(dim);
  double norm2 = 0.0;
  for (;;) {
    norm2 = 0.0;
    for (double& v : out) {
      // 53 random mantissa bits mapped to [-1, 1).
      v = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-52 - 1.0;
      norm2 += v * v;
    }
    if (norm2 > 0.0) break;
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& v : out) v *= inv;
  return out;
}

ClassAttributeDictionary::ClassAttributeDictionary(int c_ca,
                                                   std::vector<Entry> entries)
    : c_ca_(c_ca), entries_(std::move(entries)), zeros_(c_ca, 0.0) {
  if (c_ca < 1) throw ConfigError("class attribute width must be >= 1");
  std::sort(entries_.begin(), entries_.end(),
            [](const Entry& a, const Entry& b) { return a.index < b.index; });
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const Entry& e = entries_[i];
    if (e.index != static_cast<int>(i)) {
      throw MalformedInput("class indices must be unique and contiguous from 0");
    }
    if (static_cast<int>(e.vector.size()) != c_ca) {
      throw MalformedInput("class '" + e.name + "' has vector width " +
                           std::to_string(e.vector.size()) + ", expected " +
                           std::to_string(c_ca));
    }
    if (e.name.empty() || e.name == "empty") {
      throw MalformedInput("invalid class name '" + e.name + "'");
    }
    if (!by_name_.emplace(e.name, e.index).second) {
      throw MalformedInput("duplicate class name '" + e.name + "'");
    }
  }
}

ClassAttributeDictionary ClassAttributeDictionary::from_descriptions(
    int c_ca,
    const std::vector<std::pair<std::string, std::string>>& names_and_descriptions,
    std::uint64_t seed) {
  std::vector<Entry> entries;
  for (std::size_t i = 0; i < names_and_descriptions.size(); ++i) {
    const auto& [name, description] = names_and_descriptions[i];
    entries.push_back({name, static_cast<int>(i), description,
                       hash_embed(description.empty() ? name : description,
                                  c_ca, seed)});
  }
  return ClassAttributeDictionary(c_ca, std::move(entries));
}

ClassAttributeDictionary ClassAttributeDictionary::parse(
    std::string_view json_text, std::uint64_t seed) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("dictionary: ") + e.what(), 0);
  }
  try {
    if (!doc.is_object()) throw ParseError("dictionary must be an object", 0);
    for (const auto& [key, value] : doc.items()) {
      if (key != "classes" && key != "c_ca") {
        throw ParseError("dictionary: unknown key '" + key + "'", 0);
      }
    }
    const int c_ca = doc.at("c_ca").get<int>();
    std::vector<Entry> entries;
    for (const json& cls : doc.at("classes")) {
      for (const auto& [key, value] : cls.items()) {
        if (key != "name" && key != "index" && key != "description" &&
            key != "vector") {
          throw ParseError("dictionary: unknown class key '" + key + "'", 0);
        }
      }
      Entry e;
      e.name = cls.at("name").get<std::string>();
      e.index = cls.at("index").get<int>();
      e.description = cls.value("description", std::string());
      if (cls.contains("vector")) {
        e.vector = cls.at("vector").get<std::vector<double>>();
      } else {
        const std::string& text = e.description.empty() ? e.name : e.description;
        e.vector = hash_embed(text, c_ca, seed);
      }
      entries.push_back(std::move(e));
    }
    return ClassAttributeDictionary(c_ca, std::move(entries));
  } catch (const json::exception& e) {
    throw ParseError(std::string("dictionary: ") + e.what(), 0);
  }
}

ClassAttributeDictionary ClassAttributeDictionary::load(
    const std::filesystem::path& path, std::uint64_t seed) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open dictionary " + path.string(), 0);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str(), seed);
}

std::string ClassAttributeDictionary::to_json() const {
  json classes = json::array();
  for (const Entry& e : entries_) {
    classes.push_back({{"name", e.name},
                       {"index", e.index},
                       {"description", e.description},
                       {"vector", e.vector}});
  }
  return json{{"c_ca", c_ca_}, {"classes", classes}}.dump(1);
}

void ClassAttributeDictionary::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << to_json() << '\n';
}

std::span<const double> ClassAttributeDictionary::lookup(int class_index) const {
  if (class_index == kEmptyClass) return zeros_;
  if (class_index < 0 || class_index >= size()) {
    throw MissingClass("unknown class index " + std::to_string(class_index));
  }
  return entries_[class_index].vector;
}

int ClassAttributeDictionary::index_of(std::string_view name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) {
    throw MissingClass("unknown class '" + std::string(name) + "'");
  }
  return it->second;
}

const std::string& ClassAttributeDictionary::name_of(int class_index) const {
  if (class_index < 0 || class_index >= size()) {
    throw MissingClass("unknown class index " + std::to_string(class_index));
  }
  return entries_[class_index].name;
}

ObjectAttributes encode_object_node(const ObjectDetection& detection,
                                    const ClassAttributeDictionary& dict) {
  if (!(detection.score >= 0.0 && detection.score <= 1.0)) {
    throw MalformedInput("object score " + std::to_string(detection.score) +
                         " outside [0, 1]");
  }
  std::span<const double> ca = dict.lookup(detection.class_index);
  return {{detection.cx, detection.cy},
          {detection.score},
          std::vector<double>(ca.begin(), ca.end())};
}

}  // namespace vgcn
