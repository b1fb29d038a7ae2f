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

#ifndef VGCN_ATTRIBUTES_H_
#define VGCN_ATTRIBUTES_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vgcn {

// Reserved class index of the implicit "empty" class. Its attribute vector is
// all zeros and it never appears as a dictionary entry.
inline constexpr int kEmptyClass = -1;

// Channel widths of the three sections of an object node attribute vector.
struct AttributeLayout {
  int c_pos = 2;
  int c_prob = 1;
  int c_ca = 32;

  int dimension() const { return c_pos + c_prob + c_ca; }
};

// Position, detection probability and class attribute of one object node.
struct ObjectAttributes {
  std::vector<double> pos;
  std::vector<double> prob;
  std::vector<double> class_attr;

  int dimension() const {
    return static_cast<int>(pos.size() + prob.size() + class_attr.size());
  }
  // pos ++ prob ++ class_attr.
  std::vector<double> concat() const;

  static ObjectAttributes zeros(const AttributeLayout& layout);
};

// Deterministic unit-norm embedding of `text`. Stand-in for a learned text
// encoder; throws MalformedInput on empty text or dim < 1.
std::vector<double> hash_embed(std::string_view text, int dim,
                               std::uint64_t seed);

// Immutable name -> (index, vector) table of class attribute vectors.
class ClassAttributeDictionary {
 public:
  struct Entry {
    std::string name;
    int index = 0;
    std::string description;
    std::vector<double> vector;
  };

  ClassAttributeDictionary() = default;

  // Entries must carry contiguous indices 0..n-1 (any order) and vectors of
  // width `c_ca`.
  ClassAttributeDictionary(int c_ca, std::vector<Entry> entries);

  // Builds a dictionary from class descriptions; vectors come from
  // hash_embed(description, c_ca, seed). Indices follow list order.
  static ClassAttributeDictionary from_descriptions(
      int c_ca, const std::vector<std::pair<std::string, std::string>>&
                    names_and_descriptions,
      std::uint64_t seed = kDefaultEmbedSeed);

  static ClassAttributeDictionary load(const std::filesystem::path& path,
                                       std::uint64_t seed = kDefaultEmbedSeed);
  static ClassAttributeDictionary parse(std::string_view json_text,
                                        std::uint64_t seed = kDefaultEmbedSeed);
  // Serializes with explicit vectors so a reload is exact.
  std::string to_json() const;
  void save(const std::filesystem::path& path) const;

  int c_ca() const { return c_ca_; }
  int size() const { return static_cast<int>(entries_.size()); }
  const std::vector<Entry>& entries() const { return entries_; }

  // Zero vector for kEmptyClass; MissingClass for any other unknown index.
  std::span<const double> lookup(int class_index) const;
  int index_of(std::string_view name) const;
  const std::string& name_of(int class_index) const;

  static constexpr std::uint64_t kDefaultEmbedSeed = 7;

 private:
  int c_ca_ = 0;
  std::vector<Entry> entries_;  // sorted by index
  std::vector<double> zeros_;
  std::map<std::string, int, std::less<>> by_name_;
};

struct ObjectDetection {
  int class_index = kEmptyClass;
  double cx = 0.0;
  double cy = 0.0;
  double score = 0.0;
};

// Encodes a detection as center ++ score ++ dictionary vector.
ObjectAttributes encode_object_node(const ObjectDetection& detection,
                                    const ClassAttributeDictionary& dict);

}  // namespace vgcn

#endif  // VGCN_ATTRIBUTES_H_
