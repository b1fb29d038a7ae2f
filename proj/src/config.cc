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

#include "vgcn/config.h"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "vgcn/error.h"

namespace vgcn {
namespace {

using nlohmann::ordered_json;

// Reads fields of one JSON section, rejecting any key it was not asked about.
class Section {
 public:
  Section(const ordered_json& doc, std::string name) : name_(std::move(name)) {
    if (doc.is_null()) return;
    if (!doc.is_object()) throw ConfigError(name_ + " must be an object");
    doc_ = &doc;
  }

  template <typename T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    if (doc_ == nullptr || !doc_->contains(key)) return;
    try {
      out = (*doc_)[key].template get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError(name_ + "." + key + " has the wrong type");
    }
  }

  const ordered_json& child(const char* key) {
    seen_.insert(key);
    static const ordered_json kNull;
    if (doc_ == nullptr || !doc_->contains(key)) return kNull;
    return (*doc_)[key];
  }

  void finish() const {
    if (doc_ == nullptr) return;
    for (const auto& [key, value] : doc_->items()) {
      if (!seen_.count(key)) throw ConfigError("unknown config key '" + name_ + "." + key + "'");
    }
  }

 private:
  std::string name_;
  const ordered_json* doc_ = nullptr;
  std::set<std::string, std::less<>> seen_;
};

}  // namespace

RunConfig RunConfig::parse(std::string_view json_text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");

  RunConfig cfg;
  Section root(doc, "config");
  root.read("seed", cfg.seed);

  Section skeleton(root.child("skeleton_standard"), "skeleton_standard");
  skeleton.read("J", cfg.skeleton.joints);
  const bool has_parent_map = root.child("skeleton_standard").is_object() &&
                              root.child("skeleton_standard").contains("parent_map");
  skeleton.read("parent_map", cfg.skeleton.parent_map);
  skeleton.finish();
  if (cfg.skeleton.joints < 1) throw ConfigError("skeleton_standard.J must be >= 1");
  if (!has_parent_map && cfg.skeleton.joints != kDefaultJoints) {
    throw ConfigError("skeleton_standard.parent_map is required when J != 17");
  }
  if (static_cast<int>(cfg.skeleton.parent_map.size()) != cfg.skeleton.joints) {
    throw ConfigError("skeleton_standard.parent_map must list J parents");
  }
  for (std::size_t j = 1; j < cfg.skeleton.parent_map.size(); ++j) {
    const int p = cfg.skeleton.parent_map[j];
    if (p < 0 || p >= cfg.skeleton.joints || p == static_cast<int>(j)) {
      throw ConfigError("skeleton_standard.parent_map[" + std::to_string(j) + "] invalid");
    }
  }

  Section model(root.child("model"), "model");
  model.read("widths", cfg.model.widths);
  model.read("strides", cfg.model.strides);
  model.read("temporal_kernel", cfg.model.temporal_kernel);
  model.read("caf_width", cfg.model.caf_width);
  model.read("classes", cfg.model.classes);
  model.read("c_ca", cfg.model.c_ca);
  model.read("person_capacity", cfg.model.person_capacity);
  model.read("object_capacity", cfg.model.object_capacity);
  model.read("use_bias", cfg.model.use_bias);
  model.read("init_gain", cfg.model.init_gain);
  model.finish();

  bool rna_enabled = false;
  Section train(root.child("train"), "train");
  train.read("epochs", cfg.train.epochs);
  train.read("batch_size", cfg.train.batch_size);
  train.read("lr", cfg.train.lr);
  train.read("momentum", cfg.train.momentum);
  train.read("weight_decay", cfg.train.weight_decay);
  train.read("lambda", cfg.train.lambda);
  train.read("node_balance", cfg.train.node_balance);
  train.read("rna", rna_enabled);
  train.read("rna_rate", cfg.train.rna_rate);
  train.finish();

  Section rna(root.child("rna"), "rna");
  rna.read("min_nodes", cfg.rna.min_nodes);
  rna.read("max_nodes", cfg.rna.max_nodes);
  rna.read("position_min", cfg.rna.position_min);
  rna.read("position_max", cfg.rna.position_max);
  rna.read("prob_min", cfg.rna.prob_min);
  rna.read("prob_max", cfg.rna.prob_max);
  rna.finish();

  Section data(root.child("data"), "data");
  std::string dir = cfg.data.dir.string();
  data.read("dir", dir);
  cfg.data.dir = dir;
  data.read("train_index", cfg.data.train_index);
  data.read("test_index", cfg.data.test_index);
  data.read("dictionary", cfg.data.dictionary);
  data.finish();

  Section synth(root.child("synth"), "synth");
  synth.read("motions", cfg.synth.motions);
  synth.read("objects", cfg.synth.objects);
  synth.read("frames", cfg.synth.frames);
  std::string mode(label_mode_name(cfg.synth.mode));
  std::string binding(object_binding_name(cfg.synth.binding));
  synth.read("mode", mode);
  synth.read("binding", binding);
  cfg.synth.mode = parse_label_mode(mode);
  cfg.synth.binding = parse_object_binding(binding);
  synth.read("train_count", cfg.synth.train_count);
  synth.read("test_count", cfg.synth.test_count);
  synth.read("label_noise", cfg.synth.label_noise);
  synth.read("joint_noise", cfg.synth.joint_noise);
  synth.read("amplitude", cfg.synth.amplitude);
  synth.read("tracked_joint", cfg.synth.tracked_joint);
  synth.finish();

  Section st(root.child("selftrain"), "selftrain");
  st.read("threshold", cfg.selftrain.loop.threshold);
  st.read("max_iterations", cfg.selftrain.loop.max_iterations);
  st.read("noise", cfg.selftrain.noise);
  st.read("train_points", cfg.selftrain.detector.train_points);
  st.read("held_out_points", cfg.selftrain.detector.held_out_points);
  st.read("labeled_fraction", cfg.selftrain.detector.labeled_fraction);
  st.read("separation", cfg.selftrain.detector.separation);
  st.finish();
  root.finish();

  // Settings shared across sections follow the top-level values.
  cfg.model.joints = cfg.skeleton.joints;
  cfg.synth.joints = cfg.skeleton.joints;
  cfg.synth.c_ca = cfg.model.c_ca;
  cfg.model.seed = cfg.seed;
  cfg.train.seed = cfg.seed;
  cfg.selftrain.loop.seed = cfg.seed;
  if (rna_enabled) cfg.train.rna = cfg.rna;
  if (cfg.synth.tracked_joint >= cfg.synth.joints) cfg.synth.tracked_joint = cfg.synth.joints - 1;

  cfg.model.validate();
  cfg.train.validate();
  cfg.rna.validate();
  cfg.synth.validate();
  cfg.selftrain.loop.validate();
  if (!(cfg.selftrain.noise >= 0.0 && cfg.selftrain.noise < 0.5)) {
    throw ConfigError("selftrain.noise must lie in [0, 0.5)");
  }
  const double frac = cfg.selftrain.detector.labeled_fraction;
  if (!(frac > 0.0 && frac <= 1.0)) {
    throw ConfigError("selftrain.labeled_fraction must lie in (0, 1]");
  }
  return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string RunConfig::to_json() const {
  ordered_json doc;
  doc["seed"] = seed;
  doc["skeleton_standard"] = {{"J", skeleton.joints}, {"parent_map", skeleton.parent_map}};
  doc["model"] = {{"widths", model.widths},
                  {"strides", model.strides},
                  {"temporal_kernel", model.temporal_kernel},
                  {"caf_width", model.caf_width},
                  {"classes", model.classes},
                  {"c_ca", model.c_ca},
                  {"person_capacity", model.person_capacity},
                  {"object_capacity", model.object_capacity},
                  {"use_bias", model.use_bias},
                  {"init_gain", model.init_gain}};
  doc["train"] = {{"epochs", train.epochs},
                  {"batch_size", train.batch_size},
                  {"lr", train.lr},
                  {"momentum", train.momentum},
                  {"weight_decay", train.weight_decay},
                  {"lambda", train.lambda},
                  {"node_balance", train.node_balance},
                  {"rna", train.rna.has_value()},
                  {"rna_rate", train.rna_rate}};
  doc["rna"] = {{"min_nodes", rna.min_nodes},
                {"max_nodes", rna.max_nodes},
                {"position_min", rna.position_min},
                {"position_max", rna.position_max},
                {"prob_min", rna.prob_min},
                {"prob_max", rna.prob_max}};
  doc["data"] = {{"dir", data.dir.string()},
                 {"train_index", data.train_index},
                 {"test_index", data.test_index},
                 {"dictionary", data.dictionary}};
  doc["synth"] = {{"motions", synth.motions},
                  {"objects", synth.objects},
                  {"frames", synth.frames},
                  {"mode", label_mode_name(synth.mode)},
                  {"binding", object_binding_name(synth.binding)},
                  {"train_count", synth.train_count},
                  {"test_count", synth.test_count},
                  {"label_noise", synth.label_noise},
                  {"joint_noise", synth.joint_noise},
                  {"amplitude", synth.amplitude},
                  {"tracked_joint", synth.tracked_joint}};
  doc["selftrain"] = {{"threshold", selftrain.loop.threshold},
                      {"max_iterations", selftrain.loop.max_iterations},
                      {"noise", selftrain.noise},
                      {"train_points", selftrain.detector.train_points},
                      {"held_out_points", selftrain.detector.held_out_points},
                      {"labeled_fraction", selftrain.detector.labeled_fraction},
                      {"separation", selftrain.detector.separation}};
  return doc.dump(2);
}

}  // namespace vgcn
