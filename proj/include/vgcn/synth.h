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

#ifndef VGCN_SYNTH_H_
#define VGCN_SYNTH_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "vgcn/attributes.h"
#include "vgcn/data_io.h"
#include "vgcn/graph.h"

namespace vgcn {

enum class LabelMode {
  kAction,  // label = motion class
  kObject,  // label = object class
  kBoth,    // label = (motion, object)
  // label = (placement, object): the object is either held at the tracked
  // joint or resting on the floor; motion carries no label information.
  kInteraction,
};

enum class ObjectBinding {
  kIndependent,  // object class drawn independently of the label
  // motion m carries object m when m < objects and no object otherwise
  kMotionBound,
};

LabelMode parse_label_mode(std::string_view name);
std::string_view label_mode_name(LabelMode mode);
ObjectBinding parse_object_binding(std::string_view name);
std::string_view object_binding_name(ObjectBinding binding);

struct SynthSpec {
  int motions = 2;
  int objects = 2;
  int frames = 32;
  int joints = kDefaultJoints;
  LabelMode mode = LabelMode::kBoth;
  ObjectBinding binding = ObjectBinding::kIndependent;
  int train_count = 200;
  int test_count = 80;
  double label_noise = 0.0;
  double joint_noise = 0.004;
  double amplitude = 0.06;
  // Joint the held object follows (right wrist in COCO order).
  int tracked_joint = 10;
  int c_ca = 32;

  int class_count() const;
  // ConfigError on a degenerate spec.
  void validate() const;
};

struct SynthDataset {
  std::vector<LabeledSequence> train;
  std::vector<LabeledSequence> test;
  std::vector<std::string> label_names;
  ClassAttributeDictionary dictionary;
};

// Deterministic in (spec, seed). Labels are balanced: instance i of a split
// draws class i mod class_count before shuffling.
SynthDataset gen_synth(const SynthSpec& spec, std::uint64_t seed);

// Object vocabulary used by the generator, in class-index order.
const std::vector<std::pair<std::string, std::string>>& synth_object_classes();

}  // namespace vgcn

#endif  // VGCN_SYNTH_H_
