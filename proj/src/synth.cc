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

#include "vgcn/synth.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "vgcn/error.h"

namespace vgcn {
namespace {

// Standing pose in COCO order, normalized image coordinates.
constexpr std::array<Point2, kDefaultJoints> kRestPose = {{
    {0.50, 0.25}, {0.52, 0.23}, {0.48, 0.23}, {0.54, 0.24}, {0.46, 0.24},
    {0.56, 0.35}, {0.44, 0.35}, {0.60, 0.45}, {0.40, 0.45}, {0.62, 0.55},
    {0.38, 0.55}, {0.54, 0.58}, {0.46, 0.58}, {0.55, 0.72}, {0.45, 0.72},
    {0.55, 0.86}, {0.45, 0.86},
}};

// How strongly each joint follows the motion trajectory.
double motion_weight(int joint) {
  switch (joint) {
    case 5: case 6: return 0.4;
    case 7: case 8: return 0.7;
    case 9: case 10: return 1.0;
    default: return 0.6;
  }
}

Point2 rest_position(int joint) {
  if (joint < kDefaultJoints) return kRestPose[static_cast<std::size_t>(joint)];
  // Extra joints of a non-COCO layout sit on a ring around the torso.
  const double a = 2.0 * std::numbers::pi * joint / 23.0;
  return {0.5 + 0.1 * std::cos(a), 0.5 + 0.1 * std::sin(a)};
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

struct InstancePlan {
  int motion = 0;
  int object = kEmptyClass;
  bool placed = false;
  int label = 0;
};

InstancePlan plan_for_class(const SynthSpec& spec, int cls, std::mt19937_64& rng) {
  InstancePlan plan;
  plan.label = cls;
  std::uniform_int_distribution<int> any_motion(0, spec.motions - 1);
  std::uniform_int_distribution<int> any_object(0, spec.objects - 1);
  switch (spec.mode) {
    case LabelMode::kAction:
      plan.motion = cls;
      if (spec.binding == ObjectBinding::kMotionBound) {
        plan.object = cls < spec.objects ? cls : kEmptyClass;
      } else {
        plan.object = any_object(rng);
      }
      break;
    case LabelMode::kObject:
      plan.object = cls;
      plan.motion = any_motion(rng);
      break;
    case LabelMode::kBoth:
      plan.motion = cls / spec.objects;
      plan.object = cls % spec.objects;
      break;
    case LabelMode::kInteraction:
      plan.placed = cls / spec.objects == 1;
      plan.object = cls % spec.objects;
      plan.motion = any_motion(rng);
      break;
  }
  return plan;
}

LabeledSequence make_instance(const SynthSpec& spec, const InstancePlan& plan,
                              const ClassAttributeDictionary& dict,
                              std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> joint_noise(0.0, spec.joint_noise);
  std::normal_distribution<double> jitter(0.0, 0.01);

  const double phase = 2.0 * std::numbers::pi * unit(rng);
  const double dx = 0.04 * (unit(rng) - 0.5);
  const double dy = 0.04 * (unit(rng) - 0.5);
  const double angle = std::numbers::pi * plan.motion / spec.motions;
  const double freq = 2.0 * std::numbers::pi * (plan.motion + 1) / spec.frames;
  const Point2 floor_spot{0.3 + 0.4 * unit(rng), 0.88 + 0.07 * unit(rng)};

  LabeledSequence seq;
  seq.label = plan.label;
  for (int t = 0; t < spec.frames; ++t) {
    // Raised-sine displacement: the arm oscillates between rest and a
    // class-specific extreme, so the time-averaged pose differs by class too.
    const double wave = 0.5 * spec.amplitude * (1.0 + std::sin(freq * t + phase));
    PersonDetection person;
    person.person_index = 0;
    for (int j = 0; j < spec.joints; ++j) {
      const Point2 rest = rest_position(j);
      const double w = motion_weight(j) * wave;
      person.joints.push_back(
          {clamp01(rest.x + dx + w * std::cos(angle) + joint_noise(rng)),
           clamp01(rest.y + dy + w * std::sin(angle) + joint_noise(rng))});
      person.scores.push_back(0.85 + 0.15 * unit(rng));
    }
    std::vector<ObjectNode> objects;
    if (plan.object != kEmptyClass) {
      Point2 at;
      if (plan.placed) {
        at = {clamp01(floor_spot.x + 0.3 * jitter(rng)),
              clamp01(floor_spot.y + 0.3 * jitter(rng))};
      } else {
        const Point2& hand = person.joints[static_cast<std::size_t>(spec.tracked_joint)];
        at = {clamp01(hand.x + jitter(rng)), clamp01(hand.y + jitter(rng))};
      }
      ObjectNode node;
      node.category_index = plan.object;
      node.attributes = encode_object_node(
          {plan.object, at.x, at.y, 0.8 + 0.2 * unit(rng)}, dict);
      objects.push_back(std::move(node));
    }
    std::vector<PersonDetection> persons;
    persons.push_back(std::move(person));
    seq.frames.push_back(order_nodes(std::move(persons), std::move(objects), spec.joints, t));
  }
  return seq;
}

std::vector<LabeledSequence> make_split(const SynthSpec& spec, int count,
                                        const ClassAttributeDictionary& dict,
                                        std::mt19937_64& rng) {
  const int classes = spec.class_count();
  std::vector<LabeledSequence> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    out.push_back(make_instance(spec, plan_for_class(spec, i % classes, rng), dict, rng));
  }
  std::shuffle(out.begin(), out.end(), rng);
  if (spec.label_noise > 0.0 && classes > 1) {
    std::bernoulli_distribution flip(spec.label_noise);
    std::uniform_int_distribution<int> other(1, classes - 1);
    for (LabeledSequence& seq : out) {
      if (flip(rng)) seq.label = (seq.label + other(rng)) % classes;
    }
  }
  return out;
}

}  // namespace

LabelMode parse_label_mode(std::string_view name) {
  if (name == "action") return LabelMode::kAction;
  if (name == "object") return LabelMode::kObject;
  if (name == "both") return LabelMode::kBoth;
  if (name == "interaction") return LabelMode::kInteraction;
  throw ConfigError("unknown label mode '" + std::string(name) + "'");
}

std::string_view label_mode_name(LabelMode mode) {
  switch (mode) {
    case LabelMode::kAction: return "action";
    case LabelMode::kObject: return "object";
    case LabelMode::kBoth: return "both";
    case LabelMode::kInteraction: return "interaction";
  }
  return "?";
}

ObjectBinding parse_object_binding(std::string_view name) {
  if (name == "independent") return ObjectBinding::kIndependent;
  if (name == "motion_bound") return ObjectBinding::kMotionBound;
  throw ConfigError("unknown object binding '" + std::string(name) + "'");
}

std::string_view object_binding_name(ObjectBinding binding) {
  return binding == ObjectBinding::kIndependent ? "independent" : "motion_bound";
}

int SynthSpec::class_count() const {
  switch (mode) {
    case LabelMode::kAction: return motions;
    case LabelMode::kObject: return objects;
    case LabelMode::kBoth: return motions * objects;
    case LabelMode::kInteraction: return 2 * objects;
  }
  return 0;
}

void SynthSpec::validate() const {
  if (motions < 1) throw ConfigError("synth: motions must be >= 1");
  if (objects < 1) throw ConfigError("synth: objects must be >= 1");
  if (objects > static_cast<int>(synth_object_classes().size())) {
    throw ConfigError("synth: at most " + std::to_string(synth_object_classes().size()) +
                      " object classes");
  }
  if (frames < 1) throw ConfigError("synth: frames must be >= 1");
  if (joints < 1) throw ConfigError("synth: joints must be >= 1");
  if (tracked_joint < 0 || tracked_joint >= joints) {
    throw ConfigError("synth: tracked_joint out of range");
  }
  if (train_count < 0 || test_count < 0) throw ConfigError("synth: negative split size");
  if (!(label_noise >= 0.0 && label_noise <= 1.0)) {
    throw ConfigError("synth: label_noise must lie in [0, 1]");
  }
  if (!(joint_noise >= 0.0) || !(amplitude >= 0.0)) {
    throw ConfigError("synth: noise and amplitude must be non-negative");
  }
  if (c_ca < 1) throw ConfigError("synth: c_ca must be >= 1");
  if (binding == ObjectBinding::kMotionBound && mode != LabelMode::kAction) {
    throw ConfigError("synth: motion_bound objects require label mode 'action'");
  }
  if (class_count() < 1) throw ConfigError("synth: no classes");
}

const std::vector<std::pair<std::string, std::string>>& synth_object_classes() {
  static const std::vector<std::pair<std::string, std::string>> kClasses = {
      {"book", "a bound stack of printed pages with a hard cover"},
      {"cup", "a small open container with a handle for hot drinks"},
      {"toothbrush", "a small brush with a long handle for cleaning teeth"},
      {"comb", "a flat strip with a row of narrow teeth for hair"},
      {"chair", "a seat with four legs and a back rest"},
      {"pen", "a slim tube that writes with ink"},
      {"paper", "a thin flat white sheet for writing"},
      {"shoe", "footwear with a sole and laces"},
      {"eyeglass", "two lenses in a frame worn over the eyes"},
      {"hat", "a soft covering worn on the head"},
      {"phone", "a handheld device with a glass screen for calls"},
      {"keyboard", "a flat board of keys for typing"},
      {"watch", "a small clock worn on the wrist"},
  };
  return kClasses;
}

SynthDataset gen_synth(const SynthSpec& spec, std::uint64_t seed) {
  spec.validate();
  const auto& all = synth_object_classes();
  std::vector<std::pair<std::string, std::string>> used(all.begin(), all.begin() + spec.objects);
  SynthDataset data{{}, {}, {}, ClassAttributeDictionary::from_descriptions(spec.c_ca, used)};

  for (int c = 0; c < spec.class_count(); ++c) {
    switch (spec.mode) {
      case LabelMode::kAction:
        data.label_names.push_back("motion" + std::to_string(c));
        break;
      case LabelMode::kObject:
        data.label_names.push_back(used[static_cast<std::size_t>(c)].first);
        break;
      case LabelMode::kBoth:
        data.label_names.push_back("motion" + std::to_string(c / spec.objects) + "+" +
                                   used[static_cast<std::size_t>(c % spec.objects)].first);
        break;
      case LabelMode::kInteraction:
        data.label_names.push_back(std::string(c / spec.objects == 1 ? "placed+" : "held+") +
                                   used[static_cast<std::size_t>(c % spec.objects)].first);
        break;
    }
  }

  std::mt19937_64 rng(seed);
  data.train = make_split(spec, spec.train_count, data.dictionary, rng);
  data.test = make_split(spec, spec.test_count, data.dictionary, rng);
  return data;
}

}  // namespace vgcn
