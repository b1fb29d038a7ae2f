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

#ifndef VGCN_CONFIG_H_
#define VGCN_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "vgcn/augment.h"
#include "vgcn/model.h"
#include "vgcn/selftrain.h"
#include "vgcn/synth.h"
#include "vgcn/train.h"

namespace vgcn {

struct SkeletonStandard {
  int joints = kDefaultJoints;
  std::vector<int> parent_map = coco_parent_map();
};

struct DataPaths {
  std::filesystem::path dir = "data";
  std::string train_index = "train_index.json";
  std::string test_index = "test_index.json";
  std::string dictionary = "dictionary.json";

  std::filesystem::path train_index_path() const { return dir / train_index; }
  std::filesystem::path test_index_path() const { return dir / test_index; }
  std::filesystem::path dictionary_path() const { return dir / dictionary; }
};

struct SelfTrainSim {
  SelfTrainConfig loop;
  double noise = 0.1;
  SyntheticDetectorOptions detector;
};

// Experiment description. Every section is optional; unknown keys and
// ill-typed values are rejected with ConfigError.
struct RunConfig {
  std::uint64_t seed = 0;
  SkeletonStandard skeleton;
  ModelConfig model;
  TrainConfig train;
  AttackConfig rna;  // used when train.rna is enabled
  DataPaths data;
  SynthSpec synth;
  SelfTrainSim selftrain;

  static RunConfig parse(std::string_view json_text);
  static RunConfig load(const std::filesystem::path& path);
  std::string to_json() const;
};

}  // namespace vgcn

#endif  // VGCN_CONFIG_H_
