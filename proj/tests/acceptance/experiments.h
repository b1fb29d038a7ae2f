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


#ifndef VGCN_TESTS_ACCEPTANCE_EXPERIMENTS_H_
#define VGCN_TESTS_ACCEPTANCE_EXPERIMENTS_H_

#include <string>

namespace vgcn::acceptance {

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome edge_count_oracle();
Outcome gradient_suite();
Outcome padding_neutrality();
Outcome loss_unit_values();
Outcome object_information_effect();
Outcome rna_robustness();
Outcome attribute_ablation();
Outcome self_training_harness();
Outcome train_determinism();

}  // namespace vgcn::acceptance

#endif  // VGCN_TESTS_ACCEPTANCE_EXPERIMENTS_H_
