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


// Acceptance runner: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <set>
#include <string>

#include "acceptance/experiments.h"
#include "vgcn/tensor.h"

namespace {

using vgcn::acceptance::Outcome;

struct Criterion {
  int id;
  const char* title;
  Outcome (*run)();
};

constexpr Criterion kCriteria[] = {
    {1, "edge-count oracle", vgcn::acceptance::edge_count_oracle},
    {2, "gradient suite", vgcn::acceptance::gradient_suite},
    {3, "padding neutrality and zero propagation", vgcn::acceptance::padding_neutrality},
    {4, "loss unit values", vgcn::acceptance::loss_unit_values},
    {5, "object information effect", vgcn::acceptance::object_information_effect},
    {6, "random node attack robustness", vgcn::acceptance::rna_robustness},
    {7, "object attribute ablation", vgcn::acceptance::attribute_ablation},
    {8, "self-training loop", vgcn::acceptance::self_training_harness},
    {9, "training determinism", vgcn::acceptance::train_determinism},
};

}  // namespace

int main(int argc, char** argv) {
  vgcn::tune_allocator();
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failures = 0;
  for (const Criterion& c : kCriteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("threw: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !outcome.pass;
    std::printf("%s criterion %d (%s): %s [%.1f s]\n", outcome.pass ? "PASS" : "FAIL", c.id,
                c.title, outcome.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
