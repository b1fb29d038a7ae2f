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

#include "vgcn/tensor.h"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "vgcn/error.h"
#include "vgcn/ops.h"

namespace vgcn {
namespace {

TEST(Tensor, ConstructionAndShape) {
  const Tensor t({2, 3}, {1, 2, 3, 4, 5, 6});
  EXPECT_EQ(t.rank(), 2u);
  EXPECT_EQ(t.extent(1), 3u);
  EXPECT_EQ(t.size(), 6u);
  EXPECT_THROW(Tensor({2, 2}, {1, 2, 3}), ShapeError);
  EXPECT_EQ(Tensor::scalar(4.5).item(), 4.5);
  EXPECT_THROW(t.item(), ShapeError);
  EXPECT_EQ(shape_size({3, 0, 2}), 0u);
}

TEST(Tensor, CopiesAliasDetachDoesNot) {
  Tensor a({2}, {1, 2});
  Tensor b = a;
  b.mutable_values()[0] = 9;
  EXPECT_EQ(a.values()[0], 9);
  Tensor c = a.detach();
  c.mutable_values()[0] = 0;
  EXPECT_EQ(a.values()[0], 9);
}

TEST(Backward, LinearGradientIsInput) {
  Tensor w({3}, {0.1, -0.2, 0.3}, true);
  const Tensor x({3}, {4, 5, 6});
  backward(ops::sum_all(ops::mul(w, x)));
  EXPECT_EQ(w.grad(), (std::vector<double>{4, 5, 6}));
}

TEST(Backward, ReluSubgradient) {
  Tensor w({2}, {-1, 2}, true);
  backward(ops::sum_all(ops::relu(w)));
  EXPECT_EQ(w.grad(), (std::vector<double>{0, 1}));
}

TEST(Backward, AccumulatesAcrossCallsAndSharedUse) {
  Tensor w({1}, {3}, true);
  backward(ops::sum_all(ops::mul(w, w)));  // d(w^2) = 2w
  EXPECT_EQ(w.grad()[0], 6);
  backward(ops::sum_all(ops::add(w, w)));
  EXPECT_EQ(w.grad()[0], 8);
  w.zero_grad();
  EXPECT_FALSE(w.has_grad());
  EXPECT_EQ(w.grad()[0], 0);
}

TEST(Backward, NonScalarLossIsShapeError) {
  Tensor w({2}, {1, 2}, true);
  EXPECT_THROW(backward(ops::relu(w)), ShapeError);
}

TEST(NoGradGuard, StopsRecording) {
  Tensor w({2}, {1, 2}, true);
  {
    NoGradGuard guard;
    EXPECT_TRUE(NoGradGuard::active());
    EXPECT_FALSE(ops::relu(w).tracked());
  }
  EXPECT_FALSE(NoGradGuard::active());
  EXPECT_TRUE(ops::relu(w).tracked());
}

TEST(Tape, ParentsBeforeChildren) {
  Tensor a({1}, {2}, true);
  const Tensor b = ops::scale(a, 3.0);
  const Tensor c = ops::mul(b, a);
  EXPECT_EQ(Tape::record(ops::sum_all(c)).size(), 4u);
}

TEST(Sgd, HandUpdate) {
  std::vector<double> p = {1.0}, g = {2.0};
  sgd_step(p, g, {}, 0.1, 0.0, 0.0);
  EXPECT_DOUBLE_EQ(p[0], 0.8);
  EXPECT_THROW(sgd_step(p, g, {}, -0.1, 0.0, 0.0), ConfigError);
}

TEST(Sgd, MomentumAndDecay) {
  std::vector<double> p = {1.0}, g = {2.0}, v = {0.0};
  sgd_step(p, g, v, 0.1, 0.5, 0.1);  // g' = 2.1, v = 2.1
  EXPECT_DOUBLE_EQ(v[0], 2.1);
  EXPECT_DOUBLE_EQ(p[0], 1.0 - 0.21);
  sgd_step(p, g, v, 0.1, 0.5, 0.0);  // v = 1.05 + 2
  EXPECT_DOUBLE_EQ(v[0], 3.05);
}

TEST(Sgd, OptimizerStepsTrackedParameters) {
  Tensor w({2}, {1, -1}, true);
  Sgd opt({w}, 0.0, 0.0);
  backward(ops::sum_all(ops::mul(w, w)));
  opt.step(0.25);
  EXPECT_EQ(w.values()[0], 0.5);
  EXPECT_EQ(w.values()[1], -0.5);
  opt.zero_grad();
  EXPECT_FALSE(w.has_grad());
}

TEST(CosineLr, Endpoints) {
  EXPECT_DOUBLE_EQ(cosine_lr(0, 10, 0.2), 0.2);
  EXPECT_DOUBLE_EQ(cosine_lr(5, 10, 0.2), 0.1);
  EXPECT_NEAR(cosine_lr(10, 10, 0.2), 0.0, 1e-18);
  EXPECT_NEAR(cosine_lr(3, 10, 1.0), (1 + std::cos(std::numbers::pi * 0.3)) / 2, 1e-15);
}

}  // namespace
}  // namespace vgcn
