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

#include <cmath>
#include <numbers>
#include <unordered_set>

#include "vgcn/error.h"

#if defined(__GLIBC__)
#include <malloc.h>
#endif

namespace vgcn {

std::size_t shape_size(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t e : shape) n *= e;
  return n;
}

namespace detail {

std::vector<double>& TensorNode::grad_buffer() {
  if (grad.empty()) grad.assign(value.size(), 0.0);
  return grad;
}

}  // namespace detail

Tensor::Tensor(Shape shape, std::vector<double> values, bool requires_grad) {
  if (shape_size(shape) != values.size()) {
    throw ShapeError("tensor values", shape, {values.size()});
  }
  node_ = std::make_shared<detail::TensorNode>();
  node_->shape = std::move(shape);
  node_->value = std::move(values);
  node_->requires_grad = requires_grad;
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  const std::size_t n = shape_size(shape);
  return Tensor(std::move(shape), std::vector<double>(n, 0.0), requires_grad);
}

Tensor Tensor::scalar(double value) { return Tensor({1}, {value}); }

double Tensor::item() const {
  if (size() != 1) throw ShapeError("item", {1}, shape());
  return node_->value.front();
}

std::vector<double> Tensor::grad() const {
  if (node_->grad.empty()) return std::vector<double>(size(), 0.0);
  return node_->grad;
}

Tensor Tensor::detach() const { return Tensor(shape(), node_->value, false); }

namespace {
thread_local bool no_grad = false;
}  // namespace

NoGradGuard::NoGradGuard() : previous_(no_grad) { no_grad = true; }
NoGradGuard::~NoGradGuard() { no_grad = previous_; }
bool NoGradGuard::active() { return no_grad; }

Tensor Tensor::make_result(Shape shape, std::vector<double> values,
                           std::vector<Tensor> inputs,
                           std::function<void(detail::TensorNode&)> backward) {
  Tensor out(std::move(shape), std::move(values), false);
  if (no_grad) return out;
  bool any_tracked = false;
  for (const Tensor& in : inputs) {
    if (in.defined() && in.tracked()) any_tracked = true;
  }
  if (!any_tracked) return out;
  for (Tensor& in : inputs) {
    if (in.defined()) out.node_->parents.push_back(in.node_);
  }
  out.node_->backward = std::move(backward);
  return out;
}

Tape Tape::record(const Tensor& root) {
  Tape tape;
  if (!root.tracked()) return tape;
  // Iterative post-order DFS; a node is emitted after all of its parents.
  std::unordered_set<detail::TensorNode*> seen;
  std::vector<std::pair<detail::TensorNode*, std::size_t>> stack;
  stack.emplace_back(&root.node(), 0);
  seen.insert(&root.node());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      detail::TensorNode* parent = node->parents[next++].get();
      const bool tracked = parent->requires_grad || parent->backward;
      if (tracked && seen.insert(parent).second) stack.emplace_back(parent, 0);
      continue;
    }
    tape.order_.push_back(node);
    stack.pop_back();
  }
  return tape;
}

void Tape::replay_backward() const {
  for (auto it = order_.rbegin(); it != order_.rend(); ++it) {
    detail::TensorNode* node = *it;
    if (node->backward && !node->grad.empty()) node->backward(*node);
  }
}

void backward(const Tensor& loss) {
  if (!loss.defined() || loss.size() != 1) {
    throw ShapeError("backward needs a scalar loss", {1},
                     loss.defined() ? loss.shape() : Shape{});
  }
  if (!loss.tracked()) return;
  Tape tape = Tape::record(loss);
  std::vector<double>& seed = loss.node().grad_buffer();
  seed[0] += 1.0;
  tape.replay_backward();
}

void sgd_step(std::span<double> param, std::span<const double> grad,
              std::span<double> velocity, double lr, double momentum,
              double weight_decay) {
  if (lr < 0.0) throw ConfigError("learning rate must be >= 0");
  if (grad.size() != param.size()) {
    throw ShapeError("sgd_step grad", {param.size()}, {grad.size()});
  }
  const bool use_velocity = momentum != 0.0;
  if (use_velocity && velocity.size() != param.size()) {
    throw ShapeError("sgd_step velocity", {param.size()}, {velocity.size()});
  }
  for (std::size_t i = 0; i < param.size(); ++i) {
    double g = grad[i] + weight_decay * param[i];
    if (use_velocity) {
      velocity[i] = momentum * velocity[i] + g;
      g = velocity[i];
    }
    param[i] -= lr * g;
  }
}

Sgd::Sgd(std::vector<Tensor> params, double momentum, double weight_decay)
    : params_(std::move(params)),
      momentum_(momentum),
      weight_decay_(weight_decay) {
  if (momentum < 0.0 || weight_decay < 0.0) {
    throw ConfigError("momentum and weight decay must be >= 0");
  }
  for (const Tensor& p : params_) velocity_.emplace_back(p.size(), 0.0);
}

void Sgd::step(double lr) {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Tensor& p = params_[i];
    const std::vector<double> g = p.grad();
    sgd_step(p.mutable_values(), g, velocity_[i], lr, momentum_, weight_decay_);
  }
}

void Sgd::zero_grad() {
  for (Tensor& p : params_) p.zero_grad();
}

double cosine_lr(int epoch, int total_epochs, double base_lr) {
  if (base_lr < 0.0) throw ConfigError("learning rate must be >= 0");
  if (total_epochs < 1) throw ConfigError("total epochs must be >= 1");
  const double phase = std::numbers::pi * epoch / total_epochs;
  return base_lr * (1.0 + std::cos(phase)) / 2.0;
}

void tune_allocator() {
#if defined(__GLIBC__)
  mallopt(M_MMAP_THRESHOLD, 1 << 30);
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
#endif
}

}  // namespace vgcn
