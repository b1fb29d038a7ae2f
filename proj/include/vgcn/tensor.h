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

#ifndef VGCN_TENSOR_H_
#define VGCN_TENSOR_H_

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace vgcn {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);

namespace detail {

struct TensorNode {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;  // empty until first accumulation
  bool requires_grad = false;
  std::vector<std::shared_ptr<TensorNode>> parents;
  // Propagates this node's grad into its parents' grads.
  std::function<void(TensorNode&)> backward;

  std::vector<double>& grad_buffer();
};

}  // namespace detail

// Dense row-major double tensor with shared ownership. Copies alias the same
// storage, like a handle. Operations on tracked tensors record themselves
// so backward() can replay them in reverse.
class Tensor {
 public:
  Tensor() = default;
  Tensor(Shape shape, std::vector<double> values, bool requires_grad = false);

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor scalar(double value);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  std::size_t rank() const { return node_->shape.size(); }
  std::size_t extent(std::size_t axis) const { return node_->shape.at(axis); }
  std::size_t size() const { return node_->value.size(); }

  std::span<const double> values() const { return node_->value; }
  // Direct writes bypass the tape; use only on leaves outside a recording.
  std::span<double> mutable_values() { return node_->value; }
  double item() const;

  bool requires_grad() const { return node_->requires_grad; }
  // Tracked leaf or result of an operation on one.
  bool tracked() const {
    return node_->requires_grad || static_cast<bool>(node_->backward);
  }
  // Zeros when no gradient has been accumulated.
  std::vector<double> grad() const;
  bool has_grad() const { return !node_->grad.empty(); }
  void zero_grad() { node_->grad.clear(); }

  // Deep copy without history.
  Tensor detach() const;

  // Internal: builds a result node that records `backward` when any input is
  // tracked.
  static Tensor make_result(Shape shape, std::vector<double> values,
                            std::vector<Tensor> inputs,
                            std::function<void(detail::TensorNode&)> backward);
  detail::TensorNode& node() const { return *node_; }
  const std::shared_ptr<detail::TensorNode>& node_ptr() const { return node_; }

 private:
  explicit Tensor(std::shared_ptr<detail::TensorNode> node)
      : node_(std::move(node)) {}

  std::shared_ptr<detail::TensorNode> node_;
};

// Disables recording on the current thread for its lifetime.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

  static bool active();

 private:
  bool previous_;
};

// Execution-ordered record of the operations that produced a tensor.
class Tape {
 public:
  // Collects every tracked node reachable from `root`, parents before
  // children.
  static Tape record(const Tensor& root);

  std::size_t size() const { return order_.size(); }
  // Runs gradient rules from the root back to the leaves, each node once.
  void replay_backward() const;

 private:
  std::vector<detail::TensorNode*> order_;
};

// Seeds d(loss)/d(loss) = 1 and accumulates gradients into every tracked
// leaf. Throws ShapeError unless `loss` holds exactly one value.
void backward(const Tensor& loss);

// Classical momentum SGD with L2 decay added to the gradient:
//   g = grad + weight_decay * p;  v = momentum * v + g;  p -= lr * v.
class Sgd {
 public:
  Sgd(std::vector<Tensor> params, double momentum, double weight_decay);

  void step(double lr);
  void zero_grad();

 private:
  std::vector<Tensor> params_;
  std::vector<std::vector<double>> velocity_;
  double momentum_;
  double weight_decay_;
};

// Single in-place update of one parameter buffer (velocity may be empty when
// momentum is zero). ConfigError on lr < 0.
void sgd_step(std::span<double> param, std::span<const double> grad,
              std::span<double> velocity, double lr, double momentum,
              double weight_decay);

// base_lr * (1 + cos(pi * epoch / total_epochs)) / 2.
double cosine_lr(int epoch, int total_epochs, double base_lr);

// Keeps large tensor buffers on the heap instead of a fresh mmap per
// allocation; training is several times faster on glibc. No-op elsewhere.
void tune_allocator();

}  // namespace vgcn

#endif  // VGCN_TENSOR_H_
