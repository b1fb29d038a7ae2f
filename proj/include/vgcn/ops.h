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

#ifndef VGCN_OPS_H_
#define VGCN_OPS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "vgcn/graph.h"
#include "vgcn/tensor.h"

namespace vgcn::ops {

// Elementwise sum. `b` may also be a 1-D tensor matching the trailing axis of
// `a` (row broadcast) or a single value.
Tensor add(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double factor);
// [m, k] x [k, n].
Tensor matmul(const Tensor& a, const Tensor& b);
// Applies a [c_in, c_out] weight to the trailing axis of any-rank `x`.
Tensor linear(const Tensor& x, const Tensor& weight);
Tensor relu(const Tensor& x);
Tensor reshape(const Tensor& x, Shape shape);
// 2-D transpose.
Tensor transpose(const Tensor& x);
// Concatenation along the trailing axis.
Tensor concat(std::span<const Tensor> parts);
// Trailing-axis range [begin, end).
Tensor slice(const Tensor& x, std::size_t begin, std::size_t end);
Tensor sum(const Tensor& x, std::size_t axis);
Tensor mean(const Tensor& x, std::size_t axis);
Tensor sum_all(const Tensor& x);
Tensor softmax(const Tensor& x);
Tensor log_softmax(const Tensor& x);

// Output frame count of a stride-s temporal convolution with symmetric zero
// padding (kernel - 1) / 2.
std::size_t strided_length(std::size_t frames, std::size_t stride);

// Validity of the (instance, frame, slot) grid after subsampling frames by
// `stride`.
std::vector<std::uint8_t> subsample_mask(std::span<const std::uint8_t> valid,
                                         std::size_t instances,
                                         std::size_t frames, std::size_t slots,
                                         std::size_t stride);

// Per-slot 1-D convolution along time.
//   x: [N, T, V, C], kernel: [K, C, C'], valid: N*T*V node validity.
// Inputs at invalid nodes are treated as zero and outputs at invalid output
// nodes (valid subsampled by stride) are forced to zero.
// Result: [N, ceil(T / stride), V, C']. ConfigError unless K is odd and
// stride >= 1.
Tensor masked_temporal_conv(const Tensor& x, const Tensor& kernel,
                            std::size_t stride,
                            std::span<const std::uint8_t> valid);

// out[n, t, v, :] = sum_u A[n, t][v, u] * x[n, t, u, :].
// x: [N, T, V, C]; adjacency: N*T row-major V x V blocks (constant).
Tensor graph_aggregate(const Tensor& x, std::span<const double> adjacency);

// Sum over frames divided by frame_counts[n]: [N, T, V, C] -> [N, V, C].
Tensor masked_temporal_mean(const Tensor& x,
                            std::span<const std::size_t> frame_counts);

// Y[n, c] = sum_v X[n, v, c] * W[slot_weight[v]] * valid[n, v] / V_real(n).
// x: [N, V, C]; weights: [W]; slot_weight maps each slot of the layout to a
// weight index. DegenerateInstance when an instance has no valid slot.
Tensor wnpool(const Tensor& x, const Tensor& weights,
              std::span<const std::size_t> slot_weight,
              std::span<const std::uint8_t> slot_valid);

struct BalanceSums {
  std::vector<double> skeleton;  // S_sn per instance
  std::vector<double> object;    // S_on per instance
};

// Batch mean of the node balance penalty |log(S_on / S_sn)| (0 when either
// sum is 0) over x: [N, T, V, C] >= 0 with node kinds over the N*T*V grid.
Tensor node_balance_loss(const Tensor& x, std::span<const NodeKind> kind,
                         BalanceSums* sums = nullptr);

// Mean negative log-likelihood of `labels` under softmax(logits), logits
// [N, M]. MalformedInput on a label outside [0, M).
Tensor cross_entropy(const Tensor& logits, std::span<const int> labels);

}  // namespace vgcn::ops

#endif  // VGCN_OPS_H_
