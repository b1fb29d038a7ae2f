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

#ifndef VGCN_MODEL_H_
#define VGCN_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vgcn/batching.h"
#include "vgcn/ops.h"
#include "vgcn/tensor.h"

namespace vgcn {

struct ModelConfig {
  std::vector<int> widths = {64, 64, 128, 256};
  std::vector<int> strides = {1, 1, 2, 2};
  int temporal_kernel = 9;
  int caf_width = 64;
  int classes = 2;
  int c_ca = 32;
  int joints = kDefaultJoints;
  // WNPool keeps one weight per canonical slot, so the layouts it accepts are
  // bounded by these capacities.
  int person_capacity = 4;
  int object_capacity = 16;
  bool use_bias = false;
  // Weights start uniform in ±init_gain·√(1/fan_in).
  double init_gain = 2.449489742783178;  // √6, He-uniform for ReLU stacks
  std::uint64_t seed = 0;

  int input_channels() const { return kOriginalChannels + c_ca; }
  // ConfigError on inconsistent settings.
  void validate() const;
};

struct NamedTensor {
  std::string name;
  Tensor tensor;
};

// Cross-modal residual fusion: linear(original, lin_o) + linear(class_attr,
// lin_c). The class-attribute branch never carries a bias.
Tensor caf_fuse(const Tensor& original, const Tensor& class_attr,
                const Tensor& lin_o, const Tensor& lin_c,
                const Tensor& bias = Tensor());

// ReLU(A (x W) [+ b]) with per-(instance, frame) adjacency blocks.
Tensor gcn_spatial(const Tensor& x, std::span<const double> adjacency,
                   const Tensor& weight, const Tensor& bias = Tensor());

// Masked temporal convolution [+ b]; no activation. Outputs at padded nodes
// are zero with or without the bias.
Tensor tcn_temporal(const Tensor& x, const Tensor& kernel, std::size_t stride,
                    std::span<const std::uint8_t> valid,
                    const Tensor& bias = Tensor());

// Dense adjacency blocks for every (instance, frame) of a node grid.
std::vector<double> batch_adjacency(std::span<const std::uint8_t> valid,
                                    std::span<const NodeKind> kind,
                                    std::size_t grids, std::size_t slots);

struct LossReport {
  double l_ce = 0.0;
  double l_nb = 0.0;
  double total = 0.0;
  double s_sn = 0.0;  // batch mean
  double s_on = 0.0;  // batch mean
};

LossReport total_loss(double l_ce, double l_nb, double lambda);

// Spatial-temporal variable graph network.
class Model {
 public:
  explicit Model(ModelConfig config);

  struct Output {
    Tensor logits;                  // [N, M]
    std::vector<Tensor> blocks;     // post-ReLU output of every block
    std::vector<std::uint8_t> valid;  // node validity of the final block grid
    std::vector<NodeKind> kind;       // node kinds of the final block grid
    std::vector<std::vector<std::uint8_t>> block_valid;
  };

  // Throws ShapeError when the batch does not match the configured channel
  // layout, CapacityError when it exceeds the WNPool capacities and
  // DegenerateInstance for an instance without nodes.
  Output forward(const PaddedBatch& batch) const;

  const ModelConfig& config() const { return config_; }
  std::vector<NamedTensor> parameters() const;
  std::vector<Tensor> parameter_tensors() const;
  // Copies values from `params` by name. MalformedInput on any mismatch.
  void load_parameters(const std::vector<NamedTensor>& params);

  // Canonical WNPool weight index of every slot in `layout`.
  std::vector<std::size_t> slot_weights(const PaddedLayout& layout) const;

 private:
  struct Block {
    Tensor gcn_weight;
    Tensor gcn_bias;
    Tensor tcn_kernel;
    Tensor tcn_bias;
    std::size_t stride = 1;
  };

  ModelConfig config_;
  Tensor caf_original_;
  Tensor caf_class_;
  Tensor caf_bias_;
  std::vector<Block> blocks_;
  Tensor pool_weights_;
  Tensor classifier_;
  Tensor classifier_bias_;
};

// Row-major [rows, cols] matrix of class scores.
struct ScoreMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> values;

  int argmax(int row) const;
};

ScoreMatrix softmax_scores(const Tensor& logits);

// Unweighted mean of per-stream softmax scores. ShapeError on mismatched
// shapes, MalformedInput on an empty list.
ScoreMatrix four_stream_fuse(std::span<const ScoreMatrix> streams);

}  // namespace vgcn

#endif  // VGCN_MODEL_H_
