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

#include "vgcn/model.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "vgcn/error.h"

namespace vgcn {

void ModelConfig::validate() const {
  if (widths.empty()) throw ConfigError("model needs at least one block");
  if (strides.size() != widths.size()) {
    throw ConfigError("model strides and widths differ in length");
  }
  for (int w : widths) {
    if (w < 1) throw ConfigError("block widths must be >= 1");
  }
  for (int s : strides) {
    if (s < 1) throw ConfigError("temporal stride must be >= 1");
  }
  if (temporal_kernel < 1 || temporal_kernel % 2 == 0) {
    throw ConfigError("temporal kernel size must be odd");
  }
  if (caf_width < 1) throw ConfigError("CAF width must be >= 1");
  if (classes < 1) throw ConfigError("class count must be >= 1");
  if (c_ca < 0) throw ConfigError("class attribute width must be >= 0");
  if (joints < 1) throw ConfigError("joint count must be >= 1");
  if (!(init_gain > 0.0)) throw ConfigError("init_gain must be positive");
  if (person_capacity < 0 || object_capacity < 0) {
    throw ConfigError("slot capacities must be >= 0");
  }
}

Tensor caf_fuse(const Tensor& original, const Tensor& class_attr,
                const Tensor& lin_o, const Tensor& lin_c, const Tensor& bias) {
  Tensor fused = ops::add(ops::linear(original, lin_o),
                          ops::linear(class_attr, lin_c));
  return bias.defined() ? ops::add(fused, bias) : fused;
}

Tensor gcn_spatial(const Tensor& x, std::span<const double> adjacency,
                   const Tensor& weight, const Tensor& bias) {
  Tensor aggregated = ops::graph_aggregate(ops::linear(x, weight), adjacency);
  if (bias.defined()) aggregated = ops::add(aggregated, bias);
  return ops::relu(aggregated);
}

Tensor tcn_temporal(const Tensor& x, const Tensor& kernel, std::size_t stride,
                    std::span<const std::uint8_t> valid, const Tensor& bias) {
  Tensor out = ops::masked_temporal_conv(x, kernel, stride, valid);
  if (!bias.defined()) return out;
  // The bias must not reach padded outputs either.
  const std::size_t C = out.extent(3);
  const std::vector<std::uint8_t> out_valid =
      ops::subsample_mask(valid, x.extent(0), x.extent(1), x.extent(2), stride);
  std::vector<double> mask(out.size(), 0.0);
  for (std::size_t i = 0; i < out_valid.size(); ++i) {
    if (out_valid[i]) std::fill_n(mask.begin() + i * C, C, 1.0);
  }
  return ops::mul(ops::add(out, bias), Tensor(out.shape(), std::move(mask)));
}

std::vector<double> batch_adjacency(std::span<const std::uint8_t> valid,
                                    std::span<const NodeKind> kind,
                                    std::size_t grids, std::size_t slots) {
  if (valid.size() != grids * slots || kind.size() != grids * slots) {
    throw ShapeError("batch_adjacency masks", {grids, slots}, {valid.size()});
  }
  std::vector<double> out;
  out.reserve(grids * slots * slots);
  for (std::size_t g = 0; g < grids; ++g) {
    std::vector<double> a = adjacency_from_masks(valid.subspan(g * slots, slots),
                                                 kind.subspan(g * slots, slots));
    out.insert(out.end(), a.begin(), a.end());
  }
  return out;
}

LossReport total_loss(double l_ce, double l_nb, double lambda) {
  if (lambda < 0.0) throw ConfigError("lambda must be >= 0");
  return {l_ce, l_nb, l_ce + lambda * l_nb, 0.0, 0.0};
}

namespace {

Tensor uniform_init(Shape shape, std::size_t fan_in, double gain,
                    std::mt19937_64& rng) {
  const double bound = gain * std::sqrt(1.0 / static_cast<double>(std::max<std::size_t>(fan_in, 1)));
  std::uniform_real_distribution<double> dist(-bound, bound);
  std::vector<double> values(shape_size(shape));
  for (double& v : values) v = dist(rng);
  return Tensor(std::move(shape), std::move(values), true);
}

template <typename T>
std::vector<T> subsample(std::span<const T> grid, std::size_t n,
                         std::size_t frames, std::size_t slots,
                         std::size_t stride) {
  const std::size_t out_frames = ops::strided_length(frames, stride);
  std::vector<T> out(n * out_frames * slots);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t t = 0; t < out_frames; ++t) {
      std::copy_n(grid.data() + (i * frames + t * stride) * slots, slots,
                  out.data() + (i * out_frames + t) * slots);
    }
  }
  return out;
}

}  // namespace

Model::Model(ModelConfig config) : config_(std::move(config)) {
  config_.validate();
  std::mt19937_64 rng(config_.seed);
  const std::size_t c0 = config_.caf_width;
  caf_original_ = uniform_init({kOriginalChannels, c0}, kOriginalChannels, config_.init_gain, rng);
  caf_class_ = uniform_init({static_cast<std::size_t>(config_.c_ca), c0},
                            config_.c_ca, config_.init_gain, rng);
  if (config_.use_bias) caf_bias_ = uniform_init({c0}, kOriginalChannels, config_.init_gain, rng);
  std::size_t in = c0;
  const std::size_t k = config_.temporal_kernel;
  for (std::size_t b = 0; b < config_.widths.size(); ++b) {
    const std::size_t out = config_.widths[b];
    Block block;
    block.gcn_weight = uniform_init({in, out}, in, config_.init_gain, rng);
    block.tcn_kernel = uniform_init({k, out, out}, k * out, config_.init_gain, rng);
    if (config_.use_bias) {
      block.gcn_bias = uniform_init({out}, in, config_.init_gain, rng);
      block.tcn_bias = uniform_init({out}, k * out, config_.init_gain, rng);
    }
    block.stride = config_.strides[b];
    blocks_.push_back(std::move(block));
    in = out;
  }
  const std::size_t pool =
      static_cast<std::size_t>(config_.person_capacity) * config_.joints +
      config_.object_capacity;
  pool_weights_ = Tensor({pool}, std::vector<double>(pool, 1.0), true);
  classifier_ = uniform_init({in, static_cast<std::size_t>(config_.classes)}, in, config_.init_gain, rng);
  if (config_.use_bias) {
    classifier_bias_ = uniform_init({static_cast<std::size_t>(config_.classes)}, in, config_.init_gain, rng);
  }
}

std::vector<std::size_t> Model::slot_weights(const PaddedLayout& layout) const {
  if (layout.joints != config_.joints) {
    throw ShapeError("layout joints", {static_cast<std::size_t>(config_.joints)},
                     {static_cast<std::size_t>(layout.joints)});
  }
  if (layout.max_persons > config_.person_capacity ||
      layout.max_objects > config_.object_capacity) {
    throw CapacityError("layout (" + std::to_string(layout.max_persons) + ", " +
                        std::to_string(layout.max_objects) +
                        ") exceeds pooling capacity (" +
                        std::to_string(config_.person_capacity) + ", " +
                        std::to_string(config_.object_capacity) + ")");
  }
  std::vector<std::size_t> map(layout.slot_count());
  for (int s = 0; s < layout.skeleton_slots(); ++s) map[s] = s;
  const std::size_t object_base =
      static_cast<std::size_t>(config_.person_capacity) * config_.joints;
  for (int r = 0; r < layout.max_objects; ++r) {
    map[layout.object_slot(r)] = object_base + r;
  }
  return map;
}

Model::Output Model::forward(const PaddedBatch& batch) const {
  if (batch.channels != config_.input_channels()) {
    throw ShapeError("batch channels",
                     {static_cast<std::size_t>(config_.input_channels())},
                     {static_cast<std::size_t>(batch.channels)});
  }
  const std::size_t N = batch.size, V = batch.slots();
  std::size_t T = batch.frames;
  const std::vector<std::size_t> slot_map = slot_weights(batch.layout);

  Tensor input({N, T, V, static_cast<std::size_t>(batch.channels)},
               batch.features);
  Tensor x = caf_fuse(ops::slice(input, 0, kOriginalChannels),
                      ops::slice(input, kOriginalChannels, batch.channels),
                      caf_original_, caf_class_, caf_bias_);

  Output out;
  std::vector<std::uint8_t> valid = batch.valid;
  std::vector<NodeKind> kind = batch.kind;
  for (const Block& block : blocks_) {
    std::vector<double> adjacency = batch_adjacency(valid, kind, N * T, V);
    Tensor spatial = gcn_spatial(x, adjacency, block.gcn_weight, block.gcn_bias);
    Tensor temporal =
        tcn_temporal(spatial, block.tcn_kernel, block.stride, valid, block.tcn_bias);
    valid = subsample<std::uint8_t>(valid, N, T, V, block.stride);
    kind = subsample<NodeKind>(kind, N, T, V, block.stride);
    T = ops::strided_length(T, block.stride);
    x = ops::relu(temporal);
    out.blocks.push_back(x);
    out.block_valid.push_back(valid);
  }

  std::vector<std::size_t> frame_counts(N, 0);
  std::vector<std::uint8_t> slot_valid(N * V, 0);
  for (std::size_t n = 0; n < N; ++n) {
    for (std::size_t t = 0; t < T; ++t) {
      bool any = false;
      for (std::size_t v = 0; v < V; ++v) {
        if (valid[(n * T + t) * V + v]) {
          any = true;
          slot_valid[n * V + v] = 1;
        }
      }
      frame_counts[n] += any ? 1 : 0;
    }
  }
  Tensor pooled = ops::wnpool(ops::masked_temporal_mean(x, frame_counts),
                              pool_weights_, slot_map, slot_valid);
  out.logits = ops::linear(pooled, classifier_);
  if (classifier_bias_.defined()) out.logits = ops::add(out.logits, classifier_bias_);
  out.valid = std::move(valid);
  out.kind = std::move(kind);
  return out;
}

std::vector<NamedTensor> Model::parameters() const {
  std::vector<NamedTensor> params;
  params.push_back({"caf.original", caf_original_});
  params.push_back({"caf.class", caf_class_});
  if (caf_bias_.defined()) params.push_back({"caf.bias", caf_bias_});
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const std::string prefix = "block" + std::to_string(b) + ".";
    params.push_back({prefix + "gcn.weight", blocks_[b].gcn_weight});
    if (blocks_[b].gcn_bias.defined()) {
      params.push_back({prefix + "gcn.bias", blocks_[b].gcn_bias});
    }
    params.push_back({prefix + "tcn.kernel", blocks_[b].tcn_kernel});
    if (blocks_[b].tcn_bias.defined()) {
      params.push_back({prefix + "tcn.bias", blocks_[b].tcn_bias});
    }
  }
  params.push_back({"wnpool.weights", pool_weights_});
  params.push_back({"classifier.weight", classifier_});
  if (classifier_bias_.defined()) {
    params.push_back({"classifier.bias", classifier_bias_});
  }
  return params;
}

std::vector<Tensor> Model::parameter_tensors() const {
  std::vector<Tensor> out;
  for (NamedTensor& p : parameters()) out.push_back(p.tensor);
  return out;
}

void Model::load_parameters(const std::vector<NamedTensor>& params) {
  std::vector<NamedTensor> mine = parameters();
  if (params.size() != mine.size()) {
    throw MalformedInput("checkpoint has " + std::to_string(params.size()) +
                         " parameters, model expects " +
                         std::to_string(mine.size()));
  }
  for (NamedTensor& target : mine) {
    auto it = std::find_if(params.begin(), params.end(),
                           [&](const NamedTensor& p) { return p.name == target.name; });
    if (it == params.end()) {
      throw MalformedInput("checkpoint lacks parameter " + target.name);
    }
    if (it->tensor.shape() != target.tensor.shape()) {
      throw MalformedInput("parameter " + target.name + " has shape " +
                           format_shape(it->tensor.shape()) + ", expected " +
                           format_shape(target.tensor.shape()));
    }
    std::span<double> dst = target.tensor.mutable_values();
    std::span<const double> src = it->tensor.values();
    std::copy(src.begin(), src.end(), dst.begin());
  }
}

int ScoreMatrix::argmax(int row) const {
  const double* r = values.data() + static_cast<std::size_t>(row) * cols;
  return static_cast<int>(std::max_element(r, r + cols) - r);
}

ScoreMatrix softmax_scores(const Tensor& logits) {
  if (logits.rank() != 2) throw ShapeError("softmax_scores", {0, 0}, logits.shape());
  Tensor probs = ops::softmax(logits.detach());
  return {static_cast<int>(logits.extent(0)), static_cast<int>(logits.extent(1)),
          std::vector<double>(probs.values().begin(), probs.values().end())};
}

ScoreMatrix four_stream_fuse(std::span<const ScoreMatrix> streams) {
  if (streams.empty()) throw MalformedInput("score fusion needs >= 1 stream");
  ScoreMatrix out = streams.front();
  for (std::size_t s = 1; s < streams.size(); ++s) {
    const ScoreMatrix& m = streams[s];
    if (m.rows != out.rows || m.cols != out.cols) {
      throw ShapeError("score fusion",
                       {static_cast<std::size_t>(out.rows), static_cast<std::size_t>(out.cols)},
                       {static_cast<std::size_t>(m.rows), static_cast<std::size_t>(m.cols)});
    }
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += m.values[i];
  }
  const double inv = 1.0 / static_cast<double>(streams.size());
  for (double& v : out.values) v *= inv;
  return out;
}

}  // namespace vgcn
