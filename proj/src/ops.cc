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

#include "vgcn/ops.h"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vgcn/error.h"

namespace vgcn::ops {
namespace {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<RowMatrix>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;

using detail::TensorNode;

MatrixMap as_matrix(double* data, std::size_t rows, std::size_t cols) {
  return MatrixMap(data, static_cast<Eigen::Index>(rows),
                   static_cast<Eigen::Index>(cols));
}

ConstMatrixMap as_matrix(const double* data, std::size_t rows,
                         std::size_t cols) {
  return ConstMatrixMap(data, static_cast<Eigen::Index>(rows),
                        static_cast<Eigen::Index>(cols));
}

void require_rank(const Tensor& x, std::size_t rank, const char* op) {
  if (x.rank() != rank) {
    throw ShapeError(std::string(op) + ": rank " + std::to_string(rank) +
                         " expected",
                     Shape(rank, 0), x.shape());
  }
}

// Gradient buffer of an input, or nullptr when the input is not tracked.
std::vector<double>* grad_of(const Tensor& t) {
  if (!t.defined() || !t.tracked()) return nullptr;
  return &t.node().grad_buffer();
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  const std::size_t n = a.size();
  std::vector<double> out(a.values().begin(), a.values().end());
  std::span<const double> bv = b.values();
  if (a.shape() == b.shape()) {
    for (std::size_t i = 0; i < n; ++i) out[i] += bv[i];
    return Tensor::make_result(a.shape(), std::move(out), {a, b},
                               [a, b](TensorNode& self) {
                                 if (auto* ga = grad_of(a)) {
                                   for (std::size_t i = 0; i < self.grad.size(); ++i) (*ga)[i] += self.grad[i];
                                 }
                                 if (auto* gb = grad_of(b)) {
                                   for (std::size_t i = 0; i < self.grad.size(); ++i) (*gb)[i] += self.grad[i];
                                 }
                               });
  }
  const bool row = b.rank() == 1 && a.rank() >= 1 && b.size() == a.shape().back();
  if (!row && b.size() != 1) throw ShapeError("add", a.shape(), b.shape());
  const std::size_t width = b.size();
  for (std::size_t i = 0; i < n; ++i) out[i] += bv[i % width];
  return Tensor::make_result(
      a.shape(), std::move(out), {a, b}, [a, b, width](TensorNode& self) {
        if (auto* ga = grad_of(a)) {
          for (std::size_t i = 0; i < self.grad.size(); ++i) (*ga)[i] += self.grad[i];
        }
        if (auto* gb = grad_of(b)) {
          for (std::size_t i = 0; i < self.grad.size(); ++i) (*gb)[i % width] += self.grad[i];
        }
      });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) throw ShapeError("mul", a.shape(), b.shape());
  std::vector<double> out(a.size());
  std::span<const double> av = a.values(), bv = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
  return Tensor::make_result(a.shape(), std::move(out), {a, b},
                             [a, b](TensorNode& self) {
                               std::span<const double> av = a.values(), bv = b.values();
                               if (auto* ga = grad_of(a)) {
                                 for (std::size_t i = 0; i < self.grad.size(); ++i) (*ga)[i] += self.grad[i] * bv[i];
                               }
                               if (auto* gb = grad_of(b)) {
                                 for (std::size_t i = 0; i < self.grad.size(); ++i) (*gb)[i] += self.grad[i] * av[i];
                               }
                             });
}

Tensor scale(const Tensor& a, double factor) {
  std::vector<double> out(a.values().begin(), a.values().end());
  for (double& v : out) v *= factor;
  return Tensor::make_result(a.shape(), std::move(out), {a},
                             [a, factor](TensorNode& self) {
                               auto& ga = *grad_of(a);
                               for (std::size_t i = 0; i < self.grad.size(); ++i) ga[i] += self.grad[i] * factor;
                             });
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_rank(a, 2, "matmul");
  require_rank(b, 2, "matmul");
  const std::size_t m = a.extent(0), k = a.extent(1), n = b.extent(1);
  if (b.extent(0) != k) throw ShapeError("matmul inner extent", {k, n}, b.shape());
  std::vector<double> out(m * n);
  as_matrix(out.data(), m, n).noalias() =
      as_matrix(a.values().data(), m, k) * as_matrix(b.values().data(), k, n);
  return Tensor::make_result(
      {m, n}, std::move(out), {a, b}, [a, b, m, k, n](TensorNode& self) {
        auto g = as_matrix(self.grad.data(), m, n);
        if (auto* ga = grad_of(a)) {
          as_matrix(ga->data(), m, k).noalias() +=
              g * as_matrix(b.values().data(), k, n).transpose();
        }
        if (auto* gb = grad_of(b)) {
          as_matrix(gb->data(), k, n).noalias() +=
              as_matrix(a.values().data(), m, k).transpose() * g;
        }
      });
}

Tensor linear(const Tensor& x, const Tensor& weight) {
  require_rank(weight, 2, "linear weight");
  if (x.rank() < 1 || x.shape().back() != weight.extent(0)) {
    throw ShapeError("linear input channels", {weight.extent(0)}, x.shape());
  }
  const std::size_t k = weight.extent(0), n = weight.extent(1);
  const std::size_t m = x.size() / k;
  Shape shape = x.shape();
  shape.back() = n;
  std::vector<double> out(m * n);
  as_matrix(out.data(), m, n).noalias() =
      as_matrix(x.values().data(), m, k) * as_matrix(weight.values().data(), k, n);
  return Tensor::make_result(
      std::move(shape), std::move(out), {x, weight},
      [x, weight, m, k, n](TensorNode& self) {
        auto g = as_matrix(self.grad.data(), m, n);
        if (auto* gx = grad_of(x)) {
          as_matrix(gx->data(), m, k).noalias() +=
              g * as_matrix(weight.values().data(), k, n).transpose();
        }
        if (auto* gw = grad_of(weight)) {
          as_matrix(gw->data(), k, n).noalias() +=
              as_matrix(x.values().data(), m, k).transpose() * g;
        }
      });
}

Tensor relu(const Tensor& x) {
  std::vector<double> out(x.values().begin(), x.values().end());
  for (double& v : out) v = v > 0.0 ? v : 0.0;
  return Tensor::make_result(x.shape(), std::move(out), {x},
                             [x](TensorNode& self) {
                               auto& gx = *grad_of(x);
                               std::span<const double> xv = x.values();
                               for (std::size_t i = 0; i < gx.size(); ++i) {
                                 if (xv[i] > 0.0) gx[i] += self.grad[i];
                               }
                             });
}

Tensor reshape(const Tensor& x, Shape shape) {
  if (shape_size(shape) != x.size()) throw ShapeError("reshape", x.shape(), shape);
  std::vector<double> out(x.values().begin(), x.values().end());
  return Tensor::make_result(std::move(shape), std::move(out), {x},
                             [x](TensorNode& self) {
                               auto& gx = *grad_of(x);
                               for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += self.grad[i];
                             });
}

Tensor transpose(const Tensor& x) {
  require_rank(x, 2, "transpose");
  const std::size_t r = x.extent(0), c = x.extent(1);
  std::vector<double> out(r * c);
  as_matrix(out.data(), c, r) = as_matrix(x.values().data(), r, c).transpose();
  return Tensor::make_result({c, r}, std::move(out), {x},
                             [x, r, c](TensorNode& self) {
                               as_matrix(grad_of(x)->data(), r, c) +=
                                   as_matrix(self.grad.data(), c, r).transpose();
                             });
}

Tensor concat(std::span<const Tensor> parts) {
  if (parts.empty()) throw ShapeError("concat of nothing", {1}, {0});
  Shape lead = parts.front().shape();
  lead.pop_back();
  std::vector<std::size_t> widths;
  std::size_t total = 0;
  for (const Tensor& p : parts) {
    Shape pl = p.shape();
    const std::size_t w = pl.back();
    pl.pop_back();
    if (pl != lead) throw ShapeError("concat leading extents", lead, pl);
    widths.push_back(w);
    total += w;
  }
  const std::size_t rows = shape_size(lead);
  std::vector<double> out(rows * total);
  std::size_t offset = 0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    std::span<const double> pv = parts[i].values();
    for (std::size_t r = 0; r < rows; ++r) {
      std::copy_n(pv.data() + r * widths[i], widths[i],
                  out.data() + r * total + offset);
    }
    offset += widths[i];
  }
  Shape shape = lead;
  shape.push_back(total);
  std::vector<Tensor> inputs(parts.begin(), parts.end());
  return Tensor::make_result(
      std::move(shape), std::move(out), inputs,
      [inputs, widths, rows, total](TensorNode& self) {
        std::size_t offset = 0;
        for (std::size_t i = 0; i < inputs.size(); ++i) {
          if (auto* g = grad_of(inputs[i])) {
            for (std::size_t r = 0; r < rows; ++r) {
              for (std::size_t c = 0; c < widths[i]; ++c) {
                (*g)[r * widths[i] + c] += self.grad[r * total + offset + c];
              }
            }
          }
          offset += widths[i];
        }
      });
}

Tensor slice(const Tensor& x, std::size_t begin, std::size_t end) {
  if (x.rank() < 1 || begin > end || end > x.shape().back()) {
    throw ShapeError("slice range", {begin, end}, x.shape());
  }
  const std::size_t width = x.shape().back();
  const std::size_t rows = x.size() / std::max<std::size_t>(width, 1);
  const std::size_t w = end - begin;
  Shape shape = x.shape();
  shape.back() = w;
  std::vector<double> out(rows * w);
  std::span<const double> xv = x.values();
  for (std::size_t r = 0; r < rows; ++r) {
    std::copy_n(xv.data() + r * width + begin, w, out.data() + r * w);
  }
  return Tensor::make_result(std::move(shape), std::move(out), {x},
                             [x, rows, width, begin, w](TensorNode& self) {
                               auto& gx = *grad_of(x);
                               for (std::size_t r = 0; r < rows; ++r) {
                                 for (std::size_t c = 0; c < w; ++c) {
                                   gx[r * width + begin + c] += self.grad[r * w + c];
                                 }
                               }
                             });
}

namespace {

Tensor reduce_axis(const Tensor& x, std::size_t axis, double factor) {
  if (axis >= x.rank()) throw ShapeError("reduction axis", {axis}, x.shape());
  const Shape& s = x.shape();
  std::size_t outer = 1, inner = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= s[i];
  for (std::size_t i = axis + 1; i < s.size(); ++i) inner *= s[i];
  const std::size_t extent = s[axis];
  Shape shape;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i != axis) shape.push_back(s[i]);
  }
  if (shape.empty()) shape.push_back(1);
  std::vector<double> out(outer * inner, 0.0);
  std::span<const double> xv = x.values();
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t e = 0; e < extent; ++e) {
      const double* src = xv.data() + (o * extent + e) * inner;
      double* dst = out.data() + o * inner;
      for (std::size_t i = 0; i < inner; ++i) dst[i] += src[i];
    }
  }
  for (double& v : out) v *= factor;
  return Tensor::make_result(
      std::move(shape), std::move(out), {x},
      [x, outer, extent, inner, factor](TensorNode& self) {
        auto& gx = *grad_of(x);
        for (std::size_t o = 0; o < outer; ++o) {
          for (std::size_t e = 0; e < extent; ++e) {
            double* dst = gx.data() + (o * extent + e) * inner;
            const double* src = self.grad.data() + o * inner;
            for (std::size_t i = 0; i < inner; ++i) dst[i] += src[i] * factor;
          }
        }
      });
}

}  // namespace

Tensor sum(const Tensor& x, std::size_t axis) { return reduce_axis(x, axis, 1.0); }

Tensor mean(const Tensor& x, std::size_t axis) {
  if (axis >= x.rank()) throw ShapeError("reduction axis", {axis}, x.shape());
  return reduce_axis(x, axis, 1.0 / static_cast<double>(x.extent(axis)));
}

Tensor sum_all(const Tensor& x) {
  double total = 0.0;
  for (double v : x.values()) total += v;
  return Tensor::make_result({1}, {total}, {x}, [x](TensorNode& self) {
    auto& gx = *grad_of(x);
    for (double& g : gx) g += self.grad[0];
  });
}

Tensor softmax(const Tensor& x) {
  if (x.rank() < 1) throw ShapeError("softmax", {1}, x.shape());
  const std::size_t m = x.shape().back();
  const std::size_t rows = x.size() / m;
  std::vector<double> out(x.size());
  std::span<const double> xv = x.values();
  for (std::size_t r = 0; r < rows; ++r) {
    const double* in = xv.data() + r * m;
    double* o = out.data() + r * m;
    const double peak = *std::max_element(in, in + m);
    double total = 0.0;
    for (std::size_t j = 0; j < m; ++j) total += (o[j] = std::exp(in[j] - peak));
    for (std::size_t j = 0; j < m; ++j) o[j] /= total;
  }
  std::vector<double> saved = out;
  return Tensor::make_result(
      x.shape(), std::move(out), {x},
      [x, saved = std::move(saved), rows, m](TensorNode& self) {
        auto& gx = *grad_of(x);
        for (std::size_t r = 0; r < rows; ++r) {
          const double* s = saved.data() + r * m;
          const double* g = self.grad.data() + r * m;
          double dot = 0.0;
          for (std::size_t j = 0; j < m; ++j) dot += g[j] * s[j];
          for (std::size_t j = 0; j < m; ++j) gx[r * m + j] += s[j] * (g[j] - dot);
        }
      });
}

Tensor log_softmax(const Tensor& x) {
  if (x.rank() < 1) throw ShapeError("log_softmax", {1}, x.shape());
  const std::size_t m = x.shape().back();
  const std::size_t rows = x.size() / m;
  std::vector<double> out(x.size());
  std::span<const double> xv = x.values();
  for (std::size_t r = 0; r < rows; ++r) {
    const double* in = xv.data() + r * m;
    const double peak = *std::max_element(in, in + m);
    double total = 0.0;
    for (std::size_t j = 0; j < m; ++j) total += std::exp(in[j] - peak);
    const double lse = peak + std::log(total);
    for (std::size_t j = 0; j < m; ++j) out[r * m + j] = in[j] - lse;
  }
  std::vector<double> saved = out;
  return Tensor::make_result(
      x.shape(), std::move(out), {x},
      [x, saved = std::move(saved), rows, m](TensorNode& self) {
        auto& gx = *grad_of(x);
        for (std::size_t r = 0; r < rows; ++r) {
          const double* g = self.grad.data() + r * m;
          double total = 0.0;
          for (std::size_t j = 0; j < m; ++j) total += g[j];
          for (std::size_t j = 0; j < m; ++j) {
            gx[r * m + j] += g[j] - std::exp(saved[r * m + j]) * total;
          }
        }
      });
}

std::size_t strided_length(std::size_t frames, std::size_t stride) {
  return (frames + stride - 1) / stride;
}

std::vector<std::uint8_t> subsample_mask(std::span<const std::uint8_t> valid,
                                         std::size_t instances,
                                         std::size_t frames, std::size_t slots,
                                         std::size_t stride) {
  if (valid.size() != instances * frames * slots) {
    throw ShapeError("subsample_mask", {instances, frames, slots}, {valid.size()});
  }
  const std::size_t out_frames = strided_length(frames, stride);
  std::vector<std::uint8_t> out(instances * out_frames * slots);
  for (std::size_t n = 0; n < instances; ++n) {
    for (std::size_t t = 0; t < out_frames; ++t) {
      std::copy_n(valid.data() + (n * frames + t * stride) * slots, slots,
                  out.data() + (n * out_frames + t) * slots);
    }
  }
  return out;
}

Tensor masked_temporal_conv(const Tensor& x, const Tensor& kernel,
                            std::size_t stride,
                            std::span<const std::uint8_t> valid) {
  require_rank(x, 4, "masked_temporal_conv input");
  require_rank(kernel, 3, "masked_temporal_conv kernel");
  if (stride < 1) throw ConfigError("temporal stride must be >= 1");
  const std::size_t taps = kernel.extent(0);
  if (taps % 2 == 0) throw ConfigError("temporal kernel size must be odd");
  const std::size_t N = x.extent(0), T = x.extent(1), V = x.extent(2),
                    C = x.extent(3), C_out = kernel.extent(2);
  if (kernel.extent(1) != C) {
    throw ShapeError("masked_temporal_conv kernel channels", {taps, C, C_out},
                     kernel.shape());
  }
  if (valid.size() != N * T * V) {
    throw ShapeError("masked_temporal_conv validity", {N, T, V}, {valid.size()});
  }
  const std::size_t T_out = strided_length(T, stride);
  const long pad = static_cast<long>(taps - 1) / 2;
  std::vector<std::uint8_t> out_valid = subsample_mask(valid, N, T, V, stride);

  // Gather every receptive field into one row: cols[(n, t, v), (k, c)].
  // Masked and out-of-range inputs stay zero.
  const std::size_t rows = N * T_out * V, width = taps * C;
  std::vector<double> cols(rows * width, 0.0);
  const double* xv = x.values().data();
  for (std::size_t n = 0; n < N; ++n) {
    for (std::size_t t = 0; t < T_out; ++t) {
      for (std::size_t k = 0; k < taps; ++k) {
        const long src_t = static_cast<long>(t * stride + k) - pad;
        if (src_t < 0 || src_t >= static_cast<long>(T)) continue;
        const std::size_t src = (n * T + static_cast<std::size_t>(src_t)) * V;
        const std::size_t dst = (n * T_out + t) * V;
        for (std::size_t v = 0; v < V; ++v) {
          if (!valid[src + v]) continue;
          std::copy_n(xv + (src + v) * C, C, cols.data() + (dst + v) * width + k * C);
        }
      }
    }
  }
  std::vector<double> out(rows * C_out);
  as_matrix(out.data(), rows, C_out).noalias() =
      as_matrix(cols.data(), rows, width) *
      as_matrix(kernel.values().data(), width, C_out);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!out_valid[i]) std::fill_n(out.data() + i * C_out, C_out, 0.0);
  }

  std::vector<std::uint8_t> in_valid(valid.begin(), valid.end());
  return Tensor::make_result(
      {N, T_out, V, C_out}, std::move(out), {x, kernel},
      [x, kernel, cols = std::move(cols), in_valid = std::move(in_valid),
       out_valid = std::move(out_valid), N, T, V, C, C_out, T_out, taps, pad,
       stride, rows, width](TensorNode& self) {
        std::vector<double> g = self.grad;
        for (std::size_t i = 0; i < rows; ++i) {
          if (!out_valid[i]) std::fill_n(g.data() + i * C_out, C_out, 0.0);
        }
        auto go = as_matrix(g.data(), rows, C_out);
        if (auto* gk = grad_of(kernel)) {
          as_matrix(gk->data(), width, C_out).noalias() +=
              as_matrix(cols.data(), rows, width).transpose() * go;
        }
        auto* gx = grad_of(x);
        if (!gx) return;
        std::vector<double> gcols(rows * width);
        as_matrix(gcols.data(), rows, width).noalias() =
            go * as_matrix(kernel.values().data(), width, C_out).transpose();
        for (std::size_t n = 0; n < N; ++n) {
          for (std::size_t t = 0; t < T_out; ++t) {
            for (std::size_t k = 0; k < taps; ++k) {
              const long src_t = static_cast<long>(t * stride + k) - pad;
              if (src_t < 0 || src_t >= static_cast<long>(T)) continue;
              const std::size_t src = (n * T + static_cast<std::size_t>(src_t)) * V;
              const std::size_t dst = (n * T_out + t) * V;
              for (std::size_t v = 0; v < V; ++v) {
                // Invalid inputs were replaced by zeros in the forward pass.
                if (!in_valid[src + v]) continue;
                const double* from = gcols.data() + (dst + v) * width + k * C;
                double* to = gx->data() + (src + v) * C;
                for (std::size_t c = 0; c < C; ++c) to[c] += from[c];
              }
            }
          }
        }
      });
}

Tensor graph_aggregate(const Tensor& x, std::span<const double> adjacency) {
  require_rank(x, 4, "graph_aggregate");
  const std::size_t N = x.extent(0), T = x.extent(1), V = x.extent(2),
                    C = x.extent(3);
  if (adjacency.size() != N * T * V * V) {
    throw ShapeError("graph_aggregate adjacency", {N * T, V, V},
                     {adjacency.size()});
  }
  std::vector<double> out(x.size());
  const double* xv = x.values().data();
  for (std::size_t g = 0; g < N * T; ++g) {
    as_matrix(out.data() + g * V * C, V, C).noalias() =
        as_matrix(adjacency.data() + g * V * V, V, V) *
        as_matrix(xv + g * V * C, V, C);
  }
  std::vector<double> adj(adjacency.begin(), adjacency.end());
  return Tensor::make_result(
      x.shape(), std::move(out), {x},
      [x, adj = std::move(adj), N, T, V, C](TensorNode& self) {
        auto& gx = *grad_of(x);
        for (std::size_t g = 0; g < N * T; ++g) {
          as_matrix(gx.data() + g * V * C, V, C).noalias() +=
              as_matrix(adj.data() + g * V * V, V, V).transpose() *
              as_matrix(self.grad.data() + g * V * C, V, C);
        }
      });
}

Tensor masked_temporal_mean(const Tensor& x,
                            std::span<const std::size_t> frame_counts) {
  require_rank(x, 4, "masked_temporal_mean");
  const std::size_t N = x.extent(0), T = x.extent(1), V = x.extent(2),
                    C = x.extent(3);
  if (frame_counts.size() != N) {
    throw ShapeError("masked_temporal_mean counts", {N}, {frame_counts.size()});
  }
  std::vector<double> scales(N);
  for (std::size_t n = 0; n < N; ++n) {
    scales[n] = frame_counts[n] ? 1.0 / static_cast<double>(frame_counts[n]) : 0.0;
  }
  const std::size_t row = V * C;
  std::vector<double> out(N * row, 0.0);
  std::span<const double> xv = x.values();
  for (std::size_t n = 0; n < N; ++n) {
    double* dst = out.data() + n * row;
    for (std::size_t t = 0; t < T; ++t) {
      const double* src = xv.data() + (n * T + t) * row;
      for (std::size_t i = 0; i < row; ++i) dst[i] += src[i];
    }
    for (std::size_t i = 0; i < row; ++i) dst[i] *= scales[n];
  }
  return Tensor::make_result({N, V, C}, std::move(out), {x},
                             [x, scales, N, T, row](TensorNode& self) {
                               auto& gx = *grad_of(x);
                               for (std::size_t n = 0; n < N; ++n) {
                                 const double* g = self.grad.data() + n * row;
                                 for (std::size_t t = 0; t < T; ++t) {
                                   double* dst = gx.data() + (n * T + t) * row;
                                   for (std::size_t i = 0; i < row; ++i) dst[i] += g[i] * scales[n];
                                 }
                               }
                             });
}

Tensor wnpool(const Tensor& x, const Tensor& weights,
              std::span<const std::size_t> slot_weight,
              std::span<const std::uint8_t> slot_valid) {
  require_rank(x, 3, "wnpool");
  require_rank(weights, 1, "wnpool weights");
  const std::size_t N = x.extent(0), V = x.extent(1), C = x.extent(2);
  if (slot_weight.size() != V) {
    throw ShapeError("wnpool slot map", {V}, {slot_weight.size()});
  }
  if (slot_valid.size() != N * V) {
    throw ShapeError("wnpool validity", {N, V}, {slot_valid.size()});
  }
  for (std::size_t w : slot_weight) {
    if (w >= weights.size()) {
      throw ShapeError("wnpool weight index", {weights.size()}, {w});
    }
  }
  std::vector<double> inv_real(N);
  for (std::size_t n = 0; n < N; ++n) {
    std::size_t real = 0;
    for (std::size_t v = 0; v < V; ++v) real += slot_valid[n * V + v] ? 1 : 0;
    if (real == 0) {
      throw DegenerateInstance("wnpool: instance " + std::to_string(n) +
                               " has no valid nodes");
    }
    inv_real[n] = 1.0 / static_cast<double>(real);
  }
  std::vector<double> out(N * C, 0.0);
  std::span<const double> xv = x.values(), wv = weights.values();
  for (std::size_t n = 0; n < N; ++n) {
    double* y = out.data() + n * C;
    for (std::size_t v = 0; v < V; ++v) {
      if (!slot_valid[n * V + v]) continue;
      const double w = wv[slot_weight[v]];
      const double* src = xv.data() + (n * V + v) * C;
      for (std::size_t c = 0; c < C; ++c) y[c] += src[c] * w;
    }
    for (std::size_t c = 0; c < C; ++c) y[c] *= inv_real[n];
  }
  std::vector<std::size_t> map(slot_weight.begin(), slot_weight.end());
  std::vector<std::uint8_t> mask(slot_valid.begin(), slot_valid.end());
  return Tensor::make_result(
      {N, C}, std::move(out), {x, weights},
      [x, weights, map = std::move(map), mask = std::move(mask), inv_real, N, V,
       C](TensorNode& self) {
        auto* gx = grad_of(x);
        auto* gw = grad_of(weights);
        std::span<const double> xv = x.values(), wv = weights.values();
        for (std::size_t n = 0; n < N; ++n) {
          const double* g = self.grad.data() + n * C;
          for (std::size_t v = 0; v < V; ++v) {
            if (!mask[n * V + v]) continue;
            const double w = wv[map[v]];
            if (gx) {
              double* dst = gx->data() + (n * V + v) * C;
              for (std::size_t c = 0; c < C; ++c) dst[c] += g[c] * w * inv_real[n];
            }
            if (gw) {
              const double* src = xv.data() + (n * V + v) * C;
              double acc = 0.0;
              for (std::size_t c = 0; c < C; ++c) acc += g[c] * src[c];
              (*gw)[map[v]] += acc * inv_real[n];
            }
          }
        }
      });
}

Tensor node_balance_loss(const Tensor& x, std::span<const NodeKind> kind,
                         BalanceSums* sums) {
  require_rank(x, 4, "node_balance_loss");
  const std::size_t N = x.extent(0), T = x.extent(1), V = x.extent(2),
                    C = x.extent(3);
  if (kind.size() != N * T * V) {
    throw ShapeError("node_balance_loss kinds", {N, T, V}, {kind.size()});
  }
  std::vector<double> s_sn(N, 0.0), s_on(N, 0.0);
  std::span<const double> xv = x.values();
  for (std::size_t n = 0; n < N; ++n) {
    for (std::size_t i = n * T * V; i < (n + 1) * T * V; ++i) {
      if (kind[i] == NodeKind::kEmpty) continue;
      double acc = 0.0;
      for (std::size_t c = 0; c < C; ++c) acc += xv[i * C + c];
      (kind[i] == NodeKind::kSkeleton ? s_sn[n] : s_on[n]) += acc;
    }
  }
  // d loss_n / d S_on, with d loss_n / d S_sn following from the ratio.
  std::vector<double> d_on(N, 0.0), d_sn(N, 0.0);
  double total = 0.0;
  for (std::size_t n = 0; n < N; ++n) {
    if (s_sn[n] == 0.0 || s_on[n] == 0.0) continue;
    const double log_ratio = std::log(s_on[n] / s_sn[n]);
    total += std::abs(log_ratio);
    const double sign = log_ratio > 0.0 ? 1.0 : (log_ratio < 0.0 ? -1.0 : 0.0);
    d_on[n] = sign / s_on[n];
    d_sn[n] = -sign / s_sn[n];
  }
  if (sums) *sums = {s_sn, s_on};
  const double inv_n = 1.0 / static_cast<double>(std::max<std::size_t>(N, 1));
  std::vector<NodeKind> kinds(kind.begin(), kind.end());
  return Tensor::make_result(
      {1}, {total * inv_n}, {x},
      [x, kinds = std::move(kinds), d_on = std::move(d_on),
       d_sn = std::move(d_sn), inv_n, T, V, C](TensorNode& self) {
        auto& gx = *grad_of(x);
        const double g = self.grad[0] * inv_n;
        for (std::size_t i = 0; i < kinds.size(); ++i) {
          if (kinds[i] == NodeKind::kEmpty) continue;
          const std::size_t n = i / (T * V);
          const double d = g * (kinds[i] == NodeKind::kSkeleton ? d_sn[n] : d_on[n]);
          if (d == 0.0) continue;
          for (std::size_t c = 0; c < C; ++c) gx[i * C + c] += d;
        }
      });
}

Tensor cross_entropy(const Tensor& logits, std::span<const int> labels) {
  require_rank(logits, 2, "cross_entropy");
  const std::size_t N = logits.extent(0), M = logits.extent(1);
  if (labels.size() != N) throw ShapeError("cross_entropy labels", {N}, {labels.size()});
  for (int label : labels) {
    if (label < 0 || static_cast<std::size_t>(label) >= M) {
      throw MalformedInput("label " + std::to_string(label) + " outside [0, " +
                           std::to_string(M) + ")");
    }
  }
  std::vector<double> probs(N * M);
  double total = 0.0;
  std::span<const double> z = logits.values();
  for (std::size_t n = 0; n < N; ++n) {
    const double* row = z.data() + n * M;
    const double peak = *std::max_element(row, row + M);
    double acc = 0.0;
    for (std::size_t j = 0; j < M; ++j) acc += (probs[n * M + j] = std::exp(row[j] - peak));
    for (std::size_t j = 0; j < M; ++j) probs[n * M + j] /= acc;
    total += peak + std::log(acc) - row[labels[n]];
  }
  const double inv_n = 1.0 / static_cast<double>(N);
  std::vector<int> targets(labels.begin(), labels.end());
  return Tensor::make_result(
      {1}, {total * inv_n}, {logits},
      [logits, probs = std::move(probs), targets = std::move(targets), inv_n, N,
       M](TensorNode& self) {
        auto& g = *grad_of(logits);
        const double scale = self.grad[0] * inv_n;
        for (std::size_t n = 0; n < N; ++n) {
          for (std::size_t j = 0; j < M; ++j) {
            const double onehot = static_cast<int>(j) == targets[n] ? 1.0 : 0.0;
            g[n * M + j] += scale * (probs[n * M + j] - onehot);
          }
        }
      });
}

}  // namespace vgcn::ops
