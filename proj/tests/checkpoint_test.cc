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

#include "vgcn/checkpoint.h"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "vgcn/error.h"

namespace vgcn {
namespace {

std::vector<NamedTensor> sample_params() {
  return {{"a", Tensor({2, 2}, {1.5, -0.0, 1e-300, -7})},
          {"bias", Tensor({3}, {0.1, 0.2, 0.3})},
          {"empty", Tensor({0}, {})}};
}

TEST(Checkpoint, EncodeDecodeIsExact) {
  const auto params = sample_params();
  const auto bytes = encode_checkpoint(params);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 7), "VGCKPT1");
  const auto back = decode_checkpoint(bytes);
  ASSERT_EQ(back.size(), params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    EXPECT_EQ(back[i].name, params[i].name);
    EXPECT_EQ(back[i].tensor.shape(), params[i].tensor.shape());
    const auto a = params[i].tensor.values(), b = back[i].tensor.values();
    EXPECT_TRUE(std::equal(a.begin(), a.end(), b.begin(), b.end()));
  }
  EXPECT_TRUE(std::signbit(back[0].tensor.values()[1]));
  EXPECT_EQ(encode_checkpoint(back), bytes);
}

TEST(Checkpoint, RejectsForeignAndTruncatedBuffers) {
  auto bytes = encode_checkpoint(sample_params());
  auto foreign = bytes;
  foreign[0] = 'X';
  EXPECT_THROW(decode_checkpoint(foreign), ParseError);
  for (std::size_t cut : {std::size_t{3}, std::size_t{10}, bytes.size() / 2, bytes.size() - 1}) {
    const std::vector<std::uint8_t> part(bytes.begin(), bytes.begin() + cut);
    EXPECT_THROW(decode_checkpoint(part), ParseError) << cut;
  }
  bytes.push_back(0);
  EXPECT_THROW(decode_checkpoint(bytes), ParseError);
}

TEST(Checkpoint, ModelSurvivesFileRoundTrip) {
  ModelConfig cfg;
  cfg.widths = {4};
  cfg.strides = {1};
  cfg.temporal_kernel = 3;
  cfg.caf_width = 4;
  cfg.c_ca = 4;
  cfg.seed = 1;
  const Model a(cfg);
  const auto path = std::filesystem::temp_directory_path() / "vgcn_checkpoint_test.ckpt";
  save_checkpoint(path, a.parameters());
  cfg.seed = 2;
  Model b(cfg);
  b.load_parameters(load_checkpoint(path));
  std::filesystem::remove(path);
  const auto pa = a.parameters(), pb = b.parameters();
  for (std::size_t i = 0; i < pa.size(); ++i) {
    const auto x = pa[i].tensor.values(), y = pb[i].tensor.values();
    EXPECT_TRUE(std::equal(x.begin(), x.end(), y.begin(), y.end())) << pa[i].name;
  }
  EXPECT_THROW(load_checkpoint(path), Error);
}

}  // namespace
}  // namespace vgcn
