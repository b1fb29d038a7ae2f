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

#ifndef VGCN_CHECKPOINT_H_
#define VGCN_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "vgcn/model.h"

namespace vgcn {

// Flat little-endian parameter dump:
//   "VGCKPT1" (7 bytes), u64 param count, then per parameter
//   u64 name length, name bytes, u64 rank, u64 extents[rank],
//   f64 values[prod(extents)].
std::vector<std::uint8_t> encode_checkpoint(
    std::span<const NamedTensor> params);
// ParseError on a truncated or foreign buffer.
std::vector<NamedTensor> decode_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const std::filesystem::path& path,
                     std::span<const NamedTensor> params);
std::vector<NamedTensor> load_checkpoint(const std::filesystem::path& path);

}  // namespace vgcn

#endif  // VGCN_CHECKPOINT_H_
