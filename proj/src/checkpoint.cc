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

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "vgcn/error.h"

namespace vgcn {
namespace {

constexpr char kMagic[] = "VGCKPT1";
constexpr std::size_t kMagicSize = sizeof(kMagic) - 1;

static_assert(std::endian::native == std::endian::little,
              "checkpoint encoding assumes a little-endian host");

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::span<const std::uint8_t> take(std::size_t n) {
    if (n > bytes_.size() - pos_) throw ParseError("checkpoint truncated", 0);
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }
  std::uint64_t u64() {
    auto b = take(8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[static_cast<std::size_t>(i)];
    return v;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(std::span<const NamedTensor> params) {
  std::vector<std::uint8_t> out(kMagic, kMagic + kMagicSize);
  put_u64(out, params.size());
  for (const NamedTensor& p : params) {
    put_u64(out, p.name.size());
    out.insert(out.end(), p.name.begin(), p.name.end());
    put_u64(out, p.tensor.rank());
    for (std::size_t e : p.tensor.shape()) put_u64(out, e);
    for (double v : p.tensor.values()) put_u64(out, std::bit_cast<std::uint64_t>(v));
  }
  return out;
}

std::vector<NamedTensor> decode_checkpoint(std::span<const std::uint8_t> bytes) {
  Reader in(bytes);
  auto magic = in.take(kMagicSize);
  if (std::memcmp(magic.data(), kMagic, kMagicSize) != 0) {
    throw ParseError("not a checkpoint (bad magic)", 0);
  }
  const std::uint64_t count = in.u64();
  std::vector<NamedTensor> params;
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::uint64_t name_len = in.u64();
    auto name = in.take(name_len);
    const std::uint64_t rank = in.u64();
    if (rank > 8) throw ParseError("checkpoint tensor rank " + std::to_string(rank), 0);
    Shape shape;
    for (std::uint64_t r = 0; r < rank; ++r) shape.push_back(in.u64());
    const std::size_t n = shape_size(shape);
    if (n > bytes.size() / 8) throw ParseError("checkpoint tensor larger than file", 0);
    std::vector<double> values(n);
    for (double& v : values) v = std::bit_cast<double>(in.u64());
    params.push_back({std::string(name.begin(), name.end()),
                      Tensor(std::move(shape), std::move(values), true)});
  }
  if (!in.done()) throw ParseError("trailing bytes after checkpoint", 0);
  return params;
}

void save_checkpoint(const std::filesystem::path& path,
                     std::span<const NamedTensor> params) {
  const std::vector<std::uint8_t> bytes = encode_checkpoint(params);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write checkpoint " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed writing checkpoint " + path.string());
}

std::vector<NamedTensor> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open checkpoint " + path.string(), 0);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes);
}

}  // namespace vgcn
