// Copyright 2026 The HCL Authors.
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

#include "hcl/checkpoint.hpp"

#include <cmath>
#include <string>

#include "hcl/binary_io.hpp"
#include "hcl/error.hpp"

namespace hcl {

namespace {

constexpr std::string_view kMetaPrefix = "meta.";

Matrix split_u64(std::uint64_t v) {
  return Matrix(1, 2, {static_cast<double>(v >> 32), static_cast<double>(v & 0xffffffffULL)});
}

std::uint64_t join_u64(const Matrix& m, const std::string& name) {
  if (m.rows() != 1 || m.cols() != 2) throw FormatError("checkpoint: bad metadata tensor " + name);
  const double hi = m(0, 0);
  const double lo = m(0, 1);
  if (hi < 0 || lo < 0 || hi > 4294967295.0 || lo > 4294967295.0 || hi != std::floor(hi) ||
      lo != std::floor(lo)) {
    throw FormatError("checkpoint: bad metadata tensor " + name);
  }
  return (static_cast<std::uint64_t>(hi) << 32) | static_cast<std::uint64_t>(lo);
}

void put_tensor(ByteWriter& w, const std::string& name, const Matrix& m) {
  w.put_u32(static_cast<std::uint32_t>(name.size()));
  w.put_bytes(name);
  w.put_u64(m.rows());
  w.put_u64(m.cols());
  w.put_f64s(m.data());
}

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const ParamStore& store, const CheckpointMeta& meta) {
  ByteWriter w;
  w.put_bytes(std::string_view(kCheckpointMagic, 4));
  w.put_u32(kCheckpointVersion);
  w.put_u32(static_cast<std::uint32_t>(store.entries().size() + 3));
  for (const auto& e : store.entries()) {
    if (e.name.starts_with(kMetaPrefix)) throw Error("parameter name uses reserved prefix: " + e.name);
    put_tensor(w, e.name, e.value);
  }
  put_tensor(w, "meta.seed", split_u64(meta.seed));
  put_tensor(w, "meta.vocab_checksum", split_u64(meta.vocab_checksum));
  put_tensor(w, "meta.vocab_size", split_u64(meta.vocab_size));
  return w.bytes();
}

void save_checkpoint(const std::filesystem::path& path, const ParamStore& store,
                     const CheckpointMeta& meta) {
  write_file_bytes(path, encode_checkpoint(store, meta));
}

LoadedCheckpoint decode_checkpoint(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes, "checkpoint");
  if (r.get_bytes(4) != std::string_view(kCheckpointMagic, 4)) {
    throw FormatError("checkpoint: bad magic (expected HCLP)");
  }
  const std::uint32_t version = r.get_u32();
  if (version != kCheckpointVersion) {
    throw FormatError("checkpoint: unsupported version " + std::to_string(version));
  }
  const std::uint32_t count = r.get_u32();
  LoadedCheckpoint out;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint32_t name_len = r.get_u32();
    std::string name = r.get_bytes(name_len);
    const std::uint64_t rows = r.get_u64();
    const std::uint64_t cols = r.get_u64();
    if (cols != 0 && rows > r.remaining() / 8 / cols) {
      throw FormatError("checkpoint: tensor '" + name + "' payload exceeds file size");
    }
    Matrix m(rows, cols);
    r.get_f64s(m.data());
    if (name == "meta.seed") {
      out.meta.seed = join_u64(m, name);
    } else if (name == "meta.vocab_checksum") {
      out.meta.vocab_checksum = join_u64(m, name);
    } else if (name == "meta.vocab_size") {
      out.meta.vocab_size = join_u64(m, name);
    } else if (!name.starts_with(kMetaPrefix)) {
      out.store.add(name, std::move(m));
    }
  }
  if (r.remaining() != 0) throw FormatError("checkpoint: trailing bytes");
  return out;
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return decode_checkpoint(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace hcl
