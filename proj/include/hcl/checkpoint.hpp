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

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "hcl/param_store.hpp"

namespace hcl {

// Parameter checkpoint ("HCLP", version 1):
//   magic[4] version:u32 count:u32
//   count × { name_len:u32 name:utf8 rows:u64 cols:u64 payload:f64[rows*cols] }
// All integers and floats little-endian. Run metadata is carried as extra
// tensors under the reserved "meta." prefix; 64-bit values are split into two
// 32-bit halves so they survive the f64 payload exactly.
inline constexpr char kCheckpointMagic[4] = {'H', 'C', 'L', 'P'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointMeta {
  std::uint64_t seed = 0;
  std::uint64_t vocab_checksum = 0;
  std::uint64_t vocab_size = 0;
};

std::vector<std::uint8_t> encode_checkpoint(const ParamStore& store, const CheckpointMeta& meta);
void save_checkpoint(const std::filesystem::path& path, const ParamStore& store,
                     const CheckpointMeta& meta);

struct LoadedCheckpoint {
  ParamStore store;
  CheckpointMeta meta;
};

LoadedCheckpoint decode_checkpoint(std::span<const std::uint8_t> bytes);
LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace hcl
