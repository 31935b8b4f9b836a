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
#include <vector>

namespace hcl {

// Counter-based generator keyed by (seed, stream). Draw k of stream s is a pure
// function of (seed, s, k), so independent streams can be handed to parallel
// workers without changing any result. Distributions are implemented here
// rather than via <random> so sample streams are identical across standard
// libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }
  std::uint64_t counter() const { return counter_; }

  // Child generator for a sub-stream; does not advance this generator.
  Rng split(std::uint64_t sub_stream) const;

  std::uint64_t next_u64();
  // Uniform integer in [0, n); n must be > 0.
  std::uint64_t uniform_index(std::uint64_t n);
  // Uniform double in [0, 1).
  double uniform01();
  double normal(double mean = 0.0, double stddev = 1.0);

  // m distinct values drawn uniformly from [0, n) (Floyd's algorithm).
  std::vector<std::uint64_t> sample_distinct(std::uint64_t n, std::uint64_t m);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t x);

}  // namespace hcl
