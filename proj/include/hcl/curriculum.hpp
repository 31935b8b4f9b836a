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

#include "hcl/difficulty.hpp"
#include "hcl/index.hpp"
#include "hcl/rng.hpp"

namespace hcl {

// Pacing parameters shared by the corpus-level and instance-level schedules.
struct CurriculumSchedule {
  double pcc0 = 0.3;        // initial corpus-difficulty ceiling, in (0, 1]
  double k_final = 3.0;     // log10 of the final sampling-space size
  double k_initial = 0.0;   // log10(|D|)
  std::uint64_t warmup_steps = 0;  // T
  std::uint64_t total_steps = 0;

  // T defaults to half of total_steps when warmup_steps is 0.
  static CurriculumSchedule make(std::size_t corpus_size, double pcc0, double k_final,
                                 std::uint64_t total_steps, std::uint64_t warmup_steps = 0);
  void validate() const;
};

// Linear from pcc0 at t = 0 to 1 at t = T, then 1.
double pacing_cc(const CurriculumSchedule& s, std::uint64_t t);
// Linear from k_initial at t = 0 to k_final at t = T, then k_final.
double pacing_ic(const CurriculumSchedule& s, std::uint64_t t);
// clamp(round(10^pacing_ic(t)), m, |D| − 1)
std::size_t sampling_space_size(const CurriculumSchedule& s, std::uint64_t t,
                                std::size_t corpus_size, std::size_t m);

struct CurriculumFlags {
  bool corpus_level = true;
  bool instance_level = true;
};

struct TrainingBatchSpec {
  std::uint64_t step = 0;
  std::vector<std::uint32_t> pair_ids;
  std::vector<std::vector<std::uint32_t>> negatives;  // one list of m per pair
  double pcc = 1.0;     // effective corpus ceiling used
  double pic = 0.0;     // effective log10 sampling space used
  std::size_t space = 0;  // effective n
  std::size_t eligible_count = 0;
  bool drew_with_replacement = false;

  bool operator==(const TrainingBatchSpec&) const = default;
};

struct BatchRequest {
  std::size_t batch_size = 32;
  std::size_t negatives = 5;
  CurriculumFlags flags{};
  SampleOptions sample{};
};

// One step of the hierarchical sampler: batch pairs drawn uniformly from the
// eligible prefix of the difficulty order, then m negatives per pair from its
// top-n set. A disabled curriculum is replaced by its uniform counterpart
// (ceiling 1, n = |D| − 1).
TrainingBatchSpec next_batch(const CurriculumSchedule& schedule, std::uint64_t t,
                             const DifficultyTable& table, const OfflineIndex& index,
                             const BatchRequest& request, Rng& rng);

}  // namespace hcl
