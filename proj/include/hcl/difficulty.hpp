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
#include <span>
#include <string>
#include <vector>

namespace hcl {

class OfflineIndex;

// Corpus-level difficulty of every training pair plus the eligibility order.
struct DifficultyTable {
  std::vector<double> raw_score;     // G(c_i, r_i)
  std::vector<double> dcc;           // in [0, 1]
  std::vector<std::uint32_t> order;  // ids ascending by dcc, ties by id
  std::vector<double> sorted_dcc;    // dcc[order[k]]
  double g_max = 0.0;
  bool min_max_fallback = false;

  std::size_t size() const { return dcc.size(); }
  // Number of pairs with dcc ≤ threshold; they are order[0 .. count).
  std::size_t eligible_count(double threshold) const;
  std::span<const std::uint32_t> eligible(double threshold) const;
};

// d_cc(i) = clamp(1 − raw_i / max_k raw_k, 0, 1). If the maximum is not
// positive, falls back to (max − raw_i) / (max − min) and logs a warning.
DifficultyTable corpus_difficulty_from_scores(std::span<const double> raw_scores);

DifficultyTable compute_corpus_difficulty(const OfflineIndex& index);

// Rank of response j for context i (1 = most relevant, hardest).
std::size_t instance_difficulty(const OfflineIndex& index, std::size_t i, std::size_t j);

}  // namespace hcl
