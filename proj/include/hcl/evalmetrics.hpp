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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hcl/corpus.hpp"

namespace hcl {

using PairScorer =
    std::function<double(std::span<const TokenId> context, std::span<const TokenId> response)>;

// Candidate positions by descending score; ties keep the listed order.
// Throws NonFiniteError on NaN/inf scores.
std::vector<std::size_t> rank_candidates(std::span<const double> scores);
std::vector<std::size_t> rank_candidates(const PairScorer& scorer, const TestInstance& instance,
                                         std::size_t max_context_tokens = 0);

struct EvalReport {
  double map = 0.0;
  double mrr = 0.0;
  double p_at_1 = 0.0;
  std::map<std::pair<std::size_t, std::size_t>, double> recall_at;  // (n, k) → R_n@k
  std::size_t num_instances = 0;
};

// Scores and labels of one test instance, in listed order.
struct ScoredInstance {
  std::vector<double> scores;
  std::vector<int> labels;
};

// R_n@k restricts each instance to the first listed positive plus the first
// n − 1 listed negatives (the whole list when it has ≤ n candidates), and is
// the fraction of that subset's positives ranked in the top k.
EvalReport evaluate_scored(std::span<const ScoredInstance> instances,
                           std::span<const std::pair<std::size_t, std::size_t>> recalls);
EvalReport evaluate(const PairScorer& scorer, std::span<const TestInstance> instances,
                    std::span<const std::pair<std::size_t, std::size_t>> recalls,
                    std::size_t max_context_tokens = 0);

// Comma-separated metric names: map, mrr, p1, r<n>@<k>.
struct MetricSelection {
  bool map = false;
  bool mrr = false;
  bool p1 = false;
  std::vector<std::pair<std::size_t, std::size_t>> recalls;
};
MetricSelection parse_metrics(const std::string& list);
inline constexpr const char* kDefaultMetrics = "map,mrr,p1,r10@1,r10@2,r10@5,r2@1";

// Flat JSON object with the selected metrics plus num_instances (and the
// run seed when given).
std::string report_to_json(const EvalReport& report, const MetricSelection& selection,
                           std::optional<std::uint64_t> seed = std::nullopt);

}  // namespace hcl
