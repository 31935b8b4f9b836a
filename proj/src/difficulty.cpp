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

#include "hcl/difficulty.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hcl/error.hpp"
#include "hcl/index.hpp"
#include "hcl/log.hpp"

namespace hcl {

std::size_t DifficultyTable::eligible_count(double threshold) const {
  return static_cast<std::size_t>(
      std::upper_bound(sorted_dcc.begin(), sorted_dcc.end(), threshold) - sorted_dcc.begin());
}

std::span<const std::uint32_t> DifficultyTable::eligible(double threshold) const {
  return std::span(order).first(eligible_count(threshold));
}

DifficultyTable corpus_difficulty_from_scores(std::span<const double> raw_scores) {
  if (raw_scores.empty()) throw Error("corpus difficulty: empty score list");
  for (std::size_t i = 0; i < raw_scores.size(); ++i) {
    if (!std::isfinite(raw_scores[i])) {
      throw NonFiniteError("corpus difficulty: non-finite score for pair " + std::to_string(i));
    }
  }
  DifficultyTable t;
  t.raw_score.assign(raw_scores.begin(), raw_scores.end());
  const auto [mn, mx] = std::minmax_element(raw_scores.begin(), raw_scores.end());
  t.g_max = *mx;
  t.dcc.resize(raw_scores.size());
  if (t.g_max > 0.0) {
    for (std::size_t i = 0; i < raw_scores.size(); ++i) {
      t.dcc[i] = std::clamp(1.0 - raw_scores[i] / t.g_max, 0.0, 1.0);
    }
  } else {
    t.min_max_fallback = true;
    const double span = *mx - *mn;
    log_warning("corpus difficulty: max positive-pair score " + std::to_string(t.g_max) +
                " is not positive; using min-max normalization");
    for (std::size_t i = 0; i < raw_scores.size(); ++i) {
      t.dcc[i] = span > 0.0 ? (*mx - raw_scores[i]) / span : 0.0;
    }
  }
  t.order.resize(raw_scores.size());
  std::iota(t.order.begin(), t.order.end(), 0u);
  std::stable_sort(t.order.begin(), t.order.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return t.dcc[a] < t.dcc[b]; });
  t.sorted_dcc.resize(t.order.size());
  for (std::size_t k = 0; k < t.order.size(); ++k) t.sorted_dcc[k] = t.dcc[t.order[k]];
  return t;
}

DifficultyTable compute_corpus_difficulty(const OfflineIndex& index) {
  std::vector<double> raw(index.size());
  for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = index.score(i, i);
  return corpus_difficulty_from_scores(raw);
}

std::size_t instance_difficulty(const OfflineIndex& index, std::size_t i, std::size_t j) {
  return index.rank_of(i, j);
}

}  // namespace hcl
