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

#include "hcl/evalmetrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "hcl/error.hpp"

namespace hcl {

std::vector<std::size_t> rank_candidates(std::span<const double> scores) {
  for (std::size_t k = 0; k < scores.size(); ++k) {
    if (!std::isfinite(scores[k])) {
      throw NonFiniteError("rank_candidates: non-finite score for candidate " + std::to_string(k));
    }
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

std::vector<std::size_t> rank_candidates(const PairScorer& scorer, const TestInstance& instance,
                                         std::size_t max_context_tokens) {
  if (instance.candidates.size() < 2) throw Error("rank_candidates: need at least 2 candidates");
  const Utterance ctx = flatten_context(instance.context, max_context_tokens);
  std::vector<double> scores;
  scores.reserve(instance.candidates.size());
  for (const auto& c : instance.candidates) scores.push_back(scorer(ctx, c.response));
  return rank_candidates(scores);
}

namespace {

double recall_in_subset(const ScoredInstance& inst, std::size_t n, std::size_t k) {
  std::vector<std::size_t> subset;
  if (inst.scores.size() <= n) {
    subset.resize(inst.scores.size());
    std::iota(subset.begin(), subset.end(), std::size_t{0});
  } else {
    bool have_positive = false;
    std::size_t negatives = 0;
    for (std::size_t c = 0; c < inst.labels.size(); ++c) {
      if (inst.labels[c] == 1 && !have_positive) {
        have_positive = true;
        subset.push_back(c);
      } else if (inst.labels[c] == 0 && negatives + 1 < n) {
        ++negatives;
        subset.push_back(c);
      }
    }
  }
  std::vector<double> sub_scores;
  std::size_t positives = 0;
  for (std::size_t c : subset) {
    sub_scores.push_back(inst.scores[c]);
    positives += inst.labels[c] == 1;
  }
  const auto order = rank_candidates(sub_scores);
  std::size_t hits = 0;
  for (std::size_t r = 0; r < std::min(k, order.size()); ++r) hits += inst.labels[subset[order[r]]] == 1;
  return static_cast<double>(hits) / static_cast<double>(positives);
}

}  // namespace

EvalReport evaluate_scored(std::span<const ScoredInstance> instances,
                           std::span<const std::pair<std::size_t, std::size_t>> recalls) {
  EvalReport rep;
  rep.num_instances = instances.size();
  if (instances.empty()) throw Error("evaluate: no test instances");
  for (const auto& [n, k] : recalls) {
    if (n == 0 || k == 0) throw Error("evaluate: recall parameters must be positive");
    rep.recall_at[{n, k}] = 0.0;
  }
  for (std::size_t q = 0; q < instances.size(); ++q) {
    const auto& inst = instances[q];
    if (inst.scores.size() != inst.labels.size()) throw ShapeError("evaluate: scores/labels length mismatch");
    const std::size_t positives =
        static_cast<std::size_t>(std::count(inst.labels.begin(), inst.labels.end(), 1));
    if (positives == 0) throw Error("evaluate: test instance " + std::to_string(q) + " has no positive candidate");
    const auto order = rank_candidates(inst.scores);
    double ap = 0.0;
    std::size_t seen = 0;
    double rr = 0.0;
    for (std::size_t r = 0; r < order.size(); ++r) {
      if (inst.labels[order[r]] != 1) continue;
      ++seen;
      ap += static_cast<double>(seen) / static_cast<double>(r + 1);
      if (seen == 1) rr = 1.0 / static_cast<double>(r + 1);
    }
    rep.map += ap / static_cast<double>(positives);
    rep.mrr += rr;
    rep.p_at_1 += inst.labels[order[0]] == 1 ? 1.0 : 0.0;
    for (auto& [nk, value] : rep.recall_at) value += recall_in_subset(inst, nk.first, nk.second);
  }
  const auto count = static_cast<double>(instances.size());
  rep.map /= count;
  rep.mrr /= count;
  rep.p_at_1 /= count;
  for (auto& [nk, value] : rep.recall_at) value /= count;
  return rep;
}

EvalReport evaluate(const PairScorer& scorer, std::span<const TestInstance> instances,
                    std::span<const std::pair<std::size_t, std::size_t>> recalls,
                    std::size_t max_context_tokens) {
  std::vector<ScoredInstance> scored;
  scored.reserve(instances.size());
  for (const auto& inst : instances) {
    const Utterance ctx = flatten_context(inst.context, max_context_tokens);
    ScoredInstance s;
    for (const auto& c : inst.candidates) {
      s.scores.push_back(scorer(ctx, c.response));
      s.labels.push_back(c.label);
    }
    scored.push_back(std::move(s));
  }
  return evaluate_scored(scored, recalls);
}

MetricSelection parse_metrics(const std::string& list) {
  MetricSelection sel;
  std::size_t start = 0;
  while (start <= list.size()) {
    const std::size_t comma = std::min(list.find(',', start), list.size());
    std::string name = list.substr(start, comma - start);
    start = comma + 1;
    std::erase_if(name, [](unsigned char c) { return std::isspace(c); });
    if (name.empty()) continue;
    if (name == "map") {
      sel.map = true;
    } else if (name == "mrr") {
      sel.mrr = true;
    } else if (name == "p1" || name == "p@1") {
      sel.p1 = true;
    } else if (name[0] == 'r' && name.find('@') != std::string::npos) {
      const auto at = name.find('@');
      try {
        std::size_t used = 0;
        const auto n = std::stoul(name.substr(1, at - 1), &used);
        if (used != at - 1) throw std::invalid_argument(name);
        const std::string ks = name.substr(at + 1);
        const auto k = std::stoul(ks, &used);
        if (used != ks.size() || n == 0 || k == 0 || k > n) throw std::invalid_argument(name);
        sel.recalls.emplace_back(n, k);
      } catch (const std::logic_error&) {
        throw Error("unknown metric '" + name + "'");
      }
    } else {
      throw Error("unknown metric '" + name + "'");
    }
  }
  return sel;
}

std::string report_to_json(const EvalReport& report, const MetricSelection& selection,
                           std::optional<std::uint64_t> seed) {
  nlohmann::ordered_json j;
  if (seed) j["seed"] = *seed;
  if (selection.map) j["map"] = report.map;
  if (selection.mrr) j["mrr"] = report.mrr;
  if (selection.p1) j["p1"] = report.p_at_1;
  for (const auto& nk : selection.recalls) {
    auto it = report.recall_at.find(nk);
    if (it == report.recall_at.end()) throw Error("report_to_json: recall not computed");
    j["r" + std::to_string(nk.first) + "@" + std::to_string(nk.second)] = it->second;
  }
  j["num_instances"] = report.num_instances;
  return j.dump(2) + "\n";
}

}  // namespace hcl
