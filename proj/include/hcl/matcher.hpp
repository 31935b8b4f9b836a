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
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "hcl/corpus.hpp"
#include "hcl/curriculum.hpp"
#include "hcl/param_store.hpp"
#include "hcl/rng.hpp"

namespace hcl {

// A trainable matching model s(c, r). The trainer only needs a score and the
// ability to add weight · ∂s/∂θ into the model's gradient buffers, so any
// architecture exposing these can be driven by the curriculum.
class MatchingModel {
 public:
  virtual ~MatchingModel() = default;
  virtual double score(std::span<const TokenId> context, std::span<const TokenId> response) const = 0;
  virtual void accumulate_score_grad(std::span<const TokenId> context,
                                     std::span<const TokenId> response, double weight) = 0;
  virtual ParamStore& params() = 0;
  virtual const ParamStore& params() const = 0;
};

// s(c, r) = pool(c)ᵀ W pool(r) + bias, pool = mean of token embeddings.
// Parameters: "embed" (V×d), "interaction" (d×d), "bias" (1×1).
class BilinearMatcher final : public MatchingModel {
 public:
  struct Init {
    double embed_std = 0.1;
    double interaction_std = 0.0;
    double interaction_diag = 1.0;
  };

  BilinearMatcher(std::size_t vocab_size, std::size_t embed_dim, Rng& rng, const Init& init);
  BilinearMatcher(std::size_t vocab_size, std::size_t embed_dim, Rng& rng)
      : BilinearMatcher(vocab_size, embed_dim, rng, Init{}) {}
  explicit BilinearMatcher(ParamStore params);

  std::size_t vocab_size() const { return params_.value("embed").rows(); }
  std::size_t embed_dim() const { return params_.value("embed").cols(); }

  double score(std::span<const TokenId> context, std::span<const TokenId> response) const override;
  void accumulate_score_grad(std::span<const TokenId> context, std::span<const TokenId> response,
                             double weight) override;
  ParamStore& params() override { return params_; }
  const ParamStore& params() const override { return params_; }

 private:
  ParamStore params_;
};

struct HingeResult {
  double loss = 0.0;
  std::size_t active = 0;  // negatives inside the margin
};

// Σ_j max{0, 1 − s(c, r⁺) + s(c, r⁻_j)}; the subgradient at the kink is 0.
// Accumulates weight · ∂L/∂θ into model.params().
HingeResult hinge_loss(MatchingModel& model, std::span<const TokenId> context,
                       std::span<const TokenId> positive,
                       std::span<const Utterance* const> negatives, double weight = 1.0);
// Loss from precomputed scores only.
double hinge_loss_value(double positive_score, std::span<const double> negative_scores);

enum class Ablation { kFull, kCorpusOnly, kInstanceOnly, kNone };

CurriculumFlags flags_for(Ablation a);
Ablation parse_ablation(std::string_view name);
std::string_view ablation_name(Ablation a);

struct TrainConfig {
  std::size_t total_steps = 2000;
  std::size_t batch_size = 32;
  std::size_t negatives = 5;
  std::size_t embed_dim = 64;
  double lr = 1e-3;
  std::uint64_t seed = 1;
  double pcc0 = 0.3;
  double k_final = 3.0;
  std::uint64_t warmup_steps = 0;  // 0 → total_steps / 2
  CurriculumFlags flags{};
  bool dedup_negatives = false;
  bool exact_enabled = true;
  BilinearMatcher::Init init{};

  void validate() const;
};

struct TraceRow {
  std::uint64_t step;
  double loss;
  double pcc;
  double pic;
  std::size_t space;
  std::size_t eligible_count;
};

struct MatcherTrainResult {
  BilinearMatcher model;
  std::vector<TraceRow> trace;
};

// total_steps iterations of next_batch → hinge loss (batch mean) → Adam.
MatcherTrainResult train_matcher(const Corpus& corpus, const OfflineIndex& index,
                                 const DifficultyTable& table, const TrainConfig& config);

// Drives an arbitrary model with the same loop.
std::vector<TraceRow> train_model(MatchingModel& model, const Corpus& corpus,
                                  const OfflineIndex& index, const DifficultyTable& table,
                                  const TrainConfig& config);

}  // namespace hcl
