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
#include <span>
#include <vector>

#include "hcl/corpus.hpp"
#include "hcl/matrix.hpp"
#include "hcl/param_store.hpp"
#include "hcl/rng.hpp"

namespace hcl {

// Anything that maps contexts and responses into a shared space where the dot
// product is the relevance score.
class RelevanceEncoder {
 public:
  virtual ~RelevanceEncoder() = default;
  virtual std::size_t output_dim() const = 0;
  virtual std::vector<double> encode_context(std::span<const TokenId> tokens) const = 0;
  virtual std::vector<double> encode_response(std::span<const TokenId> tokens) const = 0;

  double relevance(std::span<const TokenId> context, std::span<const TokenId> response) const;
};

struct RankerConfig {
  std::size_t embed_dim = 64;
  std::size_t out_dim = 64;
  std::size_t batch_size = 32;
  std::size_t steps = 2000;
  double lr = 1e-3;
  std::uint64_t seed = 1;
  double embed_init_std = 0.1;

  void validate() const;
};

// Mean-pooled token embeddings followed by a per-side linear projection.
// Parameters: "embed" (V×d, shared), "ctx_proj" (d×n), "resp_proj" (d×n).
class DualEncoder final : public RelevanceEncoder {
 public:
  DualEncoder(std::size_t vocab_size, std::size_t embed_dim, std::size_t out_dim, Rng& rng,
              double embed_init_std = 0.1);
  // Adopts an existing store; throws ShapeError on missing or inconsistent tensors.
  explicit DualEncoder(ParamStore params);

  std::size_t vocab_size() const { return params_.value("embed").rows(); }
  std::size_t embed_dim() const { return params_.value("embed").cols(); }
  std::size_t output_dim() const override { return params_.value("ctx_proj").cols(); }

  std::vector<double> encode_context(std::span<const TokenId> tokens) const override;
  std::vector<double> encode_response(std::span<const TokenId> tokens) const override;

  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }

 private:
  void validate_shapes() const;
  ParamStore params_;
};

// −(1/b) Σ_i log softmax(S_i)_i. When grad is non-null it receives dL/dS.
double diagonal_softmax_nll(const Matrix& scores, Matrix* grad);

// In-batch negative loss over b (context, response) rows; accumulates the
// gradient into model.params(). Requires b ≥ 2.
double in_batch_loss(DualEncoder& model, std::span<const Utterance* const> contexts,
                     std::span<const Utterance* const> responses);
double in_batch_loss(DualEncoder& model, const Corpus& corpus, std::span<const std::uint32_t> ids);

struct RankerTrainResult {
  DualEncoder model;
  std::vector<double> loss_trace;
};

// Adam on uniformly drawn batches (distinct pair ids within a batch).
// on_step, when set, is called with (step, loss) after each update.
RankerTrainResult train_ranker(const Corpus& corpus, const RankerConfig& config,
                               const std::function<void(std::size_t, double)>& on_step = {});

}  // namespace hcl
