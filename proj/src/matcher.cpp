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

#include "hcl/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hcl/embedding.hpp"
#include "hcl/error.hpp"

namespace hcl {

BilinearMatcher::BilinearMatcher(std::size_t vocab_size, std::size_t embed_dim, Rng& rng,
                                 const Init& init) {
  if (vocab_size == 0 || embed_dim == 0) throw ShapeError("BilinearMatcher: dimensions must be positive");
  Matrix embed(vocab_size, embed_dim);
  for (double& v : embed.data()) v = rng.normal(0.0, init.embed_std);
  Matrix w(embed_dim, embed_dim);
  for (std::size_t a = 0; a < embed_dim; ++a) {
    for (std::size_t b = 0; b < embed_dim; ++b) {
      w(a, b) = (a == b ? init.interaction_diag : 0.0) +
                (init.interaction_std > 0.0 ? rng.normal(0.0, init.interaction_std) : 0.0);
    }
  }
  params_.add("embed", std::move(embed));
  params_.add("interaction", std::move(w));
  params_.add("bias", Matrix(1, 1));
}

BilinearMatcher::BilinearMatcher(ParamStore params) : params_(std::move(params)) {
  for (const char* name : {"embed", "interaction", "bias"}) {
    if (!params_.contains(name)) throw ShapeError(std::string("BilinearMatcher: missing tensor ") + name);
  }
  const auto& e = params_.value("embed");
  const auto& w = params_.value("interaction");
  const auto& b = params_.value("bias");
  if (w.rows() != e.cols() || w.cols() != e.cols() || b.rows() != 1 || b.cols() != 1) {
    throw ShapeError("BilinearMatcher: inconsistent tensor shapes");
  }
}

double BilinearMatcher::score(std::span<const TokenId> context,
                              std::span<const TokenId> response) const {
  const Matrix& embed = params_.value("embed");
  const auto pc = mean_pool(embed, context);
  const auto pr = mean_pool(embed, response);
  return dot(vec_mat(pc, params_.value("interaction")), pr) + params_.value("bias")(0, 0);
}

void BilinearMatcher::accumulate_score_grad(std::span<const TokenId> context,
                                            std::span<const TokenId> response, double weight) {
  const Matrix& embed = params_.value("embed");
  const Matrix& w = params_.value("interaction");
  const auto pc = mean_pool(embed, context);
  const auto pr = mean_pool(embed, response);
  const std::size_t d = pc.size();

  Matrix& dw = params_.grad("interaction");
  for (std::size_t a = 0; a < d; ++a) {
    if (pc[a] != 0.0) axpy(weight * pc[a], pr, dw.row(a));
  }
  params_.grad("bias")(0, 0) += weight;

  // ∂s/∂pc = W pr, ∂s/∂pr = Wᵀ pc
  std::vector<double> dpc(d, 0.0);
  for (std::size_t a = 0; a < d; ++a) dpc[a] = weight * dot(w.row(a), pr);
  std::vector<double> dpr = vec_mat(pc, w);
  for (double& v : dpr) v *= weight;

  Matrix& dembed = params_.grad("embed");
  mean_pool_backward(dembed, context, dpc);
  mean_pool_backward(dembed, response, dpr);
}

double hinge_loss_value(double positive_score, std::span<const double> negative_scores) {
  double loss = 0.0;
  for (double s : negative_scores) loss += std::max(0.0, 1.0 - positive_score + s);
  return loss;
}

HingeResult hinge_loss(MatchingModel& model, std::span<const TokenId> context,
                       std::span<const TokenId> positive,
                       std::span<const Utterance* const> negatives, double weight) {
  if (negatives.empty()) throw Error("hinge_loss: need at least one negative");
  HingeResult res;
  const double sp = model.score(context, positive);
  for (const Utterance* neg : negatives) {
    const double term = 1.0 - sp + model.score(context, *neg);
    if (!std::isfinite(term)) throw NonFiniteError("hinge_loss: non-finite score");
    if (term > 0.0) {
      res.loss += term;
      ++res.active;
      model.accumulate_score_grad(context, *neg, weight);
    }
  }
  if (res.active > 0) {
    model.accumulate_score_grad(context, positive, -weight * static_cast<double>(res.active));
  }
  return res;
}

CurriculumFlags flags_for(Ablation a) {
  switch (a) {
    case Ablation::kFull: return {true, true};
    case Ablation::kCorpusOnly: return {true, false};
    case Ablation::kInstanceOnly: return {false, true};
    case Ablation::kNone: return {false, false};
  }
  return {};
}

Ablation parse_ablation(std::string_view name) {
  if (name == "full") return Ablation::kFull;
  if (name == "cc") return Ablation::kCorpusOnly;
  if (name == "ic") return Ablation::kInstanceOnly;
  if (name == "none") return Ablation::kNone;
  throw Error("unknown ablation '" + std::string(name) + "' (expected full|cc|ic|none)");
}

std::string_view ablation_name(Ablation a) {
  switch (a) {
    case Ablation::kFull: return "full";
    case Ablation::kCorpusOnly: return "cc";
    case Ablation::kInstanceOnly: return "ic";
    case Ablation::kNone: return "none";
  }
  return "?";
}

void TrainConfig::validate() const {
  if (negatives < 1) throw Error("train: m must be >= 1");
  if (batch_size < 1) throw Error("train: batch size must be >= 1");
  if (!(lr > 0.0)) throw Error("train: learning rate must be positive");
  if (embed_dim == 0) throw Error("train: embedding dimension must be positive");
}

namespace {
constexpr std::uint64_t kMatcherInitStream = 0x6d617463;  // "matc"
constexpr std::uint64_t kBatchStream = 0x62617463;        // "batc"
}  // namespace

std::vector<TraceRow> train_model(MatchingModel& model, const Corpus& corpus,
                                  const OfflineIndex& index, const DifficultyTable& table,
                                  const TrainConfig& config) {
  config.validate();
  if (index.size() != corpus.size() || table.size() != corpus.size()) {
    throw Error("train: corpus, index, and difficulty table sizes differ");
  }
  std::vector<TraceRow> trace;
  if (config.total_steps == 0) return trace;

  const auto schedule = CurriculumSchedule::make(corpus.size(), config.pcc0, config.k_final,
                                                 config.total_steps, config.warmup_steps);
  const auto groups = config.dedup_negatives ? corpus.response_groups() : std::vector<std::uint32_t>{};
  BatchRequest request;
  request.batch_size = config.batch_size;
  request.negatives = config.negatives;
  request.flags = config.flags;
  request.sample.exact_enabled = config.exact_enabled;
  request.sample.response_groups = groups;

  const AdamConfig adam{.lr = config.lr};
  const Rng batch_root(config.seed, kBatchStream);
  std::vector<const Utterance*> negs;
  trace.reserve(config.total_steps);
  for (std::uint64_t t = 0; t < config.total_steps; ++t) {
    Rng rng = batch_root.split(t);
    const auto spec = next_batch(schedule, t, table, index, request, rng);
    model.params().zero_grad();
    const double weight = 1.0 / static_cast<double>(spec.pair_ids.size());
    double loss = 0.0;
    for (std::size_t k = 0; k < spec.pair_ids.size(); ++k) {
      const std::uint32_t i = spec.pair_ids[k];
      negs.clear();
      for (std::uint32_t j : spec.negatives[k]) negs.push_back(&corpus.response(j));
      loss += hinge_loss(model, corpus.flat_context(i), corpus.response(i), negs, weight).loss;
    }
    model.params().adam_step(adam);
    trace.push_back({t, loss * weight, spec.pcc, spec.pic, spec.space, spec.eligible_count});
  }
  return trace;
}

MatcherTrainResult train_matcher(const Corpus& corpus, const OfflineIndex& index,
                                 const DifficultyTable& table, const TrainConfig& config) {
  config.validate();
  Rng init_rng(config.seed, kMatcherInitStream);
  MatcherTrainResult result{BilinearMatcher(corpus.vocab().size(), config.embed_dim, init_rng, config.init),
                            {}};
  result.trace = train_model(result.model, corpus, index, table, config);
  return result;
}

}  // namespace hcl
