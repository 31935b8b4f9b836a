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

#include "hcl/ranker.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hcl/embedding.hpp"
#include "hcl/error.hpp"

namespace hcl {

double RelevanceEncoder::relevance(std::span<const TokenId> context,
                                   std::span<const TokenId> response) const {
  return dot(encode_context(context), encode_response(response));
}

void RankerConfig::validate() const {
  if (batch_size < 2) throw Error("ranker: batch size must be >= 2 for in-batch negatives");
  if (embed_dim == 0 || out_dim == 0) throw Error("ranker: dimensions must be positive");
  if (!(lr > 0.0)) throw Error("ranker: learning rate must be positive");
}

namespace {

Matrix gaussian(std::size_t rows, std::size_t cols, double stddev, Rng& rng) {
  Matrix m(rows, cols);
  for (double& v : m.data()) v = rng.normal(0.0, stddev);
  return m;
}

}  // namespace

DualEncoder::DualEncoder(std::size_t vocab_size, std::size_t embed_dim, std::size_t out_dim,
                         Rng& rng, double embed_init_std) {
  if (vocab_size == 0 || embed_dim == 0 || out_dim == 0) {
    throw ShapeError("DualEncoder: dimensions must be positive");
  }
  const double proj_std = 1.0 / std::sqrt(static_cast<double>(embed_dim));
  params_.add("embed", gaussian(vocab_size, embed_dim, embed_init_std, rng));
  params_.add("ctx_proj", gaussian(embed_dim, out_dim, proj_std, rng));
  params_.add("resp_proj", gaussian(embed_dim, out_dim, proj_std, rng));
}

DualEncoder::DualEncoder(ParamStore params) : params_(std::move(params)) { validate_shapes(); }

void DualEncoder::validate_shapes() const {
  for (const char* name : {"embed", "ctx_proj", "resp_proj"}) {
    if (!params_.contains(name)) throw ShapeError(std::string("DualEncoder: missing tensor ") + name);
  }
  const auto& e = params_.value("embed");
  const auto& c = params_.value("ctx_proj");
  const auto& r = params_.value("resp_proj");
  if (c.rows() != e.cols() || r.rows() != e.cols() || c.cols() != r.cols() || c.cols() == 0) {
    throw ShapeError("DualEncoder: inconsistent tensor shapes");
  }
}

std::vector<double> DualEncoder::encode_context(std::span<const TokenId> tokens) const {
  if (tokens.empty()) throw Error("encode_context: empty token list");
  return vec_mat(mean_pool(params_.value("embed"), tokens), params_.value("ctx_proj"));
}

std::vector<double> DualEncoder::encode_response(std::span<const TokenId> tokens) const {
  if (tokens.empty()) throw Error("encode_response: empty token list");
  return vec_mat(mean_pool(params_.value("embed"), tokens), params_.value("resp_proj"));
}

double diagonal_softmax_nll(const Matrix& scores, Matrix* grad) {
  const std::size_t b = scores.rows();
  if (b == 0 || scores.cols() != b) throw ShapeError("diagonal_softmax_nll: score matrix must be square");
  if (grad) *grad = Matrix(b, b);
  double loss = 0.0;
  for (std::size_t i = 0; i < b; ++i) {
    const auto row = scores.row(i);
    const double mx = *std::max_element(row.begin(), row.end());
    double z = 0.0;
    for (double s : row) z += std::exp(s - mx);
    const double lse = mx + std::log(z);
    loss += lse - row[i];
    if (grad) {
      for (std::size_t j = 0; j < b; ++j) {
        (*grad)(i, j) = std::exp(row[j] - lse) / static_cast<double>(b);
      }
      (*grad)(i, i) -= 1.0 / static_cast<double>(b);
    }
  }
  return loss / static_cast<double>(b);
}

double in_batch_loss(DualEncoder& model, std::span<const Utterance* const> contexts,
                     std::span<const Utterance* const> responses) {
  const std::size_t b = contexts.size();
  if (b < 2) throw Error("in_batch_loss: batch size must be >= 2");
  if (responses.size() != b) throw ShapeError("in_batch_loss: contexts/responses length mismatch");

  auto& store = model.params();
  const Matrix& embed = store.value("embed");
  const Matrix& wc = store.value("ctx_proj");
  const Matrix& wr = store.value("resp_proj");
  const std::size_t d = embed.cols();

  Matrix pc(b, d);
  Matrix pr(b, d);
  for (std::size_t i = 0; i < b; ++i) {
    const auto c = mean_pool(embed, *contexts[i]);
    const auto r = mean_pool(embed, *responses[i]);
    std::copy(c.begin(), c.end(), pc.row(i).begin());
    std::copy(r.begin(), r.end(), pr.row(i).begin());
  }
  const Matrix ec = matmul(pc, wc);
  const Matrix er = matmul(pr, wr);
  const Matrix scores = matmul_nt(ec, er);
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t j = 0; j < b; ++j) {
      if (!std::isfinite(scores(i, j))) {
        throw NonFiniteError("in_batch_loss: non-finite score for batch pair (" + std::to_string(i) +
                             ", " + std::to_string(j) + ")");
      }
    }
  }

  Matrix dscores;
  const double loss = diagonal_softmax_nll(scores, &dscores);
  if (!std::isfinite(loss)) throw NonFiniteError("in_batch_loss: non-finite loss");

  const Matrix dec = matmul(dscores, er);     // b×n
  const Matrix der = matmul_tn(dscores, ec);  // b×n

  const Matrix dwc = matmul_tn(pc, dec);
  const Matrix dwr = matmul_tn(pr, der);
  axpy(1.0, dwc.data(), store.grad("ctx_proj").data());
  axpy(1.0, dwr.data(), store.grad("resp_proj").data());

  const Matrix dpc = matmul_nt(dec, wc);  // b×d
  const Matrix dpr = matmul_nt(der, wr);
  Matrix& dembed = store.grad("embed");
  for (std::size_t i = 0; i < b; ++i) {
    mean_pool_backward(dembed, *contexts[i], dpc.row(i));
    mean_pool_backward(dembed, *responses[i], dpr.row(i));
  }
  return loss;
}

double in_batch_loss(DualEncoder& model, const Corpus& corpus, std::span<const std::uint32_t> ids) {
  std::vector<const Utterance*> ctx;
  std::vector<const Utterance*> resp;
  ctx.reserve(ids.size());
  resp.reserve(ids.size());
  for (std::uint32_t id : ids) {
    ctx.push_back(&corpus.flat_context(id));
    resp.push_back(&corpus.response(id));
  }
  return in_batch_loss(model, ctx, resp);
}

RankerTrainResult train_ranker(const Corpus& corpus, const RankerConfig& config,
                               const std::function<void(std::size_t, double)>& on_step) {
  config.validate();
  if (corpus.size() < config.batch_size) {
    throw Error("train_ranker: corpus has " + std::to_string(corpus.size()) +
                " pairs, fewer than batch size " + std::to_string(config.batch_size));
  }
  Rng init_rng(config.seed, /*stream=*/0x72616e6b);  // "rank"
  RankerTrainResult result{DualEncoder(corpus.vocab().size(), config.embed_dim, config.out_dim,
                                       init_rng, config.embed_init_std),
                           {}};
  result.loss_trace.reserve(config.steps);
  const AdamConfig adam{.lr = config.lr};
  Rng batch_rng = init_rng.split(1);
  std::vector<std::uint32_t> ids(config.batch_size);
  for (std::size_t step = 0; step < config.steps; ++step) {
    const auto picks = batch_rng.sample_distinct(corpus.size(), config.batch_size);
    for (std::size_t k = 0; k < picks.size(); ++k) ids[k] = static_cast<std::uint32_t>(picks[k]);
    result.model.params().zero_grad();
    const double loss = in_batch_loss(result.model, corpus, ids);
    result.model.params().adam_step(adam);
    result.loss_trace.push_back(loss);
    if (on_step) on_step(step, loss);
  }
  return result;
}

}  // namespace hcl
