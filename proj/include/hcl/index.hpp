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
#include <filesystem>
#include <span>
#include <vector>

#include "hcl/corpus.hpp"
#include "hcl/matrix.hpp"
#include "hcl/ranker.hpp"
#include "hcl/rng.hpp"

namespace hcl {

// Index file ("HCLI", version 1), little-endian:
//   magic[4] version:u32 size:u64 dim:u32 topk:u32 ranker_checksum:u64
//   contexts:f64[size*dim] responses:f64[size*dim] d_cc:f64[size]
//   topk_ids:u32[size*topk]
//   seed:u64 content_checksum:u64   (FNV-1a over every preceding byte)
inline constexpr char kIndexMagic[4] = {'H', 'C', 'L', 'I'};
inline constexpr std::uint32_t kIndexVersion = 1;

struct SampleOptions {
  // When false, only the precomputed top-K lists may be used and a request
  // with n > K is an error instead of a full row scan.
  bool exact_enabled = true;
  // Optional response duplicate groups (Corpus::response_groups). Responses
  // in the same group as the positive are never returned.
  std::span<const std::uint32_t> response_groups = {};
};

struct IndexBuildOptions {
  std::size_t topk = 0;
  std::uint64_t ranker_checksum = 0;
  std::uint64_t seed = 0;
  std::size_t threads = 0;  // 0 = hardware concurrency
  // Vocabulary checksum recorded with the ranker; 0 skips the check.
  std::uint64_t ranker_vocab_checksum = 0;
};

// Frozen context/response embeddings of every training pair. Row i of both
// matrices belongs to pair i; score(i, j) = <C_i, R_j>. Immutable after
// construction and safe for concurrent readers.
class OfflineIndex {
 public:
  OfflineIndex(Matrix contexts, Matrix responses, std::size_t topk, std::uint64_t ranker_checksum,
               std::uint64_t seed, std::size_t threads = 0);

  static OfflineIndex build(const Corpus& corpus, const RelevanceEncoder& encoder,
                            const IndexBuildOptions& options);

  std::size_t size() const { return contexts_.rows(); }
  std::size_t dim() const { return contexts_.cols(); }
  std::size_t topk() const { return topk_; }
  std::uint64_t ranker_checksum() const { return ranker_checksum_; }
  std::uint64_t seed() const { return seed_; }

  const Matrix& contexts() const { return contexts_; }
  const Matrix& responses() const { return responses_; }
  std::span<const double> corpus_difficulty() const { return dcc_; }
  // Precomputed neighbours of context i (length topk()).
  std::span<const std::uint32_t> topk_list(std::size_t i) const;

  double score(std::size_t i, std::size_t j) const;
  void score_row(std::size_t i, std::span<double> out) const;

  // 1-based rank of response j among responses h ≠ i in descending score
  // order, equal scores ordered by ascending id.
  std::size_t rank_of(std::size_t i, std::size_t j) const;

  // The n highest-ranked responses for context i in rank order.
  std::vector<std::uint32_t> top_n(std::size_t i, std::size_t n, bool exact_enabled = true) const;

  // m distinct ids drawn uniformly from the top-n set of context i.
  std::vector<std::uint32_t> sample_top_n(std::size_t i, std::size_t n, std::size_t m, Rng& rng,
                                          const SampleOptions& options = {}) const;

  std::vector<std::uint8_t> encode() const;
  static OfflineIndex decode(std::span<const std::uint8_t> bytes);
  void save(const std::filesystem::path& path) const;
  static OfflineIndex load(const std::filesystem::path& path);

 private:
  OfflineIndex() = default;
  void check_id(std::size_t id, const char* what) const;
  void compute_topk(std::size_t threads);

  Matrix contexts_;
  Matrix responses_;
  std::vector<double> dcc_;
  std::vector<std::uint32_t> topk_ids_;
  std::size_t topk_ = 0;
  std::uint64_t ranker_checksum_ = 0;
  std::uint64_t seed_ = 0;
};

// ceil(10^(k_final + 1)) capped at |D| − 1.
std::size_t default_topk(double k_final, std::size_t corpus_size);

}  // namespace hcl
