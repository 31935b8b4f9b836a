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

#include "hcl/index.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "hcl/binary_io.hpp"
#include "hcl/difficulty.hpp"
#include "hcl/error.hpp"

namespace hcl {

namespace {

// Rank order: higher score first, then lower id.
struct RankBefore {
  std::span<const double> row;
  bool operator()(std::uint32_t a, std::uint32_t b) const {
    return row[a] != row[b] ? row[a] > row[b] : a < b;
  }
};

std::size_t resolve_threads(std::size_t requested, std::size_t rows) {
  std::size_t t = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  return std::max<std::size_t>(1, std::min(t, rows / 64 + 1));
}

// Runs fn(begin, end) over disjoint row ranges.
template <typename Fn>
void parallel_rows(std::size_t rows, std::size_t threads, Fn&& fn) {
  threads = resolve_threads(threads, rows);
  if (threads == 1) {
    fn(std::size_t{0}, rows);
    return;
  }
  std::vector<std::thread> workers;
  const std::size_t chunk = (rows + threads - 1) / threads;
  for (std::size_t t = 0; t < threads; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(rows, begin + chunk);
    if (begin >= end) break;
    workers.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (auto& w : workers) w.join();
}

}  // namespace

std::size_t default_topk(double k_final, std::size_t corpus_size) {
  if (corpus_size < 2) return 0;
  const double want = std::ceil(std::pow(10.0, k_final + 1.0));
  const auto cap = static_cast<double>(corpus_size - 1);
  return static_cast<std::size_t>(std::min(want, cap));
}

OfflineIndex::OfflineIndex(Matrix contexts, Matrix responses, std::size_t topk,
                           std::uint64_t ranker_checksum, std::uint64_t seed, std::size_t threads)
    : contexts_(std::move(contexts)),
      responses_(std::move(responses)),
      topk_(topk),
      ranker_checksum_(ranker_checksum),
      seed_(seed) {
  if (contexts_.rows() != responses_.rows() || contexts_.cols() != responses_.cols()) {
    throw ShapeError("index: context and response matrices differ in shape");
  }
  if (contexts_.rows() < 2) throw Error("index: need at least 2 pairs");
  if (contexts_.cols() == 0) throw ShapeError("index: zero embedding dimension");
  if (!contexts_.all_finite() || !responses_.all_finite()) {
    throw NonFiniteError("index: non-finite embedding");
  }
  if (topk_ > size() - 1) {
    throw Error("index: top-K " + std::to_string(topk_) + " exceeds |D|-1 = " +
                std::to_string(size() - 1));
  }
  std::vector<double> raw(size());
  for (std::size_t i = 0; i < size(); ++i) raw[i] = score(i, i);
  dcc_ = corpus_difficulty_from_scores(raw).dcc;
  compute_topk(threads);
}

OfflineIndex OfflineIndex::build(const Corpus& corpus, const RelevanceEncoder& encoder,
                                 const IndexBuildOptions& options) {
  if (options.ranker_vocab_checksum != 0 &&
      options.ranker_vocab_checksum != corpus.vocab().checksum()) {
    throw ChecksumError("build_index: ranker vocabulary checksum " +
                        hex64(options.ranker_vocab_checksum) + " does not match corpus vocabulary " +
                        hex64(corpus.vocab().checksum()));
  }
  const std::size_t n = encoder.output_dim();
  Matrix c(corpus.size(), n);
  Matrix r(corpus.size(), n);
  parallel_rows(corpus.size(), options.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto ec = encoder.encode_context(corpus.flat_context(i));
      const auto er = encoder.encode_response(corpus.response(i));
      std::copy(ec.begin(), ec.end(), c.row(i).begin());
      std::copy(er.begin(), er.end(), r.row(i).begin());
    }
  });
  return OfflineIndex(std::move(c), std::move(r), options.topk, options.ranker_checksum,
                      options.seed, options.threads);
}

void OfflineIndex::compute_topk(std::size_t threads) {
  topk_ids_.assign(size() * topk_, 0);
  if (topk_ == 0) return;
  parallel_rows(size(), threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> row(size());
    std::vector<std::uint32_t> ids;
    for (std::size_t i = begin; i < end; ++i) {
      score_row(i, row);
      ids.resize(size());
      std::iota(ids.begin(), ids.end(), 0u);
      ids.erase(ids.begin() + static_cast<std::ptrdiff_t>(i));
      const auto kth = ids.begin() + static_cast<std::ptrdiff_t>(topk_);
      std::partial_sort(ids.begin(), kth, ids.end(), RankBefore{row});
      std::copy(ids.begin(), kth, topk_ids_.begin() + static_cast<std::ptrdiff_t>(i * topk_));
    }
  });
}

void OfflineIndex::check_id(std::size_t id, const char* what) const {
  if (id >= size()) {
    throw Error(std::string("index: ") + what + " id " + std::to_string(id) +
                " out of range [0, " + std::to_string(size()) + ")");
  }
}

std::span<const std::uint32_t> OfflineIndex::topk_list(std::size_t i) const {
  check_id(i, "context");
  return std::span(topk_ids_).subspan(i * topk_, topk_);
}

double OfflineIndex::score(std::size_t i, std::size_t j) const {
  check_id(i, "context");
  check_id(j, "response");
  return dot(contexts_.row(i), responses_.row(j));
}

void OfflineIndex::score_row(std::size_t i, std::span<double> out) const {
  check_id(i, "context");
  if (out.size() != size()) throw ShapeError("score_row: output length must equal |D|");
  const auto ci = contexts_.row(i);
  for (std::size_t j = 0; j < size(); ++j) out[j] = dot(ci, responses_.row(j));
}

std::size_t OfflineIndex::rank_of(std::size_t i, std::size_t j) const {
  check_id(i, "context");
  check_id(j, "response");
  if (i == j) throw Error("rank_of: response id equals context id " + std::to_string(i));
  const auto ci = contexts_.row(i);
  const double sj = dot(ci, responses_.row(j));
  std::size_t rank = 1;
  for (std::size_t h = 0; h < size(); ++h) {
    if (h == i || h == j) continue;
    const double sh = dot(ci, responses_.row(h));
    if (sh > sj || (sh == sj && h < j)) ++rank;
  }
  return rank;
}

std::vector<std::uint32_t> OfflineIndex::top_n(std::size_t i, std::size_t n,
                                               bool exact_enabled) const {
  check_id(i, "context");
  if (n > size() - 1) {
    throw Error("top_n: n=" + std::to_string(n) + " exceeds |D|-1 = " + std::to_string(size() - 1));
  }
  if (n <= topk_) {
    const auto list = topk_list(i);
    return {list.begin(), list.begin() + static_cast<std::ptrdiff_t>(n)};
  }
  if (!exact_enabled) {
    throw Error("top_n: n=" + std::to_string(n) + " exceeds precomputed top-K=" +
                std::to_string(topk_) + " and exact scoring is disabled");
  }
  std::vector<double> row(size());
  score_row(i, row);
  std::vector<std::uint32_t> ids(size());
  std::iota(ids.begin(), ids.end(), 0u);
  ids.erase(ids.begin() + static_cast<std::ptrdiff_t>(i));
  const auto nth = ids.begin() + static_cast<std::ptrdiff_t>(n);
  if (nth != ids.end()) std::nth_element(ids.begin(), nth, ids.end(), RankBefore{row});
  ids.resize(n);
  std::sort(ids.begin(), ids.end(), RankBefore{row});
  return ids;
}

std::vector<std::uint32_t> OfflineIndex::sample_top_n(std::size_t i, std::size_t n, std::size_t m,
                                                      Rng& rng,
                                                      const SampleOptions& options) const {
  check_id(i, "context");
  if (m > n) throw Error("sample_top_n: m=" + std::to_string(m) + " exceeds n=" + std::to_string(n));
  if (n > size() - 1) {
    throw Error("sample_top_n: n=" + std::to_string(n) + " exceeds |D|-1 = " +
                std::to_string(size() - 1));
  }
  const bool dedup = !options.response_groups.empty();
  if (dedup && options.response_groups.size() != size()) {
    throw ShapeError("sample_top_n: response group table size mismatch");
  }

  std::vector<std::uint32_t> out;
  out.reserve(m);
  if (n == size() - 1 && !dedup) {
    // Whole corpus minus self: no ranking needed.
    for (std::uint64_t x : rng.sample_distinct(size() - 1, m)) {
      out.push_back(static_cast<std::uint32_t>(x >= i ? x + 1 : x));
    }
    return out;
  }

  std::vector<std::uint32_t> pool;
  if (n == size() - 1) {
    pool.resize(size());
    std::iota(pool.begin(), pool.end(), 0u);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(i));
  } else {
    pool = top_n(i, n, options.exact_enabled);
  }
  if (dedup) {
    const std::uint32_t own = options.response_groups[i];
    std::erase_if(pool, [&](std::uint32_t j) { return options.response_groups[j] == own; });
    if (pool.size() < m) {
      throw Error("sample_top_n: only " + std::to_string(pool.size()) +
                  " non-duplicate responses in the top-" + std::to_string(n) + " of context " +
                  std::to_string(i) + ", need " + std::to_string(m));
    }
  }
  for (std::uint64_t pos : rng.sample_distinct(pool.size(), m)) out.push_back(pool[pos]);
  return out;
}

std::vector<std::uint8_t> OfflineIndex::encode() const {
  ByteWriter w;
  w.put_bytes(std::string_view(kIndexMagic, 4));
  w.put_u32(kIndexVersion);
  w.put_u64(size());
  w.put_u32(static_cast<std::uint32_t>(dim()));
  w.put_u32(static_cast<std::uint32_t>(topk_));
  w.put_u64(ranker_checksum_);
  w.put_f64s(contexts_.data());
  w.put_f64s(responses_.data());
  w.put_f64s(dcc_);
  w.put_u32s(topk_ids_);
  w.put_u64(seed_);
  const std::uint64_t sum = fnv1a64(w.bytes());
  w.put_u64(sum);
  return w.bytes();
}

OfflineIndex OfflineIndex::decode(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8) throw FormatError("index: file too short");
  const auto body = bytes.first(bytes.size() - 8);
  ByteReader tail(bytes.last(8), "index");
  const std::uint64_t stored = tail.get_u64();
  ByteReader r(body, "index");
  if (r.get_bytes(4) != std::string_view(kIndexMagic, 4)) {
    throw FormatError("index: bad magic (expected HCLI)");
  }
  const std::uint32_t version = r.get_u32();
  if (version != kIndexVersion) throw FormatError("index: unsupported version " + std::to_string(version));
  if (fnv1a64(body) != stored) {
    throw ChecksumError("index: content checksum mismatch (file corrupted)");
  }
  OfflineIndex idx;
  const std::uint64_t size = r.get_u64();
  const std::uint32_t dim = r.get_u32();
  const std::uint32_t topk = r.get_u32();
  idx.ranker_checksum_ = r.get_u64();
  const std::uint64_t expected =
      8 * (2 * size * dim + size) + 4 * size * static_cast<std::uint64_t>(topk) + 8;
  if (r.remaining() != expected) throw FormatError("index: payload size does not match header");
  idx.contexts_ = Matrix(size, dim);
  idx.responses_ = Matrix(size, dim);
  r.get_f64s(idx.contexts_.data());
  r.get_f64s(idx.responses_.data());
  idx.dcc_.resize(size);
  r.get_f64s(idx.dcc_);
  idx.topk_ = topk;
  idx.topk_ids_.resize(size * topk);
  r.get_u32s(idx.topk_ids_);
  idx.seed_ = r.get_u64();
  return idx;
}

void OfflineIndex::save(const std::filesystem::path& path) const { write_file_bytes(path, encode()); }

OfflineIndex OfflineIndex::load(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return decode(bytes);
  } catch (const ChecksumError& e) {
    throw ChecksumError(path.string() + ": " + e.what());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace hcl
