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
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace hcl {

using TokenId = std::uint32_t;
using Utterance = std::vector<TokenId>;

// Token → id map with three reserved ids. Ordinary tokens are numbered from
// kFirstWordId by descending frequency, ties broken lexicographically.
class Vocabulary {
 public:
  static constexpr TokenId kPad = 0;
  static constexpr TokenId kOov = 1;
  static constexpr TokenId kSep = 2;
  static constexpr TokenId kFirstWordId = 3;

  Vocabulary();
  explicit Vocabulary(std::vector<std::string> words);

  std::size_t size() const { return tokens_.size(); }
  TokenId id(std::string_view token) const;
  const std::string& token(TokenId id) const { return tokens_.at(id); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  bool contains(std::string_view token) const;

  // Order-sensitive checksum over every token string.
  std::uint64_t checksum() const;

  Utterance encode(std::string_view text) const;

  bool operator==(const Vocabulary& o) const { return tokens_ == o.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> ids_;
};

struct TrainPair {
  std::uint32_t id = 0;
  std::vector<Utterance> context;
  Utterance response;

  bool operator==(const TrainPair&) const = default;
};

struct Candidate {
  Utterance response;
  int label = 0;

  bool operator==(const Candidate&) const = default;
};

struct TestInstance {
  std::vector<Utterance> context;
  std::vector<Candidate> candidates;

  bool operator==(const TestInstance&) const = default;
};

struct CorpusLimits {
  std::size_t max_context_tokens = 128;
  std::size_t max_response_tokens = 64;
};

// Lowercase (ASCII) and split on whitespace.
std::vector<std::string> tokenize(std::string_view text);

Vocabulary build_vocabulary(const std::filesystem::path& raw_train_file, std::size_t min_freq = 1);
Vocabulary build_vocabulary_from_counts(const std::unordered_map<std::string, std::size_t>& counts,
                                        std::size_t min_freq);

// Responses longer than max_response_tokens keep their first tokens.
std::vector<TrainPair> load_train(const std::filesystem::path& path, const Vocabulary& vocab,
                                  const CorpusLimits& limits = {});
std::vector<TestInstance> load_test(const std::filesystem::path& path, const Vocabulary& vocab,
                                    const CorpusLimits& limits = {});

// Joins utterances with kSep and keeps the most recent max_tokens tokens.
Utterance flatten_context(const std::vector<Utterance>& context, std::size_t max_tokens);

// Training set with contexts pre-flattened for the encoders.
class Corpus {
 public:
  Corpus(Vocabulary vocab, std::vector<TrainPair> pairs, CorpusLimits limits = {});

  const Vocabulary& vocab() const { return vocab_; }
  const CorpusLimits& limits() const { return limits_; }
  std::size_t size() const { return pairs_.size(); }
  const std::vector<TrainPair>& pairs() const { return pairs_; }
  const TrainPair& pair(std::size_t i) const { return pairs_.at(i); }
  const Utterance& flat_context(std::size_t i) const { return flat_contexts_[i]; }
  const Utterance& response(std::size_t i) const { return pairs_[i].response; }

  // Pair ids whose response tokens are identical share a group id (the
  // smallest such pair id).
  std::vector<std::uint32_t> response_groups() const;

 private:
  Vocabulary vocab_;
  CorpusLimits limits_;
  std::vector<TrainPair> pairs_;
  std::vector<Utterance> flat_contexts_;
};

Corpus load_corpus(const std::filesystem::path& train_file, std::size_t min_freq = 1,
                   const CorpusLimits& limits = {});

}  // namespace hcl
