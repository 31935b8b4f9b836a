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
#include <vector>

namespace hcl {

// Topic-clustered dialogue corpus generator.
//
// Every topic owns a disjoint word set: a marker word, entity words with a
// paraphrase ("synonym") each, cue words with a fixed answer word each, and
// topic filler. Contexts mix topic words with shared general filler;
// responses use topic words only. A response always carries its topic marker
// and the answer to the context's cue, and refers to the context's entity
// either literally (easy pair) or via its paraphrase (hard pair). A fraction
// of pairs are mislabeled: the response is drawn from a different topic.
// Same-topic responses are therefore hard negatives and cross-topic
// responses share no token with the context at all.
struct SyntheticSpec {
  std::size_t num_pairs = 5000;
  std::size_t num_topics = 8;
  std::uint64_t seed = 7;
  std::size_t num_test = 0;  // 0 → num_pairs / 10
  std::size_t candidates = 10;
  std::size_t same_topic_negatives = 6;  // per test instance, rest cross-topic
  double hard_fraction = 0.35;
  double noise_fraction = 0.15;
  std::size_t entities_per_topic = 30;
  std::size_t cues_per_topic = 12;
  std::size_t topic_filler = 20;
  std::size_t general_filler = 60;
};

struct SyntheticRecord {
  std::size_t topic = 0;
  std::vector<std::string> context;
  std::string response;
  enum class Kind { kEasy, kHard, kNoise } kind = Kind::kEasy;
};

struct SyntheticTestRecord {
  std::size_t topic = 0;
  std::vector<std::string> context;
  std::vector<std::string> candidates;
  std::vector<int> labels;
  std::vector<std::size_t> candidate_topics;
};

struct SyntheticCorpus {
  std::vector<SyntheticRecord> train;
  std::vector<SyntheticTestRecord> test;
};

SyntheticCorpus generate_synthetic(const SyntheticSpec& spec);

// Writes train.jsonl and test.jsonl into out_dir; returns their paths.
std::pair<std::filesystem::path, std::filesystem::path> write_synthetic(
    const SyntheticCorpus& corpus, const std::filesystem::path& out_dir);

std::string topic_marker(std::size_t topic);

}  // namespace hcl
