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

#include <atomic>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "hcl/corpus.hpp"
#include "hcl/rng.hpp"

namespace hcl::testing {

// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("hcl_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

// Random corpus over a small vocabulary with ids in [kFirstWordId, V).
inline Corpus random_corpus(std::size_t size, std::size_t words, std::uint64_t seed) {
  std::vector<std::string> tokens;
  for (std::size_t w = 0; w < words; ++w) tokens.push_back("w" + std::to_string(w));
  Vocabulary vocab(tokens);
  Rng rng(seed, 99);
  std::vector<TrainPair> pairs;
  for (std::size_t i = 0; i < size; ++i) {
    TrainPair p;
    p.id = static_cast<std::uint32_t>(i);
    const std::size_t turns = 1 + rng.uniform_index(3);
    for (std::size_t u = 0; u < turns; ++u) {
      Utterance utt;
      const std::size_t len = 1 + rng.uniform_index(5);
      for (std::size_t k = 0; k < len; ++k) {
        utt.push_back(static_cast<TokenId>(Vocabulary::kFirstWordId + rng.uniform_index(words)));
      }
      p.context.push_back(utt);
    }
    const std::size_t len = 1 + rng.uniform_index(5);
    for (std::size_t k = 0; k < len; ++k) {
      p.response.push_back(static_cast<TokenId>(Vocabulary::kFirstWordId + rng.uniform_index(words)));
    }
    pairs.push_back(std::move(p));
  }
  return Corpus(std::move(vocab), std::move(pairs));
}

}  // namespace hcl::testing
