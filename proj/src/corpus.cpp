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

#include "hcl/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>

#include <json.hpp>

#include "hcl/binary_io.hpp"
#include "hcl/error.hpp"

namespace hcl {

namespace {

using nlohmann::json;

const std::vector<std::string> kSpecials = {"<pad>", "<oov>", "<sep>"};

std::string where(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line);
}

// Invokes fn(json, line_number) for each non-blank line.
template <typename Fn>
std::size_t for_each_record(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::string line;
  std::size_t lineno = 0;
  std::size_t records = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); })) {
      continue;
    }
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw FormatError(where(path, lineno) + ": malformed record: " + e.what());
    }
    if (!rec.is_object()) throw FormatError(where(path, lineno) + ": malformed record: not an object");
    fn(rec, lineno);
    ++records;
  }
  if (in.bad()) throw Error("read failure on '" + path.string() + "'");
  return records;
}

std::vector<std::string> context_strings(const json& rec, const std::string& loc) {
  auto it = rec.find("context");
  if (it == rec.end() || !it->is_array() || it->empty()) {
    throw FormatError(loc + ": malformed record: 'context' must be a non-empty array of strings");
  }
  std::vector<std::string> out;
  for (const auto& u : *it) {
    if (!u.is_string()) throw FormatError(loc + ": malformed record: context entry is not a string");
    out.push_back(u.get<std::string>());
  }
  return out;
}

std::string string_field(const json& rec, const char* key, const std::string& loc) {
  auto it = rec.find(key);
  if (it == rec.end() || !it->is_string()) {
    throw FormatError(loc + ": malformed record: '" + key + "' must be a string");
  }
  return it->get<std::string>();
}

std::vector<Utterance> encode_context(const std::vector<std::string>& raw, const Vocabulary& vocab,
                                      const std::string& loc) {
  std::vector<Utterance> ctx;
  for (const auto& u : raw) {
    Utterance enc = vocab.encode(u);
    if (!enc.empty()) ctx.push_back(std::move(enc));
  }
  if (ctx.empty()) throw FormatError(loc + ": malformed record: context is empty after tokenization");
  return ctx;
}

Utterance truncate_front(Utterance u, std::size_t max_tokens) {
  if (max_tokens > 0 && u.size() > max_tokens) u.resize(max_tokens);
  return u;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

Vocabulary::Vocabulary() : Vocabulary(std::vector<std::string>{}) {}

Vocabulary::Vocabulary(std::vector<std::string> words) {
  tokens_ = kSpecials;
  tokens_.insert(tokens_.end(), std::make_move_iterator(words.begin()),
                 std::make_move_iterator(words.end()));
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!ids_.emplace(tokens_[i], static_cast<TokenId>(i)).second) {
      throw Error("vocabulary: duplicate token '" + tokens_[i] + "'");
    }
  }
}

TokenId Vocabulary::id(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  return it == ids_.end() ? kOov : it->second;
}

bool Vocabulary::contains(std::string_view token) const {
  return ids_.count(std::string(token)) != 0;
}

std::uint64_t Vocabulary::checksum() const {
  std::uint64_t h = fnv1a64(std::string_view("hcl-vocab"));
  for (const auto& t : tokens_) {
    h = fnv1a64(t, h);
    h = fnv1a64(std::string_view("\0", 1), h);
  }
  return h;
}

Utterance Vocabulary::encode(std::string_view text) const {
  Utterance out;
  for (const auto& tok : tokenize(text)) out.push_back(id(tok));
  return out;
}

Vocabulary build_vocabulary_from_counts(const std::unordered_map<std::string, std::size_t>& counts,
                                        std::size_t min_freq) {
  std::vector<std::pair<std::string, std::size_t>> kept;
  for (const auto& [tok, n] : counts) {
    if (n >= min_freq && std::find(kSpecials.begin(), kSpecials.end(), tok) == kSpecials.end()) {
      kept.emplace_back(tok, n);
    }
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  std::vector<std::string> words;
  words.reserve(kept.size());
  for (auto& [tok, n] : kept) words.push_back(std::move(tok));
  return Vocabulary(std::move(words));
}

Vocabulary build_vocabulary(const std::filesystem::path& raw_train_file, std::size_t min_freq) {
  std::unordered_map<std::string, std::size_t> counts;
  for_each_record(raw_train_file, [&](const json& rec, std::size_t lineno) {
    const auto loc = where(raw_train_file, lineno);
    for (const auto& u : context_strings(rec, loc)) {
      for (auto& t : tokenize(u)) ++counts[t];
    }
    for (auto& t : tokenize(string_field(rec, "response", loc))) ++counts[t];
  });
  return build_vocabulary_from_counts(counts, min_freq);
}

std::vector<TrainPair> load_train(const std::filesystem::path& path, const Vocabulary& vocab,
                                  const CorpusLimits& limits) {
  std::vector<TrainPair> pairs;
  for_each_record(path, [&](const json& rec, std::size_t lineno) {
    const auto loc = where(path, lineno);
    TrainPair p;
    p.id = static_cast<std::uint32_t>(pairs.size());
    p.context = encode_context(context_strings(rec, loc), vocab, loc);
    p.response = truncate_front(vocab.encode(string_field(rec, "response", loc)),
                                limits.max_response_tokens);
    if (p.response.empty()) throw FormatError(loc + ": empty response after tokenization");
    pairs.push_back(std::move(p));
  });
  if (pairs.empty()) throw FormatError(path.string() + ": empty corpus");
  return pairs;
}

std::vector<TestInstance> load_test(const std::filesystem::path& path, const Vocabulary& vocab,
                                    const CorpusLimits& limits) {
  std::vector<TestInstance> out;
  for_each_record(path, [&](const json& rec, std::size_t lineno) {
    const auto loc = where(path, lineno);
    TestInstance inst;
    inst.context = encode_context(context_strings(rec, loc), vocab, loc);
    auto it = rec.find("candidates");
    if (it == rec.end() || !it->is_array()) {
      throw FormatError(loc + ": malformed record: 'candidates' must be an array");
    }
    for (const auto& c : *it) {
      if (!c.is_object()) throw FormatError(loc + ": malformed record: candidate is not an object");
      Candidate cand;
      cand.response =
          truncate_front(vocab.encode(string_field(c, "text", loc)), limits.max_response_tokens);
      if (cand.response.empty()) throw FormatError(loc + ": empty candidate after tokenization");
      auto lab = c.find("label");
      if (lab == c.end() || !lab->is_number_integer() || (*lab != 0 && *lab != 1)) {
        throw FormatError(loc + ": malformed record: candidate label must be 0 or 1");
      }
      cand.label = lab->get<int>();
      inst.candidates.push_back(std::move(cand));
    }
    if (inst.candidates.size() < 2) throw FormatError(loc + ": fewer than 2 candidates");
    out.push_back(std::move(inst));
  });
  if (out.empty()) throw FormatError(path.string() + ": empty test set");
  return out;
}

Utterance flatten_context(const std::vector<Utterance>& context, std::size_t max_tokens) {
  Utterance flat;
  for (std::size_t u = 0; u < context.size(); ++u) {
    if (u > 0) flat.push_back(Vocabulary::kSep);
    flat.insert(flat.end(), context[u].begin(), context[u].end());
  }
  if (max_tokens > 0 && flat.size() > max_tokens) {
    flat.erase(flat.begin(), flat.end() - static_cast<std::ptrdiff_t>(max_tokens));
  }
  return flat;
}

Corpus::Corpus(Vocabulary vocab, std::vector<TrainPair> pairs, CorpusLimits limits)
    : vocab_(std::move(vocab)), limits_(limits), pairs_(std::move(pairs)) {
  flat_contexts_.reserve(pairs_.size());
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    const auto& p = pairs_[i];
    if (p.id != i) throw Error("corpus: pair ids must be dense and in order");
    if (p.context.empty() || p.response.empty()) throw Error("corpus: empty context or response");
    for (const auto& u : p.context) {
      for (TokenId t : u) {
        if (t >= vocab_.size()) throw Error("corpus: token id out of vocabulary range");
      }
    }
    for (TokenId t : p.response) {
      if (t >= vocab_.size()) throw Error("corpus: token id out of vocabulary range");
    }
    flat_contexts_.push_back(flatten_context(p.context, limits_.max_context_tokens));
  }
}

std::vector<std::uint32_t> Corpus::response_groups() const {
  std::map<Utterance, std::uint32_t> first;
  std::vector<std::uint32_t> groups(pairs_.size());
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    groups[i] = first.emplace(pairs_[i].response, static_cast<std::uint32_t>(i)).first->second;
  }
  return groups;
}

Corpus load_corpus(const std::filesystem::path& train_file, std::size_t min_freq,
                   const CorpusLimits& limits) {
  Vocabulary vocab = build_vocabulary(train_file, min_freq);
  auto pairs = load_train(train_file, vocab, limits);
  return Corpus(std::move(vocab), std::move(pairs), limits);
}

}  // namespace hcl
