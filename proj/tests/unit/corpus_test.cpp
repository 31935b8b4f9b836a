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

#include <doctest.h>

#include <set>

#include "hcl/binary_io.hpp"
#include "hcl/corpus.hpp"
#include "hcl/error.hpp"
#include "hcl/synthetic.hpp"
#include "test_util.hpp"

using namespace hcl;
using hcl::testing::TempDir;
using hcl::testing::write_text;

TEST_CASE("tokenize lowercases and splits on whitespace") {
  CHECK(tokenize("  Hello   WORLD\tfoo\n") == std::vector<std::string>{"hello", "world", "foo"});
  CHECK(tokenize("   ").empty());
}

TEST_CASE("build_vocabulary: minimal corpus and threshold") {
  TempDir dir("vocab");
  const auto f = dir / "train.jsonl";
  write_text(f, R"({"context": ["a a"], "response": "b"})" "\n");

  const Vocabulary v1 = build_vocabulary(f, 1);
  CHECK(v1.size() == 5);
  CHECK(v1.id("a") == Vocabulary::kFirstWordId);
  CHECK(v1.id("b") == Vocabulary::kFirstWordId + 1);

  const Vocabulary v2 = build_vocabulary(f, 2);
  CHECK(v2.size() == 4);
  CHECK(v2.id("b") == Vocabulary::kOov);
  CHECK(v2.id("a") == Vocabulary::kFirstWordId);

  CHECK(build_vocabulary(f, 1) == v1);
  CHECK(build_vocabulary(f, 1).checksum() == v1.checksum());
  CHECK(v1.checksum() != v2.checksum());
}

TEST_CASE("vocabulary order: frequency then lexicographic") {
  const Vocabulary v = build_vocabulary_from_counts({{"z", 3}, {"b", 2}, {"a", 2}, {"q", 1}}, 1);
  CHECK(v.tokens() == std::vector<std::string>{"<pad>", "<oov>", "<sep>", "z", "a", "b", "q"});
  // special ids distinct, map injective
  std::set<TokenId> ids;
  for (const auto& t : v.tokens()) ids.insert(v.id(t));
  CHECK(ids.size() == v.size());
}

TEST_CASE("load_train") {
  TempDir dir("train");
  const auto f = dir / "train.jsonl";
  write_text(f,
             R"({"context": ["hi there", "how are you"], "response": "fine"})" "\n"
             R"({"context": ["hi"], "response": "hello"})" "\n"
             "\n"
             R"({"context": ["there"], "response": "fine thanks"})" "\n");
  const Vocabulary vocab = build_vocabulary(f, 1);
  const auto pairs = load_train(f, vocab);
  REQUIRE(pairs.size() == 3);
  for (std::uint32_t i = 0; i < 3; ++i) CHECK(pairs[i].id == i);
  CHECK(pairs[0].context.size() == 2);

  const auto g = dir / "other.jsonl";
  write_text(g, R"({"context": ["hi unseen"], "response": "fine"})" "\n");
  const auto other = load_train(g, vocab);
  CHECK(other[0].context[0][1] == Vocabulary::kOov);

  CHECK(load_train(f, vocab) == pairs);
}

TEST_CASE("load_train errors") {
  TempDir dir("train_err");
  const Vocabulary vocab(std::vector<std::string>{"a"});
  const auto empty = dir / "empty.jsonl";
  write_text(empty, "");
  CHECK_THROWS_WITH(load_train(empty, vocab), doctest::Contains("empty corpus"));

  const auto bad = dir / "bad.jsonl";
  write_text(bad, R"({"context": ["a"], "response": "a"})" "\n" "{not json\n");
  CHECK_THROWS_WITH_AS(load_train(bad, vocab), doctest::Contains("bad.jsonl:2"), FormatError);

  const auto blank = dir / "blank.jsonl";
  write_text(blank, R"({"context": ["a"], "response": "   "})" "\n");
  CHECK_THROWS_WITH(load_train(blank, vocab), doctest::Contains("empty response"));

  CHECK_THROWS(load_train(dir / "missing.jsonl", vocab));
}

TEST_CASE("load_test validation") {
  TempDir dir("test_set");
  const Vocabulary vocab(std::vector<std::string>{"a", "b"});
  const auto ok = dir / "ok.jsonl";
  write_text(ok, R"({"context": ["a"], "candidates": [{"text": "a", "label": 1}, {"text": "b", "label": 0}]})" "\n");
  const auto inst = load_test(ok, vocab);
  REQUIRE(inst.size() == 1);
  CHECK(inst[0].candidates.size() == 2);
  CHECK(inst[0].candidates[0].label == 1);

  const auto one = dir / "one.jsonl";
  write_text(one, R"({"context": ["a"], "candidates": [{"text": "a", "label": 1}]})" "\n");
  CHECK_THROWS_WITH(load_test(one, vocab), doctest::Contains("fewer than 2"));

  const auto lab = dir / "lab.jsonl";
  write_text(lab, R"({"context": ["a"], "candidates": [{"text": "a", "label": 2}, {"text": "b", "label": 0}]})" "\n");
  CHECK_THROWS_AS(load_test(lab, vocab), FormatError);
}

TEST_CASE("flatten_context") {
  const TokenId S = Vocabulary::kSep;
  CHECK(flatten_context({{1, 2}, {3}}, 128) == Utterance{1, 2, S, 3});
  CHECK(flatten_context({{4, 5, 6}}, 128) == Utterance{4, 5, 6});
}

TEST_CASE("flatten_context keeps the most recent tokens") {
  const TokenId S = Vocabulary::kSep;
  CHECK(flatten_context({{1, 2, 3}, {4, 5, 6}}, 4) == Utterance{S, 4, 5, 6});
  CHECK(flatten_context({{1, 2, 3}, {4, 5, 6}}, 5) == Utterance{3, S, 4, 5, 6});
}

TEST_CASE("corpus properties over random corpora") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Corpus c = hcl::testing::random_corpus(50, 20, seed);
    for (std::size_t i = 0; i < c.size(); ++i) {
      CHECK(c.flat_context(i).size() <= c.limits().max_context_tokens);
      for (TokenId t : c.flat_context(i)) CHECK(t < c.vocab().size());
      for (TokenId t : c.response(i)) CHECK(t < c.vocab().size());
    }
  }
  const Corpus small(Vocabulary(std::vector<std::string>{"a"}),
                     {TrainPair{0, {{3, 3, 3, 3}}, {3}}}, CorpusLimits{2, 64});
  CHECK(small.flat_context(0).size() == 2);
}

TEST_CASE("corpus rejects bad ids") {
  Vocabulary v(std::vector<std::string>{"a"});
  CHECK_THROWS(Corpus(v, {TrainPair{0, {{9}}, {3}}}));
  CHECK_THROWS(Corpus(v, {TrainPair{1, {{3}}, {3}}}));
}

TEST_CASE("response groups") {
  Vocabulary v(std::vector<std::string>{"a", "b"});
  const Corpus c(v, {TrainPair{0, {{3}}, {4}}, TrainPair{1, {{3}}, {3}}, TrainPair{2, {{4}}, {4}}});
  CHECK(c.response_groups() == std::vector<std::uint32_t>{0, 1, 0});
}

TEST_CASE("load_train truncates long responses keeping the first tokens") {
  TempDir dir("trunc");
  const auto f = dir / "t.jsonl";
  write_text(f, R"({"context": ["a"], "response": "a b c d"})" "\n");
  const Vocabulary vocab = build_vocabulary(f, 1);
  const auto pairs = load_train(f, vocab, CorpusLimits{128, 2});
  CHECK(pairs[0].response == Utterance{vocab.id("a"), vocab.id("b")});
}

TEST_CASE("synthetic generator") {
  SyntheticSpec spec;
  spec.num_pairs = 100;
  spec.num_topics = 2;
  spec.seed = 3;
  const auto a = generate_synthetic(spec);
  const auto b = generate_synthetic(spec);
  CHECK(a.train.size() == 100);
  CHECK(a.test.size() == 10);
  for (std::size_t i = 0; i < a.train.size(); ++i) {
    CHECK(a.train[i].context == b.train[i].context);
    CHECK(a.train[i].response == b.train[i].response);
  }

  TempDir d1("syn1");
  TempDir d2("syn2");
  const auto [t1, s1] = write_synthetic(a, d1.path());
  const auto [t2, s2] = write_synthetic(b, d2.path());
  CHECK(file_checksum(t1) == file_checksum(t2));
  CHECK(file_checksum(s1) == file_checksum(s2));
}

TEST_CASE("synthetic: cross-topic negatives are separable by token overlap") {
  SyntheticSpec spec;
  spec.num_pairs = 100;
  spec.num_topics = 2;
  spec.seed = 5;
  const auto corpus = generate_synthetic(spec);
  for (const auto& t : corpus.test) {
    std::set<std::string> ctx;
    for (const auto& u : t.context) {
      for (const auto& w : tokenize(u)) ctx.insert(w);
    }
    auto overlap = [&](const std::string& text) {
      std::size_t n = 0;
      for (const auto& w : tokenize(text)) n += ctx.count(w);
      return n;
    };
    for (std::size_t k = 0; k < t.candidates.size(); ++k) {
      if (t.labels[k] == 1) CHECK(overlap(t.candidates[k]) > 0);
      if (t.candidate_topics[k] != t.topic) CHECK(overlap(t.candidates[k]) == 0);
    }
  }
}
