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

#include "hcl/synthetic.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "hcl/error.hpp"
#include "hcl/rng.hpp"

namespace hcl {

namespace {

std::string word(std::size_t topic, char kind, std::size_t k) {
  return "t" + std::to_string(topic) + kind + std::to_string(k);
}

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.uniform_index(i)]);
}

std::string join(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out.push_back(' ');
    out += w;
  }
  return out;
}

class Generator {
 public:
  Generator(const SyntheticSpec& spec, Rng& rng) : spec_(spec), rng_(rng) {}

  SyntheticRecord pair(std::size_t topic, SyntheticRecord::Kind kind) {
    SyntheticRecord rec;
    rec.topic = topic;
    rec.kind = kind;
    const auto ents = rng_.sample_distinct(spec_.entities_per_topic, 2);
    const std::size_t e1 = ents[0];
    const std::size_t e2 = ents[1];
    const std::size_t cue = rng_.uniform_index(spec_.cues_per_topic);

    const std::size_t turns = 2 + rng_.uniform_index(3);
    const std::size_t e1_turn = rng_.uniform_index(turns - 1);
    for (std::size_t u = 0; u < turns; ++u) {
      std::vector<std::string> words;
      const std::size_t general = 3 + rng_.uniform_index(4);
      for (std::size_t k = 0; k < general; ++k) {
        words.push_back("g" + std::to_string(rng_.uniform_index(spec_.general_filler)));
      }
      const std::size_t filler = rng_.uniform_index(3);
      for (std::size_t k = 0; k < filler; ++k) words.push_back(topic_filler(topic));
      if (u == 0) words.push_back(topic_marker(topic));
      if (u == e1_turn) words.push_back(word(topic, 'e', e1));
      if (u + 1 == turns) {
        words.push_back(word(topic, 'e', e2));
        words.push_back(word(topic, 'q', cue));
      }
      shuffle(words, rng_);
      rec.context.push_back(join(words));
    }

    std::vector<std::string> resp{topic_marker(topic)};
    switch (kind) {
      case SyntheticRecord::Kind::kEasy:
        resp.push_back(word(topic, 'e', e2));
        resp.push_back(word(topic, 'a', cue));
        break;
      case SyntheticRecord::Kind::kHard:
        resp.push_back(word(topic, 's', e2));
        resp.push_back(word(topic, 'a', cue));
        break;
      case SyntheticRecord::Kind::kNoise: {
        // Mismatched pair: the response comes from another topic.
        std::size_t other = rng_.uniform_index(spec_.num_topics - 1);
        if (other >= topic) ++other;
        rec.response = pair(other, SyntheticRecord::Kind::kEasy).response;
        return rec;
      }
    }
    const std::size_t filler = 2 + rng_.uniform_index(2);
    for (std::size_t k = 0; k < filler; ++k) resp.push_back(topic_filler(topic));
    shuffle(resp, rng_);
    rec.response = join(resp);
    return rec;
  }

  SyntheticRecord::Kind train_kind() {
    const double u = rng_.uniform01();
    if (u < spec_.noise_fraction) return SyntheticRecord::Kind::kNoise;
    if (u < spec_.noise_fraction + spec_.hard_fraction) return SyntheticRecord::Kind::kHard;
    return SyntheticRecord::Kind::kEasy;
  }

  SyntheticRecord::Kind clean_kind() {
    const double hard = spec_.hard_fraction / std::max(1e-12, 1.0 - spec_.noise_fraction);
    return rng_.uniform01() < hard ? SyntheticRecord::Kind::kHard : SyntheticRecord::Kind::kEasy;
  }

 private:
  std::string topic_filler(std::size_t topic) {
    return word(topic, 'f', rng_.uniform_index(spec_.topic_filler));
  }

  const SyntheticSpec& spec_;
  Rng& rng_;
};

}  // namespace

std::string topic_marker(std::size_t topic) { return "t" + std::to_string(topic) + "m"; }

SyntheticCorpus generate_synthetic(const SyntheticSpec& spec) {
  if (spec.num_topics < 2) throw Error("gen-data: need at least 2 topics");
  if (spec.num_pairs < 2) throw Error("gen-data: need at least 2 pairs");
  if (spec.candidates < 2) throw Error("gen-data: need at least 2 candidates per test instance");
  if (spec.same_topic_negatives > spec.candidates - 1) {
    throw Error("gen-data: more same-topic negatives than negative slots");
  }
  if (spec.entities_per_topic < 2 || spec.cues_per_topic < 1) {
    throw Error("gen-data: topic word sets too small");
  }
  if (spec.hard_fraction < 0 || spec.noise_fraction < 0 || spec.hard_fraction + spec.noise_fraction > 1) {
    throw Error("gen-data: hard/noise fractions must be non-negative and sum to at most 1");
  }

  Rng rng(spec.seed, 0x73796e74);  // "synt"
  Generator gen(spec, rng);
  SyntheticCorpus out;
  out.train.reserve(spec.num_pairs);
  for (std::size_t i = 0; i < spec.num_pairs; ++i) {
    const std::size_t topic = rng.uniform_index(spec.num_topics);
    out.train.push_back(gen.pair(topic, gen.train_kind()));
  }

  const std::size_t num_test = spec.num_test ? spec.num_test : std::max<std::size_t>(1, spec.num_pairs / 10);
  for (std::size_t q = 0; q < num_test; ++q) {
    const std::size_t topic = rng.uniform_index(spec.num_topics);
    const auto base = gen.pair(topic, gen.clean_kind());
    SyntheticTestRecord t;
    t.topic = topic;
    t.context = base.context;
    std::vector<std::pair<std::string, std::size_t>> negatives;
    while (negatives.size() < spec.same_topic_negatives) {
      auto neg = gen.pair(topic, gen.clean_kind());
      if (neg.response != base.response) negatives.emplace_back(neg.response, topic);
    }
    while (negatives.size() < spec.candidates - 1) {
      std::size_t other = rng.uniform_index(spec.num_topics - 1);
      if (other >= topic) ++other;
      negatives.emplace_back(gen.pair(other, gen.clean_kind()).response, other);
    }
    std::vector<std::size_t> slots(spec.candidates);
    for (std::size_t k = 0; k < slots.size(); ++k) slots[k] = k;
    shuffle(slots, rng);
    t.candidates.resize(spec.candidates);
    t.labels.assign(spec.candidates, 0);
    t.candidate_topics.resize(spec.candidates);
    t.candidates[slots[0]] = base.response;
    t.labels[slots[0]] = 1;
    t.candidate_topics[slots[0]] = topic;
    for (std::size_t k = 0; k < negatives.size(); ++k) {
      t.candidates[slots[k + 1]] = negatives[k].first;
      t.candidate_topics[slots[k + 1]] = negatives[k].second;
    }
    out.test.push_back(std::move(t));
  }
  return out;
}

std::pair<std::filesystem::path, std::filesystem::path> write_synthetic(
    const SyntheticCorpus& corpus, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const auto train_path = out_dir / "train.jsonl";
  const auto test_path = out_dir / "test.jsonl";
  {
    std::ofstream f(train_path, std::ios::trunc);
    if (!f) throw Error("cannot write " + train_path.string());
    for (const auto& r : corpus.train) {
      nlohmann::ordered_json j;
      j["context"] = r.context;
      j["response"] = r.response;
      f << j.dump() << '\n';
    }
  }
  {
    std::ofstream f(test_path, std::ios::trunc);
    if (!f) throw Error("cannot write " + test_path.string());
    for (const auto& t : corpus.test) {
      nlohmann::ordered_json j;
      j["context"] = t.context;
      auto cands = nlohmann::ordered_json::array();
      for (std::size_t k = 0; k < t.candidates.size(); ++k) {
        nlohmann::ordered_json c;
        c["text"] = t.candidates[k];
        c["label"] = t.labels[k];
        cands.push_back(c);
      }
      j["candidates"] = cands;
      f << j.dump() << '\n';
    }
  }
  return {train_path, test_path};
}

}  // namespace hcl
