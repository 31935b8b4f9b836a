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

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "hcl/error.hpp"
#include "hcl/evalmetrics.hpp"

using namespace hcl;

namespace {

const std::vector<std::pair<std::size_t, std::size_t>> kRecalls{{10, 1}, {10, 2}, {10, 5}, {2, 1}};

nlohmann::json load_fixture() {
  std::ifstream in(std::string(HCL_FIXTURE_DIR) + "/eval_fixture.json");
  REQUIRE(in.good());
  return nlohmann::json::parse(in);
}

std::vector<ScoredInstance> fixture_instances(const nlohmann::json& j) {
  std::vector<ScoredInstance> out;
  for (const auto& inst : j["instances"]) {
    out.push_back({inst["scores"].get<std::vector<double>>(), inst["labels"].get<std::vector<int>>()});
  }
  return out;
}

double frac(const nlohmann::json& v) { return v[0].get<double>() / v[1].get<double>(); }

ScoredInstance single(std::size_t positive_rank, std::size_t n) {
  ScoredInstance s;
  for (std::size_t k = 0; k < n; ++k) {
    s.scores.push_back(static_cast<double>(n - k));
    s.labels.push_back(k + 1 == positive_rank ? 1 : 0);
  }
  return s;
}

}  // namespace

TEST_CASE("rank_candidates") {
  CHECK(rank_candidates(std::vector<double>{0.9, 0.1}) == std::vector<std::size_t>{0, 1});
  CHECK(rank_candidates(std::vector<double>{0.3, 0.3, 0.3}) == std::vector<std::size_t>{0, 1, 2});
  CHECK(rank_candidates(std::vector<double>{0.1, 0.7, 0.4}) == std::vector<std::size_t>{1, 2, 0});
  CHECK(rank_candidates(std::vector<double>{10.1, 10.7, 10.4}) == std::vector<std::size_t>{1, 2, 0});
  CHECK_THROWS_AS(rank_candidates(std::vector<double>{0.1, INFINITY}), NonFiniteError);
}

TEST_CASE("single-instance examples") {
  const std::vector<ScoredInstance> top{single(1, 10)};
  const auto a = evaluate_scored(top, kRecalls);
  CHECK(a.map == 1.0);
  CHECK(a.mrr == 1.0);
  CHECK(a.p_at_1 == 1.0);
  CHECK(a.recall_at.at({10, 1}) == 1.0);

  const std::vector<ScoredInstance> second{single(2, 10)};
  const auto b = evaluate_scored(second, kRecalls);
  CHECK(b.mrr == 0.5);
  CHECK(b.map == 0.5);
  CHECK(b.p_at_1 == 0.0);
  CHECK(b.recall_at.at({10, 1}) == 0.0);
  CHECK(b.recall_at.at({10, 2}) == 1.0);
}

TEST_CASE("three-instance fixture") {
  const auto j = load_fixture();
  const auto inst = fixture_instances(j);
  const auto& e = j["expected"];
  const auto rep = evaluate_scored(inst, kRecalls);
  CHECK(rep.num_instances == 3);
  CHECK(rep.map == doctest::Approx(frac(e["map"])).epsilon(1e-15));
  CHECK(rep.mrr == doctest::Approx(frac(e["mrr"])).epsilon(1e-15));
  CHECK(rep.p_at_1 == doctest::Approx(frac(e["p1"])).epsilon(1e-15));
  CHECK(rep.recall_at.at({10, 1}) == doctest::Approx(frac(e["r10@1"])).epsilon(1e-15));
  CHECK(rep.recall_at.at({10, 2}) == doctest::Approx(frac(e["r10@2"])).epsilon(1e-15));
  CHECK(rep.recall_at.at({10, 5}) == doctest::Approx(frac(e["r10@5"])).epsilon(1e-15));
  CHECK(rep.recall_at.at({2, 1}) == doctest::Approx(frac(e["r2@1"])).epsilon(1e-15));

  // per-instance values
  for (std::size_t q = 0; q < inst.size(); ++q) {
    const std::vector<ScoredInstance> one{inst[q]};
    const auto r = evaluate_scored(one, kRecalls);
    const auto& p = j["per_instance"][q];
    CHECK(r.map == doctest::Approx(frac(p["ap"])).epsilon(1e-15));
    CHECK(r.mrr == doctest::Approx(frac(p["rr"])).epsilon(1e-15));
    CHECK(r.p_at_1 == p["p1"].get<double>());
    CHECK(r.recall_at.at({2, 1}) == frac(p["r2@1"]));
    CHECK(r.recall_at.at({10, 5}) == frac(p["r10@5"]));
  }
}

TEST_CASE("R_n@k subset rule") {
  // 10 listed candidates; R_5@k uses the first positive plus the first 4 negatives.
  ScoredInstance s;
  s.scores = {0.1, 0.2, 0.3, 0.9, 0.5, 0.95, 0.0, 0.0, 0.99, 0.0};
  s.labels = {0, 0, 0, 1, 0, 0, 0, 0, 0, 1};
  // subset = {0, 1, 2, 3, 4}; positive 3 scores highest there
  const std::vector<ScoredInstance> v{s};
  const std::vector<std::pair<std::size_t, std::size_t>> r{{5, 1}, {10, 1}, {10, 3}, {2, 1}};
  const auto rep = evaluate_scored(v, r);
  CHECK(rep.recall_at.at({5, 1}) == 1.0);
  // whole list: both positives, ranks 3 (0.9) and 10
  CHECK(rep.recall_at.at({10, 1}) == 0.0);
  CHECK(rep.recall_at.at({10, 3}) == 0.5);
  // positive 3 vs negative 0
  CHECK(rep.recall_at.at({2, 1}) == 1.0);
}

TEST_CASE("metric invariants on random instances") {
  std::uint64_t state = 12345;
  auto next = [&]() {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    return static_cast<double>(state >> 11) / 9007199254740992.0;
  };
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<ScoredInstance> inst(5);
    bool one_positive = trial % 2 == 0;
    for (auto& s : inst) {
      const std::size_t n = 2 + static_cast<std::size_t>(next() * 12);
      for (std::size_t k = 0; k < n; ++k) {
        s.scores.push_back(std::floor(next() * 6));
        s.labels.push_back(!one_positive && next() < 0.3 ? 1 : 0);
      }
      s.labels[static_cast<std::size_t>(next() * n)] = 1;
      if (one_positive) {
        std::fill(s.labels.begin(), s.labels.end(), 0);
        s.labels[static_cast<std::size_t>(next() * n)] = 1;
      }
    }
    std::vector<std::pair<std::size_t, std::size_t>> recalls;
    for (std::size_t k = 1; k <= 5; ++k) recalls.emplace_back(5, k);
    const auto rep = evaluate_scored(inst, recalls);
    for (double v : {rep.map, rep.mrr, rep.p_at_1}) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    for (std::size_t k = 2; k <= 5; ++k) CHECK(rep.recall_at.at({5, k}) >= rep.recall_at.at({5, k - 1}));
    CHECK(rep.recall_at.at({5, 5}) == 1.0);
    if (one_positive) CHECK(rep.map == doctest::Approx(rep.mrr).epsilon(1e-15));

    // strictly monotone transform of the scores
    auto moved = inst;
    for (auto& s : moved) {
      for (auto& v : s.scores) v = std::exp(2.0 * v) - 7.0;
    }
    const auto rep2 = evaluate_scored(moved, recalls);
    CHECK(rep2.map == rep.map);
    CHECK(rep2.mrr == rep.mrr);
    CHECK(rep2.p_at_1 == rep.p_at_1);
    CHECK(rep2.recall_at == rep.recall_at);
  }
}

TEST_CASE("instance without a positive is named") {
  std::vector<ScoredInstance> v{single(1, 3), ScoredInstance{{0.1, 0.2}, {0, 0}}};
  CHECK_THROWS_WITH(evaluate_scored(v, kRecalls), doctest::Contains("instance 1"));
}

TEST_CASE("evaluate with a scorer") {
  TestInstance t;
  t.context = {{3, 4}};
  t.candidates = {{{5}, 0}, {{4}, 1}, {{6}, 0}};
  const PairScorer scorer = [](std::span<const TokenId> c, std::span<const TokenId> r) {
    double overlap = 0;
    for (auto a : c) {
      for (auto b : r) overlap += a == b;
    }
    return overlap;
  };
  CHECK(rank_candidates(scorer, t) == std::vector<std::size_t>{1, 0, 2});
  const std::vector<TestInstance> v{t};
  const auto rep = evaluate(scorer, v, kRecalls);
  CHECK(rep.p_at_1 == 1.0);
}

TEST_CASE("parse_metrics and report json") {
  const auto sel = parse_metrics(kDefaultMetrics);
  CHECK(sel.map);
  CHECK(sel.mrr);
  CHECK(sel.p1);
  CHECK(sel.recalls.size() == 4);
  CHECK_THROWS(parse_metrics("map,bogus"));
  CHECK_THROWS(parse_metrics("r2@3"));

  EvalReport rep;
  rep.map = 0.5;
  rep.mrr = 0.25;
  rep.p_at_1 = 0.125;
  rep.recall_at = {{{10, 1}, 0.1}, {{10, 2}, 0.2}, {{10, 5}, 0.5}, {{2, 1}, 0.75}};
  rep.num_instances = 4;
  const auto j = nlohmann::json::parse(report_to_json(rep, sel, 7));
  CHECK(j["seed"] == 7);
  CHECK(j["map"] == 0.5);
  CHECK(j["r2@1"] == 0.75);
  CHECK(j["num_instances"] == 4);
  for (const auto& [k, v] : j.items()) CHECK(v.is_primitive());
  CHECK_FALSE(nlohmann::json::parse(report_to_json(rep, parse_metrics("map"))).contains("mrr"));
}
