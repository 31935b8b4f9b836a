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

// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "hcl/binary_io.hpp"
#include "hcl/curriculum.hpp"
#include "hcl/difficulty.hpp"
#include "hcl/evalmetrics.hpp"
#include "hcl/index.hpp"
#include "hcl/log.hpp"
#include "hcl/matcher.hpp"
#include "hcl/pipeline.hpp"
#include "hcl/ranker.hpp"
#include "hcl/synthetic.hpp"

namespace fs = std::filesystem;
using namespace hcl;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

fs::path scratch(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("hcl_acceptance_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

Corpus random_corpus(std::size_t size, std::size_t words, Rng& rng) {
  std::vector<std::string> tokens;
  for (std::size_t w = 0; w < words; ++w) tokens.push_back("w" + std::to_string(w));
  std::vector<TrainPair> pairs;
  auto utt = [&] {
    Utterance u;
    const std::size_t len = 1 + rng.uniform_index(6);
    for (std::size_t k = 0; k < len; ++k) {
      u.push_back(static_cast<TokenId>(Vocabulary::kFirstWordId + rng.uniform_index(words)));
    }
    return u;
  };
  for (std::size_t i = 0; i < size; ++i) {
    TrainPair p;
    p.id = static_cast<std::uint32_t>(i);
    const std::size_t turns = 1 + rng.uniform_index(3);
    for (std::size_t u = 0; u < turns; ++u) p.context.push_back(utt());
    p.response = utt();
    pairs.push_back(std::move(p));
  }
  return Corpus(Vocabulary(tokens), std::move(pairs));
}

// 1. Pacing closed forms and reference anchors.
Outcome pacing_exactness() {
  Outcome o;
  double worst = 0.0;
  auto check = [&](double got, double want) { worst = std::max(worst, std::abs(got - want)); };
  for (const auto& [d, pcc0, kt, T] : std::vector<std::tuple<std::size_t, double, double, std::uint64_t>>{
           {1000000, 0.3, 3.0, 20000}, {5000, 0.3, 3.0, 1000}, {123457, 0.17, 1.25, 777}, {40, 0.9, 0.5, 8}}) {
    const auto s = CurriculumSchedule::make(d, pcc0, kt, 2 * T, T);
    const double k0 = std::log10(static_cast<double>(d));
    for (std::uint64_t t : {std::uint64_t{0}, T / 4, T / 2, T, 2 * T}) {
      const double tt = static_cast<double>(t);
      const double td = static_cast<double>(T);
      check(pacing_cc(s, t), t <= T ? (1.0 - pcc0) / td * tt + pcc0 : 1.0);
      check(pacing_ic(s, t), t <= T ? (k0 - kt) / td * (td - tt) + kt : kt);
    }
  }
  const auto anchor = CurriculumSchedule::make(1000000, 0.3, 3.0, 40000, 20000);
  const bool anchors = pacing_cc(anchor, 0) == 0.3 && std::abs(pacing_ic(anchor, 0) - 6.0) <= 1e-12 &&
                       std::abs(pacing_ic(anchor, 20000) - 3.0) <= 1e-12;
  o.pass = worst <= 1e-12 && anchors;
  std::ostringstream msg;
  msg << "max |error| " << worst << ", anchors p_cc(0)=" << pacing_cc(anchor, 0)
      << " p_ic(0)=" << pacing_ic(anchor, 0) << " p_ic(T)=" << pacing_ic(anchor, 20000);
  o.detail = msg.str();
  return o;
}

// 2. rank_of against a full sort.
Outcome rank_oracle() {
  Outcome o;
  std::size_t queries = 0;
  std::size_t mismatches = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Rng rng(seed, 0xacc2);
    const std::size_t size = 200 + rng.uniform_index(1801);
    // small vocabularies and dimensions make score ties common
    const Corpus corpus = random_corpus(size, 4 + rng.uniform_index(12), rng);
    Rng init = rng.split(1);
    const DualEncoder enc(corpus.vocab().size(), 2 + rng.uniform_index(3), 2 + rng.uniform_index(3), init, 0.5);
    IndexBuildOptions opts;
    opts.topk = seed % 2 ? 0 : 50;
    const OfflineIndex idx = OfflineIndex::build(corpus, enc, opts);
    for (int q = 0; q < 100; ++q) {
      const std::size_t i = rng.uniform_index(size);
      std::size_t j = rng.uniform_index(size - 1);
      if (j >= i) ++j;
      std::vector<std::size_t> ids;
      for (std::size_t h = 0; h < size; ++h) {
        if (h != i) ids.push_back(h);
      }
      const auto ci = idx.contexts().row(i);
      std::vector<double> score(size);
      for (std::size_t h = 0; h < size; ++h) score[h] = dot(ci, idx.responses().row(h));
      std::sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) {
        return score[a] != score[b] ? score[a] > score[b] : a < b;
      });
      const std::size_t want = static_cast<std::size_t>(std::find(ids.begin(), ids.end(), j) - ids.begin()) + 1;
      ++queries;
      mismatches += idx.rank_of(i, j) != want;
    }
  }
  o.pass = mismatches == 0;
  o.detail = std::to_string(queries) + " queries over 10 seeds, " + std::to_string(mismatches) + " mismatches";
  return o;
}

// 3. Every sampled batch respects both curricula.
Outcome curriculum_membership() {
  Outcome o;
  Rng rng(3, 0xacc3);
  const Corpus corpus = random_corpus(1500, 40, rng);
  Rng init = rng.split(1);
  const DualEncoder enc(corpus.vocab().size(), 6, 6, init, 0.3);
  IndexBuildOptions opts;
  opts.topk = 100;
  const OfflineIndex idx = OfflineIndex::build(corpus, enc, opts);
  const DifficultyTable table = compute_corpus_difficulty(idx);
  const std::uint64_t T = 600;
  const auto s = CurriculumSchedule::make(corpus.size(), 0.3, 1.5, 2 * T, T);
  BatchRequest req;
  req.batch_size = 16;
  req.negatives = 5;
  std::size_t batches = 0, pairs = 0, negatives = 0, violations = 0;
  auto quiet = set_log_sink([](std::string_view, std::string_view) {});
  const Rng root(3, 0xb);
  for (std::uint64_t t = 0; t <= 2 * T; ++t) {
    Rng r = root.split(t);
    const auto b = next_batch(s, t, table, idx, req, r);
    ++batches;
    const double pcc = pacing_cc(s, t);
    const std::size_t n = sampling_space_size(s, t, corpus.size(), req.negatives);
    for (std::size_t k = 0; k < b.pair_ids.size(); ++k) {
      const auto i = b.pair_ids[k];
      ++pairs;
      violations += !(table.dcc[i] <= pcc);
      std::set<std::uint32_t> seen;
      for (auto j : b.negatives[k]) {
        ++negatives;
        violations += j == i || !seen.insert(j).second || idx.rank_of(i, j) > n;
      }
      violations += b.negatives[k].size() != req.negatives;
    }
  }
  set_log_sink(quiet);
  o.pass = violations == 0 && batches >= 1000;
  o.detail = std::to_string(batches) + " batches, " + std::to_string(pairs) + " pairs, " +
             std::to_string(negatives) + " negatives, " + std::to_string(violations) + " violations";
  return o;
}

// 4. Finite-difference checks of both losses.
Outcome gradient_correctness() {
  Outcome o;
  double worst_ranker = 0.0, worst_hinge = 0.0;
  std::size_t ranker_ok = 0, hinge_ok = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed, 0xacc4);
    const Corpus corpus = random_corpus(10, 8, rng);
    Rng init = rng.split(1);
    DualEncoder enc(corpus.vocab().size(), 2 + rng.uniform_index(3), 2 + rng.uniform_index(3), init, 0.5);
    std::vector<std::uint32_t> ids;
    for (auto x : rng.sample_distinct(corpus.size(), 2 + rng.uniform_index(4))) {
      ids.push_back(static_cast<std::uint32_t>(x));
    }
    const auto rep = check_gradient(
        [&](ParamStore& p) {
          p.zero_grad();
          return in_batch_loss(enc, corpus, ids);
        },
        enc.params());
    worst_ranker = std::max(worst_ranker, rep.max_rel_error);
    ranker_ok += rep.passed;
  }
  std::uint64_t seed = 0;
  for (int done = 0; done < 20;) {
    ++seed;
    Rng rng(seed, 0xacc5);
    const Corpus corpus = random_corpus(8, 8, rng);
    Rng init = rng.split(1);
    BilinearMatcher m(corpus.vocab().size(), 2 + rng.uniform_index(3), init, BilinearMatcher::Init{0.8, 0.5, 1.0});
    const Utterance& ctx = corpus.flat_context(0);
    const Utterance& pos = corpus.response(0);
    std::vector<const Utterance*> negs;
    const std::size_t mcount = 1 + rng.uniform_index(5);
    for (std::size_t k = 1; k <= mcount; ++k) negs.push_back(&corpus.response(k));
    const double sp = m.score(ctx, pos);
    bool near_kink = false;
    for (auto* n : negs) near_kink |= std::abs(1.0 - sp + m.score(ctx, *n)) < 1e-3;
    if (near_kink) continue;
    const auto rep = check_gradient(
        [&](ParamStore& p) {
          p.zero_grad();
          return hinge_loss(m, ctx, pos, negs).loss;
        },
        m.params());
    worst_hinge = std::max(worst_hinge, rep.max_rel_error);
    hinge_ok += rep.passed;
    ++done;
  }
  o.pass = ranker_ok == 20 && hinge_ok == 20 && worst_ranker < 1e-4 && worst_hinge < 1e-4;
  std::ostringstream msg;
  msg << "in-batch " << ranker_ok << "/20 (max rel " << worst_ranker << "), hinge " << hinge_ok
      << "/20 (max rel " << worst_hinge << ")";
  o.detail = msg.str();
  return o;
}

// 5. ln b under uniform scores; the 1.3 hinge example.
Outcome loss_anchors() {
  Outcome o;
  double worst = 0.0;
  Rng rng(5, 0xacc6);
  const Corpus corpus = random_corpus(64, 10, rng);
  for (std::size_t b : {2u, 4u, 8u, 32u, 64u}) {
    ParamStore p;
    Matrix embed(corpus.vocab().size(), 3);
    p.add("embed", embed);
    Matrix proj(3, 3);
    for (auto& v : proj.data()) v = rng.normal();
    p.add("ctx_proj", proj);
    p.add("resp_proj", proj);
    DualEncoder enc(std::move(p));
    std::vector<std::uint32_t> ids(b);
    for (std::size_t k = 0; k < b; ++k) ids[k] = static_cast<std::uint32_t>(k);
    worst = std::max(worst, std::abs(in_batch_loss(enc, corpus, ids) - std::log(static_cast<double>(b))));
    Matrix s(b, b, 3.7);
    worst = std::max(worst, std::abs(diagonal_softmax_nll(s, nullptr) - std::log(static_cast<double>(b))));
  }
  ParamStore p;
  p.add("embed", Matrix(7, 1, {0, 0, 0, 1.0, 0.2, 0.5, -0.9}));
  p.add("interaction", Matrix(1, 1, {1.0}));
  p.add("bias", Matrix(1, 1, {0.0}));
  BilinearMatcher m(std::move(p));
  const Utterance c{3}, pos{4}, n1{5}, n2{6};
  const std::vector<const Utterance*> negs{&n1, &n2};
  const double h = hinge_loss(m, c, pos, negs).loss;
  const double hv = hinge_loss_value(0.2, std::vector<double>{0.5, -0.9});
  o.pass = worst < 1e-9 && h == 1.3 && hv == 1.3;
  std::ostringstream msg;
  msg.precision(17);
  msg << "max |L_G - ln b| " << worst << ", hinge " << h << " / " << hv;
  o.detail = msg.str();
  return o;
}

// 6. The committed evaluation fixture.
Outcome metric_oracle() {
  Outcome o;
  std::ifstream in(std::string(HCL_FIXTURE_DIR) + "/eval_fixture.json");
  const auto j = nlohmann::json::parse(in);
  std::vector<ScoredInstance> inst;
  for (const auto& x : j["instances"]) {
    inst.push_back({x["scores"].get<std::vector<double>>(), x["labels"].get<std::vector<int>>()});
  }
  const std::vector<std::pair<std::size_t, std::size_t>> recalls{{10, 1}, {10, 2}, {10, 5}, {2, 1}};
  const auto rep = evaluate_scored(inst, recalls);
  const auto& e = j["expected"];
  auto frac = [](const nlohmann::json& v) { return v[0].get<double>() / v[1].get<double>(); };
  // equal up to the rounding of the final division
  auto same = [](double a, double b) { return std::abs(a - b) <= 4 * std::numeric_limits<double>::epsilon(); };
  const std::vector<std::pair<std::string, double>> got{
      {"map", rep.map},
      {"mrr", rep.mrr},
      {"p1", rep.p_at_1},
      {"r10@1", rep.recall_at.at({10, 1})},
      {"r10@2", rep.recall_at.at({10, 2})},
      {"r10@5", rep.recall_at.at({10, 5})},
      {"r2@1", rep.recall_at.at({2, 1})}};
  std::ostringstream msg;
  for (const auto& [name, v] : got) {
    if (!same(v, frac(e[name]))) {
      o.pass = false;
      msg << name << "=" << v << " expected " << frac(e[name]) << "; ";
    }
  }
  if (o.pass) msg << "7 metrics match over " << inst.size() << " instances";
  o.detail = msg.str();
  return o;
}

// 7. Directional ablation on the bundled corpus.
Outcome ablation_direction() {
  Outcome o;
  RunConfig cfg;
  cfg.data.train = fs::path(HCL_DATA_DIR) / "train.jsonl";
  cfg.data.test = fs::path(HCL_DATA_DIR) / "test.jsonl";
  cfg.out_dir = scratch("ablation");
  const std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  const auto res = run_ablation(cfg, seeds);
  auto r = [&](Ablation a) {
    return res.mean(a, [](const EvalReport& x) { return x.recall_at.at({10, 1}); });
  };
  const double full = r(Ablation::kFull), ic = r(Ablation::kInstanceOnly), cc = r(Ablation::kCorpusOnly),
               none = r(Ablation::kNone);
  const bool a = full >= ic && ic >= none;
  const bool b = full >= cc && cc >= none;
  const bool c = full - none > 0.0;
  o.pass = a && b && c;
  std::ostringstream msg;
  msg.setf(std::ios::fixed);
  msg.precision(4);
  msg << "mean R10@1 full " << full << " ic " << ic << " cc " << cc << " none " << none
      << " [full>=ic>=none " << (a ? "yes" : "no") << ", full>=cc>=none " << (b ? "yes" : "no")
      << ", full-none>0 " << (c ? "yes" : "no") << "]";
  o.detail = msg.str();
  fs::remove_all(cfg.out_dir);
  return o;
}

// 8. Bit-identical artifacts on a rerun with the same seed.
Outcome determinism() {
  Outcome o;
  auto make = [](const fs::path& dir) {
    RunConfig cfg;
    SyntheticSpec s;
    s.num_pairs = 1000;
    cfg.synthetic = s;
    cfg.data.train = dir / "data" / "train.jsonl";
    cfg.data.test = dir / "data" / "test.jsonl";
    cfg.ranker.steps = 300;
    cfg.matcher.total_steps = 300;
    cfg.out_dir = dir;
    cfg.apply_seed(11);
    return cfg;
  };
  const fs::path a = scratch("det_a");
  const fs::path b = scratch("det_b");
  run_pipeline(make(a));
  RunConfig cb = make(b);
  cb.index_threads = 3;
  run_pipeline(cb);
  std::ostringstream msg;
  std::size_t compared = 0;
  for (const char* f : {"data/train.jsonl", "data/test.jsonl", "ranker.hclp", "ranker_trace.csv", "index.hcli",
                        "matcher.hclp", "trace.csv", "report.json"}) {
    ++compared;
    if (read_file_bytes(a / f) != read_file_bytes(b / f)) {
      o.pass = false;
      msg << f << " differs; ";
    }
  }
  if (o.pass) msg << compared << " artifacts bit-identical across two runs (1 vs 3 index threads)";
  o.detail = msg.str();
  fs::remove_all(a);
  fs::remove_all(b);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"pacing exactness", pacing_exactness},
      {"rank oracle equivalence", rank_oracle},
      {"curriculum membership", curriculum_membership},
      {"gradient correctness", gradient_correctness},
      {"loss anchors", loss_anchors},
      {"metric oracle", metric_oracle},
      {"ablation direction", ablation_direction},
      {"determinism", determinism}};
  std::set<int> only;
  for (int k = 1; k < argc; ++k) only.insert(std::atoi(argv[k]));
  set_log_sink([](std::string_view level, std::string_view msg) {
    if (level == "warning") std::cerr << "warning: " << msg << '\n';
  });

  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!only.empty() && !only.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[k].second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !out.pass;
    std::printf("%s criterion %d (%s): %s [%.1fs]\n", out.pass ? "PASS" : "FAIL", id, criteria[k].first.c_str(),
                out.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
