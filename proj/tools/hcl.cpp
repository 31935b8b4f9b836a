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

// hcl: command-line front end for the curriculum pipeline.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hcl/config.hpp"
#include "hcl/error.hpp"
#include "hcl/log.hpp"
#include "hcl/pipeline.hpp"
#include "hcl/synthetic.hpp"

namespace fs = std::filesystem;
using namespace hcl;

namespace {

// Settings shared by the stage subcommands. The config file supplies
// defaults; flags given on the command line win.
struct Common {
  std::string config;
  std::string train;
  std::string test;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, Common& c, bool need_test) {
  cmd->add_option("--config", c.config, "key=value config file")->check(CLI::ExistingFile);
  cmd->add_option("--train", c.train, "training JSONL (defines the vocabulary)");
  if (need_test) cmd->add_option("--test", c.test, "test JSONL");
  cmd->add_option("--seed", c.seed, "seed (overrides config and HCL_SEED)");
}

RunConfig resolve_config(const Common& c) {
  KvConfig kv;
  fs::path base;
  if (!c.config.empty()) {
    kv = KvConfig::load(c.config);
    base = fs::path(c.config).parent_path();
  }
  if (!c.train.empty()) kv.set("data.train", fs::absolute(c.train).string());
  if (!c.test.empty()) kv.set("data.test", fs::absolute(c.test).string());
  // Single stages never generate data, and not every stage needs a test file.
  kv.set("synthetic.pairs", "0");
  if (!kv.has("data.test")) kv.set("data.test", "-");
  if (!kv.has("data.train")) throw Error("--train is required (or data.train in --config)");
  RunConfig cfg = load_run_config(kv, base);
  if (c.seed) cfg.apply_seed(*c.seed);
  return cfg;
}

std::vector<std::uint64_t> parse_seeds(const std::string& list) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    KvConfig kv;
    kv.set("seed", item);
    out.push_back(kv.get_u64("seed", 0));
  }
  if (out.empty()) throw Error("--seeds: expected a comma-separated list");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical curriculum learning for response selection"};
  app.set_version_flag("--version", HCL_VERSION);
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "only print warnings");

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "write a synthetic topic corpus (train.jsonl, test.jsonl)");
  SyntheticSpec syn;
  std::string gen_out;
  gen->add_option("--out", gen_out, "output directory")->required();
  gen->add_option("--pairs", syn.num_pairs, "training pairs")->capture_default_str();
  gen->add_option("--topics", syn.num_topics, "topics")->capture_default_str();
  gen->add_option("--seed", syn.seed, "generator seed")->capture_default_str();
  gen->add_option("--test", syn.num_test, "test instances (0 = pairs/10)")->capture_default_str();
  gen->add_option("--candidates", syn.candidates, "candidates per test instance")->capture_default_str();
  gen->add_option("--same-topic-negatives", syn.same_topic_negatives)->capture_default_str();
  gen->add_option("--hard-fraction", syn.hard_fraction)->capture_default_str();
  gen->add_option("--noise-fraction", syn.noise_fraction)->capture_default_str();

  // train-ranker
  auto* tr = app.add_subcommand("train-ranker", "train the dual-encoder ranker");
  Common tr_c;
  add_common(tr, tr_c, false);
  std::string tr_out, tr_trace;
  std::optional<std::size_t> tr_steps, tr_batch, tr_dim, tr_out_dim;
  std::optional<double> tr_lr;
  tr->add_option("--out", tr_out, "ranker checkpoint (.hclp)")->required();
  tr->add_option("--trace", tr_trace, "loss trace CSV");
  tr->add_option("--steps", tr_steps);
  tr->add_option("--batch", tr_batch);
  tr->add_option("--embed-dim", tr_dim);
  tr->add_option("--out-dim", tr_out_dim);
  tr->add_option("--lr", tr_lr);

  // build-index
  auto* bi = app.add_subcommand("build-index", "encode the corpus with a frozen ranker");
  Common bi_c;
  add_common(bi, bi_c, false);
  std::string bi_ranker, bi_out, bi_topk;
  std::optional<double> bi_kt;
  std::optional<std::size_t> bi_threads;
  bi->add_option("--ranker", bi_ranker, "ranker checkpoint")->required()->check(CLI::ExistingFile);
  bi->add_option("--out", bi_out, "index file (.hcli)")->required();
  bi->add_option("--topk", bi_topk, "precomputed neighbours per context, or auto");
  bi->add_option("--kt", bi_kt, "k_T used for the automatic top-K size");
  bi->add_option("--threads", bi_threads, "worker threads (0 = all cores)");

  // inspect
  auto* ins = app.add_subcommand("inspect", "dump schedules and difficulty tables");
  ins->require_subcommand(1);
  auto* sch = ins->add_subcommand("schedule", "pacing curves as CSV (t, p_cc, p_ic, n, eligible_count)");
  std::size_t sch_d = 0, sch_m = 5;
  double sch_pcc0 = 0.3, sch_kt = 3.0;
  std::uint64_t sch_tmax = 0, sch_T = 0, sch_stride = 0;
  std::string sch_out, sch_index;
  sch->add_option("--d-size", sch_d, "corpus size |D|")->required();
  sch->add_option("--pcc0", sch_pcc0)->capture_default_str();
  sch->add_option("--kt", sch_kt)->capture_default_str();
  sch->add_option("--t-max", sch_tmax, "total steps")->required();
  sch->add_option("--T", sch_T, "curriculum length (0 = t-max/2)")->capture_default_str();
  sch->add_option("--m", sch_m, "negatives per pair (lower clamp of n)")->capture_default_str();
  sch->add_option("--stride", sch_stride, "rows every N steps (0 = about 200 rows)");
  sch->add_option("--index", sch_index, "index for the eligible_count column")->check(CLI::ExistingFile);
  sch->add_option("--out", sch_out, "output CSV")->required();
  auto* dif = ins->add_subcommand("difficulty", "per-pair corpus difficulty as CSV");
  std::string dif_index, dif_out;
  dif->add_option("--index", dif_index)->required()->check(CLI::ExistingFile);
  dif->add_option("--out", dif_out)->required();

  // train
  auto* trn = app.add_subcommand("train", "train the matching model with the curriculum");
  Common trn_c;
  add_common(trn, trn_c, false);
  std::string trn_index, trn_ranker, trn_out, trn_trace, trn_ablation;
  std::optional<std::size_t> trn_steps, trn_batch, trn_m;
  std::optional<double> trn_lr, trn_pcc0, trn_kt;
  std::optional<std::uint64_t> trn_T;
  bool trn_dedup = false, trn_no_exact = false;
  trn->add_option("--index", trn_index)->required()->check(CLI::ExistingFile);
  trn->add_option("--ranker", trn_ranker, "ranker checkpoint the index was built from")
      ->check(CLI::ExistingFile);
  trn->add_option("--out", trn_out, "matcher checkpoint (.hclp)")->required();
  trn->add_option("--trace", trn_trace, "metrics trace CSV");
  trn->add_option("--ablation", trn_ablation, "full|cc|ic|none");
  trn->add_option("--steps", trn_steps);
  trn->add_option("--batch", trn_batch);
  trn->add_option("--m", trn_m, "negatives per pair");
  trn->add_option("--lr", trn_lr);
  trn->add_option("--pcc0", trn_pcc0);
  trn->add_option("--kt", trn_kt);
  trn->add_option("--T", trn_T);
  trn->add_flag("--dedup-negatives", trn_dedup, "never sample exact duplicates of the positive");
  trn->add_flag("--no-exact", trn_no_exact, "only use precomputed top-K lists");

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "score a test set");
  Common ev_c;
  add_common(ev, ev_c, true);
  std::string ev_matcher, ev_metrics, ev_out;
  ev->add_option("--matcher", ev_matcher)->required()->check(CLI::ExistingFile);
  ev->add_option("--metrics", ev_metrics, "e.g. map,mrr,p1,r10@1,r10@2,r10@5,r2@1");
  ev->add_option("--out", ev_out, "report JSON");

  // ablate
  auto* ab = app.add_subcommand("ablate", "run the four curriculum cells and print a comparison table");
  std::string ab_config, ab_seeds = "1,2,3,4,5", ab_out;
  ab->add_option("--config", ab_config)->required()->check(CLI::ExistingFile);
  ab->add_option("--seeds", ab_seeds, "comma-separated seeds")->capture_default_str();
  ab->add_option("--out", ab_out, "also write the table here");

  // run
  auto* run = app.add_subcommand("run", "run every stage, skipping those that are up to date");
  std::string run_config;
  run->add_option("--config", run_config)->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  set_log_sink([quiet](std::string_view level, std::string_view msg) {
    if (quiet && level != "warning") return;
    std::cerr << "[" << level << "] " << msg << '\n';
  });

  try {
    if (*gen) {
      const auto [train, test] = write_synthetic(generate_synthetic(syn), gen_out);
      log_info("wrote " + train.string() + " and " + test.string());
    } else if (*tr) {
      RunConfig cfg = resolve_config(tr_c);
      if (tr_steps) cfg.ranker.steps = *tr_steps;
      if (tr_batch) cfg.ranker.batch_size = *tr_batch;
      if (tr_dim) cfg.ranker.embed_dim = *tr_dim;
      if (tr_out_dim) cfg.ranker.out_dim = *tr_out_dim;
      if (tr_lr) cfg.ranker.lr = *tr_lr;
      const auto r = stage_train_ranker(cfg.data, cfg.ranker, tr_out, tr_trace);
      std::ostringstream msg;
      msg << "ranker: " << cfg.ranker.steps << " steps";
      if (!r.trained.loss_trace.empty()) msg << ", final loss " << r.trained.loss_trace.back();
      log_info(msg.str());
    } else if (*bi) {
      RunConfig cfg = resolve_config(bi_c);
      if (!bi_topk.empty()) {
        if (bi_topk == "auto") {
          cfg.topk.reset();
        } else {
          KvConfig kv;
          kv.set("topk", bi_topk);
          cfg.topk = kv.get_u64("topk", 0);
        }
      }
      if (bi_kt) cfg.matcher.k_final = *bi_kt;
      if (bi_threads) cfg.index_threads = *bi_threads;
      stage_build_index(cfg.data, bi_ranker, cfg.topk, cfg.matcher.k_final, cfg.seed, cfg.index_threads,
                        bi_out);
      log_info("index written to " + bi_out);
    } else if (*sch) {
      const fs::path index = sch_index;
      inspect_schedule(sch_d, sch_pcc0, sch_kt, sch_tmax, sch_T, sch_m, sch_stride,
                       sch_index.empty() ? nullptr : &index, sch_out);
    } else if (*dif) {
      inspect_difficulty(dif_index, dif_out);
    } else if (*trn) {
      RunConfig cfg = resolve_config(trn_c);
      if (!trn_ablation.empty()) cfg.matcher.flags = flags_for(parse_ablation(trn_ablation));
      if (trn_steps) cfg.matcher.total_steps = *trn_steps;
      if (trn_batch) cfg.matcher.batch_size = *trn_batch;
      if (trn_m) cfg.matcher.negatives = *trn_m;
      if (trn_lr) cfg.matcher.lr = *trn_lr;
      if (trn_pcc0) cfg.matcher.pcc0 = *trn_pcc0;
      if (trn_kt) cfg.matcher.k_final = *trn_kt;
      if (trn_T) cfg.matcher.warmup_steps = *trn_T;
      if (trn_dedup) cfg.matcher.dedup_negatives = true;
      if (trn_no_exact) cfg.matcher.exact_enabled = false;
      stage_train_matcher(cfg.data, trn_index, trn_ranker, cfg.matcher, trn_out, trn_trace);
      log_info("matcher written to " + trn_out);
    } else if (*ev) {
      RunConfig cfg = resolve_config(ev_c);
      if (cfg.data.test == fs::path("-")) throw Error("--test is required (or data.test in --config)");
      if (!ev_metrics.empty()) cfg.metrics = ev_metrics;
      const EvalReport rep = stage_evaluate(cfg.data, ev_matcher, cfg.metrics, ev_out);
      std::cout << report_to_json(rep, parse_metrics(cfg.metrics));
    } else if (*ab) {
      const RunConfig cfg = load_run_config(KvConfig::load(ab_config), fs::path(ab_config).parent_path());
      const auto res = run_ablation(cfg, parse_seeds(ab_seeds), [](const std::string& l) { log_info(l); });
      const std::string table = res.table(parse_metrics(cfg.metrics));
      std::cout << table;
      if (!ab_out.empty()) {
        std::ofstream out(ab_out);
        if (!out) throw Error("cannot write '" + ab_out + "'");
        out << table;
      }
    } else if (*run) {
      const RunConfig cfg = load_run_config(KvConfig::load(run_config), fs::path(run_config).parent_path());
      const auto res = run_pipeline(cfg);
      for (const auto& s : res.stages) std::cout << s.name << ": " << (s.skipped ? "skipped" : "done") << '\n';
      std::cout << "report: " << res.report.string() << '\n';
    }
  } catch (const StageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
