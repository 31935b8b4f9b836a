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

#include "hcl/pipeline.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "hcl/binary_io.hpp"
#include "hcl/checkpoint.hpp"
#include "hcl/curriculum.hpp"
#include "hcl/difficulty.hpp"
#include "hcl/error.hpp"
#include "hcl/index.hpp"
#include "hcl/log.hpp"

namespace hcl {

namespace {

using nlohmann::ordered_json;

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

fs::path resolve(const fs::path& base, const std::string& p) {
  if (p.empty()) return {};
  fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

void RunConfig::apply_seed(std::uint64_t s) {
  seed = s;
  ranker.seed = s;
  matcher.seed = s;
}

std::vector<std::string> known_config_keys() {
  return {"run.seed",           "run.out_dir",           "run.ablation",
          "data.train",         "data.test",             "data.min_freq",
          "data.max_context_tokens", "data.max_response_tokens",
          "synthetic.pairs",    "synthetic.topics",      "synthetic.seed",
          "synthetic.test",     "synthetic.hard_fraction", "synthetic.noise_fraction",
          "synthetic.same_topic_negatives",
          "ranker.embed_dim",   "ranker.out_dim",        "ranker.batch",
          "ranker.steps",       "ranker.lr",
          "index.topk",         "index.threads",
          "curriculum.pcc0",    "curriculum.k_T",        "curriculum.T",
          "matcher.steps",      "matcher.batch",         "matcher.m",
          "matcher.lr",         "matcher.embed_dim",     "matcher.dedup_negatives",
          "matcher.exact",      "eval.metrics"};
}

RunConfig load_run_config(const KvConfig& kv, const fs::path& base_dir) {
  kv.require_known(known_config_keys());
  RunConfig cfg;
  cfg.out_dir = resolve(base_dir, kv.get("run.out_dir", "hcl_run"));
  cfg.ablation = parse_ablation(kv.get("run.ablation", "full"));

  cfg.data.train = resolve(base_dir, kv.get("data.train", ""));
  cfg.data.test = resolve(base_dir, kv.get("data.test", ""));
  cfg.data.min_freq = kv.get_u64("data.min_freq", 1);
  cfg.data.limits.max_context_tokens = kv.get_u64("data.max_context_tokens", 128);
  cfg.data.limits.max_response_tokens = kv.get_u64("data.max_response_tokens", 64);

  if (kv.get_u64("synthetic.pairs", 0) > 0) {
    SyntheticSpec s;
    s.num_pairs = kv.get_u64("synthetic.pairs", s.num_pairs);
    s.num_topics = kv.get_u64("synthetic.topics", s.num_topics);
    s.seed = kv.get_u64("synthetic.seed", s.seed);
    s.num_test = kv.get_u64("synthetic.test", s.num_test);
    s.hard_fraction = kv.get_double("synthetic.hard_fraction", s.hard_fraction);
    s.noise_fraction = kv.get_double("synthetic.noise_fraction", s.noise_fraction);
    s.same_topic_negatives = kv.get_u64("synthetic.same_topic_negatives", s.same_topic_negatives);
    cfg.synthetic = s;
    cfg.data.train = cfg.out_dir / "data" / "train.jsonl";
    cfg.data.test = cfg.out_dir / "data" / "test.jsonl";
  } else if (cfg.data.train.empty() || cfg.data.test.empty()) {
    throw Error("config: data.train and data.test are required unless synthetic.pairs is set");
  }

  cfg.ranker.embed_dim = kv.get_u64("ranker.embed_dim", cfg.ranker.embed_dim);
  cfg.ranker.out_dim = kv.get_u64("ranker.out_dim", cfg.ranker.out_dim);
  cfg.ranker.batch_size = kv.get_u64("ranker.batch", cfg.ranker.batch_size);
  cfg.ranker.steps = kv.get_u64("ranker.steps", cfg.ranker.steps);
  cfg.ranker.lr = kv.get_double("ranker.lr", cfg.ranker.lr);

  const std::string topk = kv.get("index.topk", "auto");
  if (topk != "auto") cfg.topk = kv.get_u64("index.topk", 0);
  cfg.index_threads = kv.get_u64("index.threads", 0);

  cfg.matcher.pcc0 = kv.get_double("curriculum.pcc0", cfg.matcher.pcc0);
  cfg.matcher.k_final = kv.get_double("curriculum.k_T", cfg.matcher.k_final);
  cfg.matcher.warmup_steps = kv.get_u64("curriculum.T", 0);
  cfg.matcher.total_steps = kv.get_u64("matcher.steps", cfg.matcher.total_steps);
  cfg.matcher.batch_size = kv.get_u64("matcher.batch", cfg.matcher.batch_size);
  cfg.matcher.negatives = kv.get_u64("matcher.m", cfg.matcher.negatives);
  cfg.matcher.lr = kv.get_double("matcher.lr", cfg.matcher.lr);
  cfg.matcher.embed_dim = kv.get_u64("matcher.embed_dim", cfg.matcher.embed_dim);
  cfg.matcher.dedup_negatives = kv.get_bool("matcher.dedup_negatives", false);
  cfg.matcher.exact_enabled = kv.get_bool("matcher.exact", true);
  cfg.matcher.flags = flags_for(cfg.ablation);

  cfg.metrics = kv.get("eval.metrics", kDefaultMetrics);
  parse_metrics(cfg.metrics);

  std::uint64_t seed = kv.get_u64("run.seed", 1);
  if (const char* env = std::getenv("HCL_SEED"); env && *env) {
    KvConfig e;
    e.set("HCL_SEED", env);
    seed = e.get_u64("HCL_SEED", seed);
  }
  cfg.apply_seed(seed);
  return cfg;
}

namespace {

std::string describe_data(const RunConfig& c) {
  std::ostringstream o;
  o << "min_freq=" << c.data.min_freq << ";ctx=" << c.data.limits.max_context_tokens
    << ";resp=" << c.data.limits.max_response_tokens;
  return o.str();
}

std::string describe_synthetic(const SyntheticSpec& s) {
  std::ostringstream o;
  o << "pairs=" << s.num_pairs << ";topics=" << s.num_topics << ";seed=" << s.seed
    << ";test=" << s.num_test << ";cands=" << s.candidates << ";same=" << s.same_topic_negatives
    << ";hard=" << fmt_double(s.hard_fraction) << ";noise=" << fmt_double(s.noise_fraction);
  return o.str();
}

std::string describe_ranker(const RankerConfig& r) {
  std::ostringstream o;
  o << "d=" << r.embed_dim << ";n=" << r.out_dim << ";b=" << r.batch_size << ";steps=" << r.steps
    << ";lr=" << fmt_double(r.lr) << ";seed=" << r.seed << ";init=" << fmt_double(r.embed_init_std);
  return o.str();
}

std::string describe_matcher(const TrainConfig& m) {
  std::ostringstream o;
  o << "steps=" << m.total_steps << ";b=" << m.batch_size << ";m=" << m.negatives
    << ";d=" << m.embed_dim << ";lr=" << fmt_double(m.lr) << ";seed=" << m.seed
    << ";pcc0=" << fmt_double(m.pcc0) << ";kT=" << fmt_double(m.k_final) << ";T=" << m.warmup_steps
    << ";cc=" << m.flags.corpus_level << ";ic=" << m.flags.instance_level
    << ";dedup=" << m.dedup_negatives << ";exact=" << m.exact_enabled;
  return o.str();
}

}  // namespace

std::string describe(const RunConfig& c) {
  std::ostringstream o;
  o << "data{" << describe_data(c) << "}";
  if (c.synthetic) o << "synthetic{" << describe_synthetic(*c.synthetic) << "}";
  o << "ranker{" << describe_ranker(c.ranker) << "}";
  o << "index{topk=" << (c.topk ? std::to_string(*c.topk) : "auto") << "}";
  o << "matcher{" << describe_matcher(c.matcher) << "}";
  o << "eval{" << c.metrics << "}";
  return o.str();
}

Corpus load_training_corpus(const DataConfig& data) {
  return load_corpus(data.train, data.min_freq, data.limits);
}

void write_ranker_trace(const fs::path& path, const std::vector<double>& losses,
                        std::uint64_t seed) {
  auto out = open_out(path);
  out << "# seed=" << seed << '\n';
  out << "step,loss\n";
  for (std::size_t s = 0; s < losses.size(); ++s) out << s << ',' << fmt_double(losses[s]) << '\n';
}

void write_matcher_trace(const fs::path& path, const std::vector<TraceRow>& trace,
                         std::uint64_t seed) {
  auto out = open_out(path);
  out << "# seed=" << seed << '\n';
  out << "step,loss,p_cc,p_ic,n,eligible_count\n";
  for (const auto& r : trace) {
    out << r.step << ',' << fmt_double(r.loss) << ',' << fmt_double(r.pcc) << ','
        << fmt_double(r.pic) << ',' << r.space << ',' << r.eligible_count << '\n';
  }
}

RankerStageResult stage_train_ranker(const DataConfig& data, const RankerConfig& cfg,
                                     const fs::path& out_checkpoint, const fs::path& out_trace) {
  const Corpus corpus = load_training_corpus(data);
  auto trained = train_ranker(corpus, cfg);
  const CheckpointMeta meta{cfg.seed, corpus.vocab().checksum(), corpus.vocab().size()};
  save_checkpoint(out_checkpoint, trained.model.params(), meta);
  if (!out_trace.empty()) write_ranker_trace(out_trace, trained.loss_trace, cfg.seed);
  return {std::move(trained), meta.vocab_checksum};
}

void stage_build_index(const DataConfig& data, const fs::path& ranker_checkpoint,
                       std::optional<std::size_t> topk, double k_final, std::uint64_t seed,
                       std::size_t threads, const fs::path& out_index) {
  const Corpus corpus = load_training_corpus(data);
  auto ckpt = load_checkpoint(ranker_checkpoint);
  const DualEncoder ranker(std::move(ckpt.store));
  if (ranker.vocab_size() != corpus.vocab().size()) {
    throw ChecksumError("build_index: ranker vocabulary size " + std::to_string(ranker.vocab_size()) +
                        " differs from corpus vocabulary size " + std::to_string(corpus.vocab().size()));
  }
  IndexBuildOptions opts;
  opts.topk = topk.value_or(default_topk(k_final, corpus.size()));
  opts.ranker_checksum = file_checksum(ranker_checkpoint);
  opts.ranker_vocab_checksum = ckpt.meta.vocab_checksum;
  opts.seed = seed;
  opts.threads = threads;
  OfflineIndex::build(corpus, ranker, opts).save(out_index);
}

void stage_train_matcher(const DataConfig& data, const fs::path& index_path,
                         const fs::path& ranker_checkpoint, const TrainConfig& cfg,
                         const fs::path& out_checkpoint, const fs::path& out_trace) {
  const Corpus corpus = load_training_corpus(data);
  const OfflineIndex index = OfflineIndex::load(index_path);
  if (index.size() != corpus.size()) {
    throw Error("train: index has " + std::to_string(index.size()) + " rows but corpus has " +
                std::to_string(corpus.size()) + " pairs");
  }
  if (!ranker_checkpoint.empty()) {
    const std::uint64_t sum = file_checksum(ranker_checkpoint);
    if (sum != index.ranker_checksum()) {
      throw ChecksumError("train: index was built from ranker " + hex64(index.ranker_checksum()) +
                          " but " + ranker_checkpoint.string() + " has checksum " + hex64(sum));
    }
  }
  const DifficultyTable table = compute_corpus_difficulty(index);
  auto result = train_matcher(corpus, index, table, cfg);
  save_checkpoint(out_checkpoint, result.model.params(),
                  {cfg.seed, corpus.vocab().checksum(), corpus.vocab().size()});
  if (!out_trace.empty()) write_matcher_trace(out_trace, result.trace, cfg.seed);
}

EvalReport stage_evaluate(const DataConfig& data, const fs::path& matcher_checkpoint,
                          const std::string& metrics, const fs::path& out_report) {
  const MetricSelection sel = parse_metrics(metrics);
  const Vocabulary vocab = build_vocabulary(data.train, data.min_freq);
  auto ckpt = load_checkpoint(matcher_checkpoint);
  if (ckpt.meta.vocab_checksum != vocab.checksum()) {
    throw ChecksumError("evaluate: matcher vocabulary checksum " + hex64(ckpt.meta.vocab_checksum) +
                        " does not match vocabulary of " + data.train.string());
  }
  const std::uint64_t seed = ckpt.meta.seed;
  const BilinearMatcher matcher(std::move(ckpt.store));
  const auto instances = load_test(data.test, vocab, data.limits);
  const EvalReport report = evaluate(
      [&](std::span<const TokenId> c, std::span<const TokenId> r) { return matcher.score(c, r); },
      instances, sel.recalls, data.limits.max_context_tokens);
  if (!out_report.empty()) {
    auto out = open_out(out_report);
    out << report_to_json(report, sel, seed);
  }
  return report;
}

void inspect_schedule(std::size_t corpus_size, double pcc0, double k_final, std::uint64_t t_max,
                      std::uint64_t warmup, std::size_t m, std::uint64_t stride,
                      const fs::path* index_path, const fs::path& out_csv) {
  const auto schedule = CurriculumSchedule::make(corpus_size, pcc0, k_final, t_max, warmup);
  std::optional<DifficultyTable> table;
  if (index_path) {
    const OfflineIndex index = OfflineIndex::load(*index_path);
    if (index.size() != corpus_size) throw Error("inspect schedule: --d-size differs from index size");
    table = compute_corpus_difficulty(index);
  }
  if (stride == 0) stride = std::max<std::uint64_t>(1, t_max / 200);
  auto out = open_out(out_csv);
  out << "t,p_cc,p_ic,n,eligible_count\n";
  for (std::uint64_t t = 0;; t += stride) {
    if (t > t_max) t = t_max;
    const double pcc = pacing_cc(schedule, t);
    out << t << ',' << fmt_double(pcc) << ',' << fmt_double(pacing_ic(schedule, t)) << ','
        << sampling_space_size(schedule, t, corpus_size, m) << ',';
    if (table) out << table->eligible_count(pcc);
    out << '\n';
    if (t == t_max) break;
  }
}

void inspect_difficulty(const fs::path& index_path, const fs::path& out_csv) {
  const OfflineIndex index = OfflineIndex::load(index_path);
  const DifficultyTable table = compute_corpus_difficulty(index);
  auto out = open_out(out_csv);
  out << "# seed=" << index.seed() << '\n';
  out << "pair_id,raw_score,d_cc\n";
  for (std::size_t i = 0; i < table.size(); ++i) {
    out << i << ',' << fmt_double(table.raw_score[i]) << ',' << fmt_double(table.dcc[i]) << '\n';
  }
}

// ---- pipeline ----

namespace {

class Manifest {
 public:
  explicit Manifest(fs::path path) : path_(std::move(path)) {
    if (fs::exists(path_)) {
      std::ifstream in(path_);
      try {
        doc_ = ordered_json::parse(in);
      } catch (const ordered_json::parse_error& e) {
        throw FormatError(path_.string() + ": unreadable manifest: " + e.what());
      }
    }
    if (!doc_.is_object()) doc_ = ordered_json::object();
    if (!doc_.contains("stages")) doc_["stages"] = ordered_json::object();
  }

  const ordered_json* stage(const std::string& name) const {
    auto& s = doc_["stages"];
    return s.contains(name) ? &s[name] : nullptr;
  }

  void record(const std::string& name, const std::string& fingerprint,
              const std::vector<fs::path>& inputs, const std::vector<fs::path>& outputs) {
    ordered_json e;
    e["fingerprint"] = fingerprint;
    ordered_json in = ordered_json::object();
    for (const auto& p : inputs) in[p.string()] = hex64(file_checksum(p));
    ordered_json out = ordered_json::object();
    for (const auto& p : outputs) out[p.string()] = hex64(file_checksum(p));
    e["inputs"] = in;
    e["outputs"] = out;
    doc_["stages"][name] = e;
  }

  void set_header(const RunConfig& cfg) {
    doc_["version"] = HCL_VERSION;
    doc_["seed"] = cfg.seed;
    doc_["config"] = describe(cfg);
  }

  void save() const {
    auto out = open_out(path_);
    out << doc_.dump(2) << '\n';
  }

 private:
  fs::path path_;
  ordered_json doc_;
};

struct Stage {
  std::string name;
  std::string settings;
  std::vector<fs::path> inputs;
  std::vector<fs::path> outputs;
  std::function<void()> run;
};

bool can_skip(const Manifest& manifest, const Stage& st, const std::string& fingerprint) {
  const ordered_json* rec = manifest.stage(st.name);
  if (!rec || rec->value("fingerprint", "") != fingerprint) return false;
  for (const auto& p : st.outputs) {
    if (!fs::exists(p)) return false;
  }
  const auto& outs = (*rec)["outputs"];
  for (const auto& p : st.outputs) {
    if (!outs.contains(p.string())) return false;
    const std::string want = outs[p.string()].get<std::string>();
    const std::string have = hex64(file_checksum(p));
    if (want != have) {
      throw ChecksumError("checksum mismatch for " + p.string() + ": manifest records " + want +
                          ", file has " + have);
    }
  }
  return true;
}

std::string fingerprint_of(const Stage& st) {
  std::uint64_t h = fnv1a64(st.name);
  h = fnv1a64(st.settings, h);
  for (const auto& p : st.inputs) {
    h = fnv1a64(p.string(), h);
    h = fnv1a64(hex64(file_checksum(p)), h);
  }
  return hex64(h);
}

}  // namespace

PipelineResult run_pipeline(const RunConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  PipelineResult result;
  result.manifest = cfg.out_dir / "manifest.json";
  result.report = cfg.out_dir / "report.json";
  Manifest manifest(result.manifest);
  manifest.set_header(cfg);

  const fs::path ranker_ckpt = cfg.out_dir / "ranker.hclp";
  const fs::path ranker_trace = cfg.out_dir / "ranker_trace.csv";
  const fs::path index_path = cfg.out_dir / "index.hcli";
  const fs::path matcher_ckpt = cfg.out_dir / "matcher.hclp";
  const fs::path matcher_trace = cfg.out_dir / "trace.csv";

  std::vector<Stage> stages;
  if (cfg.synthetic) {
    stages.push_back({"gen-data", describe_synthetic(*cfg.synthetic), {},
                      {cfg.data.train, cfg.data.test}, [&] {
                        write_synthetic(generate_synthetic(*cfg.synthetic), cfg.data.train.parent_path());
                      }});
  }
  stages.push_back({"train-ranker", describe_data(cfg) + describe_ranker(cfg.ranker),
                    {cfg.data.train}, {ranker_ckpt, ranker_trace},
                    [&] { stage_train_ranker(cfg.data, cfg.ranker, ranker_ckpt, ranker_trace); }});
  stages.push_back({"build-index",
                    describe_data(cfg) + ";topk=" + (cfg.topk ? std::to_string(*cfg.topk) : "auto") +
                        ";kT=" + fmt_double(cfg.matcher.k_final) + ";seed=" + std::to_string(cfg.seed),
                    {cfg.data.train, ranker_ckpt}, {index_path}, [&] {
                      stage_build_index(cfg.data, ranker_ckpt, cfg.topk, cfg.matcher.k_final, cfg.seed,
                                        cfg.index_threads, index_path);
                    }});
  stages.push_back({"train", describe_data(cfg) + describe_matcher(cfg.matcher),
                    {cfg.data.train, index_path, ranker_ckpt}, {matcher_ckpt, matcher_trace}, [&] {
                      stage_train_matcher(cfg.data, index_path, ranker_ckpt, cfg.matcher, matcher_ckpt,
                                          matcher_trace);
                    }});
  stages.push_back({"evaluate", describe_data(cfg) + cfg.metrics,
                    {cfg.data.train, cfg.data.test, matcher_ckpt}, {result.report},
                    [&] { stage_evaluate(cfg.data, matcher_ckpt, cfg.metrics, result.report); }});

  for (const auto& st : stages) {
    try {
      for (const auto& p : st.inputs) {
        if (!fs::exists(p)) throw Error("missing input " + p.string());
      }
      const std::string fp = fingerprint_of(st);
      if (can_skip(manifest, st, fp)) {
        log_info("stage " + st.name + ": up to date, skipped");
        result.stages.push_back({st.name, true});
        continue;
      }
      log_info("stage " + st.name + ": running");
      st.run();
      manifest.record(st.name, fp, st.inputs, st.outputs);
      manifest.save();
      result.stages.push_back({st.name, false});
    } catch (const StageError&) {
      throw;
    } catch (const std::exception& e) {
      throw StageError(st.name, e.what());
    }
  }
  manifest.save();
  return result;
}

// ---- ablation ----

double AblationResult::mean(Ablation a, const std::function<double(const EvalReport&)>& metric) const {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& c : cells) {
    if (c.ablation == a) {
      sum += metric(c.report);
      ++n;
    }
  }
  if (n == 0) throw Error("ablation: no runs for cell " + std::string(ablation_name(a)));
  return sum / static_cast<double>(n);
}

std::string AblationResult::table(const MetricSelection& sel) const {
  std::ostringstream o;
  o << std::left << std::setw(8) << "cell" << std::setw(5) << "CC" << std::setw(5) << "IC";
  if (sel.map) o << std::setw(10) << "MAP";
  if (sel.mrr) o << std::setw(10) << "MRR";
  if (sel.p1) o << std::setw(10) << "P@1";
  for (const auto& [n, k] : sel.recalls) {
    o << std::setw(10) << ("R" + std::to_string(n) + "@" + std::to_string(k));
  }
  o << '\n';
  for (Ablation a : {Ablation::kNone, Ablation::kCorpusOnly, Ablation::kInstanceOnly, Ablation::kFull}) {
    const auto f = flags_for(a);
    o << std::setw(8) << ablation_name(a) << std::setw(5) << (f.corpus_level ? "yes" : "no")
      << std::setw(5) << (f.instance_level ? "yes" : "no") << std::fixed << std::setprecision(4);
    if (sel.map) o << std::setw(10) << mean(a, [](const EvalReport& r) { return r.map; });
    if (sel.mrr) o << std::setw(10) << mean(a, [](const EvalReport& r) { return r.mrr; });
    if (sel.p1) o << std::setw(10) << mean(a, [](const EvalReport& r) { return r.p_at_1; });
    for (const auto& nk : sel.recalls) {
      o << std::setw(10) << mean(a, [&](const EvalReport& r) { return r.recall_at.at(nk); });
    }
    o << '\n';
  }
  return o.str();
}

AblationResult run_ablation(const RunConfig& base, const std::vector<std::uint64_t>& seeds,
                            const std::function<void(const std::string&)>& progress) {
  DataConfig data = base.data;
  if (base.synthetic) {
    write_synthetic(generate_synthetic(*base.synthetic), base.out_dir / "data");
    data.train = base.out_dir / "data" / "train.jsonl";
    data.test = base.out_dir / "data" / "test.jsonl";
  }
  const MetricSelection sel = parse_metrics(base.metrics);
  const Corpus corpus = load_training_corpus(data);
  const auto instances = load_test(data.test, corpus.vocab(), data.limits);

  AblationResult out;
  for (std::uint64_t seed : seeds) {
    RunConfig cfg = base;
    cfg.apply_seed(seed);
    const auto ranker = train_ranker(corpus, cfg.ranker);
    IndexBuildOptions opts;
    opts.topk = cfg.topk.value_or(default_topk(cfg.matcher.k_final, corpus.size()));
    opts.seed = seed;
    opts.threads = cfg.index_threads;
    const OfflineIndex index = OfflineIndex::build(corpus, ranker.model, opts);
    const DifficultyTable table = compute_corpus_difficulty(index);
    for (Ablation a : {Ablation::kNone, Ablation::kCorpusOnly, Ablation::kInstanceOnly, Ablation::kFull}) {
      TrainConfig tc = cfg.matcher;
      tc.flags = flags_for(a);
      const auto trained = train_matcher(corpus, index, table, tc);
      const auto report = evaluate(
          [&](std::span<const TokenId> c, std::span<const TokenId> r) { return trained.model.score(c, r); },
          instances, sel.recalls, data.limits.max_context_tokens);
      out.cells.push_back({a, seed, report});
      if (progress) {
        std::ostringstream line;
        line << "seed " << seed << " cell " << ablation_name(a) << ": MAP " << std::fixed
             << std::setprecision(4) << report.map << " MRR " << report.mrr << " P@1 " << report.p_at_1;
        progress(line.str());
      }
    }
  }
  return out;
}

}  // namespace hcl
