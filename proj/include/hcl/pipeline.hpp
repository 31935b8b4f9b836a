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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hcl/config.hpp"
#include "hcl/corpus.hpp"
#include "hcl/evalmetrics.hpp"
#include "hcl/matcher.hpp"
#include "hcl/ranker.hpp"
#include "hcl/synthetic.hpp"

namespace hcl {

namespace fs = std::filesystem;

struct DataConfig {
  fs::path train;
  fs::path test;
  std::size_t min_freq = 1;
  CorpusLimits limits{};
};

// Every tunable of a full run. Curriculum defaults: pcc0 = 0.3, k_T = 3,
// m = 5, T = steps / 2.
struct RunConfig {
  DataConfig data;
  std::optional<SyntheticSpec> synthetic;  // generate data into out_dir/data
  RankerConfig ranker;
  std::optional<std::size_t> topk;  // unset → default_topk(k_T, |D|)
  std::size_t index_threads = 0;
  TrainConfig matcher;
  Ablation ablation = Ablation::kFull;
  std::string metrics = kDefaultMetrics;
  std::uint64_t seed = 1;
  fs::path out_dir = "hcl_run";

  // Applies `seed` to every stage.
  void apply_seed(std::uint64_t s);
};

// Reads a RunConfig from a key=value file. HCL_SEED in the environment
// overrides run.seed. Relative paths resolve against base_dir.
RunConfig load_run_config(const KvConfig& kv, const fs::path& base_dir = {});
std::vector<std::string> known_config_keys();
// Serialized form of every setting that affects outputs.
std::string describe(const RunConfig& cfg);

// ---- individual stages (shared by the CLI subcommands and the pipeline) ----

Corpus load_training_corpus(const DataConfig& data);

// Trace CSVs start with a "# seed=N" line, then the column header.
void write_ranker_trace(const fs::path& path, const std::vector<double>& losses,
                        std::uint64_t seed);
void write_matcher_trace(const fs::path& path, const std::vector<TraceRow>& trace,
                         std::uint64_t seed);

struct RankerStageResult {
  RankerTrainResult trained;
  std::uint64_t vocab_checksum;
};
RankerStageResult stage_train_ranker(const DataConfig& data, const RankerConfig& cfg,
                                     const fs::path& out_checkpoint,
                                     const fs::path& out_trace = {});

void stage_build_index(const DataConfig& data, const fs::path& ranker_checkpoint,
                       std::optional<std::size_t> topk, double k_final, std::uint64_t seed,
                       std::size_t threads, const fs::path& out_index);

void stage_train_matcher(const DataConfig& data, const fs::path& index_path,
                         const fs::path& ranker_checkpoint, const TrainConfig& cfg,
                         const fs::path& out_checkpoint, const fs::path& out_trace = {});

EvalReport stage_evaluate(const DataConfig& data, const fs::path& matcher_checkpoint,
                          const std::string& metrics, const fs::path& out_report);

// (t, p_cc, p_ic, n, eligible_count) rows every `stride` steps up to t_max.
// eligible_count needs an index; without one the column is left empty.
void inspect_schedule(std::size_t corpus_size, double pcc0, double k_final, std::uint64_t t_max,
                      std::uint64_t warmup, std::size_t m, std::uint64_t stride,
                      const fs::path* index_path, const fs::path& out_csv);
// (pair_id, raw_score, d_cc) rows.
void inspect_difficulty(const fs::path& index_path, const fs::path& out_csv);

// ---- whole-pipeline orchestration ----

struct StageOutcome {
  std::string name;
  bool skipped = false;
};

struct PipelineResult {
  std::vector<StageOutcome> stages;
  fs::path manifest;
  fs::path report;
};

// Thrown with the failing stage's name.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& cause)
      : std::runtime_error("stage '" + stage + "' failed: " + cause), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

// Runs gen-data (when configured) → train-ranker → build-index → train →
// evaluate. A stage is skipped when manifest.json records the same input
// fingerprint and every recorded output still matches its checksum; an
// output whose checksum no longer matches halts the run.
PipelineResult run_pipeline(const RunConfig& cfg);

// ---- ablation across the four curriculum cells ----

struct AblationCell {
  Ablation ablation;
  std::uint64_t seed;
  EvalReport report;
};

struct AblationResult {
  std::vector<AblationCell> cells;
  // Mean of the metric over seeds for one cell.
  double mean(Ablation a, const std::function<double(const EvalReport&)>& metric) const;
  std::string table(const MetricSelection& sel) const;
};

// For each seed: train the ranker, build the index, then train and evaluate
// the matcher once per cell. `progress` receives one line per finished cell.
AblationResult run_ablation(const RunConfig& base, const std::vector<std::uint64_t>& seeds,
                            const std::function<void(const std::string&)>& progress = {});

}  // namespace hcl
