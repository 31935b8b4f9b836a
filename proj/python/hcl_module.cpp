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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "hcl/curriculum.hpp"
#include "hcl/difficulty.hpp"
#include "hcl/error.hpp"
#include "hcl/evalmetrics.hpp"
#include "hcl/index.hpp"
#include "hcl/matcher.hpp"
#include "hcl/pipeline.hpp"
#include "hcl/ranker.hpp"
#include "hcl/synthetic.hpp"

namespace py = pybind11;
using namespace hcl;

namespace {

Matrix to_matrix(const std::vector<std::vector<double>>& rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r ? rows[0].size() : 0;
  std::vector<double> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw ShapeError("ragged matrix");
    data.insert(data.end(), row.begin(), row.end());
  }
  return Matrix(r, c, std::move(data));
}

py::dict report_dict(const EvalReport& r) {
  py::dict d;
  d["map"] = r.map;
  d["mrr"] = r.mrr;
  d["p1"] = r.p_at_1;
  for (const auto& [nk, v] : r.recall_at) {
    d[py::str("r" + std::to_string(nk.first) + "@" + std::to_string(nk.second))] = v;
  }
  d["num_instances"] = r.num_instances;
  return d;
}

RunConfig config_from(const std::string& path) {
  return load_run_config(KvConfig::load(path), fs::path(path).parent_path());
}

}  // namespace

PYBIND11_MODULE(_hcl, m) {
  m.doc() = "Hierarchical curriculum learning for response selection";
  m.attr("__version__") = HCL_VERSION;

  py::register_exception<ChecksumError>(m, "ChecksumError");
  py::register_exception<Error>(m, "HclError", PyExc_ValueError);

  py::class_<CurriculumSchedule>(m, "CurriculumSchedule")
      .def(py::init([](std::size_t d, double pcc0, double k_final, std::uint64_t total,
                       std::uint64_t warmup) {
             return CurriculumSchedule::make(d, pcc0, k_final, total, warmup);
           }),
           py::arg("corpus_size"), py::arg("pcc0") = 0.3, py::arg("k_final") = 3.0,
           py::arg("total_steps"), py::arg("warmup_steps") = 0)
      .def_readonly("pcc0", &CurriculumSchedule::pcc0)
      .def_readonly("k_final", &CurriculumSchedule::k_final)
      .def_readonly("k_initial", &CurriculumSchedule::k_initial)
      .def_readonly("warmup_steps", &CurriculumSchedule::warmup_steps)
      .def_readonly("total_steps", &CurriculumSchedule::total_steps);

  m.def("pacing_cc", &pacing_cc, py::arg("schedule"), py::arg("t"));
  m.def("pacing_ic", &pacing_ic, py::arg("schedule"), py::arg("t"));
  m.def("sampling_space_size", &sampling_space_size, py::arg("schedule"), py::arg("t"),
        py::arg("corpus_size"), py::arg("m"));

  py::class_<DifficultyTable>(m, "DifficultyTable")
      .def_readonly("raw_score", &DifficultyTable::raw_score)
      .def_readonly("dcc", &DifficultyTable::dcc)
      .def_readonly("order", &DifficultyTable::order)
      .def_readonly("g_max", &DifficultyTable::g_max)
      .def_readonly("min_max_fallback", &DifficultyTable::min_max_fallback)
      .def("eligible_count", &DifficultyTable::eligible_count, py::arg("threshold"))
      .def("eligible",
           [](const DifficultyTable& t, double th) {
             const auto e = t.eligible(th);
             return std::vector<std::uint32_t>(e.begin(), e.end());
           },
           py::arg("threshold"));
  m.def("corpus_difficulty_from_scores",
        [](const std::vector<double>& raw) { return corpus_difficulty_from_scores(raw); },
        py::arg("raw_scores"));

  py::class_<OfflineIndex>(m, "OfflineIndex")
      .def(py::init([](const std::vector<std::vector<double>>& c,
                       const std::vector<std::vector<double>>& r, std::size_t topk,
                       std::uint64_t seed) { return OfflineIndex(to_matrix(c), to_matrix(r), topk, 0, seed); }),
           py::arg("contexts"), py::arg("responses"), py::arg("topk"), py::arg("seed") = 0)
      .def_static("load", &OfflineIndex::load, py::arg("path"))
      .def("save", &OfflineIndex::save, py::arg("path"))
      .def_property_readonly("size", &OfflineIndex::size)
      .def_property_readonly("topk", &OfflineIndex::topk)
      .def_property_readonly("seed", &OfflineIndex::seed)
      .def("score", &OfflineIndex::score, py::arg("i"), py::arg("j"))
      .def("rank_of", &OfflineIndex::rank_of, py::arg("i"), py::arg("j"))
      .def("top_n", &OfflineIndex::top_n, py::arg("i"), py::arg("n"), py::arg("exact_enabled") = true)
      .def("topk_list",
           [](const OfflineIndex& idx, std::size_t i) {
             const auto l = idx.topk_list(i);
             return std::vector<std::uint32_t>(l.begin(), l.end());
           },
           py::arg("i"))
      .def("difficulty", [](const OfflineIndex& idx) { return compute_corpus_difficulty(idx); });

  m.def("softmax_nll",
        [](const std::vector<std::vector<double>>& s) { return diagonal_softmax_nll(to_matrix(s), nullptr); },
        py::arg("scores"), "Mean in-batch negative log-likelihood of the diagonal.");
  m.def("hinge_loss_value",
        [](double pos, const std::vector<double>& neg) { return hinge_loss_value(pos, neg); },
        py::arg("positive"), py::arg("negatives"));

  m.def("rank_candidates",
        [](const std::vector<double>& s) { return rank_candidates(s); }, py::arg("scores"));

  py::class_<EvalReport>(m, "EvalReport")
      .def_readonly("map", &EvalReport::map)
      .def_readonly("mrr", &EvalReport::mrr)
      .def_readonly("p1", &EvalReport::p_at_1)
      .def_readonly("num_instances", &EvalReport::num_instances)
      .def("recall", [](const EvalReport& r, std::size_t n, std::size_t k) { return r.recall_at.at({n, k}); },
           py::arg("n"), py::arg("k"))
      .def("as_dict", &report_dict);
  m.def("evaluate_scored",
        [](const std::vector<std::vector<double>>& scores, const std::vector<std::vector<int>>& labels,
           const std::string& metrics) {
          if (scores.size() != labels.size()) throw ShapeError("scores and labels differ in length");
          std::vector<ScoredInstance> inst(scores.size());
          for (std::size_t q = 0; q < scores.size(); ++q) inst[q] = {scores[q], labels[q]};
          const auto sel = parse_metrics(metrics);
          return evaluate_scored(inst, sel.recalls);
        },
        py::arg("scores"), py::arg("labels"), py::arg("metrics") = std::string(kDefaultMetrics));

  m.def("generate_synthetic",
        [](const fs::path& out_dir, std::size_t pairs, std::size_t topics, std::uint64_t seed) {
          SyntheticSpec s;
          s.num_pairs = pairs;
          s.num_topics = topics;
          s.seed = seed;
          const auto [train, test] = write_synthetic(generate_synthetic(s), out_dir);
          return py::make_tuple(train, test);
        },
        py::arg("out_dir"), py::arg("pairs") = 5000, py::arg("topics") = 8, py::arg("seed") = 7);

  m.def("run_pipeline",
        [](const std::string& config) {
          RunConfig cfg = config_from(config);
          PipelineResult res;
          {
            py::gil_scoped_release release;
            res = run_pipeline(cfg);
          }
          py::dict stages;
          for (const auto& s : res.stages) stages[py::str(s.name)] = s.skipped ? "skipped" : "done";
          py::dict out;
          out["stages"] = stages;
          out["manifest"] = res.manifest;
          out["report"] = res.report;
          return out;
        },
        py::arg("config"), "Run every stage described by a key=value config file.");
  m.def("run_ablation",
        [](const std::string& config, const std::vector<std::uint64_t>& seeds) {
          const RunConfig cfg = config_from(config);
          AblationResult res;
          {
            py::gil_scoped_release release;
            res = run_ablation(cfg, seeds);
          }
          py::dict out;
          for (Ablation a : {Ablation::kNone, Ablation::kCorpusOnly, Ablation::kInstanceOnly, Ablation::kFull}) {
            py::list reps;
            for (const auto& c : res.cells) {
              if (c.ablation == a) reps.append(report_dict(c.report));
            }
            out[py::str(std::string(ablation_name(a)))] = reps;
          }
          return out;
        },
        py::arg("config"), py::arg("seeds"));
}
