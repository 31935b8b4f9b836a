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

#include "hcl/curriculum.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hcl/error.hpp"
#include "hcl/log.hpp"

namespace hcl {

CurriculumSchedule CurriculumSchedule::make(std::size_t corpus_size, double pcc0, double k_final,
                                            std::uint64_t total_steps,
                                            std::uint64_t warmup_steps) {
  if (corpus_size < 2) throw Error("curriculum: corpus needs at least 2 pairs");
  CurriculumSchedule s;
  s.pcc0 = pcc0;
  s.k_final = k_final;
  s.k_initial = std::log10(static_cast<double>(corpus_size));
  s.total_steps = total_steps;
  s.warmup_steps = warmup_steps ? warmup_steps : total_steps / 2;
  s.validate();
  return s;
}

void CurriculumSchedule::validate() const {
  if (!(pcc0 > 0.0 && pcc0 <= 1.0)) throw Error("curriculum: pcc0 must lie in (0, 1]");
  if (k_final > k_initial) {
    std::ostringstream msg;
    msg << "curriculum: k_T=" << k_final << " exceeds k_0=log10|D|=" << k_initial;
    throw Error(msg.str());
  }
  if (warmup_steps > total_steps) throw Error("curriculum: T exceeds total steps");
}

double pacing_cc(const CurriculumSchedule& s, std::uint64_t t) {
  if (t >= s.warmup_steps) return 1.0;
  return (1.0 - s.pcc0) / static_cast<double>(s.warmup_steps) * static_cast<double>(t) + s.pcc0;
}

double pacing_ic(const CurriculumSchedule& s, std::uint64_t t) {
  if (t >= s.warmup_steps) return s.k_final;
  return (s.k_initial - s.k_final) / static_cast<double>(s.warmup_steps) *
             static_cast<double>(s.warmup_steps - t) +
         s.k_final;
}

std::size_t sampling_space_size(const CurriculumSchedule& s, std::uint64_t t,
                                std::size_t corpus_size, std::size_t m) {
  if (corpus_size < 2) throw Error("sampling_space_size: corpus needs at least 2 pairs");
  const double hi = static_cast<double>(corpus_size - 1);
  const double n = std::round(std::pow(10.0, pacing_ic(s, t)));
  return static_cast<std::size_t>(std::clamp(n, static_cast<double>(std::min(m, corpus_size - 1)), hi));
}

TrainingBatchSpec next_batch(const CurriculumSchedule& schedule, std::uint64_t t,
                             const DifficultyTable& table, const OfflineIndex& index,
                             const BatchRequest& request, Rng& rng) {
  const std::size_t d = index.size();
  if (table.size() != d) throw Error("next_batch: difficulty table does not match index size");
  if (request.batch_size == 0) throw Error("next_batch: batch size must be positive");
  if (request.negatives == 0 || request.negatives > d - 1) {
    throw Error("next_batch: number of negatives must lie in [1, |D|-1]");
  }

  TrainingBatchSpec spec;
  spec.step = t;
  spec.pcc = request.flags.corpus_level ? pacing_cc(schedule, t) : 1.0;
  spec.pic = request.flags.instance_level ? pacing_ic(schedule, t) : std::log10(static_cast<double>(d));
  spec.space = request.flags.instance_level
                   ? sampling_space_size(schedule, t, d, request.negatives)
                   : d - 1;

  const auto eligible = table.eligible(spec.pcc);
  spec.eligible_count = eligible.size();
  if (eligible.empty()) {
    std::ostringstream msg;
    msg << "next_batch: no pair has d_cc <= " << spec.pcc << " at step " << t
        << "; increase pcc0 (smallest d_cc is " << table.sorted_dcc.front() << ")";
    throw Error(msg.str());
  }

  spec.pair_ids.reserve(request.batch_size);
  if (eligible.size() >= request.batch_size) {
    for (std::uint64_t pos : rng.sample_distinct(eligible.size(), request.batch_size)) {
      spec.pair_ids.push_back(eligible[pos]);
    }
  } else {
    spec.drew_with_replacement = true;
    log_warning("next_batch: eligible set (" + std::to_string(eligible.size()) +
                ") smaller than batch size at step " + std::to_string(t) +
                "; drawing with replacement");
    for (std::size_t k = 0; k < request.batch_size; ++k) {
      spec.pair_ids.push_back(eligible[rng.uniform_index(eligible.size())]);
    }
  }

  spec.negatives.reserve(spec.pair_ids.size());
  for (std::uint32_t i : spec.pair_ids) {
    spec.negatives.push_back(index.sample_top_n(i, spec.space, request.negatives, rng, request.sample));
  }
  return spec;
}

}  // namespace hcl
