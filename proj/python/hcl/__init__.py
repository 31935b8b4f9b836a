# Copyright 2026 The HCL Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Hierarchical curriculum learning for response selection."""

from ._hcl import (
    CurriculumSchedule,
    DifficultyTable,
    EvalReport,
    OfflineIndex,
    __version__,
    corpus_difficulty_from_scores,
    evaluate_scored,
    generate_synthetic,
    hinge_loss_value,
    pacing_cc,
    pacing_ic,
    rank_candidates,
    run_ablation,
    run_pipeline,
    sampling_space_size,
    softmax_nll,
)

__all__ = [
    "CurriculumSchedule",
    "DifficultyTable",
    "EvalReport",
    "OfflineIndex",
    "__version__",
    "corpus_difficulty_from_scores",
    "evaluate_scored",
    "generate_synthetic",
    "hinge_loss_value",
    "pacing_cc",
    "pacing_ic",
    "rank_candidates",
    "run_ablation",
    "run_pipeline",
    "sampling_space_size",
    "softmax_nll",
]
