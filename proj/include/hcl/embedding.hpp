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

#include <span>
#include <vector>

#include "hcl/corpus.hpp"
#include "hcl/matrix.hpp"

namespace hcl {

// Mean of the embedding rows selected by tokens. Throws on empty input.
std::vector<double> mean_pool(const Matrix& table, std::span<const TokenId> tokens);

// Adds d(mean_pool)/d(table) contracted with upstream into grad_table.
void mean_pool_backward(Matrix& grad_table, std::span<const TokenId> tokens,
                        std::span<const double> upstream);

// x (1×rows) · w (rows×cols) as a vector of length cols.
std::vector<double> vec_mat(std::span<const double> x, const Matrix& w);

}  // namespace hcl
