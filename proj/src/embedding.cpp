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

#include "hcl/embedding.hpp"

#include "hcl/error.hpp"

namespace hcl {

std::vector<double> mean_pool(const Matrix& table, std::span<const TokenId> tokens) {
  if (tokens.empty()) throw Error("mean_pool: empty token list");
  std::vector<double> out(table.cols(), 0.0);
  for (TokenId t : tokens) {
    if (t >= table.rows()) throw Error("mean_pool: token id " + std::to_string(t) + " out of range");
    axpy(1.0, table.row(t), out);
  }
  const double inv = 1.0 / static_cast<double>(tokens.size());
  for (double& v : out) v *= inv;
  return out;
}

void mean_pool_backward(Matrix& grad_table, std::span<const TokenId> tokens,
                        std::span<const double> upstream) {
  const double inv = 1.0 / static_cast<double>(tokens.size());
  for (TokenId t : tokens) axpy(inv, upstream, grad_table.row(t));
}

std::vector<double> vec_mat(std::span<const double> x, const Matrix& w) {
  if (x.size() != w.rows()) throw ShapeError("vec_mat: length mismatch");
  std::vector<double> out(w.cols(), 0.0);
  for (std::size_t a = 0; a < x.size(); ++a) {
    if (x[a] != 0.0) axpy(x[a], w.row(a), out);
  }
  return out;
}

}  // namespace hcl
