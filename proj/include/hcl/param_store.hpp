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
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "hcl/matrix.hpp"

namespace hcl {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Named parameter tensors with matching gradients and Adam moment buffers.
// Exactly one trainer mutates a store at a time.
class ParamStore {
 public:
  struct Entry {
    std::string name;
    Matrix value;
    Matrix grad;
    Matrix first_moment;
    Matrix second_moment;
  };

  // Adds a tensor; throws if the name already exists.
  Matrix& add(const std::string& name, Matrix value);

  bool contains(const std::string& name) const { return by_name_.count(name) != 0; }
  Matrix& value(const std::string& name);
  const Matrix& value(const std::string& name) const;
  Matrix& grad(const std::string& name);
  const Matrix& grad(const std::string& name) const;

  std::vector<Entry>& entries() { return entries_; }
  const std::vector<Entry>& entries() const { return entries_; }
  std::uint64_t step() const { return step_; }

  void zero_grad();

  // Bias-corrected Adam update; increments the step counter and zeroes
  // gradients. Throws NonFiniteError naming the first non-finite gradient
  // before touching any parameter.
  void adam_step(const AdamConfig& cfg);

  // Equality over names and values only (optimizer state ignored).
  bool same_values(const ParamStore& other) const;

 private:
  Entry& entry(const std::string& name);
  const Entry& entry(const std::string& name) const;

  std::vector<Entry> entries_;
  std::map<std::string, std::size_t> by_name_;
  std::uint64_t step_ = 0;
};

struct GradientCheckReport {
  struct Failure {
    std::string param;
    std::size_t index;
    double analytic;
    double numeric;
    double rel_error;
  };
  bool passed = true;
  double max_rel_error = 0.0;
  std::string worst_param;
  std::map<std::string, double> per_param_max;
  std::vector<Failure> failures;
};

// Loss function contract for the checker: returns the loss at the store's
// current values and leaves the analytic gradient in the store's grad
// tensors (zeroing them first is the function's job).
using LossFn = std::function<double(ParamStore&)>;

struct GradientCheckOptions {
  double tol = 1e-4;
  // h = step_scale * max(1, |x|)
  double step_scale = 1e-5;
  // Denominator floor for the relative error so entries whose true gradient is
  // zero are judged against an absolute scale instead of dividing by ~0.
  double denom_floor = 1e-6;
  std::size_t max_failures_recorded = 16;
};

// Central-difference check of every entry of every tensor.
GradientCheckReport check_gradient(const LossFn& loss_fn, ParamStore& store,
                                   const GradientCheckOptions& opts = {});

}  // namespace hcl
