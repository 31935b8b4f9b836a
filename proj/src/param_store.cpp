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

#include "hcl/param_store.hpp"

#include <algorithm>
#include <cmath>

#include "hcl/error.hpp"

namespace hcl {

Matrix& ParamStore::add(const std::string& name, Matrix value) {
  if (contains(name)) throw Error("duplicate parameter '" + name + "'");
  if (!value.all_finite()) throw NonFiniteError("parameter '" + name + "' has non-finite entries");
  const std::size_t r = value.rows();
  const std::size_t c = value.cols();
  by_name_[name] = entries_.size();
  entries_.push_back(Entry{name, std::move(value), Matrix(r, c), Matrix(r, c), Matrix(r, c)});
  return entries_.back().value;
}

ParamStore::Entry& ParamStore::entry(const std::string& name) {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) throw Error("unknown parameter '" + name + "'");
  return entries_[it->second];
}

const ParamStore::Entry& ParamStore::entry(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) throw Error("unknown parameter '" + name + "'");
  return entries_[it->second];
}

Matrix& ParamStore::value(const std::string& name) { return entry(name).value; }
const Matrix& ParamStore::value(const std::string& name) const { return entry(name).value; }
Matrix& ParamStore::grad(const std::string& name) { return entry(name).grad; }
const Matrix& ParamStore::grad(const std::string& name) const { return entry(name).grad; }

void ParamStore::zero_grad() {
  for (auto& e : entries_) e.grad.fill(0.0);
}

void ParamStore::adam_step(const AdamConfig& cfg) {
  for (const auto& e : entries_) {
    if (!e.grad.all_finite()) {
      throw NonFiniteError("non-finite gradient in parameter '" + e.name + "'");
    }
  }
  ++step_;
  const double t = static_cast<double>(step_);
  const double bc1 = 1.0 - std::pow(cfg.beta1, t);
  const double bc2 = 1.0 - std::pow(cfg.beta2, t);
  for (auto& e : entries_) {
    auto p = e.value.data();
    auto g = e.grad.data();
    auto m = e.first_moment.data();
    auto v = e.second_moment.data();
    for (std::size_t k = 0; k < p.size(); ++k) {
      m[k] = cfg.beta1 * m[k] + (1.0 - cfg.beta1) * g[k];
      v[k] = cfg.beta2 * v[k] + (1.0 - cfg.beta2) * g[k] * g[k];
      const double mhat = m[k] / bc1;
      const double vhat = v[k] / bc2;
      p[k] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
    e.grad.fill(0.0);
  }
}

bool ParamStore::same_values(const ParamStore& other) const {
  if (entries_.size() != other.entries_.size()) return false;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].name != other.entries_[i].name) return false;
    if (!(entries_[i].value == other.entries_[i].value)) return false;
  }
  return true;
}

GradientCheckReport check_gradient(const LossFn& loss_fn, ParamStore& store,
                                   const GradientCheckOptions& opts) {
  GradientCheckReport report;
  loss_fn(store);
  std::vector<Matrix> analytic;
  analytic.reserve(store.entries().size());
  for (const auto& e : store.entries()) analytic.push_back(e.grad);

  for (std::size_t t = 0; t < store.entries().size(); ++t) {
    const std::string name = store.entries()[t].name;
    double param_max = 0.0;
    const std::size_t n = store.entries()[t].value.size();
    for (std::size_t k = 0; k < n; ++k) {
      double& x = store.entries()[t].value.data()[k];
      const double x0 = x;
      const double h = opts.step_scale * std::max(1.0, std::abs(x0));
      x = x0 + h;
      const double f_plus = loss_fn(store);
      x = x0 - h;
      const double f_minus = loss_fn(store);
      x = x0;
      const double numeric = (f_plus - f_minus) / (2.0 * h);
      const double a = analytic[t].data()[k];
      const double denom = std::max({std::abs(a), std::abs(numeric), opts.denom_floor});
      const double rel = std::abs(a - numeric) / denom;
      param_max = std::max(param_max, rel);
      if (rel > report.max_rel_error || !std::isfinite(rel)) {
        report.max_rel_error = rel;
        report.worst_param = name;
      }
      if (!(rel < opts.tol)) {
        report.passed = false;
        if (report.failures.size() < opts.max_failures_recorded) {
          report.failures.push_back({name, k, a, numeric, rel});
        }
      }
    }
    report.per_param_max[name] = param_max;
  }
  // Leave the store holding the analytic gradient at the unperturbed point.
  for (std::size_t t = 0; t < store.entries().size(); ++t) store.entries()[t].grad = analytic[t];
  return report;
}

}  // namespace hcl
