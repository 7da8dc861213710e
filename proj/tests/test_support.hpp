// Copyright 2026 The vrhmc Authors
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

#include <cmath>
#include <stdexcept>
#include <vector>

#include "vrhmc/model.hpp"

namespace vrhmc::testing {

/// f_i(theta) = c_i |theta|^2 / 2 with a flat (or optional unit Gaussian) prior.
class QuadraticModel final : public PosteriorModel {
 public:
  QuadraticModel(std::vector<double> c, std::size_t dim = 1, double prior_precision = 0.0)
      : c_(std::move(c)), dim_(dim), prior_precision_(prior_precision) {}

  std::size_t num_examples() const override { return c_.size(); }
  std::size_t dim() const override { return dim_; }
  void add_grad_fi(std::span<const double> theta, std::size_t i, double scale,
                   std::span<double> out) const override {
    if (i >= c_.size()) throw std::out_of_range("example index");
    for (std::size_t j = 0; j < dim_; ++j) out[j] += scale * c_[i] * theta[j];
  }
  double fi(std::span<const double> theta, std::size_t i) const override {
    double s = 0.0;
    for (double t : theta) s += t * t;
    return 0.5 * c_.at(i) * s;
  }
  void grad_log_prior(std::span<const double> theta, std::span<double> out) const override {
    for (std::size_t j = 0; j < dim_; ++j) out[j] = -prior_precision_ * theta[j];
  }
  double log_prior(std::span<const double> theta) const override {
    double s = 0.0;
    for (double t : theta) s += t * t;
    return -0.5 * prior_precision_ * s;
  }
  OutputKind output_kind() const override { return OutputKind::RegressionMean; }
  std::size_t output_dim() const override { return 1; }
  std::size_t input_dim() const override { return 0; }
  void predict(std::span<const double>, std::span<const double>, std::span<double> out) const override {
    out[0] = 0.0;
  }

 private:
  std::vector<double> c_;
  std::size_t dim_;
  double prior_precision_;
};

inline double relative_error(std::span<const double> a, std::span<const double> b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
}

}  // namespace vrhmc::testing
