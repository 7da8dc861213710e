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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "vrhmc/linalg.hpp"
#include "vrhmc/model.hpp"

namespace vrhmc {

/// Running mean over a compensated (Neumaier) sum.
class RunningMean {
 public:
  void add(double x);
  double mean() const;
  std::size_t count() const { return count_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
  std::size_t count_ = 0;
};

struct TestFunction {
  std::string name;
  std::function<double(std::span<const double>)> phi;
};

TestFunction coordinate_function(std::size_t j);
TestFunction squared_norm_function();

/// phi_hat_t = (1/t) sum_{s<=t} phi(theta_s) for t = 1..T.
Vector running_phi_hat(std::span<const Vector> samples, const TestFunction& phi);

/// Mean over replicates of (phi_hat - phi_bar)^2. Needs at least two replicates.
double mse_vs_reference(std::span<const double> replicate_estimates, double reference);

struct GaussianPosterior {
  Vector mean;
  Matrix covariance;
};

/// Closed-form posterior of Bayesian linear regression with prior N(0, I):
///   Sigma = (I + X^T X / sigma^2)^{-1},  mu = Sigma X^T y / sigma^2.
GaussianPosterior conjugate_posterior(const Matrix& features, std::span<const double> targets,
                                      double noise_sd);

/// Bayesian-model-averaged predictive metrics on a held-out set. Predictions
/// of every added sample are averaged; regression reports the MSE/RMSE of the
/// averaged mean, classification the mean log of the averaged probability of
/// the true label.
class PredictiveEvaluator {
 public:
  PredictiveEvaluator(const PosteriorModel& model, Matrix features, Vector targets);

  void add_sample(std::span<const double> theta);
  std::size_t samples() const { return samples_; }

  struct Metric {
    std::string name;
    double value;
  };
  /// Names: "mse" and "rmse" for regression, "loglik" for classification.
  std::vector<Metric> metrics() const;
  /// Metric used for model selection and whether larger is better.
  static std::string primary_metric(OutputKind kind);
  static bool larger_is_better(OutputKind kind);

 private:
  const PosteriorModel& model_;
  Matrix features_;
  Vector targets_;
  std::size_t out_dim_;
  Vector prediction_sum_;  // rows x out_dim
  Vector scratch_;
  std::size_t samples_ = 0;
};

struct RunMetadata {
  std::string algorithm;
  std::uint64_t seed = 0;
  double step_size = 0.0;
  double friction = 0.0;
  std::size_t batch_size = 0;
  std::size_t epoch_length = 0;
};

struct TraceRecord {
  std::size_t step;
  double passes;
  std::string metric;
  double value;
};

/// Time-ordered metric records from one chain.
struct MetricTrace {
  RunMetadata meta;
  std::vector<TraceRecord> records;

  void add(std::size_t step, double passes, std::string metric, double value);
};

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

inline constexpr const char* kTraceHeader = "algorithm,seed,h,D,step,passes,metric,value";
void write_trace_rows(std::ostream& out, const MetricTrace& trace);
void write_trace_csv(std::ostream& out, std::span<const MetricTrace> traces);

}  // namespace vrhmc
