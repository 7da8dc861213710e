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

#include "vrhmc/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cfloat>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace vrhmc {

void RunningMean::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    compensation_ += (sum_ - t) + x;
  } else {
    compensation_ += (x - t) + sum_;
  }
  sum_ = t;
  ++count_;
}

double RunningMean::mean() const {
  if (count_ == 0) return 0.0;
  return (sum_ + compensation_) / static_cast<double>(count_);
}

TestFunction coordinate_function(std::size_t j) {
  return {"theta_" + std::to_string(j), [j](std::span<const double> theta) { return theta[j]; }};
}

TestFunction squared_norm_function() {
  return {"sq_norm", [](std::span<const double> theta) {
            double s = 0.0;
            for (double x : theta) s += x * x;
            return s;
          }};
}

Vector running_phi_hat(std::span<const Vector> samples, const TestFunction& phi) {
  if (samples.empty()) throw std::invalid_argument("running_phi_hat needs at least one sample");
  Vector out;
  out.reserve(samples.size());
  RunningMean m;
  for (const auto& s : samples) {
    m.add(phi.phi(s));
    out.push_back(m.mean());
  }
  return out;
}

double mse_vs_reference(std::span<const double> replicate_estimates, double reference) {
  if (replicate_estimates.size() < 2) {
    throw std::invalid_argument("mse_vs_reference needs at least two replicates");
  }
  double s = 0.0;
  for (double v : replicate_estimates) s += (v - reference) * (v - reference);
  return s / static_cast<double>(replicate_estimates.size());
}

GaussianPosterior conjugate_posterior(const Matrix& features, std::span<const double> targets,
                                      double noise_sd) {
  if (targets.size() != features.rows()) throw std::invalid_argument("targets length mismatch");
  if (!(noise_sd > 0.0)) throw std::invalid_argument("noise_sd must be positive");
  const auto n = static_cast<Eigen::Index>(features.rows());
  const auto d = static_cast<Eigen::Index>(features.cols());
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Map<const RowMajor> x(features.data().data(), n, d);
  const Eigen::Map<const Eigen::VectorXd> y(targets.data(), n);
  const double inv_var = 1.0 / (noise_sd * noise_sd);

  const Eigen::MatrixXd precision = Eigen::MatrixXd::Identity(d, d) + inv_var * (x.transpose() * x);
  const Eigen::LLT<Eigen::MatrixXd> llt(precision);
  if (llt.info() != Eigen::Success) throw std::runtime_error("posterior precision is not positive definite");
  const Eigen::MatrixXd cov = llt.solve(Eigen::MatrixXd::Identity(d, d));
  const Eigen::VectorXd mu = llt.solve(inv_var * (x.transpose() * y));

  GaussianPosterior post;
  post.mean.assign(mu.data(), mu.data() + d);
  post.covariance = Matrix(features.cols(), features.cols());
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) post.covariance(i, j) = cov(i, j);
  }
  return post;
}

PredictiveEvaluator::PredictiveEvaluator(const PosteriorModel& model, Matrix features, Vector targets)
    : model_(model), features_(std::move(features)), targets_(std::move(targets)), out_dim_(model.output_dim()) {
  if (features_.rows() == 0) throw std::invalid_argument("predictive evaluation needs a non-empty split");
  if (targets_.size() != features_.rows()) throw std::invalid_argument("targets length mismatch");
  if (features_.cols() != model.input_dim()) throw std::invalid_argument("feature width does not match model input");
  prediction_sum_.assign(features_.rows() * out_dim_, 0.0);
  scratch_.resize(out_dim_);
}

void PredictiveEvaluator::add_sample(std::span<const double> theta) {
  for (std::size_t i = 0; i < features_.rows(); ++i) {
    model_.predict(theta, features_.row(i), scratch_);
    for (std::size_t k = 0; k < out_dim_; ++k) prediction_sum_[i * out_dim_ + k] += scratch_[k];
  }
  ++samples_;
}

std::vector<PredictiveEvaluator::Metric> PredictiveEvaluator::metrics() const {
  if (samples_ == 0) throw std::logic_error("no samples added to the predictive evaluator");
  const double inv = 1.0 / static_cast<double>(samples_);
  const std::size_t m = features_.rows();
  switch (model_.output_kind()) {
    case OutputKind::RegressionMean: {
      double se = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const double r = prediction_sum_[i] * inv - targets_[i];
        se += r * r;
      }
      const double mse = se / static_cast<double>(m);
      return {{"mse", mse}, {"rmse", std::sqrt(mse)}};
    }
    case OutputKind::BinaryProbability: {
      double ll = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const double p1 = prediction_sum_[i] * inv;
        const double p = targets_[i] == 1.0 ? p1 : 1.0 - p1;
        ll += std::log(std::max(p, DBL_MIN));
      }
      return {{"loglik", ll / static_cast<double>(m)}};
    }
    case OutputKind::ClassProbabilities: {
      double ll = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const auto k = static_cast<std::size_t>(targets_[i]);
        ll += std::log(std::max(prediction_sum_[i * out_dim_ + k] * inv, DBL_MIN));
      }
      return {{"loglik", ll / static_cast<double>(m)}};
    }
  }
  return {};
}

std::string PredictiveEvaluator::primary_metric(OutputKind kind) {
  return kind == OutputKind::RegressionMean ? "mse" : "loglik";
}

bool PredictiveEvaluator::larger_is_better(OutputKind kind) { return kind != OutputKind::RegressionMean; }

void MetricTrace::add(std::size_t step, double passes, std::string metric, double value) {
  records.push_back({step, passes, std::move(metric), value});
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_trace_rows(std::ostream& out, const MetricTrace& trace) {
  const std::string prefix = trace.meta.algorithm + ',' + std::to_string(trace.meta.seed) + ',' +
                             format_double(trace.meta.step_size) + ',' + format_double(trace.meta.friction) + ',';
  for (const auto& r : trace.records) {
    out << prefix << r.step << ',' << format_double(r.passes) << ',' << r.metric << ',' << format_double(r.value)
        << '\n';
  }
}

void write_trace_csv(std::ostream& out, std::span<const MetricTrace> traces) {
  out << kTraceHeader << '\n';
  for (const auto& t : traces) write_trace_rows(out, t);
}

}  // namespace vrhmc
