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

#include "vrhmc/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "vrhmc/simd/kernels.hpp"

namespace vrhmc {
namespace {

void check_index(std::size_t i, std::size_t n) {
  if (i >= n) {
    throw std::out_of_range("example index " + std::to_string(i) + " out of range (n=" +
                            std::to_string(n) + ")");
  }
}

void check_shape(const Matrix& features, const Vector& targets) {
  if (features.rows() == 0 || features.cols() == 0) {
    throw std::invalid_argument("model needs at least one example and one feature");
  }
  if (targets.size() != features.rows()) {
    throw std::invalid_argument("targets length does not match feature rows");
  }
}

double squared_norm(std::span<const double> v) { return simd::dot(v, v); }

// Scratch reused across BNN calls on the same thread.
struct BnnScratch {
  Vector hidden_pre;
  Vector hidden_act;
  Vector out;
  Vector dout;
};
thread_local BnnScratch bnn_scratch;

}  // namespace

Matrix select_rows(const Matrix& m, std::span<const std::size_t> indices) {
  Matrix out(indices.size(), m.cols());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const auto src = m.row(indices[r]);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  return out;
}

double sigmoid(double u) {
  if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
  const double e = std::exp(u);
  return e / (1.0 + e);
}

double softplus(double u) {
  return u > 0.0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u));
}

Vector grad_fi(const PosteriorModel& model, std::span<const double> theta, std::size_t i) {
  Vector out(model.dim(), 0.0);
  model.add_grad_fi(theta, i, 1.0, out);
  return out;
}

Vector grad_log_prior(const PosteriorModel& model, std::span<const double> theta) {
  Vector out(model.dim());
  model.grad_log_prior(theta, out);
  return out;
}

void likelihood_grad_sum(const PosteriorModel& model, std::span<const double> theta,
                         std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i < model.num_examples(); ++i) model.add_grad_fi(theta, i, 1.0, out);
}

void full_grad_f(const PosteriorModel& model, std::span<const double> theta, std::span<double> out) {
  likelihood_grad_sum(model, theta, out);
  Vector prior(model.dim());
  model.grad_log_prior(theta, prior);
  simd::axpy(-1.0, prior, out);
}

Vector full_grad_f(const PosteriorModel& model, std::span<const double> theta) {
  Vector out(model.dim());
  full_grad_f(model, theta, out);
  return out;
}

// ---------------------------------------------------------------------------
// Linear regression

LinearRegressionModel::LinearRegressionModel(Matrix features, Vector targets, double noise_sd)
    : features_(std::move(features)), targets_(std::move(targets)), noise_sd_(noise_sd) {
  check_shape(features_, targets_);
  if (!(noise_sd_ > 0.0) || !std::isfinite(noise_sd_)) {
    throw std::invalid_argument("noise_sd must be positive and finite");
  }
  inv_var_ = 1.0 / (noise_sd_ * noise_sd_);
}

void LinearRegressionModel::add_grad_fi(std::span<const double> theta, std::size_t i,
                                        double scale, std::span<double> out) const {
  check_index(i, num_examples());
  const auto x = features_.row(i);
  const double residual = targets_[i] - simd::dot(theta, x);
  simd::axpy(scale * (-residual * inv_var_), x, out);
}

double LinearRegressionModel::fi(std::span<const double> theta, std::size_t i) const {
  check_index(i, num_examples());
  const double residual = targets_[i] - simd::dot(theta, features_.row(i));
  return 0.5 * residual * residual * inv_var_;
}

void LinearRegressionModel::grad_log_prior(std::span<const double> theta,
                                           std::span<double> out) const {
  for (std::size_t j = 0; j < theta.size(); ++j) out[j] = -theta[j];
}

double LinearRegressionModel::log_prior(std::span<const double> theta) const {
  return -0.5 * squared_norm(theta);
}

void LinearRegressionModel::predict(std::span<const double> theta, std::span<const double> x,
                                    std::span<double> out) const {
  out[0] = simd::dot(theta, x);
}

// ---------------------------------------------------------------------------
// Logistic regression

LogisticRegressionModel::LogisticRegressionModel(Matrix features, Vector labels)
    : features_(std::move(features)), labels_(std::move(labels)) {
  check_shape(features_, labels_);
  for (double y : labels_) {
    if (y != 0.0 && y != 1.0) throw std::invalid_argument("logistic labels must be 0 or 1");
  }
}

void LogisticRegressionModel::add_grad_fi(std::span<const double> theta, std::size_t i,
                                          double scale, std::span<double> out) const {
  check_index(i, num_examples());
  const auto x = features_.row(i);
  const double residual = labels_[i] - sigmoid(simd::dot(theta, x));
  simd::axpy(scale * (-residual), x, out);
}

double LogisticRegressionModel::fi(std::span<const double> theta, std::size_t i) const {
  check_index(i, num_examples());
  const double u = simd::dot(theta, features_.row(i));
  return softplus(u) - labels_[i] * u;
}

void LogisticRegressionModel::grad_log_prior(std::span<const double> theta,
                                             std::span<double> out) const {
  for (std::size_t j = 0; j < theta.size(); ++j) out[j] = -theta[j];
}

double LogisticRegressionModel::log_prior(std::span<const double> theta) const {
  return -0.5 * squared_norm(theta);
}

void LogisticRegressionModel::predict(std::span<const double> theta, std::span<const double> x,
                                      std::span<double> out) const {
  out[0] = sigmoid(simd::dot(theta, x));
}

// ---------------------------------------------------------------------------
// One-hidden-layer BNN

BnnModel::BnnModel(Matrix features, Vector targets, BnnOptions options)
    : features_(std::move(features)), targets_(std::move(targets)), options_(options) {
  check_shape(features_, targets_);
  if (options_.hidden_units == 0) throw std::invalid_argument("BNN needs at least one hidden unit");
  if (!(options_.prior_sd > 0.0)) throw std::invalid_argument("BNN prior_sd must be positive");
  in_dim_ = features_.cols();
  switch (options_.likelihood) {
    case BnnLikelihood::Gaussian:
      if (!(options_.likelihood_sd > 0.0)) {
        throw std::invalid_argument("BNN likelihood_sd must be positive");
      }
      out_dim_ = 1;
      break;
    case BnnLikelihood::BernoulliLogit:
      for (double y : targets_) {
        if (y != 0.0 && y != 1.0) throw std::invalid_argument("binary BNN labels must be 0 or 1");
      }
      out_dim_ = 1;
      break;
    case BnnLikelihood::CategoricalSoftmax:
      if (options_.num_classes < 2) throw std::invalid_argument("softmax BNN needs num_classes >= 2");
      for (double y : targets_) {
        if (y < 0.0 || y >= static_cast<double>(options_.num_classes) || y != std::floor(y)) {
          throw std::invalid_argument("softmax BNN labels must be integers in [0, K)");
        }
      }
      out_dim_ = options_.num_classes;
      break;
  }
  const std::size_t h = options_.hidden_units;
  dim_ = h * in_dim_ + h + out_dim_ * h + out_dim_;
}

OutputKind BnnModel::output_kind() const {
  switch (options_.likelihood) {
    case BnnLikelihood::Gaussian: return OutputKind::RegressionMean;
    case BnnLikelihood::BernoulliLogit: return OutputKind::BinaryProbability;
    case BnnLikelihood::CategoricalSoftmax: return OutputKind::ClassProbabilities;
  }
  return OutputKind::RegressionMean;
}

void BnnModel::forward(std::span<const double> theta, std::span<const double> x,
                       std::span<double> out) const {
  const std::size_t h = options_.hidden_units;
  auto& s = bnn_scratch;
  s.hidden_act.resize(h);
  for (std::size_t u = 0; u < h; ++u) {
    const double z = simd::dot(theta.subspan(w1_offset() + u * in_dim_, in_dim_), x) +
                     theta[b1_offset() + u];
    s.hidden_act[u] = z > 0.0 ? z : 0.0;
  }
  for (std::size_t k = 0; k < out_dim_; ++k) {
    out[k] = simd::dot(theta.subspan(w2_offset() + k * h, h), s.hidden_act) + theta[b2_offset() + k];
  }
}

void BnnModel::add_grad_fi(std::span<const double> theta, std::size_t i, double scale,
                           std::span<double> out) const {
  check_index(i, num_examples());
  const std::size_t h = options_.hidden_units;
  const auto x = features_.row(i);
  auto& s = bnn_scratch;
  s.hidden_pre.resize(h);
  s.hidden_act.resize(h);
  s.out.resize(out_dim_);
  s.dout.resize(out_dim_);

  for (std::size_t u = 0; u < h; ++u) {
    const double z = simd::dot(theta.subspan(w1_offset() + u * in_dim_, in_dim_), x) +
                     theta[b1_offset() + u];
    s.hidden_pre[u] = z;
    s.hidden_act[u] = z > 0.0 ? z : 0.0;
  }
  for (std::size_t k = 0; k < out_dim_; ++k) {
    s.out[k] = simd::dot(theta.subspan(w2_offset() + k * h, h), s.hidden_act) + theta[b2_offset() + k];
  }

  // d f_i / d t
  const double y = targets_[i];
  switch (options_.likelihood) {
    case BnnLikelihood::Gaussian:
      s.dout[0] = (s.out[0] - y) / (options_.likelihood_sd * options_.likelihood_sd);
      break;
    case BnnLikelihood::BernoulliLogit:
      s.dout[0] = sigmoid(s.out[0]) - y;
      break;
    case BnnLikelihood::CategoricalSoftmax: {
      const double mx = *std::max_element(s.out.begin(), s.out.end());
      double z = 0.0;
      for (std::size_t k = 0; k < out_dim_; ++k) {
        s.dout[k] = std::exp(s.out[k] - mx);
        z += s.dout[k];
      }
      for (std::size_t k = 0; k < out_dim_; ++k) s.dout[k] /= z;
      s.dout[static_cast<std::size_t>(y)] -= 1.0;
      break;
    }
  }

  for (std::size_t k = 0; k < out_dim_; ++k) {
    const double g = scale * s.dout[k];
    simd::axpy(g, s.hidden_act, out.subspan(w2_offset() + k * h, h));
    out[b2_offset() + k] += g;
  }
  for (std::size_t u = 0; u < h; ++u) {
    if (!(s.hidden_pre[u] > 0.0)) continue;
    double back = 0.0;
    for (std::size_t k = 0; k < out_dim_; ++k) back += theta[w2_offset() + k * h + u] * s.dout[k];
    const double g = scale * back;
    simd::axpy(g, x, out.subspan(w1_offset() + u * in_dim_, in_dim_));
    out[b1_offset() + u] += g;
  }
}

double BnnModel::fi(std::span<const double> theta, std::size_t i) const {
  check_index(i, num_examples());
  Vector t(out_dim_);
  forward(theta, features_.row(i), t);
  const double y = targets_[i];
  switch (options_.likelihood) {
    case BnnLikelihood::Gaussian: {
      const double r = y - t[0];
      return 0.5 * r * r / (options_.likelihood_sd * options_.likelihood_sd);
    }
    case BnnLikelihood::BernoulliLogit:
      return softplus(t[0]) - y * t[0];
    case BnnLikelihood::CategoricalSoftmax: {
      const double mx = *std::max_element(t.begin(), t.end());
      double z = 0.0;
      for (double v : t) z += std::exp(v - mx);
      return mx + std::log(z) - t[static_cast<std::size_t>(y)];
    }
  }
  return 0.0;
}

void BnnModel::grad_log_prior(std::span<const double> theta, std::span<double> out) const {
  const double inv_var = 1.0 / (options_.prior_sd * options_.prior_sd);
  for (std::size_t j = 0; j < theta.size(); ++j) out[j] = -theta[j] * inv_var;
}

double BnnModel::log_prior(std::span<const double> theta) const {
  return -0.5 * squared_norm(theta) / (options_.prior_sd * options_.prior_sd);
}

void BnnModel::predict(std::span<const double> theta, std::span<const double> x,
                       std::span<double> out) const {
  Vector t(out_dim_);
  forward(theta, x, t);
  switch (options_.likelihood) {
    case BnnLikelihood::Gaussian:
      out[0] = t[0];
      break;
    case BnnLikelihood::BernoulliLogit:
      out[0] = sigmoid(t[0]);
      break;
    case BnnLikelihood::CategoricalSoftmax: {
      const double mx = *std::max_element(t.begin(), t.end());
      double z = 0.0;
      for (std::size_t k = 0; k < out_dim_; ++k) {
        out[k] = std::exp(t[k] - mx);
        z += out[k];
      }
      for (std::size_t k = 0; k < out_dim_; ++k) out[k] /= z;
      break;
    }
  }
}

}  // namespace vrhmc
