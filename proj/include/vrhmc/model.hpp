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
#include <memory>
#include <span>

#include "vrhmc/linalg.hpp"

namespace vrhmc {

/// How a model's prediction vector is read by the metrics.
enum class OutputKind {
  RegressionMean,        // one value: E[y | x]
  BinaryProbability,     // one value: P(y = 1 | x)
  ClassProbabilities,    // K values summing to one
};

/// Posterior over theta in R^d for n examples:
///   f(theta) = sum_i f_i(theta) - log Pr(theta),   f_i = -log Pr(y_i | x_i, theta).
/// f_i carries the likelihood only; the prior enters through grad_log_prior.
/// Implementations are immutable after construction and safe to share across
/// threads.
class PosteriorModel {
 public:
  virtual ~PosteriorModel() = default;

  virtual std::size_t num_examples() const = 0;
  virtual std::size_t dim() const = 0;

  /// out += scale * grad f_i(theta). Throws std::out_of_range for i >= n.
  virtual void add_grad_fi(std::span<const double> theta, std::size_t i, double scale,
                           std::span<double> out) const = 0;
  /// f_i(theta), the per-example negative log-likelihood (constants dropped).
  virtual double fi(std::span<const double> theta, std::size_t i) const = 0;

  /// out = grad log Pr(theta).
  virtual void grad_log_prior(std::span<const double> theta, std::span<double> out) const = 0;
  virtual double log_prior(std::span<const double> theta) const = 0;

  virtual OutputKind output_kind() const = 0;
  virtual std::size_t output_dim() const = 0;
  virtual std::size_t input_dim() const = 0;
  /// Model output for a raw feature row x (length input_dim()).
  virtual void predict(std::span<const double> theta, std::span<const double> x,
                       std::span<double> out) const = 0;
};

Vector grad_fi(const PosteriorModel& model, std::span<const double> theta, std::size_t i);
Vector grad_log_prior(const PosteriorModel& model, std::span<const double> theta);

/// sum_i grad f_i(theta) - grad log Pr(theta), summed in index order 0..n-1.
void full_grad_f(const PosteriorModel& model, std::span<const double> theta, std::span<double> out);
Vector full_grad_f(const PosteriorModel& model, std::span<const double> theta);

/// sum_i grad f_i(theta) without the prior term, index order 0..n-1.
void likelihood_grad_sum(const PosteriorModel& model, std::span<const double> theta,
                         std::span<double> out);

/// Numerically stable logistic function.
double sigmoid(double u);
/// log(1 + e^u) without overflow.
double softplus(double u);

/// Bayesian linear regression: y_i ~ N(beta^T x_i, sigma^2), beta ~ N(0, I).
class LinearRegressionModel final : public PosteriorModel {
 public:
  LinearRegressionModel(Matrix features, Vector targets, double noise_sd = 1.0);

  std::size_t num_examples() const override { return features_.rows(); }
  std::size_t dim() const override { return features_.cols(); }
  void add_grad_fi(std::span<const double> theta, std::size_t i, double scale,
                   std::span<double> out) const override;
  double fi(std::span<const double> theta, std::size_t i) const override;
  void grad_log_prior(std::span<const double> theta, std::span<double> out) const override;
  double log_prior(std::span<const double> theta) const override;
  OutputKind output_kind() const override { return OutputKind::RegressionMean; }
  std::size_t output_dim() const override { return 1; }
  std::size_t input_dim() const override { return features_.cols(); }
  void predict(std::span<const double> theta, std::span<const double> x,
               std::span<double> out) const override;

  const Matrix& features() const { return features_; }
  const Vector& targets() const { return targets_; }
  double noise_sd() const { return noise_sd_; }

 private:
  Matrix features_;
  Vector targets_;
  double noise_sd_;
  double inv_var_;
};

/// Bayesian logistic regression: P(y_i = 1) = sigmoid(beta^T x_i), beta ~ N(0, I).
class LogisticRegressionModel final : public PosteriorModel {
 public:
  LogisticRegressionModel(Matrix features, Vector labels);

  std::size_t num_examples() const override { return features_.rows(); }
  std::size_t dim() const override { return features_.cols(); }
  void add_grad_fi(std::span<const double> theta, std::size_t i, double scale,
                   std::span<double> out) const override;
  double fi(std::span<const double> theta, std::size_t i) const override;
  void grad_log_prior(std::span<const double> theta, std::span<double> out) const override;
  double log_prior(std::span<const double> theta) const override;
  OutputKind output_kind() const override { return OutputKind::BinaryProbability; }
  std::size_t output_dim() const override { return 1; }
  std::size_t input_dim() const override { return features_.cols(); }
  void predict(std::span<const double> theta, std::span<const double> x,
               std::span<double> out) const override;

  const Matrix& features() const { return features_; }

 private:
  Matrix features_;
  Vector labels_;
};

enum class BnnLikelihood { Gaussian, BernoulliLogit, CategoricalSoftmax };

struct BnnOptions {
  std::size_t hidden_units = 50;
  double prior_sd = 0.0;       // required, > 0
  double likelihood_sd = 0.0;  // required for Gaussian, > 0
  BnnLikelihood likelihood = BnnLikelihood::Gaussian;
  std::size_t num_classes = 0; // CategoricalSoftmax only, >= 2
};

/// One-hidden-layer ReLU network with prior N(0, sigma_p^2 I).
///
/// Parameters are one flat vector, layer-major with weights before biases:
///   [ W1 (H x d_in, row h holds the weights into hidden unit h) | b1 (H)
///   | W2 (d_out x H, row k holds the weights into output k)     | b2 (d_out) ]
/// d_out is 1 for Gaussian and Bernoulli likelihoods and K for softmax.
class BnnModel final : public PosteriorModel {
 public:
  BnnModel(Matrix features, Vector targets, BnnOptions options);

  std::size_t num_examples() const override { return features_.rows(); }
  std::size_t dim() const override { return dim_; }
  void add_grad_fi(std::span<const double> theta, std::size_t i, double scale,
                   std::span<double> out) const override;
  double fi(std::span<const double> theta, std::size_t i) const override;
  void grad_log_prior(std::span<const double> theta, std::span<double> out) const override;
  double log_prior(std::span<const double> theta) const override;
  OutputKind output_kind() const override;
  std::size_t output_dim() const override {
    return options_.likelihood == BnnLikelihood::CategoricalSoftmax ? out_dim_ : 1;
  }
  std::size_t input_dim() const override { return in_dim_; }
  void predict(std::span<const double> theta, std::span<const double> x,
               std::span<double> out) const override;

  /// Raw network output t = f_NN(x, theta), length network_outputs().
  void forward(std::span<const double> theta, std::span<const double> x,
               std::span<double> out) const;
  std::size_t network_outputs() const { return out_dim_; }
  std::size_t hidden_units() const { return options_.hidden_units; }

  // Offsets into the flat parameter vector.
  std::size_t w1_offset() const { return 0; }
  std::size_t b1_offset() const { return options_.hidden_units * in_dim_; }
  std::size_t w2_offset() const { return b1_offset() + options_.hidden_units; }
  std::size_t b2_offset() const { return w2_offset() + out_dim_ * options_.hidden_units; }

 private:
  Matrix features_;
  Vector targets_;
  BnnOptions options_;
  std::size_t in_dim_;
  std::size_t out_dim_;
  std::size_t dim_;
};

}  // namespace vrhmc
