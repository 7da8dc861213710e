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
#include <span>
#include <string_view>
#include <vector>

#include "vrhmc/linalg.hpp"
#include "vrhmc/model.hpp"
#include "vrhmc/random.hpp"

namespace vrhmc {

enum class BatchMode {
  WithReplacement,
  WithoutReplacement,
  /// Every index 0..n-1 in order; requires b == n. Turns any estimator into
  /// its full-batch form deterministically.
  FullSweep,
};

std::string_view to_string(BatchMode mode);
BatchMode parse_batch_mode(std::string_view text);

/// Draws index batches of size b from [0, n) on a private random stream.
class MinibatchSampler {
 public:
  MinibatchSampler(std::size_t n, std::size_t b, BatchMode mode, RandomStream stream);

  /// Next batch; the returned span is valid until the next call.
  std::span<const std::size_t> next();

  std::size_t population() const { return n_; }
  std::size_t batch_size() const { return b_; }
  BatchMode mode() const { return mode_; }

 private:
  std::size_t n_;
  std::size_t b_;
  BatchMode mode_;
  RandomStream stream_;
  std::vector<std::size_t> permutation_;
  std::vector<std::size_t> batch_;
};

/// SVRG control variate: snapshot w, g = sum_i grad f_i(w), epoch length K and
/// steps taken since the last snapshot.
struct SvrgState {
  Vector snapshot;
  Vector snapshot_grad_sum;
  std::size_t epoch_length = 1;
  std::size_t steps_since_snapshot = 0;
  bool initialized = false;
};

/// SAGA table. Rows hold grad f_i at each example's last evaluation point
/// (stored gradients rather than points); running_sum is their column sum.
struct SagaState {
  Matrix grad_table;
  Vector running_sum;
  bool initialized = false;
};

/// (n/b) sum_{i in batch} grad f_i(theta) - grad log Pr(theta).
void sg_estimate(const PosteriorModel& model, std::span<const double> theta,
                 std::span<const std::size_t> batch, std::span<double> out);

/// -grad log Pr(theta) + (n/b) sum_{i in batch} (grad f_i(theta) - grad f_i(w)) + g.
/// Leaves the state untouched.
void svrg_estimate(const PosteriorModel& model, std::span<const double> theta,
                   const SvrgState& state, std::span<const std::size_t> batch,
                   std::span<double> out);

/// w <- theta, g <- sum_i grad f_i(theta), step counter reset.
void svrg_refresh(const PosteriorModel& model, std::span<const double> theta, SvrgState& state);

/// Builds the table at theta: every row grad f_i(theta).
void saga_initialize(const PosteriorModel& model, std::span<const double> theta, SagaState& state);

/// Estimate using the table as it stood on entry, then replace the batch rows
/// by grad f_i(theta_eval) and update the running sum. The batch must not hold
/// duplicate indices.
void saga_estimate_and_update(const PosteriorModel& model, std::span<const double> theta_eval,
                              SagaState& state, std::span<const std::size_t> batch,
                              std::span<double> out);

enum class EstimatorKind { Full, Stochastic, Svrg, Saga };

std::string_view to_string(EstimatorKind kind);

struct EstimatorOptions {
  std::size_t batch_size = 10;
  std::size_t epoch_length = 1;  // SVRG only
  BatchMode batch_mode = BatchMode::WithReplacement;
};

/// Default batch mode for an estimator: with replacement for the plain and
/// SVRG estimators, without replacement for SAGA.
BatchMode default_batch_mode(EstimatorKind kind);

/// Chain-local gradient estimator. Owns the batch sampler and any SVRG/SAGA
/// state and charges gradient evaluations against a pass budget:
/// b per step, plus n per SVRG snapshot or SAGA table build, or n per step for
/// the full gradient.
class GradientEstimator {
 public:
  GradientEstimator(const PosteriorModel& model, EstimatorKind kind, EstimatorOptions options,
                    RandomStream batch_stream);

  /// Writes the estimate at eval_point into out and advances internal state.
  void estimate(std::span<const double> eval_point, std::span<double> out);

  EstimatorKind kind() const { return kind_; }
  /// Component-gradient evaluations charged so far, in units of n (passes).
  double passes() const;
  /// Cost in component gradients the next estimate() will be charged.
  std::size_t next_step_cost() const;

  const SvrgState& svrg_state() const { return svrg_; }
  const SagaState& saga_state() const { return saga_; }

 private:
  const PosteriorModel& model_;
  EstimatorKind kind_;
  EstimatorOptions options_;
  MinibatchSampler sampler_;
  SvrgState svrg_;
  SagaState saga_;
  std::size_t steps_ = 0;
  std::size_t cost_ = 0;
};

/// Component-gradient cost of step `step` (0-based) for a given estimator.
std::size_t step_cost(EstimatorKind kind, std::size_t step, std::size_t n, std::size_t b,
                      std::size_t epoch_length);

/// Largest T whose cumulative cost stays within `passes` * n.
std::size_t steps_for_passes(EstimatorKind kind, double passes, std::size_t n, std::size_t b,
                             std::size_t epoch_length);

/// K = floor(n / b), at least 1.
std::size_t default_epoch_length(std::size_t n, std::size_t b);

}  // namespace vrhmc
