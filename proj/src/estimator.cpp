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

#include "vrhmc/estimator.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "vrhmc/simd/kernels.hpp"

namespace vrhmc {
namespace {

thread_local Vector prior_scratch;
thread_local Vector diff_scratch;
thread_local Matrix saga_scratch;

std::span<double> prior_into_scratch(const PosteriorModel& model, std::span<const double> theta) {
  prior_scratch.resize(model.dim());
  model.grad_log_prior(theta, prior_scratch);
  return prior_scratch;
}

void require_batch(std::span<const std::size_t> batch) {
  if (batch.empty()) throw std::invalid_argument("gradient estimate needs a non-empty batch");
}

}  // namespace

std::string_view to_string(BatchMode mode) {
  switch (mode) {
    case BatchMode::WithReplacement: return "with-replacement";
    case BatchMode::WithoutReplacement: return "without-replacement";
    case BatchMode::FullSweep: return "full-sweep";
  }
  return "unknown";
}

BatchMode parse_batch_mode(std::string_view text) {
  if (text == "with-replacement") return BatchMode::WithReplacement;
  if (text == "without-replacement") return BatchMode::WithoutReplacement;
  if (text == "full-sweep") return BatchMode::FullSweep;
  throw std::invalid_argument("unknown batch mode '" + std::string(text) + "'");
}

std::string_view to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::Full: return "full";
    case EstimatorKind::Stochastic: return "stochastic";
    case EstimatorKind::Svrg: return "svrg";
    case EstimatorKind::Saga: return "saga";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------

MinibatchSampler::MinibatchSampler(std::size_t n, std::size_t b, BatchMode mode, RandomStream stream)
    : n_(n), b_(b), mode_(mode), stream_(stream), batch_(b) {
  if (b == 0 || b > n) {
    throw std::invalid_argument("batch size must satisfy 1 <= b <= n (b=" + std::to_string(b) +
                                ", n=" + std::to_string(n) + ")");
  }
  if (mode == BatchMode::FullSweep && b != n) {
    throw std::invalid_argument("full-sweep batches require b == n");
  }
  if (mode == BatchMode::WithoutReplacement) {
    permutation_.resize(n);
    std::iota(permutation_.begin(), permutation_.end(), std::size_t{0});
  }
  if (mode == BatchMode::FullSweep) std::iota(batch_.begin(), batch_.end(), std::size_t{0});
}

std::span<const std::size_t> MinibatchSampler::next() {
  switch (mode_) {
    case BatchMode::WithReplacement:
      for (auto& idx : batch_) idx = static_cast<std::size_t>(stream_.uniform_index(n_));
      break;
    case BatchMode::WithoutReplacement:
      // Partial Fisher-Yates on a persistent permutation: uniform over
      // b-subsets whatever order the previous draws left behind.
      for (std::size_t r = 0; r < b_; ++r) {
        const std::size_t j = r + static_cast<std::size_t>(stream_.uniform_index(n_ - r));
        std::swap(permutation_[r], permutation_[j]);
        batch_[r] = permutation_[r];
      }
      break;
    case BatchMode::FullSweep:
      break;
  }
  return batch_;
}

// ---------------------------------------------------------------------------

void sg_estimate(const PosteriorModel& model, std::span<const double> theta,
                 std::span<const std::size_t> batch, std::span<double> out) {
  require_batch(batch);
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i : batch) model.add_grad_fi(theta, i, 1.0, out);
  simd::scale(static_cast<double>(model.num_examples()) / static_cast<double>(batch.size()), out);
  simd::axpy(-1.0, prior_into_scratch(model, theta), out);
}

void svrg_estimate(const PosteriorModel& model, std::span<const double> theta,
                   const SvrgState& state, std::span<const std::size_t> batch,
                   std::span<double> out) {
  require_batch(batch);
  if (!state.initialized) throw std::logic_error("svrg_estimate called before svrg_refresh");
  diff_scratch.assign(model.dim(), 0.0);
  for (std::size_t i : batch) {
    model.add_grad_fi(theta, i, 1.0, diff_scratch);
    model.add_grad_fi(state.snapshot, i, -1.0, diff_scratch);
  }
  std::fill(out.begin(), out.end(), 0.0);
  simd::axpy(-1.0, prior_into_scratch(model, theta), out);
  simd::axpy(static_cast<double>(model.num_examples()) / static_cast<double>(batch.size()),
             diff_scratch, out);
  simd::axpy(1.0, state.snapshot_grad_sum, out);
}

void svrg_refresh(const PosteriorModel& model, std::span<const double> theta, SvrgState& state) {
  state.snapshot.assign(theta.begin(), theta.end());
  state.snapshot_grad_sum.resize(model.dim());
  likelihood_grad_sum(model, theta, state.snapshot_grad_sum);
  state.steps_since_snapshot = 0;
  state.initialized = true;
}

void saga_initialize(const PosteriorModel& model, std::span<const double> theta, SagaState& state) {
  const std::size_t n = model.num_examples();
  const std::size_t d = model.dim();
  state.grad_table = Matrix(n, d);
  state.running_sum.assign(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    model.add_grad_fi(theta, i, 1.0, state.grad_table.row(i));
    simd::axpy(1.0, state.grad_table.row(i), state.running_sum);
  }
  state.initialized = true;
}

void saga_estimate_and_update(const PosteriorModel& model, std::span<const double> theta_eval,
                              SagaState& state, std::span<const std::size_t> batch,
                              std::span<double> out) {
  require_batch(batch);
  if (!state.initialized) throw std::logic_error("saga_estimate_and_update called before saga_initialize");
  {
    std::vector<std::size_t> sorted(batch.begin(), batch.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw std::invalid_argument("SAGA batch contains duplicate indices");
    }
  }
  const std::size_t d = model.dim();
  if (saga_scratch.rows() != batch.size() || saga_scratch.cols() != d) {
    saga_scratch = Matrix(batch.size(), d);
  }
  diff_scratch.assign(d, 0.0);
  for (std::size_t r = 0; r < batch.size(); ++r) {
    auto fresh = saga_scratch.row(r);
    std::fill(fresh.begin(), fresh.end(), 0.0);
    model.add_grad_fi(theta_eval, batch[r], 1.0, fresh);
    simd::axpy(1.0, fresh, diff_scratch);
    simd::axpy(-1.0, state.grad_table.row(batch[r]), diff_scratch);
  }
  std::fill(out.begin(), out.end(), 0.0);
  simd::axpy(-1.0, prior_into_scratch(model, theta_eval), out);
  simd::axpy(static_cast<double>(model.num_examples()) / static_cast<double>(batch.size()),
             diff_scratch, out);
  simd::axpy(1.0, state.running_sum, out);

  simd::axpy(1.0, diff_scratch, state.running_sum);
  for (std::size_t r = 0; r < batch.size(); ++r) {
    const auto fresh = saga_scratch.row(r);
    std::copy(fresh.begin(), fresh.end(), state.grad_table.row(batch[r]).begin());
  }
}

// ---------------------------------------------------------------------------

BatchMode default_batch_mode(EstimatorKind kind) {
  return kind == EstimatorKind::Saga ? BatchMode::WithoutReplacement : BatchMode::WithReplacement;
}

std::size_t default_epoch_length(std::size_t n, std::size_t b) {
  return std::max<std::size_t>(1, b == 0 ? 1 : n / b);
}

std::size_t step_cost(EstimatorKind kind, std::size_t step, std::size_t n, std::size_t b,
                      std::size_t epoch_length) {
  switch (kind) {
    case EstimatorKind::Full: return n;
    case EstimatorKind::Stochastic: return b;
    case EstimatorKind::Svrg: return b + (step % std::max<std::size_t>(1, epoch_length) == 0 ? n : 0);
    case EstimatorKind::Saga: return b + (step == 0 ? n : 0);
  }
  return b;
}

std::size_t steps_for_passes(EstimatorKind kind, double passes, std::size_t n, std::size_t b,
                             std::size_t epoch_length) {
  const double budget = passes * static_cast<double>(n) * (1.0 + 1e-12);
  double spent = 0.0;
  std::size_t steps = 0;
  while (true) {
    const double next = spent + static_cast<double>(step_cost(kind, steps, n, b, epoch_length));
    if (next > budget) break;
    spent = next;
    ++steps;
  }
  return steps;
}

GradientEstimator::GradientEstimator(const PosteriorModel& model, EstimatorKind kind,
                                     EstimatorOptions options, RandomStream batch_stream)
    : model_(model),
      kind_(kind),
      options_(options),
      sampler_(model.num_examples(),
               kind == EstimatorKind::Full ? model.num_examples() : options.batch_size,
               kind == EstimatorKind::Full ? BatchMode::FullSweep : options.batch_mode, batch_stream) {
  if (kind == EstimatorKind::Svrg) {
    if (options_.epoch_length == 0) throw std::invalid_argument("SVRG epoch length K must be >= 1");
    svrg_.epoch_length = options_.epoch_length;
  }
  if (kind == EstimatorKind::Saga && options_.batch_mode == BatchMode::WithReplacement) {
    throw std::invalid_argument("SAGA needs distinct batch indices; use without-replacement batches");
  }
}

std::size_t GradientEstimator::next_step_cost() const {
  return step_cost(kind_, steps_, model_.num_examples(), options_.batch_size, options_.epoch_length);
}

double GradientEstimator::passes() const {
  return static_cast<double>(cost_) / static_cast<double>(model_.num_examples());
}

void GradientEstimator::estimate(std::span<const double> eval_point, std::span<double> out) {
  cost_ += next_step_cost();
  switch (kind_) {
    case EstimatorKind::Full:
      full_grad_f(model_, eval_point, out);
      break;
    case EstimatorKind::Stochastic:
      sg_estimate(model_, eval_point, sampler_.next(), out);
      break;
    case EstimatorKind::Svrg: {
      if (!svrg_.initialized || svrg_.steps_since_snapshot == 0) svrg_refresh(model_, eval_point, svrg_);
      svrg_estimate(model_, eval_point, svrg_, sampler_.next(), out);
      svrg_.steps_since_snapshot = (svrg_.steps_since_snapshot + 1) % svrg_.epoch_length;
      break;
    }
    case EstimatorKind::Saga:
      if (!saga_.initialized) saga_initialize(model_, eval_point, saga_);
      saga_estimate_and_update(model_, eval_point, saga_, sampler_.next(), out);
      break;
  }
  ++steps_;
}

}  // namespace vrhmc
