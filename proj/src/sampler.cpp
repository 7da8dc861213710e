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

#include "vrhmc/sampler.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "vrhmc/simd/kernels.hpp"

namespace vrhmc {
namespace {

constexpr std::array<AlgorithmTraits, 11> kTraits{{
    {"SGLD", EstimatorKind::Stochastic, IntegratorKind::Langevin},
    {"SVRG-LD", EstimatorKind::Svrg, IntegratorKind::Langevin},
    {"SAGA-LD", EstimatorKind::Saga, IntegratorKind::Langevin},
    {"SGHMC", EstimatorKind::Stochastic, IntegratorKind::FirstOrder},
    {"SVRG-HMC", EstimatorKind::Svrg, IntegratorKind::FirstOrder},
    {"SAGA-HMC", EstimatorKind::Saga, IntegratorKind::FirstOrder},
    {"SVRG2nd-HMC", EstimatorKind::Svrg, IntegratorKind::Splitting},
    {"SAGA2nd-HMC", EstimatorKind::Saga, IntegratorKind::Splitting},
    {"LD", EstimatorKind::Full, IntegratorKind::Langevin},
    {"HMC", EstimatorKind::Full, IntegratorKind::FirstOrder},
    {"HMC2nd", EstimatorKind::Full, IntegratorKind::Splitting},
}};

simd::UpdateCoefficients coefficients(IntegratorKind kind, const IntegratorParams& p) {
  const double h = p.step_size;
  const double dh = p.friction * h;
  switch (kind) {
    case IntegratorKind::FirstOrder: return {1.0 - dh, h, std::sqrt(2.0 * dh)};
    case IntegratorKind::Splitting: return {std::exp(-0.5 * dh), h, std::sqrt(2.0 * dh)};
    case IntegratorKind::Langevin: return {1.0, h, std::sqrt(2.0 * h)};
  }
  return {};
}

bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

void check_finite(const ChainState& s, std::size_t step) {
  if (!all_finite(s.theta) || !all_finite(s.momentum)) {
    throw DivergenceError(step, "chain diverged at step " + std::to_string(step) +
                                    ": non-finite position or momentum");
  }
}

void require_sizes(const ChainState& s, std::span<const double> grad, std::span<const double> xi) {
  if (grad.size() != s.theta.size() || xi.size() != s.theta.size()) {
    throw std::invalid_argument("gradient and noise must match the parameter dimension");
  }
}

}  // namespace

AlgorithmTraits traits(Algorithm algorithm) { return kTraits[static_cast<std::size_t>(algorithm)]; }

std::string_view to_string(Algorithm algorithm) { return traits(algorithm).name; }

Algorithm parse_algorithm(std::string_view name) {
  for (std::size_t i = 0; i < kTraits.size(); ++i) {
    if (kTraits[i].name == name) return static_cast<Algorithm>(i);
  }
  throw ConfigError("unknown algorithm '" + std::string(name) + "'");
}

bool uses_momentum(Algorithm algorithm) {
  return traits(algorithm).integrator != IntegratorKind::Langevin;
}

void validate_config(const SamplerConfig& cfg, std::size_t n) {
  std::ostringstream err;
  const double h = cfg.step_size;
  const double d = cfg.friction;
  if (!(h > 0.0) || !std::isfinite(h)) err << "step size h must be > 0 (got " << h << "); ";
  if (cfg.steps < 1) err << "T must be >= 1; ";
  const bool full = traits(cfg.algorithm).estimator == EstimatorKind::Full;
  if (!full && (cfg.batch_size < 1 || cfg.batch_size > n)) {
    err << "batch size must satisfy 1 <= b <= n (b=" << cfg.batch_size << ", n=" << n << "); ";
  }
  if (uses_momentum(cfg.algorithm)) {
    if (!(d >= 1.0) || !std::isfinite(d)) err << "friction must satisfy D >= 1 (got " << d << "); ";
    if (!(d * h < 1.0)) err << "step size and friction must satisfy Dh < 1 (Dh=" << d * h << "); ";
  }
  if (!full && cfg.batch_mode == BatchMode::FullSweep && cfg.batch_size != n) {
    err << "full-sweep batches need b == n; ";
  }
  if (traits(cfg.algorithm).estimator == EstimatorKind::Saga &&
      cfg.batch_mode == BatchMode::WithReplacement) {
    err << "SAGA batches must be drawn without replacement; ";
  }
  const std::string msg = err.str();
  if (!msg.empty()) {
    throw ConfigError(std::string(to_string(cfg.algorithm)) + ": " + msg.substr(0, msg.size() - 2));
  }
}

ChainState hmc_step_1st(const ChainState& state, std::span<const double> grad,
                        const IntegratorParams& params, std::span<const double> xi) {
  require_sizes(state, grad, xi);
  ChainState next = state;
  const auto c = coefficients(IntegratorKind::FirstOrder, params);
  simd::active_kernels().first_order_update(c, next.theta.data(), next.momentum.data(), grad.data(),
                                            xi.data(), next.theta.size());
  ++next.t;
  check_finite(next, next.t);
  return next;
}

ChainState hmc_step_split(const ChainState& state, const GradientProvider& gradient,
                          const IntegratorParams& params, std::span<const double> xi) {
  const std::size_t d = state.theta.size();
  Vector eval(d);
  Vector grad(d);
  simd::axpy_to(0.5 * params.step_size, state.momentum, state.theta, eval);
  gradient(eval, grad);
  require_sizes(state, grad, xi);
  ChainState next = state;
  const auto c = coefficients(IntegratorKind::Splitting, params);
  simd::active_kernels().splitting_update(c, next.theta.data(), next.momentum.data(), grad.data(),
                                          xi.data(), d);
  ++next.t;
  check_finite(next, next.t);
  return next;
}

ChainState ld_step(const ChainState& state, std::span<const double> grad,
                   const IntegratorParams& params, std::span<const double> xi) {
  require_sizes(state, grad, xi);
  ChainState next = state;
  const auto c = coefficients(IntegratorKind::Langevin, params);
  simd::active_kernels().langevin_update(c, next.theta.data(), grad.data(), xi.data(), next.theta.size());
  ++next.t;
  check_finite(next, next.t);
  return next;
}

RandomStream chain_stream(std::uint64_t seed, std::uint64_t stream) { return RandomStream(seed, stream); }

ChainResult run_chain(const PosteriorModel& model, const SamplerConfig& cfg,
                      const StepCallback& on_step) {
  const std::size_t d = model.dim();
  const std::size_t n = model.num_examples();
  const AlgorithmTraits tr = traits(cfg.algorithm);

  ChainResult result;
  result.final_state.theta = cfg.initial_theta.value_or(Vector(d, 0.0));
  result.final_state.momentum = Vector(d, 0.0);
  if (cfg.initial_momentum) result.final_state.momentum = *cfg.initial_momentum;
  if (result.final_state.theta.size() != d || result.final_state.momentum.size() != d) {
    throw ConfigError("initial state dimension does not match the model");
  }
  if (cfg.steps == 0) return result;
  validate_config(cfg, n);

  EstimatorOptions opts;
  opts.batch_size = cfg.batch_size;
  opts.epoch_length = cfg.epoch_length == 0 ? default_epoch_length(n, cfg.batch_size) : cfg.epoch_length;
  opts.batch_mode = cfg.batch_mode.value_or(default_batch_mode(tr.estimator));
  if (tr.estimator == EstimatorKind::Full) {
    // The batch size is meaningless for the full gradient.
    opts.batch_size = n;
    opts.batch_mode = BatchMode::FullSweep;
  }

  const RandomStream root = chain_stream(cfg.seed, cfg.stream);
  GradientEstimator estimator(model, tr.estimator, opts, root.split(1));
  RandomStream noise = root.split(2);

  const IntegratorParams params{cfg.step_size, cfg.friction};
  const auto coeff = coefficients(tr.integrator, params);
  const simd::KernelTable& k = simd::active_kernels();

  ChainState& s = result.final_state;
  Vector grad(d), xi(d), eval(d);
  for (std::size_t step = 0; step < cfg.steps; ++step) {
    if (tr.integrator == IntegratorKind::Splitting) {
      k.axpy_to(0.5 * cfg.step_size, s.momentum.data(), s.theta.data(), eval.data(), d);
    } else {
      std::copy(s.theta.begin(), s.theta.end(), eval.begin());
    }
    estimator.estimate(eval, grad);
    noise.fill_normal(xi);
    switch (tr.integrator) {
      case IntegratorKind::FirstOrder:
        k.first_order_update(coeff, s.theta.data(), s.momentum.data(), grad.data(), xi.data(), d);
        break;
      case IntegratorKind::Splitting:
        k.splitting_update(coeff, s.theta.data(), s.momentum.data(), grad.data(), xi.data(), d);
        break;
      case IntegratorKind::Langevin:
        k.langevin_update(coeff, s.theta.data(), grad.data(), xi.data(), d);
        break;
    }
    s.t = step + 1;
    check_finite(s, s.t);
    if (on_step) on_step(StepView{s.t, s.theta, s.momentum, grad, eval, estimator.passes()});
  }
  result.steps = cfg.steps;
  result.passes = estimator.passes();
  return result;
}

}  // namespace vrhmc
