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
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "vrhmc/estimator.hpp"
#include "vrhmc/linalg.hpp"
#include "vrhmc/model.hpp"

namespace vrhmc {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A chain produced a non-finite position or momentum.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::size_t step, const std::string& what)
      : std::runtime_error(what), step_(step) {}
  /// 1-based index of the step whose output was non-finite.
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

enum class IntegratorKind {
  FirstOrder,  // p' = (1-Dh)p - h g + sqrt(2Dh) xi ; theta' = theta + h p'
  Splitting,   // symmetric splitting, gradient at theta + (h/2) p
  Langevin,    // theta' = theta - h g + sqrt(2h) xi, no momentum
};

enum class Algorithm {
  SGLD,
  SVRG_LD,
  SAGA_LD,
  SGHMC,
  SVRG_HMC,
  SAGA_HMC,
  SVRG2nd_HMC,
  SAGA2nd_HMC,
  // Full-gradient references.
  LD,
  HMC,
  HMC2nd,
};

struct AlgorithmTraits {
  std::string_view name;
  EstimatorKind estimator;
  IntegratorKind integrator;
};

AlgorithmTraits traits(Algorithm algorithm);
std::string_view to_string(Algorithm algorithm);
/// Accepts the names printed by to_string, e.g. "SVRG2nd-HMC".
Algorithm parse_algorithm(std::string_view name);
bool uses_momentum(Algorithm algorithm);

struct SamplerConfig {
  Algorithm algorithm = Algorithm::SGHMC;
  double step_size = 0.0;     // h
  double friction = 1.0;      // D, ignored by Langevin samplers
  std::size_t steps = 0;      // T
  std::size_t batch_size = 10;
  std::size_t epoch_length = 0;  // K; 0 means floor(n / b)
  std::optional<BatchMode> batch_mode;  // default per estimator
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::optional<Vector> initial_theta;  // default zero
  std::optional<Vector> initial_momentum;
};

/// Throws ConfigError unless h > 0, T >= 1, 1 <= b <= n and, for the
/// momentum samplers, D >= 1 and D h < 1.
void validate_config(const SamplerConfig& cfg, std::size_t n);

struct ChainState {
  Vector theta;
  Vector momentum;
  std::size_t t = 0;
};

/// Deterministic integrator constants for one (h, D).
struct IntegratorParams {
  double step_size;
  double friction;
};

/// First-order update. Pure; throws DivergenceError on non-finite output.
ChainState hmc_step_1st(const ChainState& state, std::span<const double> grad,
                        const IntegratorParams& params, std::span<const double> xi);

/// Supplies the gradient estimate at a given evaluation point.
using GradientProvider = std::function<void(std::span<const double> eval_point, std::span<double> out)>;

/// Symmetric-splitting update in collapsed form:
///   p'     = e^{-Dh/2} (e^{-Dh/2} p - h g + sqrt(2Dh) xi)
///   theta' = theta + (h/2) p' + (h/2) p
/// with g requested from `gradient` at theta + (h/2) p.
ChainState hmc_step_split(const ChainState& state, const GradientProvider& gradient,
                          const IntegratorParams& params, std::span<const double> xi);

/// Langevin update theta' = theta - h g + sqrt(2h) xi; momentum is left as is.
ChainState ld_step(const ChainState& state, std::span<const double> grad,
                   const IntegratorParams& params, std::span<const double> xi);

/// What a chain callback sees after step t (1-based).
struct StepView {
  std::size_t t;
  std::span<const double> theta;
  std::span<const double> momentum;
  std::span<const double> gradient_estimate;
  std::span<const double> eval_point;
  double passes;
};

using StepCallback = std::function<void(const StepView&)>;

struct ChainResult {
  ChainState final_state;
  std::size_t steps = 0;
  double passes = 0.0;
};

/// Runs cfg.steps iterations from theta_0 (default 0) and p_0 (default 0),
/// calling `on_step` with each theta_t. Batch indices and injected noise come
/// from separate child streams of (cfg.seed, cfg.stream), so two algorithms
/// with the same seed see the same noise sequence. T = 0 returns at once.
ChainResult run_chain(const PosteriorModel& model, const SamplerConfig& cfg,
                      const StepCallback& on_step = {});

/// Root stream identifying a chain.
RandomStream chain_stream(std::uint64_t seed, std::uint64_t stream);

}  // namespace vrhmc
