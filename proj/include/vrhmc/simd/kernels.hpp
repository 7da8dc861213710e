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

#include <cassert>
#include <cstddef>
#include <span>
#include <string_view>

namespace vrhmc::simd {

enum class Level { Scalar, Avx2, Neon };

std::string_view to_string(Level level);

/// Coefficients of the momentum-space integrator updates. Precomputed once per
/// chain so the kernels do no transcendental work.
struct UpdateCoefficients {
  double momentum_decay = 1.0;  // (1 - Dh) or e^{-Dh/2}
  double step = 0.0;            // h
  double noise_scale = 0.0;     // sqrt(2Dh) or sqrt(2h)
};

/// Function table for one instruction set. Every entry has a scalar reference
/// implementation; vector variants must agree bitwise on elementwise entries
/// and to rounding on reductions.
struct KernelTable {
  Level level;
  double (*dot)(const double* x, const double* y, std::size_t n);
  double (*squared_distance)(const double* x, const double* y, std::size_t n);
  // y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // out = y + a * x
  void (*axpy_to)(double a, const double* x, const double* y, double* out, std::size_t n);
  // y = a * y
  void (*scale)(double a, double* y, std::size_t n);
  // p = c.decay * p - c.step * grad + c.noise * xi ; theta += c.step * p
  void (*first_order_update)(const UpdateCoefficients& c, double* theta, double* p,
                             const double* grad, const double* xi, std::size_t n);
  // p' = c.decay * (c.decay * p - c.step * grad + c.noise * xi)
  // theta += (c.step / 2) * p' + (c.step / 2) * p ; p = p'
  void (*splitting_update)(const UpdateCoefficients& c, double* theta, double* p,
                           const double* grad, const double* xi, std::size_t n);
  // theta = theta - c.step * grad + c.noise * xi
  void (*langevin_update)(const UpdateCoefficients& c, double* theta, const double* grad,
                          const double* xi, std::size_t n);
};

const KernelTable& scalar_kernels();

/// Best table the running CPU supports. Honors VRHMC_SIMD=scalar|avx2|neon.
Level detected_level();

/// Kernel table for `level`; throws std::invalid_argument if the level was not
/// compiled in or the CPU lacks it.
const KernelTable& kernels_for(Level level);
bool level_available(Level level);

/// Table used by the library entry points below.
const KernelTable& active_kernels();
void set_active_level(Level level);

inline double dot(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  return active_kernels().dot(x.data(), y.data(), x.size());
}

inline double squared_distance(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  return active_kernels().squared_distance(x.data(), y.data(), x.size());
}

inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  active_kernels().axpy(a, x.data(), y.data(), x.size());
}

inline void axpy_to(double a, std::span<const double> x, std::span<const double> y,
                    std::span<double> out) {
  assert(x.size() == y.size() && y.size() == out.size());
  active_kernels().axpy_to(a, x.data(), y.data(), out.data(), x.size());
}

inline void scale(double a, std::span<double> y) {
  active_kernels().scale(a, y.data(), y.size());
}

}  // namespace vrhmc::simd
