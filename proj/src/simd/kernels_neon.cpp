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

#include <arm_neon.h>

#include "kernels_internal.hpp"

namespace vrhmc::simd {
namespace {

double dot(const double* x, const double* y, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(x + i), vld1q_f64(y + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(x + i + 2), vld1q_f64(y + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

double squared_distance(const double* x, const double* y, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t d = vsubq_f64(vld1q_f64(x + i), vld1q_f64(y + i));
    acc = vfmaq_f64(acc, d, d);
  }
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return s;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(va, vld1q_f64(x + i))));
  for (; i < n; ++i) y[i] = y[i] + a * x[i];
}

void axpy_to(double a, const double* x, const double* y, double* out, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(va, vld1q_f64(x + i))));
  for (; i < n; ++i) out[i] = y[i] + a * x[i];
}

void scale(double a, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vmulq_f64(va, vld1q_f64(y + i)));
  for (; i < n; ++i) y[i] = a * y[i];
}

void first_order_update(const UpdateCoefficients& c, double* theta, double* p,
                        const double* grad, const double* xi, std::size_t n) {
  const float64x2_t decay = vdupq_n_f64(c.momentum_decay);
  const float64x2_t step = vdupq_n_f64(c.step);
  const float64x2_t noise = vdupq_n_f64(c.noise_scale);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t pn = vaddq_f64(vsubq_f64(vmulq_f64(decay, vld1q_f64(p + i)), vmulq_f64(step, vld1q_f64(grad + i))),
                                     vmulq_f64(noise, vld1q_f64(xi + i)));
    vst1q_f64(p + i, pn);
    vst1q_f64(theta + i, vaddq_f64(vld1q_f64(theta + i), vmulq_f64(step, pn)));
  }
  for (; i < n; ++i) detail::first_order_element(c, theta[i], p[i], grad[i], xi[i]);
}

void splitting_update(const UpdateCoefficients& c, double* theta, double* p,
                      const double* grad, const double* xi, std::size_t n) {
  const float64x2_t decay = vdupq_n_f64(c.momentum_decay);
  const float64x2_t step = vdupq_n_f64(c.step);
  const float64x2_t half = vdupq_n_f64(0.5 * c.step);
  const float64x2_t noise = vdupq_n_f64(c.noise_scale);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t vp = vld1q_f64(p + i);
    const float64x2_t inner = vaddq_f64(vsubq_f64(vmulq_f64(decay, vp), vmulq_f64(step, vld1q_f64(grad + i))),
                                        vmulq_f64(noise, vld1q_f64(xi + i)));
    const float64x2_t pn = vmulq_f64(decay, inner);
    const float64x2_t dtheta = vaddq_f64(vmulq_f64(half, pn), vmulq_f64(half, vp));
    vst1q_f64(theta + i, vaddq_f64(vld1q_f64(theta + i), dtheta));
    vst1q_f64(p + i, pn);
  }
  for (; i < n; ++i) detail::splitting_element(c, theta[i], p[i], grad[i], xi[i]);
}

void langevin_update(const UpdateCoefficients& c, double* theta, const double* grad,
                     const double* xi, std::size_t n) {
  const float64x2_t step = vdupq_n_f64(c.step);
  const float64x2_t noise = vdupq_n_f64(c.noise_scale);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t drift = vsubq_f64(vld1q_f64(theta + i), vmulq_f64(step, vld1q_f64(grad + i)));
    vst1q_f64(theta + i, vaddq_f64(drift, vmulq_f64(noise, vld1q_f64(xi + i))));
  }
  for (; i < n; ++i) detail::langevin_element(c, theta[i], grad[i], xi[i]);
}

constexpr KernelTable kNeon{
    Level::Neon,    dot,   squared_distance, axpy, axpy_to, scale, first_order_update,
    splitting_update, langevin_update,
};

}  // namespace

const KernelTable* detail::neon_table() { return &kNeon; }

}  // namespace vrhmc::simd
