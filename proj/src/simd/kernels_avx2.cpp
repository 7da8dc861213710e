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

#include <immintrin.h>

#include "kernels_internal.hpp"

namespace vrhmc::simd {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

double squared_distance(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return s;
}

// Elementwise kernels use separate mul/add (no FMA) to match the scalar path bitwise.

void axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r = _mm256_add_pd(_mm256_loadu_pd(y + i), _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    _mm256_storeu_pd(y + i, r);
  }
  for (; i < n; ++i) y[i] = y[i] + a * x[i];
}

void axpy_to(double a, const double* x, const double* y, double* out, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r = _mm256_add_pd(_mm256_loadu_pd(y + i), _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    _mm256_storeu_pd(out + i, r);
  }
  for (; i < n; ++i) out[i] = y[i] + a * x[i];
}

void scale(double a, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(y + i, _mm256_mul_pd(va, _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] = a * y[i];
}

void first_order_update(const UpdateCoefficients& c, double* theta, double* p,
                        const double* grad, const double* xi, std::size_t n) {
  const __m256d decay = _mm256_set1_pd(c.momentum_decay);
  const __m256d step = _mm256_set1_pd(c.step);
  const __m256d noise = _mm256_set1_pd(c.noise_scale);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vp = _mm256_loadu_pd(p + i);
    const __m256d vg = _mm256_loadu_pd(grad + i);
    const __m256d vx = _mm256_loadu_pd(xi + i);
    const __m256d pn = _mm256_add_pd(_mm256_sub_pd(_mm256_mul_pd(decay, vp), _mm256_mul_pd(step, vg)),
                                     _mm256_mul_pd(noise, vx));
    _mm256_storeu_pd(p + i, pn);
    _mm256_storeu_pd(theta + i, _mm256_add_pd(_mm256_loadu_pd(theta + i), _mm256_mul_pd(step, pn)));
  }
  for (; i < n; ++i) detail::first_order_element(c, theta[i], p[i], grad[i], xi[i]);
}

void splitting_update(const UpdateCoefficients& c, double* theta, double* p,
                      const double* grad, const double* xi, std::size_t n) {
  const __m256d decay = _mm256_set1_pd(c.momentum_decay);
  const __m256d step = _mm256_set1_pd(c.step);
  const __m256d half = _mm256_set1_pd(0.5 * c.step);
  const __m256d noise = _mm256_set1_pd(c.noise_scale);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vp = _mm256_loadu_pd(p + i);
    const __m256d vg = _mm256_loadu_pd(grad + i);
    const __m256d vx = _mm256_loadu_pd(xi + i);
    const __m256d inner = _mm256_add_pd(
        _mm256_sub_pd(_mm256_mul_pd(decay, vp), _mm256_mul_pd(step, vg)), _mm256_mul_pd(noise, vx));
    const __m256d pn = _mm256_mul_pd(decay, inner);
    const __m256d dtheta = _mm256_add_pd(_mm256_mul_pd(half, pn), _mm256_mul_pd(half, vp));
    _mm256_storeu_pd(theta + i, _mm256_add_pd(_mm256_loadu_pd(theta + i), dtheta));
    _mm256_storeu_pd(p + i, pn);
  }
  for (; i < n; ++i) detail::splitting_element(c, theta[i], p[i], grad[i], xi[i]);
}

void langevin_update(const UpdateCoefficients& c, double* theta, const double* grad,
                     const double* xi, std::size_t n) {
  const __m256d step = _mm256_set1_pd(c.step);
  const __m256d noise = _mm256_set1_pd(c.noise_scale);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d drift = _mm256_sub_pd(_mm256_loadu_pd(theta + i), _mm256_mul_pd(step, _mm256_loadu_pd(grad + i)));
    _mm256_storeu_pd(theta + i, _mm256_add_pd(drift, _mm256_mul_pd(noise, _mm256_loadu_pd(xi + i))));
  }
  for (; i < n; ++i) detail::langevin_element(c, theta[i], grad[i], xi[i]);
}

constexpr KernelTable kAvx2{
    Level::Avx2,    dot,   squared_distance, axpy, axpy_to, scale, first_order_update,
    splitting_update, langevin_update,
};

}  // namespace

const KernelTable* detail::avx2_table() { return &kAvx2; }

}  // namespace vrhmc::simd
