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

#include "kernels_internal.hpp"

namespace vrhmc::simd {
namespace {

double dot(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

double squared_distance(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return s;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + a * x[i];
}

void axpy_to(double a, const double* x, const double* y, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = y[i] + a * x[i];
}

void scale(double a, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = a * y[i];
}

void first_order_update(const UpdateCoefficients& c, double* theta, double* p,
                        const double* grad, const double* xi, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) detail::first_order_element(c, theta[i], p[i], grad[i], xi[i]);
}

void splitting_update(const UpdateCoefficients& c, double* theta, double* p,
                      const double* grad, const double* xi, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) detail::splitting_element(c, theta[i], p[i], grad[i], xi[i]);
}

void langevin_update(const UpdateCoefficients& c, double* theta, const double* grad,
                     const double* xi, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) detail::langevin_element(c, theta[i], grad[i], xi[i]);
}

constexpr KernelTable kScalar{
    Level::Scalar,  dot,   squared_distance, axpy, axpy_to, scale, first_order_update,
    splitting_update, langevin_update,
};

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

}  // namespace vrhmc::simd
