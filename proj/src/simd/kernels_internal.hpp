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

#include "vrhmc/simd/kernels.hpp"

namespace vrhmc::simd::detail {

// Per-element forms shared by every table so vector tails round exactly like
// the scalar reference. Operation order here is the contract.
inline void first_order_element(const UpdateCoefficients& c, double& theta, double& p,
                                double grad, double xi) {
  const double pn = (c.momentum_decay * p - c.step * grad) + c.noise_scale * xi;
  p = pn;
  theta = theta + c.step * pn;
}

inline void splitting_element(const UpdateCoefficients& c, double& theta, double& p,
                              double grad, double xi) {
  const double half = 0.5 * c.step;
  const double inner = (c.momentum_decay * p - c.step * grad) + c.noise_scale * xi;
  const double pn = c.momentum_decay * inner;
  theta = theta + (half * pn + half * p);
  p = pn;
}

inline void langevin_element(const UpdateCoefficients& c, double& theta, double grad,
                             double xi) {
  theta = (theta - c.step * grad) + c.noise_scale * xi;
}

const KernelTable* avx2_table();  // nullptr when not compiled in
const KernelTable* neon_table();

}  // namespace vrhmc::simd::detail
