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

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "kernels_internal.hpp"

namespace vrhmc::simd {

#ifndef VRHMC_HAVE_AVX2
const KernelTable* detail::avx2_table() { return nullptr; }
#endif
#ifndef VRHMC_HAVE_NEON
const KernelTable* detail::neon_table() { return nullptr; }
#endif

namespace {

bool cpu_has(Level level) {
  switch (level) {
    case Level::Scalar:
      return true;
    case Level::Avx2:
#if defined(__x86_64__) || defined(__i386__)
      return detail::avx2_table() != nullptr && __builtin_cpu_supports("avx2") &&
             __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Level::Neon:
      // Advanced SIMD is mandatory on AArch64.
      return detail::neon_table() != nullptr;
  }
  return false;
}

Level best_level() {
  if (const char* env = std::getenv("VRHMC_SIMD")) {
    const std::string want(env);
    if (want == "scalar") return Level::Scalar;
    if (want == "avx2" && cpu_has(Level::Avx2)) return Level::Avx2;
    if (want == "neon" && cpu_has(Level::Neon)) return Level::Neon;
  }
  if (cpu_has(Level::Avx2)) return Level::Avx2;
  if (cpu_has(Level::Neon)) return Level::Neon;
  return Level::Scalar;
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{&kernels_for(detected_level())};
  return slot;
}

}  // namespace

std::string_view to_string(Level level) {
  switch (level) {
    case Level::Scalar: return "scalar";
    case Level::Avx2: return "avx2";
    case Level::Neon: return "neon";
  }
  return "unknown";
}

Level detected_level() {
  static const Level level = best_level();
  return level;
}

bool level_available(Level level) { return cpu_has(level); }

const KernelTable& kernels_for(Level level) {
  if (!cpu_has(level)) {
    throw std::invalid_argument("SIMD level unavailable: " + std::string(to_string(level)));
  }
  switch (level) {
    case Level::Avx2: return *detail::avx2_table();
    case Level::Neon: return *detail::neon_table();
    case Level::Scalar: break;
  }
  return scalar_kernels();
}

const KernelTable& active_kernels() { return *active_slot().load(std::memory_order_relaxed); }

void set_active_level(Level level) { active_slot().store(&kernels_for(level), std::memory_order_relaxed); }

}  // namespace vrhmc::simd
