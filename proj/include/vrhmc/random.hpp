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

#include <array>
#include <cstdint>
#include <span>

namespace vrhmc {

/// Philox4x32-10 block function: maps a 128-bit counter and 64-bit key to 128
/// random bits. Stateless, so any block of any stream can be computed directly.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

/// SplitMix64 finalizer; used to derive child keys.
std::uint64_t mix64(std::uint64_t x);

/// Reproducible random stream over Philox blocks. The counter's high half is a
/// stream id and its low half the block position, so streams never overlap.
/// Child streams are derived with split(), which depends only on the parent's
/// identity and the tag, never on how far the parent has been consumed.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  RandomStream split(std::uint64_t tag) const;

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1) with 53-bit resolution.
  double uniform();
  /// Uniform integer in [0, bound); bound > 0. Lemire's multiply-shift with rejection.
  std::uint64_t uniform_index(std::uint64_t bound);
  /// Standard normal by the Marsaglia polar method.
  double normal();
  void fill_normal(std::span<double> out);

  std::uint64_t key() const { return key_; }
  std::uint64_t stream_id() const { return stream_; }
  std::uint64_t position() const { return position_; }

 private:
  void refill();

  std::uint64_t key_;
  std::uint64_t stream_;
  std::uint64_t position_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace vrhmc
