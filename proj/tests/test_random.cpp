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

#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "vrhmc/random.hpp"

using namespace vrhmc;

namespace {

// Independent round-by-round Philox4x32-10 for cross-checking.
std::array<std::uint32_t, 4> philox_oracle(std::array<std::uint32_t, 4> c, std::array<std::uint32_t, 2> k) {
  for (int r = 0; r < 10; ++r) {
    const std::uint64_t p0 = std::uint64_t{0xD2511F53} * c[0];
    const std::uint64_t p1 = std::uint64_t{0xCD9E8D57} * c[2];
    c = {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
         static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
    k[0] += 0x9E3779B9;
    k[1] += 0xBB67AE85;
  }
  return c;
}

}  // namespace

TEST_CASE("philox known-answer vectors") {
  using A4 = std::array<std::uint32_t, 4>;
  CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("philox agrees with an independent round implementation") {
  RandomStream rng(99);
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t a = rng.next_u64(), b = rng.next_u64(), c = rng.next_u64();
    const std::array<std::uint32_t, 4> ctr{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                                           static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    const std::array<std::uint32_t, 2> key{static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32)};
    REQUIRE(philox4x32_10(ctr, key) == philox_oracle(ctr, key));
  }
}

TEST_CASE("mix64 matches the SplitMix64 reference") {
  // Successive SplitMix64 outputs from state 0.
  CHECK(mix64(0) == 0xE220A8397B1DCDAFULL);
  CHECK(mix64(0x9E3779B97F4A7C15ULL) == 0x6E789E6AA1B965F4ULL);
}

TEST_CASE("streams are reproducible and distinct") {
  RandomStream a(5, 1), b(5, 1), c(5, 2), d(6, 1);
  std::vector<std::uint64_t> va, vb, vc, vd;
  for (int i = 0; i < 64; ++i) {
    va.push_back(a.next_u64());
    vb.push_back(b.next_u64());
    vc.push_back(c.next_u64());
    vd.push_back(d.next_u64());
  }
  CHECK(va == vb);
  CHECK(va != vc);
  CHECK(va != vd);
}

TEST_CASE("split depends on identity and tag only") {
  RandomStream parent(11, 3);
  const RandomStream early = parent.split(1);
  for (int i = 0; i < 100; ++i) parent.next_u64();
  RandomStream late = parent.split(1);
  RandomStream e = early;
  for (int i = 0; i < 16; ++i) CHECK(e.next_u64() == late.next_u64());
  CHECK(parent.split(1).key() != parent.split(2).key());
}

TEST_CASE("uniform stays in the open unit interval") {
  RandomStream rng(1);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / n - 0.5) < 5.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST_CASE("uniform_index covers the range evenly") {
  RandomStream rng(2);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const auto k = rng.uniform_index(7);
    REQUIRE(k < 7);
    ++counts[k];
  }
  for (int c : counts) CHECK(std::abs(c - 10000) < 5 * std::sqrt(10000.0));
  CHECK(rng.uniform_index(1) == 0);
}

TEST_CASE("normal draws have unit moments") {
  RandomStream rng(3);
  const int n = 400000;
  double s1 = 0.0, s2 = 0.0, s4 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s1 += z;
    s2 += z * z;
    s4 += z * z * z * z;
  }
  CHECK(std::abs(s1 / n) < 5.0 / std::sqrt(n));
  CHECK(std::abs(s2 / n - 1.0) < 5.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(s4 / n - 3.0) < 5.0 * std::sqrt(96.0 / n));

  RandomStream r1(4), r2(4);
  std::vector<double> buf(9);
  r1.fill_normal(buf);
  for (double x : buf) CHECK(x == r2.normal());
}
