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

#include <algorithm>
#include <numeric>
#include <set>

#include "test_support.hpp"
#include "vrhmc/estimator.hpp"

using namespace vrhmc;
using vrhmc::testing::QuadraticModel;
using vrhmc::testing::relative_error;

namespace {

Vector single(double v) { return Vector{v}; }

double sg1(const PosteriorModel& m, double theta, std::size_t i) {
  Vector out(1);
  const std::size_t batch[] = {i};
  sg_estimate(m, single(theta), batch, out);
  return out[0];
}

}  // namespace

TEST_CASE("batch sampler modes") {
  SUBCASE("full sweep enumerates every index in order") {
    MinibatchSampler s(5, 5, BatchMode::FullSweep, RandomStream(1));
    for (int r = 0; r < 3; ++r) {
      const auto b = s.next();
      CHECK(std::vector<std::size_t>(b.begin(), b.end()) == std::vector<std::size_t>{0, 1, 2, 3, 4});
    }
    CHECK_THROWS(MinibatchSampler(5, 4, BatchMode::FullSweep, RandomStream(1)));
  }
  SUBCASE("without replacement has distinct indices") {
    MinibatchSampler s(20, 7, BatchMode::WithoutReplacement, RandomStream(2));
    std::vector<int> counts(20, 0);
    for (int r = 0; r < 2000; ++r) {
      const auto b = s.next();
      REQUIRE(b.size() == 7);
      const std::set<std::size_t> uniq(b.begin(), b.end());
      REQUIRE(uniq.size() == 7);
      for (auto i : b) ++counts[i];
    }
    for (int c : counts) CHECK(std::abs(c - 700) < 5 * std::sqrt(700.0));
  }
  SUBCASE("with replacement stays in range") {
    MinibatchSampler s(3, 3, BatchMode::WithReplacement, RandomStream(3));
    for (auto i : s.next()) CHECK(i < 3);
  }
  CHECK_THROWS(MinibatchSampler(3, 0, BatchMode::WithReplacement, RandomStream(3)));
  CHECK_THROWS(MinibatchSampler(3, 4, BatchMode::WithoutReplacement, RandomStream(3)));
  CHECK(parse_batch_mode(to_string(BatchMode::WithoutReplacement)) == BatchMode::WithoutReplacement);
  CHECK_THROWS(parse_batch_mode("bogus"));
}

TEST_CASE("plain estimator") {
  QuadraticModel m({1, 3});
  CHECK(sg1(m, 1.0, 0) == 2.0);
  CHECK(sg1(m, 1.0, 1) == 6.0);
  CHECK((sg1(m, 1.0, 0) + sg1(m, 1.0, 1)) / 2 == full_grad_f(m, single(1.0))[0]);

  QuadraticModel p({1, 2, 3}, 2, 1.0);
  const Vector theta{0.4, -1.1};
  Vector out(2);
  const std::size_t all[] = {0, 1, 2};
  sg_estimate(p, theta, all, out);
  CHECK(relative_error(out, full_grad_f(p, theta)) < 1e-15);

  const std::size_t dup[] = {1, 1};
  sg_estimate(p, theta, dup, out);
  CHECK(out[0] == doctest::Approx(3 * 2 * 0.4 + 0.4));
  CHECK(out[1] == doctest::Approx(3 * 2 * -1.1 - 1.1));
}

TEST_CASE("svrg estimator") {
  QuadraticModel m({1, 2, 3});
  SvrgState st;
  svrg_refresh(m, single(1.0), st);
  CHECK(st.snapshot_grad_sum == Vector{6.0});
  std::vector<double> est;
  for (std::size_t i = 0; i < 3; ++i) {
    Vector out(1);
    const std::size_t b[] = {i};
    svrg_estimate(m, single(2.0), st, b, out);
    est.push_back(out[0]);
  }
  CHECK(est == std::vector<double>{9, 12, 15});
  CHECK((est[0] + est[1] + est[2]) / 3 == full_grad_f(m, single(2.0))[0]);

  SUBCASE("estimate at the snapshot is the full gradient for any batch") {
    QuadraticModel q({1, 2, 3, 0.5}, 3, 1.0);
    const Vector w{0.3, -0.7, 1.9};
    SvrgState s;
    svrg_refresh(q, w, s);
    const Vector full = full_grad_f(q, w);
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = 0; j < 4; ++j) {
        Vector out(3);
        const std::size_t b[] = {i, j};
        svrg_estimate(q, w, s, b, out);
        CHECK(relative_error(out, full) < 1e-15);
      }
    }
  }
  SUBCASE("zero model leaves only the prior") {
    QuadraticModel z({0, 0}, 2, 1.0);
    SvrgState s;
    svrg_refresh(z, Vector{5, 5}, s);
    CHECK(s.snapshot_grad_sum == Vector{0, 0});
    Vector out(2);
    const std::size_t b[] = {0};
    svrg_estimate(z, Vector{1, 1}, s, b, out);
    CHECK(out == Vector{1, 1});
  }
  SvrgState fresh;
  Vector out(1);
  const std::size_t b[] = {0};
  CHECK_THROWS(svrg_estimate(m, single(1.0), fresh, b, out));
}

TEST_CASE("svrg variance shrinks quadratically near the snapshot") {
  QuadraticModel m({0.5, 1, 4, 2, 3}, 1);
  const double w = 1.0;
  SvrgState st;
  svrg_refresh(m, single(w), st);
  const auto variance = [&](double delta) {
    double s = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < 5; ++i) {
      Vector out(1);
      const std::size_t b[] = {i};
      svrg_estimate(m, single(w + delta), st, b, out);
      s += out[0];
      s2 += out[0] * out[0];
    }
    return s2 / 5 - (s / 5) * (s / 5);
  };
  const double v1 = variance(0.1), v2 = variance(0.05);
  CHECK(v1 > 0.0);
  CHECK(v1 / v2 == doctest::Approx(4.0).epsilon(1e-6));
}

TEST_CASE("saga estimator") {
  QuadraticModel m({1, 2});
  std::vector<double> est;
  for (std::size_t i = 0; i < 2; ++i) {
    SagaState st;
    saga_initialize(m, single(1.0), st);
    Vector out(1);
    const std::size_t b[] = {i};
    saga_estimate_and_update(m, single(2.0), st, b, out);
    est.push_back(out[0]);
    CHECK(st.grad_table(i, 0) == grad_fi(m, single(2.0), i)[0]);
    const double col = st.grad_table(0, 0) + st.grad_table(1, 0);
    CHECK(st.running_sum[0] == col);
  }
  CHECK(est == std::vector<double>{5, 7});
  CHECK((est[0] + est[1]) / 2 == full_grad_f(m, single(2.0))[0]);

  SUBCASE("fresh table at the evaluation point gives the full gradient") {
    QuadraticModel q({1, 2, 3}, 2, 1.0);
    const Vector t0{0.2, 0.9};
    SagaState st;
    saga_initialize(q, t0, st);
    Vector out(2);
    const std::size_t b[] = {2, 0};
    saga_estimate_and_update(q, t0, st, b, out);
    CHECK(relative_error(out, full_grad_f(q, t0)) < 1e-15);
  }
  SUBCASE("duplicates are rejected") {
    SagaState st;
    saga_initialize(m, single(1.0), st);
    Vector out(1);
    const std::size_t b[] = {1, 1};
    CHECK_THROWS(saga_estimate_and_update(m, single(2.0), st, b, out));
  }
}

TEST_CASE("saga running sum stays consistent over many updates") {
  QuadraticModel m({1, 2, 3, 4, 5, 6}, 2);
  GradientEstimator est(m, EstimatorKind::Saga, {3, 1, BatchMode::WithoutReplacement}, RandomStream(4));
  RandomStream rng(5);
  Vector out(2);
  for (int s = 0; s < 200; ++s) {
    est.estimate(Vector{rng.normal(), rng.normal()}, out);
  }
  const auto& st = est.saga_state();
  for (std::size_t j = 0; j < 2; ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < 6; ++i) col += st.grad_table(i, j);
    CHECK(st.running_sum[j] == doctest::Approx(col).epsilon(1e-12));
  }
}

TEST_CASE("estimator pass accounting") {
  const std::size_t n = 100, b = 10, k = 10;
  CHECK(step_cost(EstimatorKind::Stochastic, 0, n, b, k) == 10);
  CHECK(step_cost(EstimatorKind::Full, 3, n, b, k) == 100);
  CHECK(step_cost(EstimatorKind::Svrg, 0, n, b, k) == 110);
  CHECK(step_cost(EstimatorKind::Svrg, 1, n, b, k) == 10);
  CHECK(step_cost(EstimatorKind::Svrg, 10, n, b, k) == 110);
  CHECK(step_cost(EstimatorKind::Saga, 0, n, b, k) == 110);
  CHECK(step_cost(EstimatorKind::Saga, 1, n, b, k) == 10);
  CHECK(steps_for_passes(EstimatorKind::Stochastic, 5, n, b, k) == 50);
  CHECK(steps_for_passes(EstimatorKind::Full, 5, n, b, k) == 5);
  CHECK(steps_for_passes(EstimatorKind::Svrg, 2, n, b, k) == 10);
  CHECK(steps_for_passes(EstimatorKind::Saga, 2, n, b, k) == 10);
  CHECK(default_epoch_length(768, 10) == 76);
  CHECK(default_epoch_length(5, 10) == 1);

  QuadraticModel m(std::vector<double>(n, 1.0));
  GradientEstimator e(m, EstimatorKind::Svrg, {b, k, BatchMode::WithReplacement}, RandomStream(1));
  Vector out(1);
  for (int s = 0; s < 10; ++s) e.estimate(single(0.5), out);
  CHECK(e.passes() == doctest::Approx(2.0));
  CHECK(e.next_step_cost() == 110);
}

TEST_CASE("estimator refreshes the snapshot every K steps at the evaluation point") {
  QuadraticModel m({1, 2, 3, 4});
  GradientEstimator e(m, EstimatorKind::Svrg, {2, 3, BatchMode::WithReplacement}, RandomStream(9));
  Vector out(1);
  const double points[] = {0.5, 0.7, 0.9, 1.1, 1.3};
  for (double p : points) e.estimate(single(p), out);
  CHECK(e.svrg_state().snapshot == Vector{1.1});
  CHECK(e.svrg_state().snapshot_grad_sum[0] == doctest::Approx(11.0));
}

TEST_CASE("estimators are deterministic under the batch stream") {
  QuadraticModel m({1, 2, 3, 4, 5, 6, 7}, 2, 1.0);
  for (auto kind : {EstimatorKind::Stochastic, EstimatorKind::Svrg, EstimatorKind::Saga}) {
    const EstimatorOptions o{3, 2, default_batch_mode(kind)};
    GradientEstimator a(m, kind, o, RandomStream(7, 1)), b(m, kind, o, RandomStream(7, 1));
    Vector oa(2), ob(2);
    for (int s = 0; s < 50; ++s) {
      const Vector th{0.01 * s, -0.02 * s};
      a.estimate(th, oa);
      b.estimate(th, ob);
      REQUIRE(oa == ob);
    }
  }
  CHECK_THROWS(GradientEstimator(m, EstimatorKind::Saga, {3, 1, BatchMode::WithReplacement}, RandomStream(1)));
}
