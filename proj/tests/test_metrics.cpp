#include <doctest.h>

#include <cmath>
#include <numbers>

#include "halfspace/errors.hpp"
#include "halfspace/metrics.hpp"
#include "oracles.hpp"

using namespace halfspace;

namespace {

Vector at_angle(std::size_t d, double theta) {
  Vector w(d);
  w[0] = std::cos(theta);
  w[1] = std::sin(theta);
  return w;
}

Oracle make_oracle(NoiseKind kind, double nu, std::uint64_t seed = 3) {
  Rng rng(seed);
  TrueHalfspace truth = make_sparse_halfspace(10, 3, rng);
  NoiseSpec spec;
  spec.kind = kind;
  spec.nu = nu;
  return Oracle({MarginalKind::gaussian, 10}, std::move(truth), spec, seed);
}

}  // namespace

TEST_CASE("gaussian disagreement is angle over pi") {
  const std::size_t d = 5;
  const Vector u = Vector::basis(d, 0);
  Rng rng(1);
  ErrorEstimate e = disagreement(at_angle(d, std::numbers::pi / 4), u, {MarginalKind::gaussian, d}, 0, rng);
  CHECK(e.method == EstimateMethod::closed_form);
  CHECK(e.value == doctest::Approx(0.25));
  CHECK(disagreement(u, u, {MarginalKind::gaussian, d}, 0, rng).value == 0.0);
  CHECK(disagreement(-u, u, {MarginalKind::gaussian, d}, 0, rng).value == doctest::Approx(1.0));
}

TEST_CASE("closed form agrees with Monte Carlo across an angle grid") {
  const std::size_t d = 5;
  const Vector u = Vector::basis(d, 0);
  Rng rng(2);
  for (double theta : {0.05, std::numbers::pi / 8, std::numbers::pi / 4, std::numbers::pi / 2, 2.5}) {
    CAPTURE(theta);
    const Vector w = at_angle(d, theta);
    ErrorEstimate exact = disagreement(w, u, {MarginalKind::gaussian, d}, 0, rng);
    ErrorEstimate mc = disagreement_mc(w, u, {MarginalKind::gaussian, d}, 100'000, rng);
    CHECK(mc.method == EstimateMethod::monte_carlo);
    CHECK(mc.n == 100'000);
    CHECK(std::abs(mc.value - exact.value) <= 3 * mc.stderr_ + 1e-12);
    CHECK(std::abs(mc.value - theta / std::numbers::pi) <= 3 * mc.stderr_ + 1e-12);
  }
}

TEST_CASE("non-gaussian disagreement is estimated") {
  Rng rng(3);
  const Vector u = Vector::basis(4, 0);
  ErrorEstimate e = disagreement(at_angle(4, 0.3), u, {MarginalKind::product_uniform, 4}, 20'000, rng);
  CHECK(e.method == EstimateMethod::monte_carlo);
  CHECK(e.value > 0.0);
  CHECK(e.value < 0.3);
  CHECK(disagreement(u, u, {MarginalKind::product_laplace, 4}, 1000, rng).value == 0.0);
  CHECK_THROWS_AS(disagreement(Vector(4), u, {MarginalKind::gaussian, 4}, 10, rng), std::invalid_argument);
}

TEST_CASE("error against the noisy distribution") {
  const std::size_t n = 100'000;
  {
    Oracle o = make_oracle(NoiseKind::realizable, 0.0);
    ErrorEstimate e = err_d(o.truth().u, o, n);
    CHECK(e.value == 0.0);
    CHECK(e.stderr_ == 0.0);
  }
  {
    Oracle o = make_oracle(NoiseKind::random_flip, 0.1);
    ErrorEstimate e = err_d(o.truth().u, o, n);
    CHECK(std::abs(e.value - 0.1) <= 3 * e.stderr_);
    CHECK(o.counters().ex_calls == 0);
    CHECK(o.counters().label_queries == 0);
  }
}

TEST_CASE("error obeys the triangle relation") {
  Rng rng(5);
  for (NoiseKind kind : {NoiseKind::random_flip, NoiseKind::margin_flip, NoiseKind::region_flip}) {
    Oracle o = make_oracle(kind, 0.1, 7);
    const ErrorEstimate base = err_d(o.truth().u, o, 50'000);
    for (int t = 0; t < 5; ++t) {
      Vector w(10);
      for (std::size_t j = 0; j < 10; ++j) w[j] = rng.normal();
      ErrorEstimate ew = err_d(w, o, 50'000);
      ErrorEstimate dis = disagreement(w, o.truth().u, o.marginal(), 0, rng);
      CHECK(ew.value <= base.value + dis.value + 3 * (ew.stderr_ + base.stderr_));
    }
  }
}

TEST_CASE("potential vanishes at the target") {
  Rng rng(6);
  const Vector u = normalized(Vector{1, 2, 0, -1, 0});
  PotentialEstimate f = f_estimate(u, u, 0.1, {MarginalKind::gaussian, 5}, 5000, rng);
  CHECK(f.value == 0.0);
  CHECK(f.n == 5000);
  CHECK(f.attempts >= 5000);
}

TEST_CASE("potential at the opposite direction matches the truncated normal moment") {
  Rng rng(7);
  const std::size_t d = 5;
  const Vector u = Vector::basis(d, 2);
  const double expect = testing::truncated_normal_abs_mean(0.1);
  CHECK(expect == doctest::Approx(0.0499).epsilon(2e-3));
  PotentialEstimate f = f_estimate(-u, u, 0.1, {MarginalKind::gaussian, d}, 100'000, rng);
  CHECK(std::abs(f.value - expect) <= 3 * f.stderr_);
}

TEST_CASE("potential grows with the angle") {
  Rng rng(8);
  const std::size_t d = 5;
  const Vector u = Vector::basis(d, 0);
  double prev = -1.0;
  for (double theta : {std::numbers::pi / 8, std::numbers::pi / 4, std::numbers::pi / 2}) {
    PotentialEstimate f = f_estimate(at_angle(d, theta), u, 0.1, {MarginalKind::gaussian, d}, 50'000, rng);
    CHECK(f.value > prev);
    prev = f.value;
  }
}

TEST_CASE("potential reports exhausted bands") {
  Rng rng(9);
  const Vector u = Vector::basis(3, 0);
  CHECK_THROWS_AS(f_estimate(u, u, 1e-12, {MarginalKind::gaussian, 3}, 10, rng, 5), band_exhausted);
  CHECK_THROWS_AS(f_estimate(u, u, 0.0, {MarginalKind::gaussian, 3}, 10, rng), std::invalid_argument);
}
