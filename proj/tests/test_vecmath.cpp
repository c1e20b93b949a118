#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "halfspace/errors.hpp"
#include "halfspace/sampling.hpp"
#include "halfspace/vecmath.hpp"

using namespace halfspace;

namespace {

Vector random_vector(std::size_t d, Rng& rng, double scale = 1.0) {
  Vector v(d);
  for (std::size_t j = 0; j < d; ++j) v[j] = scale * rng.normal();
  return v;
}

void check_close(const Vector& a, const Vector& b, double tol) {
  REQUIRE(a.size() == b.size());
  for (std::size_t j = 0; j < a.size(); ++j) CHECK(a[j] == doctest::Approx(b[j]).epsilon(tol));
}

}  // namespace

TEST_CASE("vectors reject non-finite entries") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(Vector(std::vector<double>{1.0, nan}), std::invalid_argument);
  CHECK_THROWS_AS(Vector(std::vector<double>{inf}), std::invalid_argument);
  Vector v{1.0, 2.0};
  CHECK(v.size() == 2);
}

TEST_CASE("hard threshold keeps the largest magnitudes") {
  CHECK(hard_threshold(Vector{3, -1, 2, 0.5}, 2) == Vector{3, 0, 2, 0});
  CHECK(hard_threshold(Vector{1, 1, 1}, 3) == Vector{1, 1, 1});
  CHECK(hard_threshold(Vector{2, -2, 1}, 1) == Vector{2, 0, 0});
  CHECK(hard_threshold(Vector{-5, 1, 5}, 1) == Vector{-5, 0, 0});
  CHECK_THROWS_AS(hard_threshold(Vector{1, 2}, 0), std::invalid_argument);
  CHECK_THROWS_AS(hard_threshold(Vector{1, 2}, 3), std::invalid_argument);
}

TEST_CASE("hard threshold output is s-sparse and retains top entries") {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 2 + trial % 20;
    const std::size_t s = 1 + trial % d;
    Vector v = random_vector(d, rng);
    Vector h = hard_threshold(v, s);
    CHECK(nnz(h) <= s);
    double kept_min = std::numeric_limits<double>::infinity();
    double dropped_max = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      if (h[j] != 0.0) {
        CHECK(h[j] == v[j]);
        kept_min = std::min(kept_min, std::abs(v[j]));
      } else {
        dropped_max = std::max(dropped_max, std::abs(v[j]));
      }
    }
    CHECK(kept_min >= dropped_max);
  }
}

TEST_CASE("angle examples") {
  const Vector e1{1, 0};
  CHECK(angle(e1, e1) == doctest::Approx(0.0));
  CHECK(angle(e1, Vector{-1, 0}) == doctest::Approx(std::numbers::pi));
  CHECK(angle(e1, Vector{1 / std::sqrt(2.0), 1 / std::sqrt(2.0)}) == doctest::Approx(std::numbers::pi / 4));
  CHECK_THROWS_AS(angle(e1, Vector{0, 0}), std::invalid_argument);
  // nearly parallel vectors must not produce NaN
  const Vector a{1.0, 1e-17};
  CHECK(std::isfinite(angle(a, a * 3.0)));
}

TEST_CASE("p-norm parameters") {
  for (std::size_t d : {1u, 5u, 20u, 200u, 10000u}) {
    PNormParams pp = PNormParams::for_dimension(d);
    const double l = std::log(8.0 * static_cast<double>(d));
    CHECK(pp.q == doctest::Approx(l));
    CHECK(pp.p == doctest::Approx(l / (l - 1.0)));
    CHECK(1.0 / pp.p + 1.0 / pp.q == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("grad_phi examples") {
  for (double p : {1.2, 1.5, 2.0}) {
    PNormParams pp = PNormParams::with_p(4, p);
    CHECK(grad_phi(Vector(4), pp) == Vector(4));
    CHECK(grad_phi_star(Vector(4), pp) == Vector(4));
    check_close(grad_phi(Vector::basis(4, 2, -3.0), pp), Vector::basis(4, 2, -3.0 / (p - 1.0)), 1e-12);
  }
  PNormParams euclid = PNormParams::with_p(3, 2.0);
  Vector z{0.3, -1.2, 2.0};
  check_close(grad_phi(z, euclid), z, 1e-12);
  check_close(grad_phi_star(z, euclid), z, 1e-12);
}

TEST_CASE("grad_phi matches a finite-difference gradient") {
  Rng rng(11);
  for (double p : {1.2, 1.5, 1.8}) {
    PNormParams pp = PNormParams::with_p(5, p);
    Vector z = random_vector(5, rng);
    Vector g = grad_phi(z, pp);
    const Vector zero(5);
    for (std::size_t j = 0; j < 5; ++j) {
      const double h = 1e-6;
      Vector zp = z, zm = z;
      zp[j] += h;
      zm[j] -= h;
      double fd = (phi(zp, zero, pp) - phi(zm, zero, pp)) / (2 * h);
      CHECK(g[j] == doctest::Approx(fd).epsilon(1e-5));
    }
  }
}

TEST_CASE("link maps are mutual inverses") {
  Rng rng(3);
  double worst = 0.0;
  for (std::size_t d : {1u, 2u, 7u, 30u, 100u}) {
    std::vector<PNormParams> params{PNormParams::with_p(d, 1.1), PNormParams::with_p(d, 1.5),
                                    PNormParams::with_p(d, 2.0), PNormParams::for_dimension(d)};
    for (const PNormParams& pp : params) {
      for (int t = 0; t < 20; ++t) {
        Vector z = random_vector(d, rng, std::exp(2.0 * rng.normal()));
        Vector back = grad_phi_star(grad_phi(z, pp), pp);
        worst = std::max(worst, norm2(back - z) / norm2(z));
      }
    }
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("Bregman divergence examples and sign") {
  Rng rng(5);
  for (double p : {1.3, 2.0}) {
    PNormParams pp = PNormParams::with_p(6, p);
    Vector v = random_vector(6, rng), w = random_vector(6, rng), w2 = random_vector(6, rng);
    CHECK(bregman_div(w, v, v, pp) == doctest::Approx(phi(w, v, pp)));
    CHECK(bregman_div(w, w, v, pp) == doctest::Approx(0.0));
    CHECK(bregman_div(w, w2, v, pp) > 0.0);
  }
  PNormParams euclid = PNormParams::with_p(6, 2.0);
  Vector a = random_vector(6, rng), b = random_vector(6, rng), v = random_vector(6, rng);
  double expect = 0.5 * norm2(a - b) * norm2(a - b);
  CHECK(bregman_div(a, b, v, euclid) == doctest::Approx(expect));
  CHECK_THROWS_AS(bregman_div(a, Vector(5), v, euclid), std::invalid_argument);
}

TEST_CASE("Hoelder inequality and the q-norm bound") {
  Rng rng(9);
  for (int t = 0; t < 300; ++t) {
    const std::size_t d = 1 + t % 300;
    PNormParams pp = PNormParams::for_dimension(d);
    Vector x = random_vector(d, rng), y = random_vector(d, rng);
    CHECK(std::abs(dot(x, y)) <= pnorm(x, pp.p) * pnorm(y, pp.q) + 1e-9);
    CHECK(pnorm(x, pp.q) <= 2.0 * norm_inf(x) + 1e-12);
  }
}

TEST_CASE("normalization and thresholding expansion bounds") {
  Rng rng(13);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t d = 2 + t % 25;
    const std::size_t s = 1 + t % d;
    const double scale = std::pow(10.0, -3.0 + 4.0 * rng.uniform01());
    Vector v = normalized(random_vector(d, rng));
    Vector w = v + random_vector(d, rng, scale);
    CHECK(norm2(normalized(w) - v) <= 2.0 * norm2(w - v) + 1e-9);
    CHECK(angle(w, v) <= std::numbers::pi * norm2(w - v) + 1e-9);
    Vector wu = normalized(w);
    CHECK(norm2(wu - v) <= angle(wu, v) + 1e-9);

    Vector vs = hard_threshold(random_vector(d, rng), s);
    Vector ws = vs + random_vector(d, rng, scale);
    CHECK(norm2(hard_threshold(ws, s) - vs) <= 2.0 * norm2(ws - vs) + 1e-9);
  }
}

TEST_CASE("averaging unit vectors does not reduce the mean cosine") {
  Rng rng(17);
  int checked = 0;
  for (int t = 0; t < 500; ++t) {
    const std::size_t d = 2 + t % 10;
    Vector u = normalized(random_vector(d, rng));
    const std::size_t count = 1 + t % 15;
    Vector sum(d);
    double mean_cos = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      Vector w = normalized(u + random_vector(d, rng, 1.5));
      sum += w;
      mean_cos += dot(w, u);
    }
    mean_cos /= static_cast<double>(count);
    if (mean_cos < 0.0 || norm2(sum) == 0.0) continue;
    ++checked;
    CHECK(std::cos(angle(sum, u)) >= mean_cos - 1e-12);
  }
  CHECK(checked > 100);
}

TEST_CASE("normalizing the zero vector throws") {
  CHECK_THROWS_AS(normalized(Vector(3)), degenerate_output);
}
