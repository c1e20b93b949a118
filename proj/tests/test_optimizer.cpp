#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "halfspace/errors.hpp"
#include "halfspace/optimizer.hpp"
#include "halfspace/sampling.hpp"
#include "oracles.hpp"

using namespace halfspace;
using halfspace::testing::grid_minimize;

namespace {

Vector random_vector(std::size_t d, Rng& rng, double scale = 1.0) {
  Vector v(d);
  for (std::size_t j = 0; j < d; ++j) v[j] = scale * rng.normal();
  return v;
}

Vector random_unit(std::size_t d, Rng& rng) { return normalized(random_vector(d, rng)); }

// A random set of one of the three shapes used by the learner.
ConstraintSet random_set(std::size_t d, Rng& rng, int shape) {
  Vector c = random_unit(d, rng);
  if (shape == 0) return ConstraintSet(d, 1.0);
  if (shape == 1) return ConstraintSet::trust_region(c, 0.1 + 0.5 * rng.uniform01());
  return ConstraintSet::correlation_floor(c, 0.9 * rng.uniform01());
}

Vector random_feasible(const ConstraintSet& k, Rng& rng) {
  return euclid_project(k, random_vector(k.dim(), rng, 0.7));
}

}  // namespace

TEST_CASE("projection examples") {
  ConstraintSet ball(2, 1.0);
  CHECK(euclid_project(ball, Vector{0.3, -0.4}) == Vector{0.3, -0.4});
  Vector p = euclid_project(ball, Vector{2, 0});
  CHECK(p[0] == doctest::Approx(1.0));
  CHECK(p[1] == doctest::Approx(0.0));

  ConstraintSet cap = ConstraintSet::correlation_floor(Vector{1, 0}, 0.5);
  Vector y{-1, 1};
  Vector q = euclid_project(cap, y);
  auto grid = grid_minimize(
      2, [&](const Vector& w) { return cap.violation(w) <= 0.0; },
      [&](const Vector& w) { return norm2(w - y); }, 0.01, 1e-3, 0.5, 4);
  REQUIRE(grid.found);
  CHECK(norm2(q - grid.point) <= 2e-3);
  CHECK(q[0] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(q[1] == doctest::Approx(std::sqrt(0.75)).epsilon(1e-6));
}

TEST_CASE("closed-form pair projection agrees with Dykstra") {
  Rng rng(31);
  ProjectionOptions dykstra_only;
  dykstra_only.closed_form_pairs = false;
  dykstra_only.tol = 1e-12;
  dykstra_only.max_iter = 200'000;
  for (int t = 0; t < 300; ++t) {
    const std::size_t d = 2 + t % 8;
    ConstraintSet k = random_set(d, rng, 1 + t % 2);
    Vector y = random_vector(d, rng, 1.5);
    Vector a = euclid_project(k, y);
    Vector b = dykstra_project(k, y, dykstra_only);
    CHECK(norm2(a - b) <= 1e-6);
    CHECK(k.violation(a) <= 1e-8);
  }
}

TEST_CASE("projection satisfies the obtuse-angle condition") {
  Rng rng(37);
  for (int t = 0; t < 200; ++t) {
    const std::size_t d = 2 + t % 6;
    ConstraintSet k = random_set(d, rng, t % 3);
    Vector y = random_vector(d, rng, 2.0);
    Vector p = euclid_project(k, y);
    for (int i = 0; i < 10; ++i) {
      Vector w = random_feasible(k, rng);
      CHECK(dot(y - p, w - p) <= 1e-7);
    }
  }
}

TEST_CASE("constraint sets must be nonempty") {
  CHECK_THROWS_AS(ConstraintSet::trust_region(Vector{3, 0}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(ConstraintSet::correlation_floor(Vector{1, 0}, 1.5), std::invalid_argument);
  ConstraintSet k = ConstraintSet::trust_region(Vector{1, 0}, 0.2);
  CHECK(k.contains(k.feasible_point(), 0.0));
}

TEST_CASE("mirror step with zero gradient stays put") {
  ConstraintSet k = ConstraintSet::trust_region(Vector{0.6, 0.8}, 0.3);
  MirrorProblem prob(k, Vector{0.6, 0.8}, PNormParams::with_p(2, 1.5));
  Vector w{0.5, 0.7};
  CHECK(md_step(prob, w, Vector(2), 0.1) == w);
}

TEST_CASE("Euclidean mirror step is a gradient step when unconstrained") {
  Rng rng(41);
  for (int t = 0; t < 20; ++t) {
    ConstraintSet k(4, 1e6);
    MirrorProblem prob(k, random_vector(4, rng), PNormParams::with_p(4, 2.0));
    Vector w = random_vector(4, rng), g = random_vector(4, rng);
    Vector out = md_step(prob, w, g, 0.3);
    Vector expect = w - 0.3 * g;
    for (std::size_t j = 0; j < 4; ++j) CHECK(out[j] == doctest::Approx(expect[j]).epsilon(1e-10));
  }
}

TEST_CASE("Euclidean mirror step on a ball is the projected gradient step") {
  Rng rng(43);
  for (int t = 0; t < 30; ++t) {
    ConstraintSet k(3, 1.0);
    MirrorProblem prob(k, random_vector(3, rng), PNormParams::with_p(3, 2.0));
    Vector w = random_feasible(k, rng);
    Vector g = random_vector(3, rng, 5.0);
    Vector expect = euclid_project(k, w - g);
    MirrorStepStats st;
    Vector out = md_step(prob, w, g, 1.0, &st);
    CHECK(norm2(out - expect) <= 1e-5);
    if (st.constrained) {
      CHECK(certify(prob, expect, w, g, 1.0, 64) <= 1e-9);
    }
  }
}

TEST_CASE("mirror step matches a grid-search optimum") {
  Rng rng(47);
  const double ps[] = {1.2, 1.5, 2.0};
  int constrained = 0;
  for (int t = 0; t < 30; ++t) {
    const std::size_t d = 2 + t % 2;
    const double p = ps[t % 3];
    const Vector v0 = random_unit(d, rng);
    ConstraintSet k = t % 4 == 3 ? ConstraintSet::correlation_floor(v0, 0.3) : ConstraintSet::trust_region(v0, 0.4);
    MirrorProblem prob(k, v0, PNormParams::with_p(d, p));
    Vector w_prev = random_feasible(k, rng);
    Vector g = random_vector(d, rng);
    const double alpha = 0.05 + rng.uniform01();
    MirrorStepStats st;
    Vector out = md_step(prob, w_prev, g, alpha, &st);
    constrained += st.constrained;
    auto grid = grid_minimize(
        d, [&](const Vector& w) { return k.violation(w) <= 0.0; },
        [&](const Vector& w) { return md_objective(prob, w, w_prev, g, alpha); }, 0.05, 8e-5);
    REQUIRE(grid.found);
    const double f = md_objective(prob, out, w_prev, g, alpha);
    CHECK(std::abs(f - grid.value) <= 1e-3);
    CHECK(f <= grid.value + 1e-7);
  }
  CHECK(constrained > 10);
}

TEST_CASE("mirror step output is feasible and never worse than staying") {
  Rng rng(53);
  for (int t = 0; t < 300; ++t) {
    const std::size_t d = 2 + t % 40;
    const Vector v0 = random_unit(d, rng);
    ConstraintSet k = t % 2 ? ConstraintSet::correlation_floor(v0, 0.2 * rng.uniform01())
                            : ConstraintSet::trust_region(v0, 0.05 + 0.4 * rng.uniform01());
    MirrorProblem prob(k, v0, PNormParams::for_dimension(d));
    Vector w_prev = random_feasible(k, rng);
    Vector g = random_vector(d, rng, 3.0);
    const double alpha = std::pow(10.0, -2.0 + 2.0 * rng.uniform01());
    Vector out = md_step(prob, w_prev, g, alpha);
    CHECK(k.violation(out) <= prob.tol);
    CHECK(md_objective(prob, out, w_prev, g, alpha) <= md_objective(prob, w_prev, w_prev, g, alpha) + 1e-9);
  }
}

TEST_CASE("certificate detects a perturbed solution") {
  Rng rng(59);
  int tested = 0;
  for (int t = 0; t < 100 && tested < 30; ++t) {
    const std::size_t d = 3 + t % 5;
    const Vector v0 = random_unit(d, rng);
    ConstraintSet k = ConstraintSet::trust_region(v0, 0.3);
    MirrorProblem prob(k, v0, PNormParams::for_dimension(d));
    Vector w_prev = random_feasible(k, rng);
    Vector g = random_vector(d, rng, 5.0);
    MirrorStepStats st;
    Vector w_star = md_step(prob, w_prev, g, 1.0, &st);
    if (!st.constrained) continue;
    CHECK(certify(prob, w_star, w_prev, g, 1.0, prob.probes) <= prob.tol);
    // move against the descent direction, back into the set
    Vector grad = grad_phi(w_star - v0, prob.params) - grad_phi(w_prev - v0, prob.params) + g;
    Vector moved = w_star + 0.05 * normalized(grad);
    if (!k.contains(moved, 0.0)) continue;
    ++tested;
    CHECK(certify(prob, moved, w_prev, g, 1.0, prob.probes) > prob.tol);
  }
  CHECK(tested >= 10);
}

TEST_CASE("certificate with no probes is vacuous") {
  ConstraintSet k(2, 1.0);
  MirrorProblem prob(k, Vector{0, 0}, PNormParams::with_p(2, 1.5));
  CHECK(certify(prob, Vector{0.1, 0}, Vector{0, 0}, Vector{1, 1}, 0.5, 0) ==
        -std::numeric_limits<double>::infinity());
}

TEST_CASE("mirror step input validation") {
  ConstraintSet k(2, 1.0);
  MirrorProblem prob(k, Vector{0, 0}, PNormParams::with_p(2, 1.5));
  CHECK_THROWS_AS(md_step(prob, Vector{2, 0}, Vector{1, 0}, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(md_step(prob, Vector{0, 0}, Vector{1, 0}, 0.0), std::invalid_argument);
  // marginally infeasible start from rounding is accepted
  Vector out = md_step(prob, Vector{1.0 + 1e-8, 0}, Vector{-1, 0}, 0.1);
  CHECK(k.violation(out) <= prob.tol);
}

TEST_CASE("mirror step certifies when the optimum sits within an ulp of the anchor") {
  // Phase-0 step from a d = 20 run; several optimal coordinates coincide
  // with the anchor to double precision.
  const Vector anchor = Vector(std::vector<double>{
      -0.031322674178838238, 0.011874197964416822, 0.00049785302286790498, 0.0058116990884390859,
      0.007139338540177587, -0.0061914849469202546, -0.0067897329660421141, -0.017875436872219205,
      0.0069577673379244871, 0.0084278712884877944, -0.0094899887303544709, -0.00241842088179995,
      0.0006912296567397545, -0.025775924089080755, 0.0074826742805992573, 0.076841664552732891,
      0.0091662133057438654, -0.0065114688336754128, -0.0072109369801038855, 0.037008932236331359});
  const Vector w_prev = Vector(std::vector<double>{
      -0.031335137471952615, 0.012321422868424503, 0.00049842051026829514, 0.0058134536489316459,
      0.0070385258351347204, -0.0061968421558849527, -0.00044586956467608573, -0.018181389229156811,
      -0.0025370929927409722, -9.108625791688597e-05, -0.0094914044609669037, -0.0024208596967999299,
      0.00058327764929324742, 0.003102277818085023, 0.0074825233044156112, 0.088539652378843745,
      0.0068805372547753284, -0.0065114400806840257, -0.0072170589359811218, 0.038005232692682203});
  const Vector g = Vector(std::vector<double>{
      -0.83704199541396518, 0.54471783628895676, -1.2978331044354556, -1.3735717463188084,
      1.328725466146774, -0.97764173548654154, -0.98220311353015355, 1.4661698214005225,
      0.99753434367162186, 0.58586960654211917, -0.43975504092181689, -0.54390591883278061,
      -0.3892013052377376, 0.5861552844593082, 0.20516015420702524, 0.29190330779631207,
      0.036231384047720444, 0.66209319900938324, 0.32624424659891071, -0.87842348874218401});
  const Vector normal = Vector(std::vector<double>{
      -0.31322674178838233, 0.11874197964416822, 0.0049785302286790498, 0.058116990884390853,
      0.071393385401775866, -0.061914849469202546, -0.067897329660421141, -0.17875436872219203,
      0.069577673379244864, 0.08427871288487794, -0.094899887303544705, -0.0241842088179995,
      0.0069122965673975448, -0.25775924089080754, 0.074826742805992566, 0.76841664552732891,
      0.091662133057438658, -0.065114688336754128, -0.072109369801038853, 0.37008932236331354});
  ConstraintSet k = ConstraintSet::correlation_floor(normal, 0.10000000000000001);
  MirrorProblem prob(k, anchor, PNormParams::with_p(20, 1.2453883062022526));
  MirrorStepStats st;
  Vector out = md_step(prob, w_prev, g, 0.022379358164623813, &st);
  CHECK(st.constrained);
  CHECK(st.residual <= prob.tol);
  CHECK(k.violation(out) <= prob.tol);
  CHECK(md_objective(prob, out, w_prev, g, 0.022379358164623813) <= md_objective(prob, w_prev, w_prev, g, 0.022379358164623813));
}
