#include "halfspace/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

#include "halfspace/learner.hpp"
#include "halfspace/optimizer.hpp"
#include "halfspace/stats.hpp"
#include "halfspace/vecmath.hpp"

namespace halfspace {

namespace {

Vector random_unit(std::size_t d, Rng& rng) {
  for (;;) {
    Vector v(d);
    for (std::size_t j = 0; j < d; ++j) v[j] = rng.normal();
    if (norm2(v) > 1e-12) return normalized(v);
  }
}

Vector random_sparse(std::size_t d, std::size_t s, Rng& rng) {
  Vector v = random_unit(d, rng);
  return hard_threshold(v, s) * std::exp(rng.normal());
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

}  // namespace

LinkMapReport link_map_checks(std::size_t d, std::size_t trials, std::uint64_t seed) {
  Rng rng(seed);
  LinkMapReport r;
  r.min_bregman = std::numeric_limits<double>::infinity();
  const std::vector<PNormParams> params{PNormParams::with_p(d, 1.2), PNormParams::with_p(d, 1.5),
                                        PNormParams::with_p(d, 2.0), PNormParams::for_dimension(d)};
  for (std::size_t t = 0; t < trials; ++t) {
    const PNormParams& pp = params[t % params.size()];
    Vector z = random_unit(d, rng) * std::exp(2.0 * rng.normal());
    Vector back = grad_phi_star(grad_phi(z, pp), pp);
    r.max_roundtrip_error = std::max(r.max_roundtrip_error, norm2(back - z) / norm2(z));
    Vector anchor = random_unit(d, rng);
    Vector w = random_unit(d, rng);
    r.min_bregman = std::min(r.min_bregman, bregman_div(w, z, anchor, pp));
    ++r.trials;
  }
  return r;
}

std::vector<BandMassCheck> band_mass_checks(std::size_t d, std::size_t n, double c2, std::uint64_t seed) {
  std::vector<BandMassCheck> out;
  const MarginalKind kinds[] = {MarginalKind::gaussian, MarginalKind::product_laplace,
                                MarginalKind::product_uniform, MarginalKind::product_exponential};
  std::uint64_t tag = 0;
  for (MarginalKind kind : kinds) {
    for (double b : {0.05, 0.1, 0.25}) {
      Rng rng(derive_seed(seed, ++tag));
      const Vector w = random_unit(d, rng);
      const MarginalSpec spec{kind, d};
      std::size_t hits = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (in_band(w, sample_marginal(spec, rng), b)) ++hits;
      }
      BandMassCheck c;
      c.kind = kind;
      c.band = b;
      c.rate = static_cast<double>(hits) / static_cast<double>(n);
      c.stderr_ = binomial_stderr(c.rate, static_cast<double>(n));
      c.within = c.rate >= c2 * b - 3.0 * c.stderr_ && c.rate <= b + 3.0 * c.stderr_;
      out.push_back(c);
    }
  }
  return out;
}

std::vector<NoiseBudgetCheck> noise_budget_checks(MarginalKind marginal, std::size_t d, std::size_t s,
                                                  double nu, std::size_t n, std::uint64_t seed) {
  std::vector<NoiseBudgetCheck> out;
  const NoiseKind kinds[] = {NoiseKind::realizable, NoiseKind::random_flip, NoiseKind::margin_flip,
                             NoiseKind::region_flip};
  std::uint64_t tag = 0;
  for (NoiseKind kind : kinds) {
    Rng rng(derive_seed(seed, ++tag));
    TrueHalfspace truth = make_sparse_halfspace(d, s, rng);
    NoiseSpec spec;
    spec.kind = kind;
    spec.nu = nu;
    Oracle oracle(MarginalSpec{marginal, d}, std::move(truth), spec, derive_seed(seed, 100 + tag));
    NoiseBudgetCheck c;
    c.kind = kind;
    c.nu = nu;
    c.rate = oracle.noise_rate_estimate(n);
    c.stderr_ = binomial_stderr(std::max(c.rate, nu), static_cast<double>(n));
    c.within = c.rate <= nu + 3.0 * c.stderr_;
    out.push_back(c);
  }
  return out;
}

ExpansionReport expansion_checks(std::size_t trials, std::uint64_t seed, double slack) {
  Rng rng(seed);
  ExpansionReport r;
  std::uniform_int_distribution<std::size_t> pick_d(2, 30);
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t d = pick_d(rng.engine());
    std::uniform_int_distribution<std::size_t> pick_s(1, d);
    const std::size_t s = pick_s(rng.engine());
    // perturbations from tiny to much larger than the target
    const double scale = std::pow(10.0, -3.0 + 4.0 * rng.uniform01());

    const Vector v_unit = random_unit(d, rng);
    Vector w = v_unit + scale * random_unit(d, rng);
    if (norm2(w) > 0.0) {
      const double gap = norm2(w - v_unit);
      const double lhs = norm2(normalized(w) - v_unit);
      if (lhs > 2.0 * gap + slack) ++r.normalize_violations;
      if (gap > 0.0) r.worst_normalize_ratio = std::max(r.worst_normalize_ratio, lhs / gap);
      if (angle(w, v_unit) > std::numbers::pi * gap + slack) ++r.angle_violations;
      const Vector w_unit = normalized(w);
      if (norm2(w_unit - v_unit) > angle(w_unit, v_unit) + slack) ++r.chord_violations;
    }

    const Vector v_sparse = random_sparse(d, s, rng);
    const Vector w2 = v_sparse + scale * norm2(v_sparse) * random_unit(d, rng);
    const double gap2 = norm2(w2 - v_sparse);
    const double lhs2 = norm2(hard_threshold(w2, s) - v_sparse);
    if (lhs2 > 2.0 * gap2 + slack) ++r.threshold_violations;
    if (gap2 > 0.0) r.worst_threshold_ratio = std::max(r.worst_threshold_ratio, lhs2 / gap2);
    ++r.trials;
  }
  return r;
}

LedgerRunReport ledger_run(std::size_t d, std::size_t s, std::size_t iterations, std::uint64_t seed) {
  Rng rng(seed);
  TrueHalfspace truth = make_sparse_halfspace(d, s, rng);
  const Vector& u = truth.u;

  // unit direction orthogonal to u, inside u's support when possible
  Vector e(d);
  std::vector<std::size_t> support;
  for (std::size_t j = 0; j < d; ++j) {
    if (u[j] != 0.0) support.push_back(j);
  }
  if (support.size() >= 2) {
    e[support[0]] = u[support[1]];
    e[support[1]] = -u[support[0]];
  } else {
    e[(support[0] + 1) % d] = 1.0;
  }
  e = normalized(e);
  const double a = std::numbers::pi / 16.0;
  const Vector w0 = std::cos(a) * u + std::sin(a) * e;

  Oracle oracle(MarginalSpec{MarginalKind::gaussian, d}, std::move(truth), NoiseSpec{}, derive_seed(seed, 1));
  const Schedule plan = schedule(0.05, 0.1, s, d, ConstantsConfig{});
  const PhaseParams& phase = plan.refine.front();
  MirrorProblem problem(ConstraintSet::trust_region(w0, phase.radius), w0, PNormParams::for_dimension(d));
  RefineParams rp;
  rp.alpha = phase.alpha;
  rp.band = phase.band;
  rp.iterations = iterations;
  rp.delta = phase.delta;
  rp.sparsity = nnz(w0);
  RefineOutcome res = refine(w0, oracle, problem, rp);

  LedgerRunReport r;
  RegretLedger::Check check = res.ledger.evaluate(oracle.truth().u, problem.constraint);
  r.slack = check.slack;
  r.applicable = check.applicable;
  r.hinge_violations = res.ledger.hinge_violations;
  r.updates = res.updates;
  r.max_violation = res.max_violation;
  return r;
}

SuiteResult run_suite(const std::string& name, const RunConfig& cfg) {
  SuiteResult out;
  out.name = name;
  const auto names = all_diag_suites();
  const auto tag = static_cast<std::uint64_t>(std::find(names.begin(), names.end(), name) - names.begin());
  const std::uint64_t seed = derive_seed(cfg.master_seed, 0xd1a9 + tag);
  std::ostringstream detail;
  if (name == "link_map") {
    LinkMapReport r = link_map_checks(cfg.d, 1000, seed);
    out.passed = r.max_roundtrip_error <= 1e-9 && r.min_bregman >= -1e-12;
    out.detail = fmt("max roundtrip error %.3g, min Bregman %.3g", r.max_roundtrip_error, r.min_bregman);
  } else if (name == "band_mass") {
    auto checks = band_mass_checks(cfg.d, cfg.diag.n, cfg.diag.band_mass_c2, seed);
    out.passed = true;
    for (const BandMassCheck& c : checks) {
      if (!c.within) {
        out.passed = false;
        detail << to_string(c.kind) << fmt(" b=%.2f rate=%.4f outside [c2 b, b]; ", c.band, c.rate);
      }
    }
    out.detail = out.passed ? fmt("%.0f marginal/band pairs within [%.2f b, b]",
                                  static_cast<double>(checks.size()), cfg.diag.band_mass_c2)
                            : detail.str();
  } else if (name == "noise_budget") {
    const double nu = cfg.noise.nu > 0.0 ? cfg.noise.nu : 0.1;
    auto checks = noise_budget_checks(cfg.marginal, cfg.d, cfg.s, nu, cfg.diag.n, seed);
    out.passed = true;
    for (const NoiseBudgetCheck& c : checks) {
      detail << to_string(c.kind) << fmt("=%.4f ", c.rate);
      if (!c.within) out.passed = false;
    }
    out.detail = fmt("nu=%.3f: ", nu) + detail.str();
  } else if (name == "expansion") {
    ExpansionReport r = expansion_checks(cfg.diag.expansion_trials, seed);
    out.passed = r.total() == 0;
    out.detail = fmt("%.0f violations over %.0f triples", static_cast<double>(r.total()),
                     static_cast<double>(r.trials));
  } else if (name == "regret_ledger") {
    LedgerRunReport r = ledger_run(cfg.d, cfg.s, cfg.diag.ledger_iterations, seed);
    out.passed = r.hinge_violations == 0 && (!r.applicable || r.slack >= -1e-6);
    out.detail = fmt("slack %.3g, %.0f updates, ", r.slack, static_cast<double>(r.updates)) +
                 (r.applicable ? "truth in K" : "truth left K, ledger skipped") +
                 fmt(", %.0f hinge violations", static_cast<double>(r.hinge_violations));
  } else {
    out.detail = "unknown suite";
  }
  return out;
}

std::vector<SuiteResult> run_diagnostics(const RunConfig& cfg) {
  std::vector<SuiteResult> out;
  for (const std::string& name : cfg.diag.suites) out.push_back(run_suite(name, cfg));
  return out;
}

}  // namespace halfspace
