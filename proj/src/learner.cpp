#include "halfspace/learner.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "halfspace/errors.hpp"

namespace halfspace {

std::string to_string(AveragingMode mode) {
  return mode == AveragingMode::normalized_iterates ? "normalized_iterates" : "raw_previous";
}

AveragingMode averaging_mode_from_string(std::string_view name) {
  if (name == "normalized_iterates") return AveragingMode::normalized_iterates;
  if (name == "raw_previous") return AveragingMode::raw_previous;
  throw std::invalid_argument("unknown averaging mode '" + std::string(name) + "'");
}

std::string to_string(QueryMode mode) { return mode == QueryMode::active ? "active" : "passive"; }

double ConstantsConfig::effective_zeta() const {
  return paper_faithful ? 1.0 / (9.0 * std::ldexp(1.0, 20)) : zeta;
}

double ConstantsConfig::effective_b_init() const {
  return paper_faithful ? 1.0 / (81.0 * std::ldexp(1.0, 22)) : b_init;
}

std::size_t ConstantsConfig::s_tilde(std::size_t s, std::size_t d) const {
  double factor = paper_faithful ? 81.0 * std::ldexp(1.0, 40) : s_tilde_factor;
  double level = std::ceil(factor * static_cast<double>(s));
  if (level >= static_cast<double>(d)) return d;
  return std::max<std::size_t>(s, static_cast<std::size_t>(level));
}

void ConstantsConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument(std::string("constant ") + name + " must be positive");
    }
  };
  positive(c_bar, "c_bar");
  positive(c_b, "c_b");
  positive(c_alpha, "c_alpha");
  positive(c_T, "c_T");
  positive(c_m, "c_m");
  positive(zeta, "zeta");
  positive(b_init, "b_init");
  positive(s_tilde_factor, "s_tilde_factor");
  if (zeta >= 1.0) throw std::invalid_argument("constant zeta must be below 1");
}

Schedule schedule(double eps, double delta, std::size_t s, std::size_t d,
                  const ConstantsConfig& consts) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("schedule: epsilon must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("schedule: delta must lie in (0, 1)");
  if (s < 1 || s > d) throw std::invalid_argument("schedule: need 1 <= s <= d");
  consts.validate();

  const double dd = static_cast<double>(d);
  const double log_d = std::max(1.0, std::log(dd));
  const double sd = static_cast<double>(s);

  Schedule out;
  out.phases = std::max(0, static_cast<int>(std::ceil(std::log2(consts.c_bar * std::numbers::pi / (8.0 * eps)))));

  // Initialize runs with delta' = delta / 2.
  const double delta_init = delta / 2.0;
  const double log_init = std::log(dd / delta_init);
  out.init.samples = static_cast<std::size_t>(std::ceil(consts.c_m * sd * log_init));
  out.init.alpha = consts.c_alpha / (log_init * log_init);
  out.init.band = consts.effective_b_init();
  out.init.iterations = static_cast<std::size_t>(std::ceil(consts.c_T * sd * log_d * log_init * log_init));
  out.init.delta = delta_init / 2.0;
  out.init.zeta = consts.effective_zeta();
  out.init.s_tilde = consts.s_tilde(s, d);

  for (int k = 1; k <= out.phases; ++k) {
    const double kk = static_cast<double>(k);
    const double two_k = std::ldexp(1.0, k);
    const double delta_k = delta / (2.0 * kk * (kk + 1.0));
    const double log_k = std::log(dd * kk * kk * two_k / delta_k);
    PhaseParams p;
    p.k = k;
    p.alpha = consts.c_alpha / two_k / (log_k * log_k);
    p.band = consts.c_b / two_k;
    p.radius = std::numbers::pi * std::ldexp(1.0, -k - 2);
    p.iterations = static_cast<std::size_t>(std::ceil(consts.c_T * sd * log_d * log_k * log_k));
    p.delta = delta_k;
    out.refine.push_back(p);
  }
  return out;
}

RegretLedger::Check RegretLedger::evaluate(const Vector& u, const ConstraintSet& set, double tol) const {
  Check c;
  c.applicable = set.contains(u, tol) && steps > 0;
  if (steps == 0) return c;
  const double t = static_cast<double>(steps);
  c.lhs = -dot(u, grad_sum) / t;
  c.rhs = -hinge_sum / t + bregman_div(u, start, anchor, params) / (alpha * t) + alpha * grad_q_sq_sum / t;
  c.slack = c.rhs - c.lhs;
  return c;
}

namespace {

// Shared Refine loop; Initialize enters here with its non-unit start.
RefineOutcome run_refine(const Vector& w0, Oracle& oracle, const MirrorProblem& problem,
                         const RefineParams& params) {
  const std::size_t d = w0.size();
  if (params.iterations < 1) throw std::invalid_argument("refine: need at least one iteration");
  if (!(params.alpha > 0.0)) throw std::invalid_argument("refine: step size must be positive");
  if (!(params.band > 0.0)) throw std::invalid_argument("refine: band width must be positive");
  if (params.sparsity < 1 || params.sparsity > d) throw std::invalid_argument("refine: sparsity out of range");

  const std::uint64_t budget = params.max_attempts > 0
                                   ? params.max_attempts
                                   : default_max_attempts(params.band, params.iterations, params.delta / 2.0);
  const OracleCounters before = oracle.counters();

  RefineOutcome out;
  RegretLedger& ledger = out.ledger;
  ledger.anchor = problem.anchor;
  ledger.start = w0;
  ledger.params = problem.params;
  ledger.alpha = params.alpha;
  ledger.grad_sum = Vector(d);

  Vector w = w0;
  Vector sum(d);
  const Vector zero(d);
  for (std::size_t t = 1; t <= params.iterations; ++t) {
    const Vector w_hat = normalized(w);
    Vector x;
    int y = 1;
    if (params.query == QueryMode::active) {
      x = oracle.draw_in_band(w_hat, params.band, budget).x;
      y = oracle.reveal_label(x);
    } else {
      LabeledBandDraw draw = oracle.draw_labeled_until_band(w_hat, params.band, budget);
      x = std::move(draw.x);
      y = draw.y;
    }

    const Vector& g = y == -1 ? x : zero;
    const double hinge = dot(w, g);
    ledger.min_hinge = std::min(ledger.min_hinge, hinge);
    if (hinge < 0.0) ++ledger.hinge_violations;
    ledger.hinge_sum += hinge;
    if (y == -1) {
      ledger.grad_sum += g;
      double gq = pnorm(g, problem.params.q);
      ledger.grad_q_sq_sum += gq * gq;
    }
    ++ledger.steps;

    Vector next = w;
    if (y == -1) {
      ++out.updates;
      MirrorStepStats stats;
      next = md_step(problem, w, g, params.alpha, &stats);
      if (stats.constrained) ++out.constrained_steps;
      out.max_violation = std::max(out.max_violation, problem.constraint.violation(next));
    }

    if (params.averaging == AveragingMode::normalized_iterates) {
      sum += normalized(next);
    } else {
      sum += w;
    }
    w = std::move(next);
  }

  Vector mean = sum / static_cast<double>(params.iterations);
  Vector thresholded = hard_threshold(mean, params.sparsity);
  if (norm2(thresholded) == 0.0) throw degenerate_output("refine: averaged iterate vanished");
  out.output = normalized(thresholded);
  out.labels = oracle.counters().label_queries - before.label_queries;
  out.ex_calls = oracle.counters().ex_calls - before.ex_calls;
  return out;
}

}  // namespace

RefineOutcome refine(const Vector& w0, Oracle& oracle, const MirrorProblem& problem,
                     const RefineParams& params) {
  if (w0.size() != problem.constraint.dim()) throw std::invalid_argument("refine: dimension mismatch");
  if (std::abs(norm2(w0) - 1.0) > 1e-9) throw std::invalid_argument("refine: start must be a unit vector");
  if (nnz(w0) > params.sparsity) throw std::invalid_argument("refine: start exceeds the sparsity level");
  if (!problem.constraint.contains(w0, problem.tol)) {
    throw std::invalid_argument("refine: start lies outside the constraint set");
  }
  return run_refine(w0, oracle, problem, params);
}

RefineOutcome refine_passive(const Vector& w0, Oracle& oracle, const MirrorProblem& problem,
                             RefineParams params) {
  params.query = QueryMode::passive;
  return refine(w0, oracle, problem, params);
}

Vector label_weighted_average(Oracle& oracle, std::size_t m) {
  if (m < 1) throw std::invalid_argument("label_weighted_average: need m >= 1");
  Vector sum(oracle.marginal().d);
  for (std::size_t i = 0; i < m; ++i) {
    Vector x = oracle.draw_unlabeled();
    int y = oracle.reveal_label(x);
    sum.axpy(static_cast<double>(y), x);
  }
  return sum / static_cast<double>(m);
}

InitOutcome initialize(Oracle& oracle, const InitParams& params, std::size_t s,
                       const ConstantsConfig& consts, QueryMode query) {
  const std::size_t d = oracle.marginal().d;
  if (s < 1 || s > d) throw std::invalid_argument("initialize: need 1 <= s <= d");
  if (params.samples < 1) throw std::invalid_argument("initialize: need at least one sample");

  std::size_t used = params.samples;
  Vector w_avg = label_weighted_average(oracle, used);
  if (norm2(w_avg) == 0.0) {
    used = 2 * params.samples;
    w_avg = label_weighted_average(oracle, used);
    if (norm2(w_avg) == 0.0) throw degenerate_init("initialize: label-weighted average vanished twice");
  }

  Vector w_sharp = normalized(hard_threshold(w_avg, std::min(params.s_tilde, d)));
  ConstraintSet set = ConstraintSet::correlation_floor(w_sharp, params.zeta);
  Vector w0 = params.zeta * w_sharp;
  MirrorProblem problem(set, w0, PNormParams::for_dimension(d));

  RefineParams rp;
  rp.alpha = params.alpha;
  rp.band = params.band;
  rp.iterations = params.iterations;
  rp.delta = params.delta;
  rp.sparsity = s;
  rp.averaging = consts.averaging;
  rp.query = query;
  rp.max_attempts = consts.band_max_attempts;
  RefineOutcome inner = run_refine(w0, oracle, problem, rp);

  return InitOutcome{inner.output, std::move(w_avg), std::move(w_sharp), std::move(w0), used,
                     std::move(set), std::move(inner)};
}

MainOutcome run_main(double eps, double delta, std::size_t s, Oracle& oracle,
                     const ConstantsConfig& consts, QueryMode query) {
  const std::size_t d = oracle.marginal().d;
  MainOutcome out;
  out.plan = schedule(eps, delta, s, d, consts);
  const PNormParams pn = PNormParams::for_dimension(d);

  using clock = std::chrono::steady_clock;
  auto elapsed_ms = [](clock::time_point since) {
    return std::chrono::duration<double, std::milli>(clock::now() - since).count();
  };

  Vector current;
  {
    auto t0 = clock::now();
    try {
      InitOutcome init = initialize(oracle, out.plan.init, s, consts, query);
      current = init.v0;
      PhaseRecord rec;
      rec.k = 0;
      rec.v = current;
      rec.labels = oracle.counters().label_queries;
      rec.ex_calls = oracle.counters().ex_calls;
      rec.wall_ms = elapsed_ms(t0);
      rec.ledger = init.refine.ledger;
      rec.updates = init.refine.updates;
      rec.max_violation = init.refine.max_violation;
      rec.constraint = init.constraint;
      out.phases.push_back(std::move(rec));
    } catch (const std::exception& e) {
      throw phase_error(0, e.what());
    }
  }

  for (const PhaseParams& phase : out.plan.refine) {
    auto t0 = clock::now();
    try {
      ConstraintSet set = ConstraintSet::trust_region(current, phase.radius);
      MirrorProblem problem(set, current, pn);
      RefineParams rp;
      rp.alpha = phase.alpha;
      rp.band = phase.band;
      rp.iterations = phase.iterations;
      rp.delta = phase.delta;
      rp.sparsity = s;
      rp.averaging = consts.averaging;
      rp.query = query;
      rp.max_attempts = consts.band_max_attempts;
      RefineOutcome res = refine(current, oracle, problem, rp);
      current = res.output;
      PhaseRecord rec;
      rec.k = phase.k;
      rec.v = current;
      rec.labels = oracle.counters().label_queries;
      rec.ex_calls = oracle.counters().ex_calls;
      rec.wall_ms = elapsed_ms(t0);
      rec.ledger = std::move(res.ledger);
      rec.updates = res.updates;
      rec.max_violation = res.max_violation;
      rec.constraint = std::move(set);
      out.phases.push_back(std::move(rec));
    } catch (const std::exception& e) {
      throw phase_error(phase.k, e.what());
    }
  }
  out.u_tilde = current;
  return out;
}

Vector averaging_baseline(Oracle& oracle, std::size_t m, std::size_t s) {
  if (m < 1) throw std::invalid_argument("averaging_baseline: need m >= 1");
  Vector w_avg = label_weighted_average(oracle, m);
  Vector h = hard_threshold(w_avg, s);
  if (norm2(h) == 0.0) throw degenerate_init("averaging_baseline: label-weighted average vanished");
  return normalized(h);
}

}  // namespace halfspace
