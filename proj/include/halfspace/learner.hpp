#ifndef HALFSPACE_LEARNER_HPP
#define HALFSPACE_LEARNER_HPP

#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "halfspace/optimizer.hpp"
#include "halfspace/oracle.hpp"
#include "halfspace/vecmath.hpp"

namespace halfspace {

/// How Refine averages its trajectory before thresholding.
enum class AveragingMode {
  normalized_iterates,  // mean of w_t / ||w_t||, t = 1..T
  raw_previous,         // mean of w_{t-1}, t = 1..T
};

/// Active: label only band hits. Passive: label every draw, update on band hits.
enum class QueryMode { active, passive };

std::string to_string(AveragingMode mode);
AveragingMode averaging_mode_from_string(std::string_view name);
std::string to_string(QueryMode mode);

// Constants the analysis leaves as orders of magnitude. The defaults are
// desk-scale values; paper_faithful switches zeta, b_init and s_tilde to the
// literal analysis constants.
struct ConstantsConfig {
  double c_bar = 1.0 / std::numbers::pi;  // disagreement <= c_bar * angle
  double c_b = 0.25;                      // b_k = c_b 2^-k
  double c_alpha = 1.0;
  double c_T = 8.0;
  double c_m = 4.0;
  double zeta = 0.1;
  double b_init = 0.1;
  double s_tilde_factor = 4.0;
  bool paper_faithful = false;
  AveragingMode averaging = AveragingMode::normalized_iterates;
  std::uint64_t band_max_attempts = 0;  // 0: default_max_attempts per phase

  double effective_zeta() const;
  double effective_b_init() const;
  /// Initialize's threshold level, capped at d.
  std::size_t s_tilde(std::size_t s, std::size_t d) const;
  /// Throws std::invalid_argument naming the first non-positive constant.
  void validate() const;
};

struct InitParams {
  std::size_t samples = 0;  // m
  double alpha = 0.0;
  double band = 0.0;
  std::size_t iterations = 0;
  double delta = 0.0;  // failure share handed to the inner Refine
  double zeta = 0.0;
  std::size_t s_tilde = 0;
};

struct PhaseParams {
  int k = 0;
  double alpha = 0.0;
  double band = 0.0;
  double radius = 0.0;  // pi 2^{-k-2}
  std::size_t iterations = 0;
  double delta = 0.0;  // delta / (2k(k+1))
};

struct Schedule {
  int phases = 0;  // K
  InitParams init;
  std::vector<PhaseParams> refine;
};

/// K = ceil(log2(c_bar pi / (8 eps))) (at least 0) and the per-phase parameters.
Schedule schedule(double eps, double delta, std::size_t s, std::size_t d,
                  const ConstantsConfig& consts);

// Running sums for the online mirror descent regret inequality. The target u
// only enters in evaluate(), after the run.
struct RegretLedger {
  Vector anchor;
  Vector start;  // w_0
  PNormParams params;
  double alpha = 0.0;
  std::size_t steps = 0;
  Vector grad_sum;            // sum_t g_t
  double hinge_sum = 0.0;     // sum_t <w_{t-1}, g_t>
  double grad_q_sq_sum = 0.0; // sum_t ||g_t||_q^2
  double min_hinge = std::numeric_limits<double>::infinity();
  std::size_t hinge_violations = 0;  // steps with <w_{t-1}, g_t> < 0

  struct Check {
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;  // rhs - lhs
    bool applicable = false;  // u lies in K
  };

  /// (1/T) sum <u, -g_t> <= (1/T) sum <w_{t-1}, -g_t> + B(u; w_0)/(alpha T) + (alpha/T) sum ||g_t||_q^2
  Check evaluate(const Vector& u, const ConstraintSet& set, double tol = 1e-9) const;
};

struct RefineParams {
  double alpha = 0.0;
  double band = 0.0;
  std::size_t iterations = 0;
  double delta = 0.1;
  std::size_t sparsity = 1;
  AveragingMode averaging = AveragingMode::normalized_iterates;
  QueryMode query = QueryMode::active;
  std::uint64_t max_attempts = 0;  // 0: default_max_attempts(band, T, delta/2)
};

struct RefineOutcome {
  Vector output;
  RegretLedger ledger;
  std::size_t updates = 0;            // steps with y = -1
  std::size_t constrained_steps = 0;  // md_step polishes
  double max_violation = 0.0;         // worst iterate constraint violation
  std::uint64_t labels = 0;
  std::uint64_t ex_calls = 0;
};

/// Refine from a unit, s-sparse w0 lying in problem.constraint.
RefineOutcome refine(const Vector& w0, Oracle& oracle, const MirrorProblem& problem,
                     const RefineParams& params);

/// Refine with every drawn instance labeled (labels = EX calls).
RefineOutcome refine_passive(const Vector& w0, Oracle& oracle, const MirrorProblem& problem,
                             RefineParams params);

struct InitOutcome {
  Vector v0;
  Vector w_avg;
  Vector w_sharp;
  Vector w0;
  std::size_t samples_used = 0;
  ConstraintSet constraint;
  RefineOutcome refine;
};

InitOutcome initialize(Oracle& oracle, const InitParams& params, std::size_t s,
                       const ConstantsConfig& consts, QueryMode query = QueryMode::active);

struct PhaseRecord {
  int k = 0;                 // 0 = initialize
  Vector v;
  std::uint64_t labels = 0;  // cumulative
  std::uint64_t ex_calls = 0;
  double wall_ms = 0.0;
  RegretLedger ledger;
  std::size_t updates = 0;
  double max_violation = 0.0;
  // constraint used by the phase's Refine (needed to re-check the ledger)
  std::optional<ConstraintSet> constraint;
};

struct MainOutcome {
  Vector u_tilde;
  Schedule plan;
  std::vector<PhaseRecord> phases;
};

/// Initialize, then K Refine phases. Errors are rethrown as phase_error.
MainOutcome run_main(double eps, double delta, std::size_t s, Oracle& oracle,
                     const ConstantsConfig& consts, QueryMode query = QueryMode::active);

/// normalize(H_s(mean of y_i x_i)) from m fresh labeled draws.
Vector averaging_baseline(Oracle& oracle, std::size_t m, std::size_t s);

/// (1/m) sum y_i x_i from m fresh labeled draws.
Vector label_weighted_average(Oracle& oracle, std::size_t m);

}  // namespace halfspace

#endif  // HALFSPACE_LEARNER_HPP
