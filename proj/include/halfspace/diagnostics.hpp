#ifndef HALFSPACE_DIAGNOSTICS_HPP
#define HALFSPACE_DIAGNOSTICS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "halfspace/config.hpp"
#include "halfspace/oracle.hpp"
#include "halfspace/sampling.hpp"

namespace halfspace {

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Largest relative error of grad_phi_star(grad_phi(z)) against z, and the
/// smallest Bregman divergence seen, over random z and p in {1.2, 1.5, 2, ln(8d)-based}.
struct LinkMapReport {
  std::size_t trials = 0;
  double max_roundtrip_error = 0.0;
  double min_bregman = 0.0;
};
LinkMapReport link_map_checks(std::size_t d, std::size_t trials, std::uint64_t seed);

struct BandMassCheck {
  MarginalKind kind = MarginalKind::gaussian;
  double band = 0.0;
  double rate = 0.0;
  double stderr_ = 0.0;
  bool within = false;  // c2 b - 3 se <= rate <= b + 3 se
};
/// Acceptance rate of {0 < w . x <= b} for every marginal and b in {0.05, 0.1, 0.25}.
std::vector<BandMassCheck> band_mass_checks(std::size_t d, std::size_t n, double c2, std::uint64_t seed);

struct NoiseBudgetCheck {
  NoiseKind kind = NoiseKind::realizable;
  double nu = 0.0;
  double rate = 0.0;
  double stderr_ = 0.0;
  bool within = false;  // rate <= nu + 3 se
};
/// Measured flip rate of every noise kind at budget nu.
std::vector<NoiseBudgetCheck> noise_budget_checks(MarginalKind marginal, std::size_t d, std::size_t s,
                                                  double nu, std::size_t n, std::uint64_t seed);

// Counts of violations, beyond `slack`, of:
//   ||normalize(w) - v|| <= 2 ||w - v||        (v unit)
//   ||H_s(w) - v|| <= 2 ||w - v||              (v s-sparse)
//   angle(w, v) <= pi ||w - v||                (v unit)
//   ||w - v|| <= angle(w, v)                   (w, v unit)
struct ExpansionReport {
  std::size_t trials = 0;
  std::size_t normalize_violations = 0;
  std::size_t threshold_violations = 0;
  std::size_t angle_violations = 0;
  std::size_t chord_violations = 0;
  double worst_normalize_ratio = 0.0;
  double worst_threshold_ratio = 0.0;

  std::size_t total() const {
    return normalize_violations + threshold_violations + angle_violations + chord_violations;
  }
};
ExpansionReport expansion_checks(std::size_t trials, std::uint64_t seed, double slack = 1e-9);

struct LedgerRunReport {
  double slack = 0.0;
  bool applicable = false;
  std::size_t hinge_violations = 0;
  std::size_t updates = 0;
  double max_violation = 0.0;
};
/// Short noise-free Refine from a start at angle pi/16 to the truth.
LedgerRunReport ledger_run(std::size_t d, std::size_t s, std::size_t iterations, std::uint64_t seed);

SuiteResult run_suite(const std::string& name, const RunConfig& cfg);
std::vector<SuiteResult> run_diagnostics(const RunConfig& cfg);

}  // namespace halfspace

#endif  // HALFSPACE_DIAGNOSTICS_HPP
