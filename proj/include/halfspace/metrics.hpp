#ifndef HALFSPACE_METRICS_HPP
#define HALFSPACE_METRICS_HPP

#include <cstddef>
#include <string>

#include "halfspace/oracle.hpp"
#include "halfspace/sampling.hpp"
#include "halfspace/vecmath.hpp"

namespace halfspace {

enum class EstimateMethod { closed_form, monte_carlo };

std::string to_string(EstimateMethod method);

struct ErrorEstimate {
  double value = 0.0;
  EstimateMethod method = EstimateMethod::monte_carlo;
  std::size_t n = 0;
  double stderr_ = 0.0;
};

inline constexpr std::size_t kDefaultMetricDraws = 100'000;

/// Pr(sign(w . x) != sign(u . x)). Exact angle/pi for the gaussian marginal,
/// Monte Carlo on `rng` otherwise.
ErrorEstimate disagreement(const Vector& w, const Vector& u, const MarginalSpec& spec,
                           std::size_t n, Rng& rng);

/// Monte-Carlo disagreement regardless of the marginal.
ErrorEstimate disagreement_mc(const Vector& w, const Vector& u, const MarginalSpec& spec,
                              std::size_t n, Rng& rng);

/// Pr(sign(w . x) != y) over n shadow draws; the oracle counters are untouched.
ErrorEstimate err_d(const Vector& w, const Oracle& oracle, std::size_t n);

struct PotentialEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  std::size_t n = 0;
  std::uint64_t attempts = 0;
};

/// E[|u . x| 1{u . x < 0}] over x drawn from the marginal restricted to
/// 0 < w_hat . x <= b. Throws band_exhausted when one draw exceeds `max_attempts`
/// (0 picks default_max_attempts(b, n, 1e-3)).
PotentialEstimate f_estimate(const Vector& w, const Vector& u, double b, const MarginalSpec& spec,
                             std::size_t n, Rng& rng, std::uint64_t max_attempts = 0);

}  // namespace halfspace

#endif  // HALFSPACE_METRICS_HPP
