#include "halfspace/metrics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "halfspace/stats.hpp"

namespace halfspace {

namespace {

constexpr std::uint64_t kErrStream = 11;

void require_nonzero(const Vector& w, const Vector& u, const char* who) {
  if (w.size() != u.size()) throw std::invalid_argument(std::string(who) + ": dimension mismatch");
  if (norm2(w) == 0.0 || norm2(u) == 0.0) throw std::invalid_argument(std::string(who) + ": zero vector");
}

ErrorEstimate proportion(std::size_t hits, std::size_t n) {
  ErrorEstimate e;
  e.method = EstimateMethod::monte_carlo;
  e.n = n;
  e.value = static_cast<double>(hits) / static_cast<double>(n);
  e.stderr_ = binomial_stderr(e.value, static_cast<double>(n));
  return e;
}

}  // namespace

std::string to_string(EstimateMethod method) {
  return method == EstimateMethod::closed_form ? "closed_form" : "monte_carlo";
}

ErrorEstimate disagreement_mc(const Vector& w, const Vector& u, const MarginalSpec& spec,
                              std::size_t n, Rng& rng) {
  require_nonzero(w, u, "disagreement");
  if (n < 1) throw std::invalid_argument("disagreement: need n >= 1");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) {
    Vector x = sample_marginal(spec, rng);
    if (sign_of(dot(w, x)) != sign_of(dot(u, x))) ++hits;
  }
  return proportion(hits, n);
}

ErrorEstimate disagreement(const Vector& w, const Vector& u, const MarginalSpec& spec,
                           std::size_t n, Rng& rng) {
  require_nonzero(w, u, "disagreement");
  if (spec.kind == MarginalKind::gaussian) {
    ErrorEstimate e;
    e.method = EstimateMethod::closed_form;
    e.value = angle(w, u) / std::numbers::pi;
    return e;
  }
  return disagreement_mc(w, u, spec, n, rng);
}

ErrorEstimate err_d(const Vector& w, const Oracle& oracle, std::size_t n) {
  if (n < 1) throw std::invalid_argument("err_d: need n >= 1");
  if (w.size() != oracle.marginal().d) throw std::invalid_argument("err_d: dimension mismatch");
  Rng rng = oracle.shadow_rng(kErrStream);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) {
    Vector x = sample_marginal(oracle.marginal(), rng);
    if (sign_of(dot(w, x)) != oracle.label_of(x)) ++hits;
  }
  return proportion(hits, n);
}

PotentialEstimate f_estimate(const Vector& w, const Vector& u, double b, const MarginalSpec& spec,
                             std::size_t n, Rng& rng, std::uint64_t max_attempts) {
  require_nonzero(w, u, "f_estimate");
  if (!(b > 0.0)) throw std::invalid_argument("f_estimate: band width must be positive");
  if (n < 1) throw std::invalid_argument("f_estimate: need n >= 1");
  const Vector w_hat = normalized(w);
  const Vector u_hat = normalized(u);
  const std::uint64_t budget = max_attempts > 0 ? max_attempts : default_max_attempts(b, n, 1e-3);

  PotentialEstimate out;
  out.n = n;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    BandDraw draw = sample_band(spec, w_hat, b, rng, budget);
    out.attempts += draw.attempts;
    double m = dot(u_hat, draw.x);
    double z = m < 0.0 ? -m : 0.0;
    sum += z;
    sum_sq += z * z;
  }
  const double nn = static_cast<double>(n);
  out.value = sum / nn;
  double var = n > 1 ? std::max(0.0, (sum_sq - nn * out.value * out.value) / (nn - 1.0)) : 0.0;
  out.stderr_ = std::sqrt(var / nn);
  return out;
}

}  // namespace halfspace
