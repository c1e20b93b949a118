#include "halfspace/sampling.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "halfspace/errors.hpp"

namespace halfspace {

std::string to_string(MarginalKind kind) {
  switch (kind) {
    case MarginalKind::gaussian: return "gaussian";
    case MarginalKind::product_laplace: return "product_laplace";
    case MarginalKind::product_uniform: return "product_uniform";
    case MarginalKind::product_exponential: return "product_exponential";
  }
  return "unknown";
}

MarginalKind marginal_kind_from_string(std::string_view name) {
  if (name == "gaussian") return MarginalKind::gaussian;
  if (name == "product_laplace") return MarginalKind::product_laplace;
  if (name == "product_uniform") return MarginalKind::product_uniform;
  if (name == "product_exponential") return MarginalKind::product_exponential;
  throw std::invalid_argument("unknown marginal kind '" + std::string(name) + "'");
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  // splitmix64 finalizer over a combined state
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (tag + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double sample_coordinate(MarginalKind kind, Rng& rng) {
  switch (kind) {
    case MarginalKind::gaussian:
      return rng.normal();
    case MarginalKind::product_laplace: {
      // variance of Laplace(scale) is 2 scale^2
      double e = rng.exponential() * std::numbers::sqrt2 / 2.0;
      return rng.uniform01() < 0.5 ? -e : e;
    }
    case MarginalKind::product_uniform:
      return (2.0 * rng.uniform01() - 1.0) * std::numbers::sqrt3;
    case MarginalKind::product_exponential:
      return rng.exponential() - 1.0;
  }
  return 0.0;
}

Vector sample_marginal(const MarginalSpec& spec, Rng& rng) {
  std::vector<double> c(spec.d);
  for (double& x : c) x = sample_coordinate(spec.kind, rng);
  return Vector(std::move(c));
}

bool in_band(const Vector& w_hat, const Vector& x, double band) {
  double m = dot(w_hat, x);
  return m > 0.0 && m <= band;
}

BandDraw sample_band(const MarginalSpec& spec, const Vector& w_hat, double band, Rng& rng,
                     std::uint64_t max_attempts) {
  if (!(band > 0.0)) throw std::invalid_argument("sample_band: band width must be positive");
  if (w_hat.size() != spec.d) throw std::invalid_argument("sample_band: dimension mismatch");
  if (std::abs(norm2(w_hat) - 1.0) > 1e-9) {
    throw std::invalid_argument("sample_band: direction must be a unit vector");
  }
  for (std::uint64_t attempt = 1; attempt <= max_attempts; ++attempt) {
    Vector x = sample_marginal(spec, rng);
    if (in_band(w_hat, x, band)) return BandDraw{std::move(x), attempt};
  }
  throw band_exhausted(max_attempts);
}

std::uint64_t default_max_attempts(double band, std::size_t iterations, double delta) {
  if (!(band > 0.0) || !(delta > 0.0)) {
    throw std::invalid_argument("default_max_attempts: band and delta must be positive");
  }
  double t = static_cast<double>(std::max<std::size_t>(iterations, 1));
  double log_term = std::max(0.0, 10.0 * std::log(t / delta));
  return static_cast<std::uint64_t>(std::ceil((20.0 + log_term) / band));
}

}  // namespace halfspace
