#ifndef HALFSPACE_SAMPLING_HPP
#define HALFSPACE_SAMPLING_HPP

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

#include "halfspace/vecmath.hpp"

namespace halfspace {

enum class MarginalKind { gaussian, product_laplace, product_uniform, product_exponential };

std::string to_string(MarginalKind kind);
/// Throws std::invalid_argument for unknown names.
MarginalKind marginal_kind_from_string(std::string_view name);

/// Isotropic log-concave marginal over R^d. Every kind has zero mean and
/// identity covariance:
///   gaussian             N(0, I)
///   product_laplace      iid Laplace, scale 1/sqrt(2)
///   product_uniform      iid U[-sqrt(3), sqrt(3)]
///   product_exponential  iid Exp(1) - 1
struct MarginalSpec {
  MarginalKind kind = MarginalKind::gaussian;
  std::size_t d = 1;
};

/// Mixes a seed with a tag into an independent-looking 64-bit seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

/// Seeded random stream. Identical seeds give identical streams.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  double normal() { return normal_(engine_); }
  double uniform01() { return uniform_(engine_); }
  double exponential() { return exponential_(engine_); }
  std::uint64_t bits() { return engine_(); }
  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  std::exponential_distribution<double> exponential_{1.0};
};

/// One scalar draw from the standardized one-dimensional factor of `kind`.
double sample_coordinate(MarginalKind kind, Rng& rng);

Vector sample_marginal(const MarginalSpec& spec, Rng& rng);

struct BandDraw {
  Vector x;
  std::uint64_t attempts = 0;
};

/// True when 0 < w_hat . x <= band.
bool in_band(const Vector& w_hat, const Vector& x, double band);

/// Rejection sampling from the marginal restricted to {x : 0 < w_hat . x <= band}.
/// Every raw draw counts as an attempt; exceeding `max_attempts` throws
/// band_exhausted carrying the number of draws consumed.
BandDraw sample_band(const MarginalSpec& spec, const Vector& w_hat, double band, Rng& rng,
                     std::uint64_t max_attempts);

/// ceil((20 + 10 ln(T/delta)) / b): per-draw failure below delta/(2T) whenever
/// the band mass is at least 0.1 b.
std::uint64_t default_max_attempts(double band, std::size_t iterations, double delta);

}  // namespace halfspace

#endif  // HALFSPACE_SAMPLING_HPP
