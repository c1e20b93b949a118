#include "halfspace/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "halfspace/errors.hpp"
#include "halfspace/stats.hpp"

namespace halfspace {

namespace {

constexpr std::size_t kCalibrationDraws = 1'000'000;

// stream tags
constexpr std::uint64_t kInstanceStream = 1;
constexpr std::uint64_t kFlipHash = 2;
constexpr std::uint64_t kCalibrationStream = 3;
constexpr std::uint64_t kRegionDirectionStream = 4;
constexpr std::uint64_t kNoiseRateStream = 5;

double hash_to_unit(std::uint64_t seed, const Vector& x) {
  std::uint64_t h = seed;
  for (double c : x) h = derive_seed(h, std::bit_cast<std::uint64_t>(c));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// Sorted projections for empirical quantiles of non-gaussian marginals.
std::vector<double> projection_samples(const MarginalSpec& spec, const Vector& v, Rng& rng) {
  std::vector<double> out(kCalibrationDraws);
  for (double& z : out) z = sample_projection(spec, v, rng);
  return out;
}

}  // namespace

TrueHalfspace make_sparse_halfspace(std::size_t d, std::size_t s, Rng& rng) {
  if (s < 1 || s > d) throw std::invalid_argument("make_sparse_halfspace: need 1 <= s <= d");
  std::vector<std::size_t> idx(d);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  // partial Fisher-Yates over the first s slots
  for (std::size_t i = 0; i < s; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, d - 1);
    std::swap(idx[i], idx[pick(rng.engine())]);
  }
  Vector u(d);
  for (std::size_t i = 0; i < s; ++i) {
    double g = 0.0;
    while (g == 0.0) g = rng.normal();
    u[idx[i]] = g;
  }
  return TrueHalfspace{normalized(u), s};
}

std::string to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::realizable: return "realizable";
    case NoiseKind::random_flip: return "random_flip";
    case NoiseKind::margin_flip: return "margin_flip";
    case NoiseKind::region_flip: return "region_flip";
  }
  return "unknown";
}

NoiseKind noise_kind_from_string(std::string_view name) {
  if (name == "realizable") return NoiseKind::realizable;
  if (name == "random_flip") return NoiseKind::random_flip;
  if (name == "margin_flip") return NoiseKind::margin_flip;
  if (name == "region_flip") return NoiseKind::region_flip;
  throw std::invalid_argument("unknown noise kind '" + std::string(name) + "'");
}

double sample_projection(const MarginalSpec& spec, const Vector& v, Rng& rng) {
  if (spec.kind == MarginalKind::gaussian) return norm2(v) * rng.normal();
  double acc = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (v[j] != 0.0) acc += v[j] * sample_coordinate(spec.kind, rng);
  }
  return acc;
}

Oracle::Oracle(MarginalSpec marginal, TrueHalfspace truth, NoiseSpec noise, std::uint64_t seed)
    : marginal_(marginal),
      truth_(std::move(truth)),
      seed_(seed),
      flip_seed_(derive_seed(seed, kFlipHash)),
      stream_(derive_seed(seed, kInstanceStream)) {
  if (truth_.u.size() != marginal_.d) throw std::invalid_argument("Oracle: dimension mismatch");
  if (std::abs(norm2(truth_.u) - 1.0) > 1e-9) {
    throw std::invalid_argument("Oracle: target halfspace must have unit norm");
  }
  if (nnz(truth_.u) > truth_.s) throw std::invalid_argument("Oracle: target exceeds sparsity");
  if (!(noise.nu >= 0.0 && noise.nu < 0.5)) {
    throw std::invalid_argument("Oracle: noise rate must lie in [0, 1/2)");
  }
  noise_.spec = noise;
  calibrate();
}

void Oracle::calibrate() {
  const NoiseSpec& spec = noise_.spec;
  const double nu = spec.nu;
  Rng rng(derive_seed(seed_, kCalibrationStream));
  const bool gaussian = marginal_.kind == MarginalKind::gaussian;

  if (spec.kind == NoiseKind::margin_flip && nu > 0.0) {
    // Pr(|u . x| <= tau) = nu
    if (gaussian) {
      noise_.margin_tau = normal_quantile(0.5 * (1.0 + nu));
    } else {
      std::vector<double> z = projection_samples(marginal_, truth_.u, rng);
      for (double& v : z) v = std::abs(v);
      std::sort(z.begin(), z.end());
      auto k = static_cast<std::size_t>(std::floor(nu * static_cast<double>(z.size())));
      noise_.margin_tau = k == 0 ? 0.0 : 0.5 * (z[k - 1] + z[k]);
    }
  }

  if (spec.kind == NoiseKind::region_flip) {
    if (spec.region_upper < spec.region_lower) {
      throw std::invalid_argument("Oracle: region upper bound below lower bound");
    }
    if (spec.region_direction == RegionDirection::truth) {
      noise_.region_normal = truth_.u;
    } else {
      Rng dir(derive_seed(seed_, kRegionDirectionStream));
      noise_.region_normal = make_sparse_halfspace(marginal_.d, truth_.s, dir).u;
    }
    noise_.region_lower = spec.region_lower;
    double upper = spec.region_upper;
    if (gaussian) {
      auto mass = [&](double hi) { return normal_cdf(hi) - normal_cdf(spec.region_lower); };
      if (mass(upper) > nu) {
        double lo = spec.region_lower;
        double hi = upper;
        for (int i = 0; i < 200; ++i) {
          double mid = 0.5 * (lo + hi);
          (mass(mid) > nu ? hi : lo) = mid;
        }
        upper = lo;
      }
    } else {
      std::vector<double> z = projection_samples(marginal_, noise_.region_normal, rng);
      std::sort(z.begin(), z.end());
      auto first = std::lower_bound(z.begin(), z.end(), spec.region_lower);
      auto last = std::upper_bound(z.begin(), z.end(), upper);
      auto cap = static_cast<std::ptrdiff_t>(std::floor(nu * static_cast<double>(z.size())));
      if (last - first > cap) {
        if (cap == 0) {
          upper = std::nextafter(spec.region_lower, -1e300);  // empty slab
        } else {
          upper = 0.5 * (first[cap - 1] + first[cap]);
        }
      }
    }
    noise_.region_upper = upper;
  }
}

Vector Oracle::draw_unlabeled() {
  ++counters_.ex_calls;
  return sample_marginal(marginal_, stream_);
}

int Oracle::label_of(const Vector& x) const {
  const double margin = dot(truth_.u, x);
  const int clean = sign_of(margin);
  switch (noise_.spec.kind) {
    case NoiseKind::realizable:
      return clean;
    case NoiseKind::random_flip:
      return hash_to_unit(flip_seed_, x) < noise_.spec.nu ? -clean : clean;
    case NoiseKind::margin_flip:
      return std::abs(margin) <= noise_.margin_tau && noise_.margin_tau > 0.0 ? -clean : clean;
    case NoiseKind::region_flip: {
      if (noise_.region_upper < noise_.region_lower) return clean;
      double z = dot(noise_.region_normal, x);
      return z >= noise_.region_lower && z <= noise_.region_upper ? -clean : clean;
    }
  }
  return clean;
}

int Oracle::reveal_label(const Vector& x) {
  ++counters_.label_queries;
  return label_of(x);
}

BandDraw Oracle::draw_in_band(const Vector& w_hat, double band, std::uint64_t max_attempts) {
  try {
    BandDraw draw = sample_band(marginal_, w_hat, band, stream_, max_attempts);
    counters_.ex_calls += draw.attempts;
    return draw;
  } catch (const band_exhausted& e) {
    counters_.ex_calls += e.attempts();
    throw;
  }
}

LabeledBandDraw Oracle::draw_labeled_until_band(const Vector& w_hat, double band,
                                                std::uint64_t max_attempts) {
  if (!(band > 0.0)) throw std::invalid_argument("draw_labeled_until_band: band must be positive");
  for (std::uint64_t attempt = 1; attempt <= max_attempts; ++attempt) {
    Vector x = draw_unlabeled();
    int y = reveal_label(x);
    if (in_band(w_hat, x, band)) return LabeledBandDraw{std::move(x), y, attempt};
  }
  throw band_exhausted(max_attempts);
}

double Oracle::noise_rate_estimate(std::size_t n) const {
  if (n < 1) throw std::invalid_argument("noise_rate_estimate: need n >= 1");
  Rng rng = shadow_rng(kNoiseRateStream);
  std::size_t flips = 0;
  for (std::size_t i = 0; i < n; ++i) {
    Vector x = sample_marginal(marginal_, rng);
    if (label_of(x) != sign_of(dot(truth_.u, x))) ++flips;
  }
  return static_cast<double>(flips) / static_cast<double>(n);
}

Rng Oracle::shadow_rng(std::uint64_t tag) const {
  return Rng(derive_seed(derive_seed(seed_, 0x5eed5eedULL), tag));
}

}  // namespace halfspace
