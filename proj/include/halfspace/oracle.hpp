#ifndef HALFSPACE_ORACLE_HPP
#define HALFSPACE_ORACLE_HPP

#include <cstdint>
#include <string>
#include <string_view>

#include "halfspace/sampling.hpp"
#include "halfspace/vecmath.hpp"

namespace halfspace {

/// Unit-norm, at most s-sparse target halfspace.
struct TrueHalfspace {
  Vector u;
  std::size_t s = 1;
};

/// s coordinates chosen uniformly, filled with seeded gaussians, normalized.
TrueHalfspace make_sparse_halfspace(std::size_t d, std::size_t s, Rng& rng);

enum class NoiseKind { realizable, random_flip, margin_flip, region_flip };

std::string to_string(NoiseKind kind);
NoiseKind noise_kind_from_string(std::string_view name);

/// Where the region_flip slab is oriented.
enum class RegionDirection { truth, random };

/// Noise model as written in a config file.
struct NoiseSpec {
  NoiseKind kind = NoiseKind::realizable;
  double nu = 0.0;
  // region_flip: flip inside {lower <= v . x <= upper}, mass capped at nu
  RegionDirection region_direction = RegionDirection::truth;
  double region_lower = 0.0;
  double region_upper = 0.1;
};

/// Noise model after calibration against the marginal and target.
struct NoiseModel {
  NoiseSpec spec;
  double margin_tau = 0.0;  // margin_flip threshold on |u . x|
  Vector region_normal;     // region_flip slab normal (unit)
  double region_lower = 0.0;
  double region_upper = 0.0;  // after the nu cap
};

struct OracleCounters {
  std::uint64_t ex_calls = 0;
  std::uint64_t label_queries = 0;
};

/// A drawn instance that was labeled as a side effect of drawing (passive mode).
struct LabeledBandDraw {
  Vector x;
  int y = 1;
  std::uint64_t attempts = 0;
};

// Fixed joint distribution over (x, y) plus EX / EX_y accounting.
//
// Labels are a fixed function of x (and, for random_flip, of a per-instance
// hash of x's bit pattern under the oracle seed), so the distribution is
// decided before any learner touches it. Metric helpers draw from shadow
// streams that never touch the counters.
class Oracle {
 public:
  Oracle(MarginalSpec marginal, TrueHalfspace truth, NoiseSpec noise, std::uint64_t seed);

  /// EX: one marginal draw, ex_calls += 1.
  Vector draw_unlabeled();

  /// EX_y: label for x, label_queries += 1.
  int reveal_label(const Vector& x);

  /// Rejection-samples the band through EX; every raw draw is counted.
  BandDraw draw_in_band(const Vector& w_hat, double band, std::uint64_t max_attempts);

  /// Passive variant: every raw draw is also labeled.
  LabeledBandDraw draw_labeled_until_band(const Vector& w_hat, double band,
                                          std::uint64_t max_attempts);

  /// Label rule without accounting.
  int label_of(const Vector& x) const;

  /// Monte-Carlo estimate of Pr(y != sign(u . x)) on a shadow stream.
  double noise_rate_estimate(std::size_t n) const;

  /// Independent stream for measurement; same tag gives the same stream.
  Rng shadow_rng(std::uint64_t tag) const;

  const OracleCounters& counters() const noexcept { return counters_; }
  const TrueHalfspace& truth() const noexcept { return truth_; }
  const MarginalSpec& marginal() const noexcept { return marginal_; }
  const NoiseModel& noise() const noexcept { return noise_; }
  std::uint64_t seed() const noexcept { return seed_; }

 private:
  void calibrate();

  MarginalSpec marginal_;
  TrueHalfspace truth_;
  NoiseModel noise_;
  std::uint64_t seed_;
  std::uint64_t flip_seed_;
  Rng stream_;
  OracleCounters counters_;
};

/// sign with sign(0) = +1.
inline int sign_of(double v) { return v >= 0.0 ? 1 : -1; }

/// Draws the projection v . x for x from the marginal, sampling only the
/// coordinates in v's support (the product kinds have independent coordinates).
double sample_projection(const MarginalSpec& spec, const Vector& v, Rng& rng);

}  // namespace halfspace

#endif  // HALFSPACE_ORACLE_HPP
