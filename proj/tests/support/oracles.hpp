#ifndef HALFSPACE_TEST_ORACLES_HPP
#define HALFSPACE_TEST_ORACLES_HPP

// Independent reference computations used only by tests.

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include "halfspace/vecmath.hpp"

namespace halfspace::testing {

struct GridResult {
  Vector point;
  double value = std::numeric_limits<double>::infinity();
  bool found = false;
};

// Coarse-to-fine grid search over the box [-1, 1]^d (d <= 3). Each round
// scans a (2m+1)^d lattice around the incumbent and then shrinks the pitch
// by `shrink`. The first round covers the whole box.
inline GridResult grid_minimize(std::size_t d, const std::function<bool(const Vector&)>& feasible,
                                const std::function<double(const Vector&)>& objective,
                                double start_pitch = 0.02, double final_pitch = 1e-4,
                                double shrink = 0.2, int half_width = 12) {
  GridResult best;
  auto scan = [&](const Vector& center, double pitch, int m) {
    std::vector<int> idx(d, -m);
    for (;;) {
      Vector w(d);
      for (std::size_t j = 0; j < d; ++j) w[j] = center[j] + pitch * idx[j];
      bool in_box = true;
      for (std::size_t j = 0; j < d; ++j) in_box = in_box && std::abs(w[j]) <= 1.0 + 1e-12;
      if (in_box && feasible(w)) {
        double v = objective(w);
        if (v < best.value) {
          best.value = v;
          best.point = w;
          best.found = true;
        }
      }
      std::size_t j = 0;
      while (j < d && ++idx[j] > m) idx[j++] = -m;
      if (j == d) break;
    }
  };
  const int full = static_cast<int>(std::ceil(1.0 / start_pitch));
  scan(Vector(d), start_pitch, full);
  if (!best.found) return best;
  for (double pitch = start_pitch * shrink; pitch >= final_pitch * (1.0 - 1e-9); pitch *= shrink) {
    scan(best.point, pitch, half_width);
  }
  return best;
}

inline double std_normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }
inline double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// E[|z| | -b <= z < 0] for z ~ N(0, 1).
inline double truncated_normal_abs_mean(double b) {
  return (std_normal_pdf(0.0) - std_normal_pdf(b)) / (std_normal_cdf(0.0) - std_normal_cdf(-b));
}

}  // namespace halfspace::testing

#endif
