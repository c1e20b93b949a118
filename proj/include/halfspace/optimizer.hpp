#ifndef HALFSPACE_OPTIMIZER_HPP
#define HALFSPACE_OPTIMIZER_HPP

#include <cstdint>
#include <optional>

#include "halfspace/vecmath.hpp"

namespace halfspace {

struct Ball {
  Vector center;
  double radius = 1.0;
};

/// {w : w . normal >= offset}
struct LinearFloor {
  Vector normal;
  double offset = 0.0;
};

// Convex feasible region: a centered l2 ball, optionally intersected with a
// second ball and/or a halfspace. Construction certifies non-emptiness by
// exhibiting a feasible point.
class ConstraintSet {
 public:
  ConstraintSet(std::size_t d, double outer_radius, std::optional<Ball> inner = std::nullopt,
                std::optional<LinearFloor> floor = std::nullopt);

  /// ||w||_2 <= 1 and ||w - center||_2 <= radius.
  static ConstraintSet trust_region(const Vector& center, double radius);
  /// ||w||_2 <= 1 and w . direction >= offset.
  static ConstraintSet correlation_floor(const Vector& direction, double offset);

  std::size_t dim() const noexcept { return d_; }
  double outer_radius() const noexcept { return outer_radius_; }
  const std::optional<Ball>& inner() const noexcept { return inner_; }
  const std::optional<LinearFloor>& floor() const noexcept { return floor_; }
  const Vector& feasible_point() const noexcept { return feasible_; }

  /// Largest constraint violation (<= 0 inside the set).
  double violation(const Vector& w) const;
  bool contains(const Vector& w, double tol) const { return violation(w) <= tol; }

  Vector project_outer(const Vector& y) const;
  Vector project_inner(const Vector& y) const;
  Vector project_floor(const Vector& y) const;
  std::size_t num_constraints() const noexcept {
    return 1 + (inner_ ? 1 : 0) + (floor_ ? 1 : 0);
  }

 private:
  std::size_t d_;
  double outer_radius_;
  std::optional<Ball> inner_;
  std::optional<LinearFloor> floor_;
  Vector feasible_;
};

struct ProjectionOptions {
  double tol = 1e-8;
  int max_iter = 10'000;
  /// Use the exact two-constraint formula instead of Dykstra when it applies.
  bool closed_form_pairs = true;
};

/// Euclidean projection onto K. Throws solver_failure when Dykstra misses
/// `tol` within the iteration cap.
Vector euclid_project(const ConstraintSet& set, const Vector& y, const ProjectionOptions& opts = {});

/// Dykstra's alternating projections over all constraints of the set.
Vector dykstra_project(const ConstraintSet& set, const Vector& y, const ProjectionOptions& opts = {});

// argmin_{w in K} <w, alpha g> + B_Phi(w; w_prev), Phi anchored at `anchor`.
struct MirrorProblem {
  ConstraintSet constraint;
  Vector anchor;
  PNormParams params;
  double tol = 1e-6;             // certificate acceptance
  ProjectionOptions projection;  // inner projections
  int max_iter = 10'000;         // constrained polish cap
  int probes = 16;               // certificate probe count

  MirrorProblem(ConstraintSet k, Vector v, PNormParams p);
};

/// <alpha g, w> + B_Phi(w; w_prev).
double md_objective(const MirrorProblem& problem, const Vector& w, const Vector& w_prev,
                    const Vector& g, double alpha);

/// First-order optimality residual: max over feasible probes w of
/// <alpha g + grad_phi(w* - v) - grad_phi(w_prev - v), w* - w>.
/// probes == 0 yields -infinity.
double certify(const MirrorProblem& problem, const Vector& w_star, const Vector& w_prev,
               const Vector& g, double alpha, int probes);

struct MirrorStepStats {
  bool constrained = false;  // the unconstrained dual step left K
  int iterations = 0;        // polish iterations
  double residual = 0.0;     // certificate at the returned point (0 when unconstrained)
};

/// One constrained mirror-descent step. Throws solver_failure if the
/// certificate is not met within the iteration cap.
Vector md_step(const MirrorProblem& problem, const Vector& w_prev, const Vector& g, double alpha,
               MirrorStepStats* stats = nullptr);

}  // namespace halfspace

#endif  // HALFSPACE_OPTIMIZER_HPP
