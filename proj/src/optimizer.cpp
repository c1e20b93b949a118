#include "halfspace/optimizer.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "halfspace/errors.hpp"
#include "halfspace/sampling.hpp"

namespace halfspace {

namespace {

using Projector = std::function<Vector(const Vector&)>;

Vector project_ball(const Vector& y, const Vector* center, double radius) {
  Vector off = center ? y - *center : y;
  double n = norm2(off);
  if (n <= radius) return y;
  off *= radius / n;
  return center ? *center + off : off;
}

// Unit vector orthogonal to n (n unit).
Vector any_orthogonal(const Vector& n) {
  for (std::size_t j = 0; j < n.size(); ++j) {
    Vector e = Vector::basis(n.size(), j);
    e.axpy(-n[j], n);
    double len = norm2(e);
    if (len > 1e-6) return e / len;
  }
  return Vector(n.size());
}

// Closest point to y on the (d-2)-sphere {x : <x, n> = t, ||x - t n|| = rho}.
Vector project_onto_rim(const Vector& y, const Vector& n, double t, double rho) {
  Vector m = t * n;
  Vector in_plane = y;
  in_plane.axpy(t - dot(y, n), n);
  Vector dir = in_plane - m;
  double len = norm2(dir);
  if (len == 0.0) return m + rho * any_orthogonal(n);
  return m + (rho / len) * dir;
}

}  // namespace

ConstraintSet::ConstraintSet(std::size_t d, double outer_radius, std::optional<Ball> inner,
                             std::optional<LinearFloor> floor)
    : d_(d), outer_radius_(outer_radius), inner_(std::move(inner)), floor_(std::move(floor)) {
  if (d_ < 1) throw std::invalid_argument("ConstraintSet: dimension must be positive");
  if (!(outer_radius_ > 0.0)) throw std::invalid_argument("ConstraintSet: outer radius must be positive");
  Vector start(d_);
  if (inner_) {
    if (inner_->center.size() != d_) throw std::invalid_argument("ConstraintSet: inner ball dimension mismatch");
    if (!(inner_->radius > 0.0)) throw std::invalid_argument("ConstraintSet: inner radius must be positive");
    start = inner_->center;
  }
  if (floor_) {
    if (floor_->normal.size() != d_) throw std::invalid_argument("ConstraintSet: halfspace dimension mismatch");
    double a2 = dot(floor_->normal, floor_->normal);
    if (a2 == 0.0) throw std::invalid_argument("ConstraintSet: halfspace normal is zero");
    if (!inner_) start = (floor_->offset / a2) * floor_->normal;
  }
  try {
    feasible_ = euclid_project(*this, start);
  } catch (const solver_failure&) {
    throw std::invalid_argument("ConstraintSet: constraints have empty intersection");
  }
  if (violation(feasible_) > 1e-9) {
    throw std::invalid_argument("ConstraintSet: constraints have empty intersection");
  }
}

ConstraintSet ConstraintSet::trust_region(const Vector& center, double radius) {
  return ConstraintSet(center.size(), 1.0, Ball{center, radius});
}

ConstraintSet ConstraintSet::correlation_floor(const Vector& direction, double offset) {
  return ConstraintSet(direction.size(), 1.0, std::nullopt, LinearFloor{direction, offset});
}

double ConstraintSet::violation(const Vector& w) const {
  double v = norm2(w) - outer_radius_;
  if (inner_) v = std::max(v, norm2(w - inner_->center) - inner_->radius);
  if (floor_) v = std::max(v, (floor_->offset - dot(floor_->normal, w)) / norm2(floor_->normal));
  return v;
}

Vector ConstraintSet::project_outer(const Vector& y) const {
  return project_ball(y, nullptr, outer_radius_);
}

Vector ConstraintSet::project_inner(const Vector& y) const {
  if (!inner_) return y;
  return project_ball(y, &inner_->center, inner_->radius);
}

Vector ConstraintSet::project_floor(const Vector& y) const {
  if (!floor_) return y;
  double gap = floor_->offset - dot(floor_->normal, y);
  if (gap <= 0.0) return y;
  Vector out = y;
  out.axpy(gap / dot(floor_->normal, floor_->normal), floor_->normal);
  return out;
}

namespace {

std::vector<Projector> projectors(const ConstraintSet& set) {
  std::vector<Projector> out;
  out.emplace_back([&set](const Vector& y) { return set.project_outer(y); });
  if (set.inner()) out.emplace_back([&set](const Vector& y) { return set.project_inner(y); });
  if (set.floor()) out.emplace_back([&set](const Vector& y) { return set.project_floor(y); });
  return out;
}

// Both constraints of a two-constraint set are active: the projection lies
// on the intersection of the two boundaries.
std::optional<Vector> project_pair_rim(const ConstraintSet& set, const Vector& y) {
  const double R = set.outer_radius();
  Vector n;
  double t = 0.0;
  if (set.inner()) {
    const Ball& b = *set.inner();
    double dc = norm2(b.center);
    if (dc == 0.0) return std::nullopt;
    n = b.center / dc;
    t = (R * R - b.radius * b.radius + dc * dc) / (2.0 * dc);
  } else {
    const LinearFloor& f = *set.floor();
    double an = norm2(f.normal);
    n = f.normal / an;
    t = f.offset / an;
  }
  double rho2 = R * R - t * t;
  if (rho2 < 0.0) return std::nullopt;
  return project_onto_rim(y, n, t, std::sqrt(rho2));
}

}  // namespace

Vector dykstra_project(const ConstraintSet& set, const Vector& y, const ProjectionOptions& opts) {
  std::vector<Projector> proj = projectors(set);
  Vector x = y;
  std::vector<Vector> incr(proj.size(), Vector(y.size()));
  double move = std::numeric_limits<double>::infinity();
  for (int it = 0; it < opts.max_iter; ++it) {
    Vector x_old = x;
    for (std::size_t i = 0; i < proj.size(); ++i) {
      Vector z = x + incr[i];
      x = proj[i](z);
      incr[i] = z - x;
    }
    move = norm2(x - x_old);
    if (move < opts.tol && set.violation(x) <= opts.tol) return x;
  }
  throw solver_failure("Dykstra projection did not converge", move);
}

Vector euclid_project(const ConstraintSet& set, const Vector& y, const ProjectionOptions& opts) {
  if (y.size() != set.dim()) throw std::invalid_argument("euclid_project: dimension mismatch");
  if (set.violation(y) <= 0.0) return y;
  std::vector<Projector> proj = projectors(set);
  if (proj.size() == 1) return proj[0](y);
  const double slack = opts.tol * 1e-3;
  for (const Projector& p : proj) {
    Vector z = p(y);
    if (set.violation(z) <= slack) return z;
  }
  if (proj.size() == 2 && opts.closed_form_pairs) {
    if (auto rim = project_pair_rim(set, y)) return *rim;
  }
  return dykstra_project(set, y, opts);
}

MirrorProblem::MirrorProblem(ConstraintSet k, Vector v, PNormParams p)
    : constraint(std::move(k)), anchor(std::move(v)), params(p) {
  if (anchor.size() != constraint.dim()) throw std::invalid_argument("MirrorProblem: anchor dimension mismatch");
  if (params.d != constraint.dim()) throw std::invalid_argument("MirrorProblem: p-norm dimension mismatch");
}

double md_objective(const MirrorProblem& problem, const Vector& w, const Vector& w_prev,
                    const Vector& g, double alpha) {
  return alpha * dot(g, w) + bregman_div(w, w_prev, problem.anchor, problem.params);
}

namespace {

Vector objective_gradient(const MirrorProblem& problem, const Vector& w, const Vector& dual_prev,
                          const Vector& g, double alpha) {
  Vector grad = grad_phi(w - problem.anchor, problem.params);
  grad -= dual_prev;
  grad.axpy(alpha, g);
  return grad;
}

double residual_against_probes(const MirrorProblem& problem, const Vector& w_star,
                               const Vector& grad, int probes) {
  if (probes <= 0) return -std::numeric_limits<double>::infinity();
  const ConstraintSet& k = problem.constraint;
  const double gn = norm2(grad);
  if (gn == 0.0) return 0.0;
  const Vector dir = grad / gn;
  const double reach = 2.0 * k.outer_radius();

  std::vector<Vector> candidates;
  candidates.push_back((-k.outer_radius()) * dir);
  if (k.inner()) candidates.push_back(k.inner()->center - k.inner()->radius * dir);
  for (double scale : {1.0, 1e-1, 1e-3, 1e-6}) candidates.push_back(w_star - (scale * reach) * dir);
  candidates.push_back(k.feasible_point());

  double worst = -std::numeric_limits<double>::infinity();
  int used = 0;
  auto score = [&](const Vector& probe) {
    Vector w = euclid_project(k, probe, problem.projection);
    worst = std::max(worst, dot(grad, w_star - w));
    ++used;
  };
  for (const Vector& c : candidates) {
    if (used >= probes) break;
    score(c);
  }
  Rng rng(0xce271f1ULL);
  while (used < probes) {
    Vector step = sample_marginal(MarginalSpec{MarginalKind::gaussian, w_star.size()}, rng);
    double len = norm2(step);
    if (len == 0.0) continue;
    step *= reach * rng.uniform01() / len;
    score(w_star + step);
  }
  return worst;
}

}  // namespace

double certify(const MirrorProblem& problem, const Vector& w_star, const Vector& w_prev,
               const Vector& g, double alpha, int probes) {
  Vector dual_prev = grad_phi(w_prev - problem.anchor, problem.params);
  Vector grad = objective_gradient(problem, w_star, dual_prev, g, alpha);
  return residual_against_probes(problem, w_star, grad, probes);
}

Vector md_step(const MirrorProblem& problem, const Vector& w_prev_in, const Vector& g, double alpha,
               MirrorStepStats* stats) {
  const ConstraintSet& k = problem.constraint;
  if (w_prev_in.size() != k.dim() || g.size() != k.dim()) {
    throw std::invalid_argument("md_step: dimension mismatch");
  }
  if (!(alpha > 0.0)) throw std::invalid_argument("md_step: step size must be positive");
  MirrorStepStats local;
  MirrorStepStats& st = stats ? *stats : local;
  st = MirrorStepStats{};

  double viol = k.violation(w_prev_in);
  if (viol > 10.0 * problem.tol) {
    throw std::invalid_argument("md_step: previous iterate lies outside the constraint set");
  }
  const Vector w_prev = viol > 0.0 ? euclid_project(k, w_prev_in, problem.projection) : w_prev_in;
  if (norm_inf(g) == 0.0) return w_prev;

  // Dual step; exact when the constraint is inactive.
  const Vector dual_prev = grad_phi(w_prev - problem.anchor, problem.params);
  Vector theta = dual_prev;
  theta.axpy(-alpha, g);
  Vector w_free = problem.anchor + grad_phi_star(theta, problem.params);
  if (k.contains(w_free, problem.projection.tol)) return w_free;
  st.constrained = true;

  // Accelerated proximal gradient on the dual
  //   min_mu  Phi*(theta - mu) + sigma_K(mu),
  // whose smooth part has a 1-Lipschitz gradient; the prox of the support
  // function is mu -> mu - P_K(mu). Primal iterates P_K(.) stay feasible.
  Vector mu(k.dim());
  Vector mu_ext = mu;
  Vector x = w_prev;
  double momentum = 1.0;
  double residual = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= problem.max_iter; ++it) {
    Vector y = mu_ext + (problem.anchor + grad_phi_star(theta - mu_ext, problem.params));
    Vector x_new = euclid_project(k, y, problem.projection);
    Vector mu_new = y - x_new;

    double step = norm2(x_new - x);
    x = std::move(x_new);
    st.iterations = it;

    double next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    Vector delta = mu_new - mu;
    const double dual_step = norm2(delta);
    if (dot(mu_ext - mu_new, delta) > 0.0) {
      next = 1.0;  // gradient-based restart
      mu_ext = mu_new;
    } else {
      mu_ext = mu_new + ((momentum - 1.0) / next) * delta;
    }
    momentum = next;
    mu = std::move(mu_new);

    if ((step < 1e-10 && dual_step < 1e-10) || it % 64 == 0) {
      residual = residual_against_probes(problem, x, objective_gradient(problem, x, dual_prev, g, alpha),
                                         problem.probes);
      if (residual <= problem.tol) {
        st.residual = residual;
        return x;
      }
      // For q > 2, grad_phi_star sends small dual coordinates below the ulp
      // of the anchor, so grad_phi(z - v) recomputed from the stored z loses
      // them. The dual iterate theta - mu carries grad_phi(z - v) exactly.
      Vector z = problem.anchor + grad_phi_star(theta - mu, problem.params);
      if (k.contains(z, problem.tol)) {
        Vector grad_z = theta - mu;
        grad_z -= dual_prev;
        grad_z.axpy(alpha, g);
        double rz = residual_against_probes(problem, z, grad_z, problem.probes);
        if (rz <= problem.tol) {
          st.residual = rz;
          return z;
        }
        residual = std::min(residual, rz);
      }
      if (step == 0.0 && dual_step == 0.0) break;
    }
  }
  st.residual = residual;
  throw solver_failure("md_step: certificate not met", residual);
}

}  // namespace halfspace
