#ifndef HALFSPACE_VECMATH_HPP
#define HALFSPACE_VECMATH_HPP

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace halfspace {

// Dense real vector. Constructors reject NaN/Inf; the length never changes
// after construction. Arithmetic helpers below keep results finite for
// finite inputs of moderate magnitude.
class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t d);
  Vector(std::initializer_list<double> coords);
  explicit Vector(std::vector<double> coords);

  static Vector zeros(std::size_t d) { return Vector(d); }
  static Vector basis(std::size_t d, std::size_t j, double scale = 1.0);

  std::size_t size() const noexcept { return coords_.size(); }
  bool empty() const noexcept { return coords_.empty(); }

  double operator[](std::size_t j) const { return coords_[j]; }
  double& operator[](std::size_t j) { return coords_[j]; }

  std::span<const double> coords() const noexcept { return coords_; }
  const std::vector<double>& data() const noexcept { return coords_; }

  auto begin() const noexcept { return coords_.begin(); }
  auto end() const noexcept { return coords_.end(); }

  Vector& operator+=(const Vector& rhs);
  Vector& operator-=(const Vector& rhs);
  Vector& operator*=(double a);
  Vector& operator/=(double a);

  /// this += a * x
  Vector& axpy(double a, const Vector& x);

  bool operator==(const Vector& rhs) const = default;

 private:
  std::vector<double> coords_;
};

Vector operator+(Vector lhs, const Vector& rhs);
Vector operator-(Vector lhs, const Vector& rhs);
Vector operator-(Vector v);
Vector operator*(double a, Vector v);
Vector operator*(Vector v, double a);
Vector operator/(Vector v, double a);

double dot(const Vector& a, const Vector& b);
double norm2(const Vector& v);
double norm_inf(const Vector& v);
double norm1(const Vector& v);
/// l_gamma norm for gamma >= 1, computed with max-abs scaling.
double pnorm(const Vector& v, double gamma);
std::size_t nnz(const Vector& v);
bool all_finite(const Vector& v);

/// v / ||v||_2; throws degenerate_output on the zero vector.
Vector normalized(const Vector& v);

/// Keep the s largest-magnitude entries (ties to the lower index), zero the rest.
Vector hard_threshold(const Vector& v, std::size_t s);

/// Angle in [0, pi]; throws std::invalid_argument for zero vectors.
double angle(const Vector& w, const Vector& v);

// p-norm geometry. q is the Hoelder conjugate of p.
struct PNormParams {
  std::size_t d = 1;
  double p = 2.0;
  double q = 2.0;

  /// p = ln(8d)/(ln(8d)-1), q = ln(8d).
  static PNormParams for_dimension(std::size_t d);
  /// Arbitrary p in (1, 2].
  static PNormParams with_p(std::size_t d, double p);
};

/// Phi(w) = ||w - anchor||_p^2 / (2(p-1)).
double phi(const Vector& w, const Vector& anchor, const PNormParams& params);

/// Gradient of ||z||_p^2 / (2(p-1)) at z (the primal-to-dual link).
Vector grad_phi(const Vector& z, const PNormParams& params);

/// Gradient of the conjugate (p-1)||theta||_q^2 / 2; inverse of grad_phi.
Vector grad_phi_star(const Vector& theta, const PNormParams& params);

/// Bregman divergence of Phi anchored at `anchor`, B(w; w_ref).
double bregman_div(const Vector& w, const Vector& w_ref, const Vector& anchor,
                   const PNormParams& params);

}  // namespace halfspace

#endif  // HALFSPACE_VECMATH_HPP
