#include "halfspace/vecmath.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include "halfspace/errors.hpp"

namespace halfspace {

namespace {

void require_finite(const std::vector<double>& c) {
  for (double x : c) {
    if (!std::isfinite(x)) throw std::invalid_argument("Vector: non-finite coordinate");
  }
}

void require_same_size(const Vector& a, const Vector& b, const char* op) {
  if (a.size() != b.size()) {
    throw std::invalid_argument(std::string(op) + ": dimension mismatch (" +
                                std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
  }
}

}  // namespace

Vector::Vector(std::size_t d) : coords_(d, 0.0) {}

Vector::Vector(std::initializer_list<double> coords) : coords_(coords) {
  require_finite(coords_);
}

Vector::Vector(std::vector<double> coords) : coords_(std::move(coords)) {
  require_finite(coords_);
}

Vector Vector::basis(std::size_t d, std::size_t j, double scale) {
  if (j >= d) throw std::invalid_argument("Vector::basis: index out of range");
  Vector e(d);
  e.coords_[j] = scale;
  return e;
}

Vector& Vector::operator+=(const Vector& rhs) {
  require_same_size(*this, rhs, "operator+=");
  for (std::size_t j = 0; j < coords_.size(); ++j) coords_[j] += rhs.coords_[j];
  return *this;
}

Vector& Vector::operator-=(const Vector& rhs) {
  require_same_size(*this, rhs, "operator-=");
  for (std::size_t j = 0; j < coords_.size(); ++j) coords_[j] -= rhs.coords_[j];
  return *this;
}

Vector& Vector::operator*=(double a) {
  for (double& x : coords_) x *= a;
  return *this;
}

Vector& Vector::operator/=(double a) {
  for (double& x : coords_) x /= a;
  return *this;
}

Vector& Vector::axpy(double a, const Vector& x) {
  require_same_size(*this, x, "axpy");
  for (std::size_t j = 0; j < coords_.size(); ++j) coords_[j] += a * x.coords_[j];
  return *this;
}

Vector operator+(Vector lhs, const Vector& rhs) { return lhs += rhs; }
Vector operator-(Vector lhs, const Vector& rhs) { return lhs -= rhs; }
Vector operator-(Vector v) { return v *= -1.0; }
Vector operator*(double a, Vector v) { return v *= a; }
Vector operator*(Vector v, double a) { return v *= a; }
Vector operator/(Vector v, double a) { return v /= a; }

double dot(const Vector& a, const Vector& b) {
  require_same_size(a, b, "dot");
  double acc = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) acc += a[j] * b[j];
  return acc;
}

double norm2(const Vector& v) {
  double scale = norm_inf(v);
  if (scale == 0.0) return 0.0;
  double acc = 0.0;
  for (double x : v) {
    double r = x / scale;
    acc += r * r;
  }
  return scale * std::sqrt(acc);
}

double norm_inf(const Vector& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double norm1(const Vector& v) {
  double acc = 0.0;
  for (double x : v) acc += std::abs(x);
  return acc;
}

double pnorm(const Vector& v, double gamma) {
  if (!(gamma >= 1.0)) throw std::invalid_argument("pnorm: gamma must be >= 1");
  double scale = norm_inf(v);
  if (scale == 0.0) return 0.0;
  if (gamma == 2.0) return norm2(v);
  double acc = 0.0;
  for (double x : v) {
    if (x != 0.0) acc += std::pow(std::abs(x) / scale, gamma);
  }
  return scale * std::pow(acc, 1.0 / gamma);
}

std::size_t nnz(const Vector& v) {
  return static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [](double x) { return x != 0.0; }));
}

bool all_finite(const Vector& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

Vector normalized(const Vector& v) {
  double n = norm2(v);
  if (n == 0.0) throw degenerate_output("cannot normalize the zero vector");
  return v / n;
}

Vector hard_threshold(const Vector& v, std::size_t s) {
  const std::size_t d = v.size();
  if (s < 1 || s > d) {
    throw std::invalid_argument("hard_threshold: sparsity " + std::to_string(s) +
                                " outside [1, " + std::to_string(d) + "]");
  }
  if (s == d) return v;
  std::vector<std::size_t> idx(d);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(s), idx.end(),
                    [&v](std::size_t a, std::size_t b) {
                      double ma = std::abs(v[a]);
                      double mb = std::abs(v[b]);
                      return ma > mb || (ma == mb && a < b);
                    });
  Vector out(d);
  for (std::size_t i = 0; i < s; ++i) out[idx[i]] = v[idx[i]];
  return out;
}

double angle(const Vector& w, const Vector& v) {
  double nw = norm2(w);
  double nv = norm2(v);
  if (nw == 0.0 || nv == 0.0) throw std::invalid_argument("angle: zero vector");
  double c = dot(w, v) / (nw * nv);
  return std::acos(std::clamp(c, -1.0, 1.0));
}

PNormParams PNormParams::for_dimension(std::size_t d) {
  if (d < 1) throw std::invalid_argument("PNormParams: dimension must be positive");
  const double q = std::log(8.0 * static_cast<double>(d));
  PNormParams out;
  out.d = d;
  out.q = q;
  out.p = q / (q - 1.0);
  return out;
}

PNormParams PNormParams::with_p(std::size_t d, double p) {
  if (d < 1) throw std::invalid_argument("PNormParams: dimension must be positive");
  if (!(p > 1.0 && p <= 2.0)) throw std::invalid_argument("PNormParams: p must lie in (1, 2]");
  PNormParams out;
  out.d = d;
  out.p = p;
  out.q = p == 2.0 ? 2.0 : p / (p - 1.0);
  return out;
}

double phi(const Vector& w, const Vector& anchor, const PNormParams& params) {
  double n = pnorm(w - anchor, params.p);
  return n * n / (2.0 * (params.p - 1.0));
}

namespace {

// ||x||_r^{2-r} sign(x_j)|x_j|^{r-1}, written as ||x||_r (|x_j|/||x||_r)^{r-1}
// so that large exponents cannot overflow.
Vector dual_power_map(const Vector& x, double r, double factor) {
  Vector out(x.size());
  double n = pnorm(x, r);
  if (n == 0.0) return out;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j] == 0.0) continue;
    double mag = n * std::pow(std::abs(x[j]) / n, r - 1.0) * factor;
    out[j] = x[j] > 0.0 ? mag : -mag;
  }
  return out;
}

}  // namespace

Vector grad_phi(const Vector& z, const PNormParams& params) {
  if (params.p == 2.0) return z;
  return dual_power_map(z, params.p, 1.0 / (params.p - 1.0));
}

Vector grad_phi_star(const Vector& theta, const PNormParams& params) {
  if (params.p == 2.0) return theta;
  return dual_power_map(theta, params.q, params.p - 1.0);
}

double bregman_div(const Vector& w, const Vector& w_ref, const Vector& anchor,
                   const PNormParams& params) {
  require_same_size(w, w_ref, "bregman_div");
  require_same_size(w, anchor, "bregman_div");
  double b = phi(w, anchor, params) - phi(w_ref, anchor, params) -
             dot(grad_phi(w_ref - anchor, params), w - w_ref);
  return std::max(b, 0.0);
}

}  // namespace halfspace
