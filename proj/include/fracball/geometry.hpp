#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <initializer_list>
#include <numbers>
#include <span>
#include <string>

#include "fracball/errors.hpp"

namespace fracball {

inline constexpr int kMaxDim = 8;

/// Point of R^n with n <= kMaxDim, stored inline so that evaluators in hot
/// quadrature loops never allocate.
class Point {
 public:
  Point() = default;

  explicit Point(int dim) : dim_(dim) {
    if (dim < 1 || dim > kMaxDim) {
      throw DomainError("Point: dimension " + std::to_string(dim) + " outside [1, " +
                        std::to_string(kMaxDim) + "]");
    }
  }

  Point(std::initializer_list<double> coords) : Point(static_cast<int>(coords.size())) {
    std::copy(coords.begin(), coords.end(), x_.begin());
  }

  static Point zero(int dim) { return Point(dim); }

  static Point unit(int dim, int axis, double length = 1.0) {
    Point p(dim);
    p[axis] = length;
    return p;
  }

  int dim() const noexcept { return dim_; }
  double operator[](int i) const noexcept { return x_[static_cast<std::size_t>(i)]; }
  double& operator[](int i) noexcept { return x_[static_cast<std::size_t>(i)]; }
  std::span<const double> coords() const noexcept { return {x_.data(), static_cast<std::size_t>(dim_)}; }

  double norm2() const noexcept {
    double acc = 0.0;
    for (int i = 0; i < dim_; ++i) acc += x_[i] * x_[i];
    return acc;
  }
  double norm() const noexcept { return std::sqrt(norm2()); }

  Point& operator+=(const Point& o) noexcept {
    for (int i = 0; i < dim_; ++i) x_[i] += o.x_[i];
    return *this;
  }
  Point& operator-=(const Point& o) noexcept {
    for (int i = 0; i < dim_; ++i) x_[i] -= o.x_[i];
    return *this;
  }
  Point& operator*=(double a) noexcept {
    for (int i = 0; i < dim_; ++i) x_[i] *= a;
    return *this;
  }

  friend Point operator+(Point a, const Point& b) noexcept { return a += b; }
  friend Point operator-(Point a, const Point& b) noexcept { return a -= b; }
  friend Point operator-(Point a) noexcept { return a *= -1.0; }
  friend Point operator*(Point a, double s) noexcept { return a *= s; }
  friend Point operator*(double s, Point a) noexcept { return a *= s; }

  friend bool operator==(const Point& a, const Point& b) noexcept {
    if (a.dim_ != b.dim_) return false;
    for (int i = 0; i < a.dim_; ++i)
      if (a.x_[i] != b.x_[i]) return false;
    return true;
  }

 private:
  std::array<double, kMaxDim> x_{};
  int dim_ = 0;
};

inline double dot(const Point& a, const Point& b) noexcept {
  double acc = 0.0;
  for (int i = 0; i < a.dim(); ++i) acc += a[i] * b[i];
  return acc;
}

inline double distance(const Point& a, const Point& b) noexcept { return (a - b).norm(); }

/// |S^{n-1}| = 2 pi^{n/2} / Gamma(n/2).
inline double sphere_area(int n) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

/// |B_r| in R^n.
inline double ball_volume(int n, double r) { return sphere_area(n) * std::pow(r, n) / n; }

/// Ball B_r centred at the origin of R^n.
class BallDomain {
 public:
  BallDomain(int n, double r) : n_(n), r_(r) {
    if (n < 1 || n > kMaxDim) throw DomainError("BallDomain: dimension must lie in [1, 8]");
    if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("BallDomain: radius must be positive");
  }

  static BallDomain unit(int n) { return BallDomain(n, 1.0); }

  int dim() const noexcept { return n_; }
  double radius() const noexcept { return r_; }
  double volume() const { return ball_volume(n_, r_); }
  bool contains(const Point& x) const noexcept { return x.norm() < r_; }
  bool contains_closed(const Point& x) const noexcept { return x.norm() <= r_; }

 private:
  int n_;
  double r_;
};

/// d(x) = dist(x, boundary) for x in the closed ball.
inline double distance_to_boundary(const Point& x, const BallDomain& dom) {
  const double rho = x.norm();
  if (rho > dom.radius()) {
    throw DomainError("distance_to_boundary: point lies outside the closed ball");
  }
  return dom.radius() - rho;
}

/// Order s of the fractional Laplacian, 0 < s < 1.
class FracOrder {
 public:
  explicit FracOrder(double s) : s_(s) {
    if (!(s > 0.0 && s < 1.0)) throw DomainError("FracOrder: s must lie in (0,1)");
  }

  double value() const noexcept { return s_; }
  double two_s() const noexcept { return 2.0 * s_; }
  /// n - 2s, the homogeneity of the fundamental solution.
  double riesz_exponent(int n) const noexcept { return n - 2.0 * s_; }
  /// n/(2s), the critical integrability exponent for zero-order and drift terms.
  double critical_exponent(int n) const noexcept { return n / (2.0 * s_); }
  /// 1/(1-s), the integrability exponent of the solution class.
  double solution_exponent() const noexcept { return 1.0 / (1.0 - s_); }

  bool in_drift_range() const noexcept { return s_ > 0.5; }
  void require_drift_range() const {
    if (!in_drift_range()) throw DomainError("drift estimates require s in (1/2, 1)");
  }

 private:
  double s_;
};

/// Orthonormal pair completing `axis` (unit, dim >= 2) to a frame in its first
/// two complementary directions. For dim == 2 only `e1` is meaningful.
struct Frame {
  Point axis;
  Point e1;
  Point e2;
};

inline Frame frame_around(const Point& axis_in) {
  const int n = axis_in.dim();
  Frame f{axis_in, Point(n), Point(n)};
  const double len = axis_in.norm();
  if (len == 0.0) {
    f.axis = Point::unit(n, 0);
  } else {
    f.axis *= 1.0 / len;
  }
  if (n == 1) return f;
  // Gram-Schmidt against the coordinate vector least aligned with the axis.
  auto orthonormalise = [&](Point v, const Point* other) {
    v -= dot(v, f.axis) * f.axis;
    if (other) v -= dot(v, *other) * *other;
    return v * (1.0 / v.norm());
  };
  int least = 0;
  for (int i = 1; i < n; ++i)
    if (std::abs(f.axis[i]) < std::abs(f.axis[least])) least = i;
  f.e1 = orthonormalise(Point::unit(n, least), nullptr);
  if (n >= 3) {
    int second = -1;
    double best = 2.0;
    for (int i = 0; i < n; ++i) {
      if (i == least) continue;
      Point trial = Point::unit(n, i);
      trial -= dot(trial, f.axis) * f.axis;
      trial -= dot(trial, f.e1) * f.e1;
      const double residual = 1.0 - trial.norm();
      if (residual < best) {
        best = residual;
        second = i;
      }
    }
    f.e2 = orthonormalise(Point::unit(n, second), &f.e1);
  }
  return f;
}

}  // namespace fracball
