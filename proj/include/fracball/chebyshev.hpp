#pragma once

// Chebyshev-Lobatto interpolation with nested doubling, used to tabulate
// expensive smooth one-dimensional profiles (radial solutions, radial
// fractional Laplacians) once and evaluate them cheaply afterwards.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include "fracball/errors.hpp"

namespace fracball {

class ChebyshevInterpolant {
 public:
  ChebyshevInterpolant() = default;

  /// Samples f at the N + 1 Lobatto points of [a, b].
  ChebyshevInterpolant(const std::function<double(double)>& f, double a, double b, int degree) : a_(a), b_(b) {
    if (!(b > a) || degree < 1) throw DomainError("ChebyshevInterpolant: need a < b and degree >= 1");
    values_.resize(static_cast<std::size_t>(degree) + 1);
    for (int j = 0; j <= degree; ++j) values_[static_cast<std::size_t>(j)] = f(node(j, degree));
    cache_nodes();
  }

  /// Doubles the degree from `start` until the previous interpolant reproduces
  /// the new samples to `tol`, or `max_degree` is reached. Samples are reused
  /// across levels; the final discrepancy is kept as the error estimate.
  static ChebyshevInterpolant adaptive(const std::function<double(double)>& f, double a, double b, double tol,
                                       int start = 16, int max_degree = 512) {
    ChebyshevInterpolant p(f, a, b, start);
    p.error_ = std::numeric_limits<double>::infinity();
    while (p.degree() < max_degree) {
      const int N = p.degree();
      std::vector<double> refined(static_cast<std::size_t>(2 * N) + 1);
      double gap = 0.0;
      for (int j = 0; j <= 2 * N; ++j) {
        if (j % 2 == 0) {
          refined[static_cast<std::size_t>(j)] = p.values_[static_cast<std::size_t>(j / 2)];
        } else {
          const double x = p.node(j, 2 * N);
          const double fx = f(x);
          refined[static_cast<std::size_t>(j)] = fx;
          gap = std::max(gap, std::abs(fx - p(x)));
        }
      }
      p.values_ = std::move(refined);
      p.cache_nodes();
      p.error_ = gap;
      if (gap <= tol) break;
    }
    return p;
  }

  int degree() const noexcept { return static_cast<int>(values_.size()) - 1; }
  double lower() const noexcept { return a_; }
  double upper() const noexcept { return b_; }
  /// Largest discrepancy observed at the last refinement (infinity if never refined).
  double error_estimate() const noexcept { return error_; }
  bool converged(double tol) const noexcept { return error_ <= tol; }

  /// Barycentric evaluation; x must lie in [a, b].
  double operator()(double x) const {
    if (values_.empty()) throw DomainError("ChebyshevInterpolant: empty");
    if (x < a_ || x > b_) throw DomainError("ChebyshevInterpolant: argument outside the tabulated interval");
    const int N = degree();
    double num = 0.0, den = 0.0;
    for (int j = 0; j <= N; ++j) {
      const double xj = nodes_[static_cast<std::size_t>(j)];
      const double diff = x - xj;
      if (diff == 0.0) return values_[static_cast<std::size_t>(j)];
      double w = (j % 2 == 0) ? 1.0 : -1.0;
      if (j == 0 || j == N) w *= 0.5;
      w /= diff;
      num += w * values_[static_cast<std::size_t>(j)];
      den += w;
    }
    return num / den;
  }

 private:
  double node(int j, int N) const {
    const double c = std::cos(std::numbers::pi * j / N);
    return 0.5 * (a_ + b_) + 0.5 * (b_ - a_) * c;
  }

  void cache_nodes() {
    const int N = degree();
    nodes_.resize(values_.size());
    for (int j = 0; j <= N; ++j) nodes_[static_cast<std::size_t>(j)] = node(j, N);
  }

  double a_ = 0.0, b_ = 1.0;
  std::vector<double> values_;
  std::vector<double> nodes_;
  double error_ = 0.0;
};

/// Adaptive Chebyshev interpolants on consecutive pieces [x_0, x_1], ..., [x_{m-1}, x_m].
class PiecewiseChebyshev {
 public:
  PiecewiseChebyshev() = default;

  PiecewiseChebyshev(const std::function<double(double)>& f, std::vector<double> breaks, double tol,
                     int start = 16, int max_degree = 512)
      : breaks_(std::move(breaks)) {
    if (breaks_.size() < 2 || !std::is_sorted(breaks_.begin(), breaks_.end()))
      throw DomainError("PiecewiseChebyshev: need at least two increasing breakpoints");
    for (std::size_t i = 0; i + 1 < breaks_.size(); ++i) {
      pieces_.push_back(ChebyshevInterpolant::adaptive(f, breaks_[i], breaks_[i + 1], tol, start, max_degree));
      error_ = std::max(error_, pieces_.back().error_estimate());
    }
  }

  double operator()(double x) const {
    if (pieces_.empty()) throw DomainError("PiecewiseChebyshev: empty");
    auto it = std::upper_bound(breaks_.begin() + 1, breaks_.end() - 1, x);
    const auto k = static_cast<std::size_t>(it - (breaks_.begin() + 1));
    return pieces_[k](x);
  }

  double lower() const { return breaks_.front(); }
  double upper() const { return breaks_.back(); }
  double error_estimate() const noexcept { return error_; }
  const std::vector<ChebyshevInterpolant>& pieces() const noexcept { return pieces_; }

 private:
  std::vector<double> breaks_;
  std::vector<ChebyshevInterpolant> pieces_;
  double error_ = 0.0;
};

}  // namespace fracball
