#pragma once

// Norm functionals on the ball: L^p, the weighted tail integral defining the
// class L_{2s}, and W^{1,p} for drift fields.

#include <cmath>
#include <limits>
#include <optional>

#include "fracball/errors.hpp"
#include "fracball/field.hpp"
#include "fracball/geometry.hpp"
#include "fracball/quadrature.hpp"

namespace fracball {

namespace detail {

/// (\int g)^{1/p} with first-order error propagation. The integral is first
/// computed with q as given; if the propagated error misses q's target on the
/// norm, the integral is recomputed with the tolerance implied by the first pass.
template <class IntegralFn>
QuadResult root_of_integral(IntegralFn&& integral, double p, const QuadSpec& q, const char* what) {
  QuadResult inner = integral(q);
  auto finish = [&](const QuadResult& r) {
    QuadResult out = r;
    const double base = std::max(r.value, 0.0);
    out.value = std::pow(base, 1.0 / p);
    out.err_estimate = base > 0.0 ? r.err_estimate * std::pow(base, 1.0 / p - 1.0) / p : std::pow(r.err_estimate, 1.0 / p);
    out.converged = r.converged && out.err_estimate <= q.target(out.value);
    return out;
  };
  QuadResult norm = finish(inner);
  if (!norm.converged && inner.converged && inner.value > 0.0) {
    QuadSpec tighter = q;
    tighter.tol = 0.5 * p * q.target(norm.value) * std::pow(inner.value, 1.0 - 1.0 / p);
    tighter.rel_tol = 0.0;
    QuadResult again = integral(tighter);
    again.evaluations += inner.evaluations;
    norm = finish(again);
  }
  if (!norm.converged) throw ConvergenceError(std::string(what) + ": adaptive refinement did not converge",
                                              norm.value, norm.err_estimate);
  return norm;
}

/// sigma_{n-1} \int_0^r rho^{n-1} g(rho) d rho with q's hints on the radial variable.
inline QuadResult radial_integral(const RealFunction& g, int n, double r, const QuadSpec& q) {
  const double area = sphere_area(n);
  auto h = [&](double rho) { return g(rho) * std::pow(rho, n - 1); };
  QuadSpec inner = q.scaled_tol(1.0);
  inner.tol = q.tol / area;
  return integrate_interval(h, 0.0, r, inner).scaled(area);
}

}  // namespace detail

/// ||f||_{L^p(B_r)}. Throws ConvergenceError (carrying the partial value) when
/// the adaptive quadrature does not converge.
///
/// Radial fields carrying a logarithmic profile are integrated in
/// w = ln(r / rho) over [0, infinity); q.sing_right then hints the w -> infinity
/// tail as for any infinite interval.
inline QuadResult lp_norm(const ScalarField& f, const BallDomain& dom, double p, const QuadSpec& q) {
  if (!(p >= 1.0)) throw DomainError("lp_norm: p must be >= 1");
  const int n = dom.dim();
  const bool centred = !(q.center && q.center->norm() > 0.0);
  if (f.is_radial() && f.has_log_profile() && centred) {
    const double log_r = std::log(dom.radius());
    const double area = sphere_area(n);
    auto integral = [&](const QuadSpec& spec) {
      const double slope = p * f.log_power() - n;
      auto g = [&](double w) {
        if (!std::isfinite(w)) return 0.0;
        const double lambda = w - log_r;
        return std::exp(p * f.log_abs_remainder(lambda) + slope * lambda);
      };
      QuadSpec inner = spec;
      inner.sing_left.reset();
      inner.log_substitution = false;
      inner.tol = spec.tol / area;
      return integrate_interval(g, 0.0, std::numeric_limits<double>::infinity(), inner).scaled(area);
    };
    return detail::root_of_integral(integral, p, q, "lp_norm");
  }
  auto integral = [&](const QuadSpec& spec) {
    if (f.is_radial() && !(spec.center && spec.center->norm() > 0.0)) {
      return detail::radial_integral([&](double rho) { return std::pow(std::abs(f.at_radius(rho, n)), p); }, n,
                                     dom.radius(), spec);
    }
    return integrate_ball([&](const Point& x) { return std::pow(std::abs(f(x)), p); }, dom, spec,
                          f.is_radial() ? Symmetry::axial : Symmetry::none);
  };
  return detail::root_of_integral(integral, p, q, "lp_norm");
}

/// ||f||_{L^infinity} surrogate: maximum of |f| over the given sample points.
template <class Range>
double sampled_sup_norm(const ScalarField& f, const Range& points) {
  double m = 0.0;
  for (const Point& x : points) m = std::max(m, std::abs(f(x)));
  return m;
}

/// \int_{R^n} |f(x)| / (1 + |x|^{n+2s}) dx, the quantity defining L_{2s}.
inline QuadResult tail_weighted_norm(const ScalarField& f, int n, const FracOrder& s, const QuadSpec& q) {
  const auto& decay = f.traits().decay;
  if (!decay.in_tail_class(s.two_s()))
    throw DomainError("tail_weighted_norm: decay class is incompatible with convergence (growth >= 2s)");
  if (f.traits().support != Support::whole_space)
    throw DomainError("tail_weighted_norm: field must be defined on the whole space");
  const double power = n + s.two_s();
  auto weight = [power](double rho) { return 1.0 / (1.0 + std::pow(rho, power)); };
  const double far_tail_exponent = power - n + 1.0 - decay.growth;  // integrand ~ t^{far_tail_exponent - 2}
  if (f.is_radial()) {
    auto g = [&](double rho) { return std::abs(f.at_radius(rho, n)) * weight(rho); };
    if (decay.support_radius) return detail::radial_integral(g, n, *decay.support_radius, q.plain());
    // [0,1] plus [1,inf) mapped to t = 1/rho.
    QuadResult inner = detail::radial_integral(g, n, 1.0, q.plain().scaled_tol(0.5));
    QuadSpec tail = q.plain().scaled_tol(0.5);
    tail.tol /= sphere_area(n);
    tail.sing_left = std::min(0.99, 2.0 - far_tail_exponent);
    auto h = [&](double t) {
      const double rho = 1.0 / t;
      return g(rho) * std::pow(rho, n - 1) / (t * t);
    };
    QuadResult outer = integrate_interval(h, 0.0, 1.0, tail).scaled(sphere_area(n));
    return inner + outer;
  }
  const double r = decay.support_radius.value_or(1.0);
  const BallDomain ball(n, r);
  auto g = [&](const Point& x) { return std::abs(f(x)) * weight(x.norm()); };
  QuadResult inner = integrate_ball(g, ball, q.plain().scaled_tol(0.5), Symmetry::none);
  if (decay.support_radius) return inner;
  QuadSpec tail = q.plain().scaled_tol(0.5);
  tail.sing_left = std::min(0.99, 2.0 - far_tail_exponent);
  return inner + integrate_exterior(g, ball, tail, Symmetry::none);
}

namespace detail {

inline Matrix fd_jacobian(const VectorField& b, const Point& x, double h) {
  const int n = x.dim();
  Matrix J(n);
  for (int j = 0; j < n; ++j) {
    Point xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    const Point bp = b(xp), bm = b(xm);
    for (int i = 0; i < n; ++i) J(i, j) = (bp[i] - bm[i]) / (2.0 * h);
  }
  return J;
}

}  // namespace detail

/// || |b| ||_{L^p(B_r)}. `magnitude_symmetry` may declare |b| radial to reduce
/// the integral to one dimension.
inline QuadResult vector_lp_norm(const VectorField& b, const BallDomain& dom, double p, const QuadSpec& q,
                                 Symmetry magnitude_symmetry = Symmetry::none) {
  if (!(p >= 1.0)) throw DomainError("vector_lp_norm: p must be >= 1");
  const int n = dom.dim();
  auto integral = [&](const QuadSpec& spec) {
    if (magnitude_symmetry == Symmetry::radial) {
      return detail::radial_integral(
          [&](double rho) { return std::pow(b(Point::unit(n, 0, rho)).norm(), p); }, n, dom.radius(), spec);
    }
    return integrate_ball([&](const Point& x) { return std::pow(b(x).norm(), p); }, dom, spec, magnitude_symmetry);
  };
  return detail::root_of_integral(integral, p, q, "vector_lp_norm");
}

/// (||b||_p^p + ||grad b||_p^p)^{1/p}, with the Frobenius norm of the Jacobian.
/// Uses the closed-form Jacobian when present, otherwise centred differences
/// with step tol^{1/3} r when `allow_finite_differences` is set.
inline QuadResult sobolev_w1p_norm(const VectorField& b, const BallDomain& dom, double p, const QuadSpec& q,
                                   bool allow_finite_differences = true,
                                   Symmetry magnitude_symmetry = Symmetry::none) {
  if (!(p >= 1.0)) throw DomainError("sobolev_w1p_norm: p must be >= 1");
  if (!b.has_jacobian() && !allow_finite_differences)
    throw DomainError("sobolev_w1p_norm: no closed-form Jacobian and finite differences disabled");
  const int n = dom.dim();
  const double h = std::cbrt(std::max(q.tol, 1e-15)) * dom.radius();
  auto jac = [&](const Point& x) { return b.has_jacobian() ? b.jacobian(x) : detail::fd_jacobian(b, x, h); };
  auto density = [&](const Point& x) { return std::pow(b(x).norm(), p) + std::pow(jac(x).frobenius(), p); };
  auto integral = [&](const QuadSpec& spec) {
    if (magnitude_symmetry == Symmetry::radial) {
      return detail::radial_integral([&](double rho) { return density(Point::unit(n, 0, rho)); }, n, dom.radius(),
                                     spec);
    }
    return integrate_ball(density, dom, spec, magnitude_symmetry);
  };
  return detail::root_of_integral(integral, p, q, "sobolev_w1p_norm");
}

/// || |b| / d ||_{L^p(B_r)} with d(x) = r - |x|.
inline QuadResult drift_over_distance_norm(const VectorField& b, const BallDomain& dom, double p, const QuadSpec& q,
                                           Symmetry magnitude_symmetry = Symmetry::none) {
  const double r = dom.radius();
  VectorField scaled([b, r](const Point& x) { return b(x) * (1.0 / (r - x.norm())); });
  return vector_lp_norm(scaled, dom, p, q, magnitude_symmetry);
}

}  // namespace fracball
