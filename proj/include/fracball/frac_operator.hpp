#pragma once

// Pointwise evaluation of (-Delta)^s u(x) = C_{n,s} P.V. \int (u(x) - u(y)) |x - y|^{-n-2s} dy
// by directions: for each w in S^{n-1} the radial integral is split into
//
//   core   (0, eta)    second difference model, integrated analytically
//   near   [eta, d]    symmetrised (2u(x) - u(x + rho w) - u(x - rho w)) / 2
//   far    [d, R]      one-sided, split where the ray crosses declared kinks
//   tail   (R, inf)    analytic for compactly supported u, numeric otherwise
//
// plus the classical Laplacian, mollification and min-truncation.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <mutex>
#include <optional>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "fracball/chebyshev.hpp"
#include "fracball/errors.hpp"
#include "fracball/field.hpp"
#include "fracball/geometry.hpp"
#include "fracball/kernels.hpp"
#include "fracball/quadrature.hpp"

namespace fracball {

/// Regularisation of the principal value. Unset members take defaults
/// relative to the evaluation point: delta = 0.1 d(x), fd_step = delta / 4,
/// far_cutoff = 10 ball_radius, where d(x) is the distance from |x| to the
/// nearest declared kink or to the sphere of radius ball_radius.
struct PVSpec {
  std::optional<double> delta;
  std::optional<double> far_cutoff;
  std::optional<double> fd_step;
  double ball_radius = 1.0;

  void validate() const {
    if (delta && !(*delta > 0.0)) throw DomainError("PVSpec: delta must be positive");
    if (fd_step && !(*fd_step > 0.0)) throw DomainError("PVSpec: fd_step must be positive");
    if (delta && far_cutoff && !(*delta < *far_cutoff)) throw DomainError("PVSpec: need delta < far_cutoff");
    if (!(ball_radius > 0.0)) throw DomainError("PVSpec: ball_radius must be positive");
  }
};

namespace detail {

struct ResolvedPV {
  double delta;
  double far_cutoff;
  double fd_step;
};

inline ResolvedPV resolve_pv(const ScalarField& u, const Point& x, const PVSpec& pv) {
  pv.validate();
  const double rx = x.norm();
  double kink_gap = std::numeric_limits<double>::infinity();
  for (const Kink& k : u.traits().kinks) kink_gap = std::min(kink_gap, std::abs(rx - k.radius));
  if (kink_gap <= 1e-12 * std::max(1.0, rx)) throw DomainError("pv_fractional_laplacian: x lies on a kink of u (insufficient smoothness)");
  double d = std::min(kink_gap, std::abs(pv.ball_radius - rx));
  if (!(d > 0.0)) d = std::isfinite(kink_gap) ? kink_gap : pv.ball_radius;
  ResolvedPV r{};
  r.delta = pv.delta.value_or(0.1 * d);
  if (r.delta >= kink_gap)
    throw DomainError("pv_fractional_laplacian: near-field radius reaches a kink of u (insufficient smoothness)");
  r.fd_step = pv.fd_step.value_or(0.25 * r.delta);
  if (2.0 * r.fd_step > r.delta) throw DomainError("PVSpec: fd_step must not exceed delta / 2");
  r.far_cutoff = pv.far_cutoff.value_or(10.0 * pv.ball_radius);
  if (!(r.far_cutoff > r.delta)) throw DomainError("PVSpec: need delta < far_cutoff");
  return r;
}

/// Positive distances rho in (lo, hi) at which x + rho w crosses |y| = radius.
inline void ray_crossings(const Point& x, const Point& w, double radius, double lo, double hi,
                          std::vector<double>& out) {
  const double b = dot(x, w);
  const double disc = b * b - (x.norm2() - radius * radius);
  if (disc < 0.0) return;
  const double root = std::sqrt(disc);
  for (double rho : {-b - root, -b + root})
    if (rho > lo && rho < hi) out.push_back(rho);
}

}  // namespace detail

/// (-Delta)^s u(x) with an error estimate. u must be defined on all of R^n,
/// lie in the tail class (decay metadata) and be smooth within delta of x.
inline QuadResult pv_fractional_laplacian(const ScalarField& u, const Point& x, const FracOrder& order,
                                          const PVSpec& pv = {}, const QuadSpec& q = {},
                                          std::optional<double> op_constant = std::nullopt) {
  q.validate();
  const int n = x.dim();
  const auto& traits = u.traits();
  if (traits.support != Support::whole_space)
    throw DomainError("pv_fractional_laplacian: u must be defined on the whole space");
  const auto& decay = traits.decay;
  const double two_s = order.two_s();
  if (!decay.in_tail_class(two_s))
    throw DomainError("pv_fractional_laplacian: u grows too fast at infinity (tail integral diverges)");

  const detail::ResolvedPV reg = detail::resolve_pv(u, x, pv);
  const double delta = reg.delta, R = reg.far_cutoff, eta = reg.fd_step;
  const double C = op_constant.value_or(operator_constant(n, order));
  const double u0 = u(x);
  const double rx = x.norm();
  const bool analytic_tail = decay.support_radius && rx + *decay.support_radius <= R;

  // Breakpoints for the far field: kinks and the edge of the support.
  struct Break {
    double radius;
    double exponent;  // endpoint hint (negative: Hoelder-type)
  };
  std::vector<Break> spheres;
  for (const Kink& k : traits.kinks) spheres.push_back({k.radius, -k.holder_exponent});
  if (decay.support_radius && *decay.support_radius > 0.0) spheres.push_back({*decay.support_radius, -1.0});

  const double area = sphere_area(n);
  const double target = q.tol / C;
  const double ray_tol = 0.1 * target / area;
  const double ray_rel = std::max(0.1 * q.rel_tol, detail::kRayRelFloor);
  const double eps = std::numeric_limits<double>::epsilon();

  std::size_t evals = 0;
  bool ok = true;
  double worst = 0.0;
  std::mutex guard;

  auto ray = [&](const Point& w) {
    QuadResult total;
    // Core: D(rho) = (2u0 - u(x + rho w) - u(x - rho w)) / (2 rho^2) ~ D0 + D2 rho^2.
    auto second_difference = [&](double h) { return (2.0 * u0 - u(x + h * w) - u(x - h * w)) / (2.0 * h * h); };
    const double d1 = second_difference(eta);
    const double d2 = second_difference(2.0 * eta);
    const double quartic = (d2 - d1) / (3.0 * eta * eta);
    const double quadratic = d1 - quartic * eta * eta;
    const double p2 = std::pow(eta, 2.0 - two_s) / (2.0 - two_s);
    const double p4 = std::pow(eta, 4.0 - two_s) / (4.0 - two_s);
    total.value = quadratic * p2 + quartic * p4;
    total.err_estimate = std::abs(quartic) * p4 + 8.0 * eps * (std::abs(u0) + 1.0) / (eta * eta) * p2;
    total.evaluations = 4;

    // Near field.
    auto near = [&](double rho) {
      return 0.5 * (2.0 * u0 - u(x + rho * w) - u(x - rho * w)) * std::pow(rho, -1.0 - two_s);
    };
    total += integrate_interval(near, eta, delta, q.plain().with_tol(ray_tol / 3.0, ray_rel));

    // Far field, split at kink crossings.
    std::vector<double> cuts;
    std::vector<double> hints;
    for (const Break& br : spheres) {
      const std::size_t before = cuts.size();
      detail::ray_crossings(x, w, br.radius, delta, R, cuts);
      for (std::size_t i = before; i < cuts.size(); ++i) hints.push_back(br.exponent);
    }
    std::vector<std::size_t> order_idx(cuts.size());
    for (std::size_t i = 0; i < order_idx.size(); ++i) order_idx[i] = i;
    std::sort(order_idx.begin(), order_idx.end(), [&](std::size_t a, std::size_t b) { return cuts[a] < cuts[b]; });
    auto far = [&](double rho) { return (u0 - u(x + rho * w)) * std::pow(rho, -1.0 - two_s); };
    const double piece_tol = ray_tol / 3.0 / static_cast<double>(cuts.size() + 1);
    double lo = delta;
    std::optional<double> lo_hint;
    for (std::size_t k = 0; k <= order_idx.size(); ++k) {
      const double hi = k < order_idx.size() ? cuts[order_idx[k]] : R;
      const std::optional<double> hi_hint =
          k < order_idx.size() ? std::optional<double>(hints[order_idx[k]]) : std::nullopt;
      if (hi > lo) {
        QuadSpec piece = q.plain().with_tol(piece_tol, ray_rel).with_endpoints(lo_hint, hi_hint);
        total += integrate_interval(far, lo, hi, piece);
      }
      lo = std::max(lo, hi);
      lo_hint = hi_hint;
    }

    // Tail beyond R.
    if (analytic_tail) {
      total.value += u0 * std::pow(R, -two_s) / two_s;
    } else {
      // rho = R / t: R^{-2s} \int_0^1 (u0 - u(x + (R/t) w)) t^{2s-1} dt.
      auto tail = [&](double t) {
        if (!(t > 0.0)) return 0.0;
        return (u0 - u(x + (R / t) * w)) * std::pow(t, two_s - 1.0);
      };
      const double beta = 1.0 - two_s + std::max(decay.growth, 0.0);
      const double scale = std::pow(R, -two_s);
      QuadSpec spec = q.plain().with_tol(ray_tol / 3.0 / scale, ray_rel);
      spec.sing_left = std::min(beta, 0.99);
      total += integrate_interval(tail, 0.0, 1.0, spec).scaled(scale);
    }
    {
      std::lock_guard<std::mutex> lock(guard);
      evals += total.evaluations;
      ok = ok && total.converged;
      worst = std::max(worst, total.err_estimate);
    }
    return total.value;
  };

  QuadSpec outer = q;
  outer.tol = target;
  Symmetry sym = Symmetry::none;
  if (u.is_radial()) {
    sym = rx > 0.0 ? Symmetry::axial : Symmetry::radial;
    if (rx > 0.0) outer.axis = x;
  }
  QuadResult res = integrate_sphere(ray, n, outer, sym);
  res.err_estimate += area * worst;
  res.evaluations = evals;
  res.converged = res.converged && ok;
  return res.scaled(C);
}

/// Sum of centred second differences with step h.
inline double finite_difference_laplacian(const ScalarField& u, const Point& x, double h) {
  if (!(h > 0.0)) throw DomainError("finite_difference_laplacian: step must be positive");
  const double u0 = u(x);
  double acc = 0.0;
  for (int i = 0; i < x.dim(); ++i) {
    Point xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    acc += (u(xp) - 2.0 * u0 + u(xm)) / (h * h);
  }
  return acc;
}

/// Fourth-order five-point stencil per axis with step h.
inline double finite_difference_laplacian4(const ScalarField& u, const Point& x, double h) {
  if (!(h > 0.0)) throw DomainError("finite_difference_laplacian4: step must be positive");
  const double u0 = u(x);
  double acc = 0.0;
  for (int i = 0; i < x.dim(); ++i) {
    auto at = [&](double k) {
      Point y = x;
      y[i] += k * h;
      return u(y);
    };
    acc += (-at(2.0) + 16.0 * at(1.0) - 30.0 * u0 + 16.0 * at(-1.0) - at(-2.0)) / (12.0 * h * h);
  }
  return acc;
}

/// Delta u(x): closed form when attached, otherwise centred differences with fd_step.
inline double classical_laplacian(const ScalarField& u, const Point& x, std::optional<double> fd_step = std::nullopt) {
  if (u.has_laplacian()) return u.laplacian(x);
  if (!fd_step) throw DomainError("classical_laplacian: no closed-form Laplacian and no finite-difference step");
  return finite_difference_laplacian(u, x, *fd_step);
}

namespace detail {

/// exp(-1 / (1 - t^2)) for t < 1, zero otherwise.
inline double bump_profile(double t) {
  if (!(t < 1.0)) return 0.0;
  return std::exp(-1.0 / ((1.0 - t) * (1.0 + t)));
}

/// d/dt of bump_profile.
inline double bump_profile_derivative(double t) {
  if (!(t < 1.0)) return 0.0;
  const double one_minus = (1.0 - t) * (1.0 + t);
  return bump_profile(t) * (-2.0 * t / (one_minus * one_minus));
}

/// \int_{B_1} bump_profile(|z|) dz in R^n.
inline double bump_mass(int n) {
  static std::array<double, kMaxDim + 1> cache{};
  static std::mutex m;
  std::lock_guard<std::mutex> lock(m);
  double& slot = cache[static_cast<std::size_t>(n)];
  if (slot == 0.0) {
    auto g = [n](double t) { return bump_profile(t) * std::pow(t, n - 1); };
    slot = sphere_area(n) * integrate_interval(g, 0.0, 1.0, QuadSpec{}.with_tol(1e-16)).value;
  }
  return slot;
}

}  // namespace detail

/// The standard mollifier eta in C_0^infinity(B_1), eta >= 0, \int eta = 1.
inline double standard_mollifier(const Point& z) {
  return detail::bump_profile(z.norm()) / detail::bump_mass(z.dim());
}

/// u_eps = eta_eps * u, evaluated on demand by quadrature over the unit ball:
/// u_eps(x) = \int_{B_1} eta(z) u(x - eps z) dz. If u lives on a ball of radius
/// r, u_eps lives on the ball of radius r - eps.
inline ScalarField mollify(const ScalarField& u, double eps, const QuadSpec& q = {}) {
  if (!(eps > 0.0)) throw DomainError("mollify: eps must be positive");
  q.validate();
  FieldTraits traits = u.traits();
  if (traits.support == Support::ball) {
    if (!(traits.domain_radius > eps)) throw DomainError("mollify: eps exceeds the domain radius");
    traits.domain_radius -= eps;
  } else if (traits.support == Support::ball_complement) {
    traits.domain_radius += eps;
  }
  if (traits.decay.support_radius) traits.decay.support_radius = *traits.decay.support_radius + eps;
  std::vector<Kink> breakpoints;
  for (const Kink& k : traits.kinks) {
    if (k.radius > eps) breakpoints.push_back({k.radius - eps, 1.0});
    breakpoints.push_back({k.radius + eps, 1.0});
  }
  traits.kinks = std::move(breakpoints);
  const bool radial = u.is_radial();
  QuadSpec spec = q.plain();
  auto eval = [u, eps, spec, radial](const Point& x) {
    const int n = x.dim();
    const double mass = detail::bump_mass(n);
    QuadSpec local = spec;
    Symmetry sym = Symmetry::none;
    if (radial) {
      sym = x.norm() > 0.0 ? Symmetry::axial : Symmetry::radial;
      if (x.norm() > 0.0) local.axis = x;
    }
    auto integrand = [&](const Point& z) { return detail::bump_profile(z.norm()) * u(x - eps * z); };
    local.tol = spec.tol * mass;
    QuadResult r = integrate_ball(integrand, BallDomain(n, 1.0), local, sym);
    if (!r.converged) throw ConvergenceError("mollify: convolution quadrature", r.value / mass, r.err_estimate / mass);
    return r.value / mass;
  };
  return ScalarField(eval, traits);
}

/// v = min(u, 0). Keeps the radial flag; the gradient is u's where u < 0.
inline ScalarField truncate_min(const ScalarField& u) {
  FieldTraits traits = u.traits();
  ScalarField v([u](const Point& x) { return std::min(u(x), 0.0); }, traits);
  if (u.has_gradient()) {
    v = v.with_gradient([u](const Point& x) { return u(x) < 0.0 ? u.gradient(x) : Point(x.dim()); });
  }
  return v;
}

/// Smooth nonnegative test function amplitude * bump(|x - center| / radius).
struct TestFunction {
  Point center;
  double radius = 0.5;
  double amplitude = 1.0;

  double operator()(const Point& x) const { return amplitude * detail::bump_profile(distance(x, center) / radius); }
  Point gradient(const Point& x) const {
    const Point d = x - center;
    const double r = d.norm();
    if (r == 0.0) return Point(x.dim());
    return d * (amplitude * detail::bump_profile_derivative(r / radius) / (radius * r));
  }
  /// The same function as a radial field centred at the origin.
  ScalarField as_radial_field() const {
    FieldTraits t;
    t.radial = true;
    t.decay = DecayClass::compact(radius);
    const double a = amplitude, rad = radius;
    return ScalarField::radial([a, rad](double rho) { return a * detail::bump_profile(rho / rad); }, t);
  }
};

struct WeakFormTerm {
  double truncated_side = 0.0;  // \int v ((-Delta)^s phi - div(b phi) + c phi)
  double negative_set_side = 0.0;  // \int_{u<0} ((-Delta)^s u + b . grad u + c u) phi
  double difference = 0.0;
  double error_budget = 0.0;
  bool holds = false;
};

struct WeakFormReport {
  double negative_set_radius = 0.0;
  std::vector<WeakFormTerm> terms;
  bool all_hold = false;
};

namespace detail {

/// \int over the shell a < |x| < b of f, polar about the origin.
inline QuadResult integrate_shell(const PointFunction& f, int n, double a, double b, const QuadSpec& q) {
  const double area = sphere_area(n);
  QuadSpec inner = ray_spec(q, area);
  std::size_t evals = 0;
  bool ok = true;
  double worst = 0.0;
  auto ray = [&](const Point& w) {
    auto g = [&](double rho) { return f(rho * w) * std::pow(rho, n - 1); };
    QuadResult r = integrate_interval(g, a, b, inner);
    evals += r.evaluations;
    ok = ok && r.converged;
    worst = std::max(worst, r.err_estimate);
    return r.value;
  };
  QuadResult res = integrate_sphere(ray, n, q, Symmetry::none);
  res.err_estimate += area * worst;
  res.evaluations = evals;
  res.converged = res.converged && ok;
  return res;
}

}  // namespace detail

/// Weak-form spot check of the truncation inequality: for a radial u whose
/// negative set is a centred ball B_rho0 inside B_1, compares
///   \int v ((-Delta)^s phi - div(b phi) + c phi)  and  \int_{u<0} ((-Delta)^s u + b . grad u + c u) phi
/// for each test function; the first should dominate the second. Radial
/// fractional Laplacians are tabulated on Chebyshev grids whose measured
/// interpolation error enters the error budget.
inline WeakFormReport truncation_weak_form_check(const ScalarField& u, const VectorField& b, const ScalarField& c,
                                                 const std::vector<TestFunction>& tests, const FracOrder& order,
                                                 const QuadSpec& q = QuadSpec{}.with_tol(1e-8)) {
  order.require_drift_range();
  if (!u.is_radial()) throw DomainError("truncation_weak_form_check: u must be radial");
  if (!u.has_gradient()) throw DomainError("truncation_weak_form_check: u needs a closed-form gradient");
  if (!b.has_divergence()) throw DomainError("truncation_weak_form_check: b needs a closed-form divergence");
  const int n = tests.empty() ? 3 : tests.front().center.dim();

  // Negative set {u < 0} = B_rho0: one sign change on (0, 1), u >= 0 outside.
  auto profile = [&](double rho) { return u.at_radius(rho, n); };
  if (!(profile(0.0) < 0.0)) throw DomainError("truncation_weak_form_check: u must be negative at the origin");
  const int scan = 400;
  double lo = 0.0, hi = -1.0;
  for (int i = 1; i <= scan; ++i) {
    const double rho = static_cast<double>(i) / scan;
    if (profile(rho) >= 0.0) {
      hi = rho;
      lo = static_cast<double>(i - 1) / scan;
      break;
    }
  }
  if (hi < 0.0) throw DomainError("truncation_weak_form_check: negative set must lie inside B_1");
  for (int i = 1; i <= 4 * scan; ++i) {
    const double rho = hi + 10.0 * i / (4.0 * scan);
    if (profile(rho) < 0.0) throw DomainError("truncation_weak_form_check: negative set must be a centred ball");
  }
  boost::math::tools::eps_tolerance<double> tol_root(52);
  std::uintmax_t iters = 200;
  auto bracket = boost::math::tools::toms748_solve(profile, lo, hi, tol_root, iters);
  const double rho0 = 0.5 * (bracket.first + bracket.second);

  WeakFormReport report;
  report.negative_set_radius = rho0;
  const PVSpec pv;
  const QuadSpec pv_q = QuadSpec{}.with_tol(1e-9);

  // (-Delta)^s u on [0, rho0].
  auto frac_u = [&](double rho) { return pv_fractional_laplacian(u, Point::unit(n, 0, rho), order, pv, pv_q).value; };
  const PiecewiseChebyshev frac_u_tab(frac_u, {0.0, rho0}, 1e-7);

  report.all_hold = true;
  for (const TestFunction& phi : tests) {
    const ScalarField phi_radial = phi.as_radial_field();
    const double dmax = rho0 + phi.center.norm();
    auto frac_phi = [&](double d) {
      return pv_fractional_laplacian(phi_radial, Point::unit(n, 0, d), order, pv, pv_q).value;
    };
    std::vector<double> breaks{0.0};
    if (phi.radius < dmax) breaks.push_back(phi.radius);
    breaks.push_back(dmax);
    const PiecewiseChebyshev frac_phi_tab(frac_phi, breaks, 1e-7);

    auto lhs_density = [&](const Point& x) {
      const double ux = u(x);
      const double div_b_phi = b.divergence(x) * phi(x) + dot(b(x), phi.gradient(x));
      return ux * (frac_phi_tab(distance(x, phi.center)) - div_b_phi + c(x) * phi(x));
    };
    auto rhs_density = [&](const Point& x) {
      const double ux = u(x);
      return (frac_u_tab(x.norm()) + dot(b(x), u.gradient(x)) + c(x) * ux) * phi(x);
    };
    QuadResult lhs = detail::integrate_shell(lhs_density, n, 0.0, rho0, q);
    QuadResult rhs = detail::integrate_shell(rhs_density, n, 0.0, rho0, q);
    // Tabulation errors weighted by \int_U |u| and \int_U phi.
    QuadResult mass_u = detail::integrate_shell([&](const Point& x) { return std::abs(u(x)); }, n, 0.0, rho0,
                                                q.with_tol(1e-6));
    QuadResult mass_phi = detail::integrate_shell([&](const Point& x) { return phi(x); }, n, 0.0, rho0,
                                                  q.with_tol(1e-6));
    WeakFormTerm t;
    t.truncated_side = lhs.value;
    t.negative_set_side = rhs.value;
    t.difference = lhs.value - rhs.value;
    t.error_budget = lhs.err_estimate + rhs.err_estimate + frac_phi_tab.error_estimate() * mass_u.value +
                     frac_u_tab.error_estimate() * mass_phi.value + q.tol;
    t.holds = lhs.converged && rhs.converged && t.difference >= -t.error_budget;
    report.all_hold = report.all_hold && t.holds;
    report.terms.push_back(t);
  }
  return report;
}

}  // namespace fracball
