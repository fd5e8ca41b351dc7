#pragma once

// Adaptive integration for the singular and improper integrals used by the
// kernels, norms and solvers: 1-D Gauss-Kronrod with graded / logarithmic /
// infinite-interval substitutions, sphere rules, and ball / ball-complement
// integrals built from rays.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <queue>
#include <random>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fracball/errors.hpp"
#include "fracball/field.hpp"
#include "fracball/geometry.hpp"

namespace fracball {

struct QuadSpec {
  /// Absolute target.
  double tol = 1e-10;
  /// Relative target; the effective target is max(tol, rel_tol * |value|).
  double rel_tol = 0.0;
  int max_subdiv = 2000;
  /// Algebraic endpoint singularities: integrand ~ (t-a)^{-beta0}, (b-t)^{-beta1}.
  /// Negative exponents describe Hoelder-type endpoints such as (b-t)^{s}.
  std::optional<double> sing_left;
  std::optional<double> sing_right;
  /// Logarithmic singularity at the left endpoint: substitute t = a + (b-a) e^{-w}.
  /// In this mode `sing_left` (default 1/2) is the algebraic exponent of the
  /// transformed tail on the compactified variable.
  bool log_substitution = false;
  std::uint64_t mc_seed = 0x5eed5eedULL;
  std::size_t mc_samples = 200000;
  /// Polar centre for ball integrals (singular point of the integrand).
  std::optional<Point> center;
  /// Polar axis for sphere parametrisations.
  std::optional<Point> axis;

  void validate() const {
    if (!(tol > 0.0) && !(rel_tol > 0.0)) throw DomainError("QuadSpec: tolerance must be positive");
    if (tol < 0.0 || rel_tol < 0.0) throw DomainError("QuadSpec: tolerances must be non-negative");
    if (max_subdiv < 1) throw DomainError("QuadSpec: max_subdiv must be >= 1");
    if ((sing_left && *sing_left >= 1.0) || (sing_right && *sing_right >= 1.0))
      throw DomainError("QuadSpec: endpoint exponents must be < 1 (integrable)");
  }

  double target(double value) const { return std::max(tol, rel_tol * std::abs(value)); }

  QuadSpec with_tol(double abs_tol, double relative = 0.0) const {
    QuadSpec q = *this;
    q.tol = abs_tol;
    q.rel_tol = relative;
    return q;
  }
  QuadSpec with_endpoints(std::optional<double> left, std::optional<double> right) const {
    QuadSpec q = *this;
    q.sing_left = left;
    q.sing_right = right;
    q.log_substitution = false;
    return q;
  }
  /// Same tolerances and limits, no singularity hints or geometry.
  QuadSpec plain() const {
    QuadSpec q = *this;
    q.sing_left.reset();
    q.sing_right.reset();
    q.log_substitution = false;
    q.center.reset();
    q.axis.reset();
    return q;
  }
  QuadSpec scaled_tol(double factor) const {
    QuadSpec q = *this;
    q.tol *= factor;
    q.rel_tol *= factor;
    return q;
  }
};

struct QuadResult {
  double value = 0.0;
  double err_estimate = 0.0;
  std::size_t evaluations = 0;
  bool converged = true;

  QuadResult& operator+=(const QuadResult& o) {
    value += o.value;
    err_estimate += o.err_estimate;
    evaluations += o.evaluations;
    converged = converged && o.converged;
    return *this;
  }
  friend QuadResult operator+(QuadResult a, const QuadResult& b) { return a += b; }
  QuadResult scaled(double factor) const {
    QuadResult r = *this;
    r.value *= factor;
    r.err_estimate *= std::abs(factor);
    return r;
  }
};

using RealFunction = std::function<double(double)>;
using PointFunction = std::function<double(const Point&)>;

/// Symmetry of an integrand relative to the polar frame (centre, axis).
enum class Symmetry {
  none,
  axial,   // invariant under rotations about the polar axis
  radial,  // depends only on the distance to the polar centre
};

namespace detail {

struct Segment {
  double a, b, value, err;
  bool operator<(const Segment& o) const { return err < o.err; }
};

struct GkRule {
  std::vector<double> nodes;     // non-negative Kronrod abscissae, nodes[0] == 0
  std::vector<double> kronrod;   // matching Kronrod weights
  std::vector<double> gauss;     // Gauss weights for odd indices of `nodes`
};

inline const GkRule& gk21() {
  static const GkRule rule = [] {
    using K = boost::math::quadrature::gauss_kronrod<double, 21>;
    using G = boost::math::quadrature::gauss<double, 10>;
    GkRule r;
    r.nodes.assign(K::abscissa().begin(), K::abscissa().end());
    r.kronrod.assign(K::weights().begin(), K::weights().end());
    r.gauss.assign(G::weights().begin(), G::weights().end());
    return r;
  }();
  return rule;
}

struct GkEval {
  double kronrod = 0.0;
  double err = 0.0;
  double l1 = 0.0;
  bool finite = true;
};

inline GkEval gk_apply(const RealFunction& f, double a, double b) {
  const GkRule& r = gk21();
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  GkEval out;
  double gauss = 0.0;
  const double f0 = f(mid);
  out.kronrod = f0 * r.kronrod[0];
  out.l1 = std::abs(f0) * r.kronrod[0];
  out.finite = std::isfinite(f0);
  for (std::size_t i = 1; i < r.nodes.size(); ++i) {
    const double fp = f(mid + half * r.nodes[i]);
    const double fm = f(mid - half * r.nodes[i]);
    out.finite = out.finite && std::isfinite(fp) && std::isfinite(fm);
    out.kronrod += (fp + fm) * r.kronrod[i];
    out.l1 += (std::abs(fp) + std::abs(fm)) * r.kronrod[i];
    if (i % 2 == 1) gauss += (fp + fm) * r.gauss[i / 2];
  }
  out.kronrod *= half;
  out.l1 *= std::abs(half);
  gauss *= half;
  out.err = std::max(std::abs(out.kronrod - gauss), 50.0 * std::numeric_limits<double>::epsilon() * out.l1);
  return out;
}

inline constexpr std::size_t kGkPoints = 21;

/// Globally adaptive Gauss-Kronrod (G10/K21) on a finite interval. The error
/// estimate is the nested-rule difference, summed over the final partition.
inline QuadResult adaptive_gk(const RealFunction& f, double a, double b, double tol, double rel_tol,
                              int max_subdiv, int initial_pieces = 1) {
  QuadResult res;
  if (a == b) return res;
  std::priority_queue<Segment> heap;
  double frozen_value = 0.0, frozen_err = 0.0;
  double total = 0.0, total_err = 0.0;
  std::size_t evals = 0;
  const int pieces = std::max(1, initial_pieces);
  for (int k = 0; k < pieces; ++k) {
    const double lo = a + (b - a) * k / pieces;
    const double hi = (k + 1 == pieces) ? b : a + (b - a) * (k + 1) / pieces;
    GkEval e = gk_apply(f, lo, hi);
    evals += kGkPoints;
    if (!e.finite) return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::infinity(), evals, false};
    heap.push({lo, hi, e.kronrod, e.err});
    total += e.kronrod;
    total_err += e.err;
  }
  int subdivisions = pieces;
  const double eps = std::numeric_limits<double>::epsilon();
  while (!heap.empty()) {
    if (total_err <= std::max(tol, rel_tol * std::abs(total))) break;
    if (subdivisions >= max_subdiv) break;
    Segment s = heap.top();
    heap.pop();
    const double m = 0.5 * (s.a + s.b);
    if (!(m > s.a && m < s.b) || (s.b - s.a) < 64.0 * eps * std::max(std::abs(s.a), std::abs(s.b))) {
      frozen_value += s.value;
      frozen_err += s.err;
      continue;
    }
    GkEval l = gk_apply(f, s.a, m);
    GkEval r = gk_apply(f, m, s.b);
    evals += 2 * kGkPoints;
    if (!l.finite || !r.finite)
      return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::infinity(), evals, false};
    total += l.kronrod + r.kronrod - s.value;
    total_err += l.err + r.err - s.err;
    heap.push({s.a, m, l.kronrod, l.err});
    heap.push({m, s.b, r.kronrod, r.err});
    ++subdivisions;
  }
  // Re-sum to avoid drift from the running updates.
  double value = frozen_value, err = frozen_err;
  while (!heap.empty()) {
    value += heap.top().value;
    err += heap.top().err;
    heap.pop();
  }
  res.value = value;
  res.err_estimate = err;
  res.evaluations = evals;
  res.converged = err <= std::max(tol, rel_tol * std::abs(value));
  return res;
}

/// Grading exponent k for t - a = (b - a) v^k so that (t-a)^{-beta} dt becomes
/// v^3 dv.
inline double grading_exponent(double beta) { return std::clamp(4.0 / (1.0 - beta), 1.0, 12.0); }

/// Integrate f on the finite interval [a, b] with optional graded endpoints.
inline QuadResult graded_integrate(const RealFunction& f, double a, double b, std::optional<double> left,
                                   std::optional<double> right, double tol, double rel_tol, int max_subdiv) {
  if (a == b) return {};
  if (left && right) {
    const double m = 0.5 * (a + b);
    QuadResult r1 = graded_integrate(f, a, m, left, std::nullopt, 0.5 * tol, rel_tol, max_subdiv);
    QuadResult r2 = graded_integrate(f, m, b, std::nullopt, right, 0.5 * tol, rel_tol, max_subdiv);
    return r1 + r2;
  }
  const double len = b - a;
  if (left) {
    const double k = grading_exponent(*left);
    if (k > 1.0) {
      auto g = [&](double v) {
        const double t = a + len * std::pow(v, k);
        if (!(t > a) || !(t < b)) return 0.0;
        return f(t) * len * k * std::pow(v, k - 1.0);
      };
      return adaptive_gk(g, 0.0, 1.0, tol, rel_tol, max_subdiv);
    }
  }
  if (right) {
    const double k = grading_exponent(*right);
    if (k > 1.0) {
      auto g = [&](double v) {
        const double t = b - len * std::pow(v, k);
        if (!(t > a) || !(t < b)) return 0.0;
        return f(t) * len * k * std::pow(v, k - 1.0);
      };
      return adaptive_gk(g, 0.0, 1.0, tol, rel_tol, max_subdiv);
    }
  }
  auto g = [&](double t) {
    if (!(t > a) || !(t < b)) return 0.0;
    return f(t);
  };
  return adaptive_gk(g, a, b, tol, rel_tol, max_subdiv);
}

}  // namespace detail

/// Adaptive integral of f over (a, b). b may be +infinity; a may be -infinity.
/// A non-converged result is flagged, never silently returned as converged.
///
/// For b = +infinity, `sing_left` refers to t = a and `sing_right` to the tail
/// expressed in v = 1 / (t - a) (an integrand ~ t^{-gamma} has exponent 2 - gamma).
/// Right-endpoint hints on a finite interval are accurate to roughly
/// (eps |b|)^{1 - beta}, since f only sees the rounded abscissa; integrands
/// that know their distance to the singular set should use the exterior
/// layer form or reflect the interval.
inline QuadResult integrate_interval(const RealFunction& f, double a, double b, const QuadSpec& q) {
  q.validate();
  if (a == b) return {};
  if (a > b) return integrate_interval(f, b, a, q).scaled(-1.0);
  const double inf = std::numeric_limits<double>::infinity();
  if (a == -inf) {
    if (b == inf) {
      QuadSpec half = q.plain().with_tol(0.5 * q.tol, q.rel_tol);
      auto reflected = [&](double t) { return f(-t); };
      return integrate_interval(reflected, 0.0, inf, half) + integrate_interval(f, 0.0, inf, half);
    }
    auto reflected = [&](double t) { return f(-t); };
    QuadSpec swapped = q;
    std::swap(swapped.sing_left, swapped.sing_right);
    return integrate_interval(reflected, -b, inf, swapped);
  }
  if (b == inf) {
    // [a, a + 1] directly, then t = a + 1 / v on v in (0, 1] for the tail, so
    // that both singular ends are approached from an exactly representable side.
    const double half_tol = 0.5 * q.tol;
    QuadResult head = detail::graded_integrate(f, a, a + 1.0, q.sing_left, std::nullopt, half_tol, q.rel_tol,
                                               q.max_subdiv);
    auto g = [&](double v) {
      if (!(v > 0.0)) return 0.0;
      return f(a + 1.0 / v) / (v * v);
    };
    return head + detail::graded_integrate(g, 0.0, 1.0, q.sing_right, std::nullopt, half_tol, q.rel_tol,
                                           q.max_subdiv);
  }
  if (q.log_substitution) {
    const double len = b - a;
    auto log_part = [&](double lo, double hi, double tol) {
      // t = lo + (hi - lo) exp(-w), w = v / (1 - v)
      const double width = hi - lo;
      auto g = [&, width, lo](double v) {
        const double one_minus = 1.0 - v;
        if (!(one_minus > 0.0)) return 0.0;
        const double w = v / one_minus;
        const double e = std::exp(-w);
        const double t = lo + width * e;
        if (!(t > lo)) return 0.0;
        return f(t) * width * e / (one_minus * one_minus);
      };
      return detail::graded_integrate(g, 0.0, 1.0, std::nullopt, q.sing_left.value_or(0.5), tol, q.rel_tol,
                                      q.max_subdiv);
    };
    if (!q.sing_right) return log_part(a, b, q.tol);
    const double m = a + 0.5 * len;
    return log_part(a, m, 0.5 * q.tol) +
           detail::graded_integrate(f, m, b, std::nullopt, q.sing_right, 0.5 * q.tol, q.rel_tol, q.max_subdiv);
  }
  return detail::graded_integrate(f, a, b, q.sing_left, q.sing_right, q.tol, q.rel_tol, q.max_subdiv);
}

namespace detail {

inline Point sphere_point(const Frame& fr, double mu, double phi) {
  const double sin_theta = std::sqrt(std::max(0.0, 1.0 - mu * mu));
  Point w = mu * fr.axis;
  w += (sin_theta * std::cos(phi)) * fr.e1;
  w += (sin_theta * std::sin(phi)) * fr.e2;
  return w;
}

/// Periodic trapezoid rule over [0, 2 pi) with doubling until two successive
/// levels agree.
inline QuadResult periodic_trapezoid(const RealFunction& g, double tol, double rel_tol, int max_points = 2048) {
  QuadResult res;
  int npts = 8;
  double sum = 0.0;
  for (int k = 0; k < npts; ++k) sum += g(2.0 * std::numbers::pi * k / npts);
  res.evaluations = static_cast<std::size_t>(npts);
  double estimate = 2.0 * std::numbers::pi * sum / npts;
  while (true) {
    double extra = 0.0;
    for (int k = 0; k < npts; ++k) extra += g(2.0 * std::numbers::pi * (k + 0.5) / npts);
    res.evaluations += static_cast<std::size_t>(npts);
    sum += extra;
    npts *= 2;
    const double refined = 2.0 * std::numbers::pi * sum / npts;
    const double diff = std::abs(refined - estimate);
    estimate = refined;
    if (diff <= std::max(tol, rel_tol * std::abs(refined))) {
      res.value = refined;
      res.err_estimate = diff;
      return res;
    }
    if (npts >= max_points) {
      res.value = refined;
      res.err_estimate = diff;
      res.converged = false;
      return res;
    }
  }
}

inline Point random_direction(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Point w(n);
  double len = 0.0;
  do {
    for (int i = 0; i < n; ++i) w[i] = normal(rng);
    len = w.norm();
  } while (len == 0.0);
  return w * (1.0 / len);
}

}  // namespace detail

/// \int_{S^{n-1}} F(w) dw. n = 1: two-point sum; n = 2: periodic trapezoid;
/// n = 3: adaptive Gauss-Kronrod in mu = cos(theta) around the polar axis times
/// a periodic trapezoid in the azimuth (skipped for axial symmetry); n > 3:
/// seeded Monte Carlo over directions with the sample standard error reported.
inline QuadResult integrate_sphere(const PointFunction& F, int n, const QuadSpec& q,
                                   Symmetry symmetry = Symmetry::none) {
  q.validate();
  const Frame fr = frame_around(q.axis.value_or(Point::unit(n, 0)));
  const double area = sphere_area(n);
  if (symmetry == Symmetry::radial) {
    QuadResult r;
    r.value = area * F(fr.axis);
    r.evaluations = 1;
    return r;
  }
  if (n == 1) {
    QuadResult r;
    r.value = F(fr.axis) + F(-fr.axis);
    r.evaluations = 2;
    return r;
  }
  if (n == 2) {
    auto g = [&](double theta) { return F(std::cos(theta) * fr.axis + std::sin(theta) * fr.e1); };
    return detail::periodic_trapezoid(g, q.tol / (2.0 * std::numbers::pi), q.rel_tol);
  }
  if (n == 3) {
    std::size_t inner_evals = 0;
    bool inner_ok = true;
    const double inner_tol = 0.05 * q.tol / (2.0 * std::numbers::pi);
    auto g = [&](double mu) {
      if (symmetry == Symmetry::axial) {
        ++inner_evals;
        return 2.0 * std::numbers::pi * F(detail::sphere_point(fr, mu, 0.0));
      }
      auto h = [&](double phi) { return F(detail::sphere_point(fr, mu, phi)); };
      QuadResult ring = detail::periodic_trapezoid(h, inner_tol, 0.05 * q.rel_tol);
      inner_evals += ring.evaluations;
      inner_ok = inner_ok && ring.converged;
      return ring.value;
    };
    QuadResult r = detail::adaptive_gk(g, -1.0, 1.0, q.tol, q.rel_tol, q.max_subdiv, 2);
    r.evaluations = inner_evals;
    r.converged = r.converged && inner_ok;
    return r;
  }
  std::mt19937_64 rng(q.mc_seed);
  double mean = 0.0, m2 = 0.0;
  const std::size_t samples = std::max<std::size_t>(q.mc_samples, 2);
  for (std::size_t k = 0; k < samples; ++k) {
    const double v = F(detail::random_direction(n, rng));
    const double delta = v - mean;
    mean += delta / static_cast<double>(k + 1);
    m2 += delta * (v - mean);
  }
  QuadResult r;
  r.value = area * mean;
  r.err_estimate = area * std::sqrt(m2 / static_cast<double>(samples - 1) / static_cast<double>(samples));
  r.evaluations = samples;
  r.converged = r.err_estimate <= q.target(r.value);
  return r;
}

namespace detail {

/// Relative accuracy asked of a single ray: a few hundred ulps, which is what
/// the G10/K21 roundoff floor permits.
inline constexpr double kRayRelFloor = 100.0 * std::numeric_limits<double>::epsilon();

/// Inner (radial) spec derived from an outer sphere/ball spec.
inline QuadSpec ray_spec(const QuadSpec& q, double area) {
  QuadSpec r = q;
  r.tol = 0.1 * q.tol / area;
  r.rel_tol = std::max(0.1 * q.rel_tol, kRayRelFloor);
  r.center.reset();
  r.axis.reset();
  return r;
}

/// Distance from c (inside the closed ball) to the sphere |y| = radius along w.
inline double ray_exit(const Point& c, const Point& w, double radius) {
  const double cw = dot(c, w);
  const double disc = cw * cw + (radius * radius - c.norm2());
  return -cw + std::sqrt(std::max(0.0, disc));
}

}  // namespace detail

/// \int_{B_r} f using polar coordinates about q.center (default: origin). The
/// ray integrals see q.sing_left at the centre and q.sing_right at the sphere.
inline QuadResult integrate_ball(const PointFunction& f, const BallDomain& dom, const QuadSpec& q,
                                 Symmetry symmetry) {
  q.validate();
  const int n = dom.dim();
  const double r = dom.radius();
  const Point c = q.center.value_or(Point::zero(n));
  if (c.dim() != n) throw DomainError("integrate_ball: centre has wrong dimension");
  if (c.norm() >= r) throw DomainError("integrate_ball: polar centre must lie inside the ball");
  if (n > 3 && symmetry != Symmetry::radial) {
    // Seeded Monte Carlo over the ball.
    std::mt19937_64 rng(q.mc_seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double mean = 0.0, m2 = 0.0;
    const std::size_t samples = std::max<std::size_t>(q.mc_samples, 2);
    for (std::size_t k = 0; k < samples; ++k) {
      const Point w = detail::random_direction(n, rng);
      const double rho = r * std::pow(unif(rng), 1.0 / n);
      const double v = f(rho * w);
      const double delta = v - mean;
      mean += delta / static_cast<double>(k + 1);
      m2 += delta * (v - mean);
    }
    const double vol = dom.volume();
    QuadResult res;
    res.value = vol * mean;
    res.err_estimate = vol * std::sqrt(m2 / static_cast<double>(samples - 1) / static_cast<double>(samples));
    res.evaluations = samples;
    res.converged = res.err_estimate <= q.target(res.value);
    return res;
  }
  const double area = sphere_area(n);
  const QuadSpec inner = detail::ray_spec(q, area);
  std::size_t evals = 0;
  bool ok = true;
  double worst_inner = 0.0;
  auto ray = [&](const Point& w) {
    const double len = detail::ray_exit(c, w, r);
    auto g = [&](double rho) { return f(c + rho * w) * std::pow(rho, n - 1); };
    QuadResult rr = integrate_interval(g, 0.0, len, inner);
    evals += rr.evaluations;
    ok = ok && rr.converged;
    worst_inner = std::max(worst_inner, rr.err_estimate);
    return rr.value;
  };
  QuadSpec outer = q;
  if (c.norm() > 0.0) outer.axis = c;
  QuadResult res = integrate_sphere(ray, n, outer, symmetry);
  res.err_estimate += area * worst_inner;
  res.evaluations = evals;
  res.converged = res.converged && ok;
  return res;
}

/// Integrand for exterior integrals: receives y and the exactly computed gap
/// |y| - r, which is what boundary-layer factors such as (|y|^2 - r^2)^{-s}
/// must be built from.
using LayerFunction = std::function<double(const Point&, double)>;

/// \int_{|y| > r} f(y, |y| - r) dy with |y| = r / t, t in (0, 1]. q.sing_left
/// describes the far field t -> 0 and q.sing_right the layer t -> 1. The ray
/// is split at t = 1/2 and the layer half is integrated in u = 1 - t.
inline QuadResult integrate_exterior(const LayerFunction& f, const BallDomain& dom, const QuadSpec& q,
                                     Symmetry symmetry) {
  q.validate();
  const int n = dom.dim();
  const double r = dom.radius();
  const double area = sphere_area(n);
  const QuadSpec inner = detail::ray_spec(q, area);
  std::size_t evals = 0;
  bool ok = true;
  double worst_inner = 0.0;
  const double rn = std::pow(r, n);
  auto ray = [&](const Point& w) {
    auto far = [&](double t) {
      if (!(t > 0.0)) return 0.0;
      return f((r / t) * w, r * (1.0 - t) / t) * rn * std::pow(t, -n - 1);
    };
    auto layer = [&](double u) {
      if (!(u > 0.0)) return 0.0;
      const double t = 1.0 - u;
      return f((r / t) * w, r * u / t) * rn * std::pow(t, -n - 1);
    };
    QuadResult rr = detail::graded_integrate(far, 0.0, 0.5, inner.sing_left, std::nullopt, 0.5 * inner.tol,
                                             inner.rel_tol, inner.max_subdiv) +
                    detail::graded_integrate(layer, 0.0, 0.5, inner.sing_right, std::nullopt, 0.5 * inner.tol,
                                             inner.rel_tol, inner.max_subdiv);
    evals += rr.evaluations;
    ok = ok && rr.converged;
    worst_inner = std::max(worst_inner, rr.err_estimate);
    return rr.value;
  };
  QuadResult res = integrate_sphere(ray, n, q, symmetry);
  res.err_estimate += area * worst_inner;
  res.evaluations = evals;
  res.converged = res.converged && ok;
  return res;
}

/// Point-only integrand form. Samples that round onto the sphere are dropped.
inline QuadResult integrate_exterior(const PointFunction& f, const BallDomain& dom, const QuadSpec& q,
                                     Symmetry symmetry) {
  const double r = dom.radius();
  return integrate_exterior(
      LayerFunction([&f, r](const Point& y, double) { return y.norm() > r ? f(y) : 0.0; }), dom, q, symmetry);
}

/// Field overloads: symmetry is deduced from the radial flag and the polar centre.
inline QuadResult integrate_ball(const ScalarField& f, const BallDomain& dom, const QuadSpec& q) {
  Symmetry sym = Symmetry::none;
  if (f.is_radial()) sym = (q.center && q.center->norm() > 0.0) ? Symmetry::axial : Symmetry::radial;
  return integrate_ball([&f](const Point& x) { return f(x); }, dom, q, sym);
}

inline QuadResult integrate_exterior(const ScalarField& f, const BallDomain& dom, const QuadSpec& q) {
  const auto& decay = f.traits().decay;
  if (decay.support_radius && *decay.support_radius <= dom.radius()) return {};
  return integrate_exterior([&f](const Point& x) { return f(x); }, dom, q,
                            f.is_radial() ? Symmetry::radial : Symmetry::none);
}

}  // namespace fracball
