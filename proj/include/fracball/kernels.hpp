#pragma once

// Closed-form kernels of (-Delta)^s on the ball B_r:
//   Phi(x - z)   = c_Phi |x - z|^{2s - n}
//   P_r(x, y)    = c_P ((r^2 - |x|^2) / (|y|^2 - r^2))^s |x - y|^{-n}
//   G(x, z)      = kappa |x - z|^{2s - n} \int_0^{r0(x,z)} t^{s-1} (1 + t)^{-n/2} dt
//   r0(x, z)     = (r^2 - |x|^2)(r^2 - |z|^2) / (r^2 |x - z|^2)
// together with the definition-form Green function Phi - \int P_r Phi.

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include <boost/math/special_functions/beta.hpp>

#include "fracball/errors.hpp"
#include "fracball/geometry.hpp"
#include "fracball/quadrature.hpp"

namespace fracball {

/// C_{n,s} = s 4^s Gamma(n/2 + s) / (pi^{n/2} Gamma(1 - s)), the constant in
/// the principal-value definition of (-Delta)^s (defined for every n >= 1).
inline double operator_constant(int n, const FracOrder& order) {
  const double s = order.value();
  const double half_n = 0.5 * n;
  return s * std::pow(4.0, s) * std::tgamma(half_n + s) / (std::pow(std::numbers::pi, half_n) * std::tgamma(1.0 - s));
}

/// Normalisations tying the operator, Poisson kernel, fundamental solution and
/// concise Green function together. Configuration, not hard-wired: the
/// consistency gates (Green cross-check, solve-then-apply) validate a choice.
struct KernelConstants {
  double op = 0.0;           // C_{n,s} in the principal-value definition
  double poisson = 0.0;      // c_P
  double fundamental = 0.0;  // c_Phi
  double green = 0.0;        // kappa

  /// The standard normalisations for the ball (requires n > 2s).
  static KernelConstants standard(int n, const FracOrder& order) {
    const double s = order.value();
    const double half_n = 0.5 * n;
    if (!(half_n > s)) throw DomainError("kernel constants require n > 2s");
    const double pi = std::numbers::pi;
    KernelConstants k;
    k.op = operator_constant(n, order);
    k.poisson = std::tgamma(half_n) * std::sin(pi * s) / std::pow(pi, half_n + 1.0);
    k.fundamental = std::tgamma(half_n - s) / (std::pow(4.0, s) * std::pow(pi, half_n) * std::tgamma(s));
    k.green = std::tgamma(half_n) / (std::pow(4.0, s) * std::pow(pi, half_n) * std::tgamma(s) * std::tgamma(s));
    return k;
  }

  void validate() const {
    if (!(op > 0.0 && poisson > 0.0 && fundamental > 0.0 && green > 0.0))
      throw DomainError("KernelConstants: all constants must be strictly positive");
  }
};

struct GreenEval {
  double value = 0.0;
  double r0 = 0.0;
  double incomplete_integral = 0.0;
};

/// Kernels for a fixed ball and order. Evaluation is pure and thread-safe.
class BallKernels {
 public:
  BallKernels(const BallDomain& dom, const FracOrder& s, std::optional<KernelConstants> constants = std::nullopt)
      : dom_(dom), s_(s), k_(constants.value_or(KernelConstants::standard(dom.dim(), s))) {
    k_.validate();
    if (!(0.5 * dom.dim() > s.value())) throw DomainError("BallKernels: n = 2s (or n < 2s) is excluded");
    complete_ = boost::math::beta(s.value(), 0.5 * dom.dim() - s.value());
  }

  const BallDomain& domain() const noexcept { return dom_; }
  const FracOrder& order() const noexcept { return s_; }
  const KernelConstants& constants() const noexcept { return k_; }
  /// B(s, n/2 - s): the incomplete integral's limit as its upper bound -> infinity.
  double complete_integral() const noexcept { return complete_; }

  double fundamental(const Point& x, const Point& z) const {
    const double d = distance(x, z);
    if (d == 0.0) throw SingularityError("fundamental solution evaluated at coincident points");
    return k_.fundamental * std::pow(d, -s_.riesz_exponent(dom_.dim()));
  }

  double poisson(const Point& x, const Point& y) const {
    const double r = dom_.radius();
    const double rx = x.norm(), ry = y.norm();
    if (!(rx < r)) throw DomainError("poisson_kernel: x must lie in the open ball");
    if (!(ry > r)) throw DomainError("poisson_kernel: y must lie outside the closed ball");
    const double ratio = ((r - rx) * (r + rx)) / ((ry - r) * (ry + r));
    return k_.poisson * std::pow(ratio, s_.value()) * std::pow(distance(x, y), -dom_.dim());
  }

  /// P_r(x, y) with |y| - r supplied exactly by the caller (exterior layer form).
  double poisson(const Point& x, const Point& y, double gap) const {
    const double r = dom_.radius();
    const double rx = x.norm();
    if (!(rx < r)) throw DomainError("poisson_kernel: x must lie in the open ball");
    if (!(gap > 0.0)) throw DomainError("poisson_kernel: y must lie outside the closed ball");
    const double ratio = ((r - rx) * (r + rx)) / (gap * (2.0 * r + gap));
    return k_.poisson * std::pow(ratio, s_.value()) * std::pow(distance(x, y), -dom_.dim());
  }

  /// r0(x, z); +infinity when x == z.
  double r0(const Point& x, const Point& z) const {
    const double r = dom_.radius();
    const double rx = x.norm(), rz = z.norm();
    if (!(rx < r) || !(rz < r)) throw DomainError("r0: points must lie in the open ball");
    const double d2 = (x - z).norm2();
    if (d2 == 0.0) return std::numeric_limits<double>::infinity();
    return (r - rx) * (r + rx) * (r - rz) * (r + rz) / (r * r * d2);
  }

  /// \int_0^R t^{s-1} (1+t)^{-n/2} dt = B(R/(1+R); s, n/2 - s), evaluated with
  /// the incomplete beta function (complement form for R > 1).
  double incomplete_integral(double R) const {
    if (!(R > 0.0)) {
      if (R == 0.0) return 0.0;
      throw DomainError("incomplete_integral: R must be positive");
    }
    if (std::isinf(R)) return complete_;
    const double a = s_.value(), b = 0.5 * dom_.dim() - a;
    if (R <= 1.0) return boost::math::beta(a, b, R / (1.0 + R));
    return complete_ - boost::math::beta(b, a, 1.0 / (1.0 + R));
  }

  /// G(x, z) through the concise representation.
  GreenEval green(const Point& x, const Point& z) const {
    const double sep = distance(x, z);
    if (sep <= 1e-8 * dom_.radius()) throw SingularityError("Green function evaluated at (near-)coincident points");
    GreenEval g;
    g.r0 = r0(x, z);
    g.incomplete_integral = incomplete_integral(g.r0);
    g.value = k_.green * std::pow(sep, -s_.riesz_exponent(dom_.dim())) * g.incomplete_integral;
    return g;
  }

  /// kappa rho^{2s-1} I(r0(x, x + rho w)): the Green function times rho^{n-1}
  /// along a ray from x, free of the diagonal singularity.
  double green_ray_density(const Point& x, const Point& y, double rho) const {
    const double r = dom_.radius();
    const double rx = x.norm(), ry = y.norm();
    if (!(ry < r) || !(rx < r) || !(rho > 0.0)) return 0.0;
    const double R = (r - rx) * (r + rx) * (r - ry) * (r + ry) / (r * r * rho * rho);
    return k_.green * std::pow(rho, 2.0 * s_.value() - 1.0) * incomplete_integral(R);
  }

  /// Phi(x - z) - \int_{|y| > r} Phi(z - y) P_r(x, y) dy.
  QuadResult green_definition(const Point& x, const Point& z, const QuadSpec& q) const {
    const double sep = distance(x, z);
    if (sep <= 1e-8 * dom_.radius()) throw SingularityError("Green function evaluated at (near-)coincident points");
    if (!dom_.contains(x) || !dom_.contains(z)) throw DomainError("green_definition: points must lie in the open ball");
    QuadSpec spec = q.with_endpoints(std::nullopt, s_.value());
    Symmetry sym = Symmetry::none;
    const double nx = x.norm(), nz = z.norm();
    if (nx == 0.0 || nz == 0.0) {
      sym = Symmetry::axial;
      spec.axis = nx == 0.0 ? z : x;
    } else {
      spec.axis = x;
      if (std::abs(std::abs(dot(x, z)) - nx * nz) <= 1e-14 * nx * nz) sym = Symmetry::axial;
    }
    auto integrand = [&](const Point& y, double gap) { return fundamental(z, y) * poisson(x, y, gap); };
    QuadResult correction = integrate_exterior(LayerFunction(integrand), dom_, spec, sym);
    QuadResult out = correction.scaled(-1.0);
    out.value += fundamental(x, z);
    return out;
  }

 private:
  BallDomain dom_;
  FracOrder s_;
  KernelConstants k_;
  double complete_ = 0.0;
};

// Free-function forms.

inline double fundamental_solution(const Point& x, const Point& z, int n, const FracOrder& s) {
  return BallKernels(BallDomain::unit(n), s).fundamental(x, z);
}

inline double poisson_kernel(const Point& x, const Point& y, double r, int n, const FracOrder& s) {
  return BallKernels(BallDomain(n, r), s).poisson(x, y);
}

inline double r0(const Point& x, const Point& z, double r) {
  const double rx = x.norm(), rz = z.norm();
  if (!(rx < r) || !(rz < r)) throw DomainError("r0: points must lie in the open ball");
  const double d2 = (x - z).norm2();
  if (d2 == 0.0) return std::numeric_limits<double>::infinity();
  return (r - rx) * (r + rx) * (r - rz) * (r + rz) / (r * r * d2);
}

/// \int_0^R t^{s-1} (1+t)^{-n/2} dt by adaptive quadrature (graded at t = 0).
inline QuadResult incomplete_integral(double R, int n, const FracOrder& s, const QuadSpec& q) {
  if (!(R > 0.0)) throw DomainError("incomplete_integral: R must be positive");
  const double a = s.value();
  const double half_n = 0.5 * n;
  auto f = [a, half_n](double t) { return std::pow(t, a - 1.0) * std::pow(1.0 + t, -half_n); };
  return integrate_interval(f, 0.0, R, q.with_endpoints(1.0 - a, std::nullopt));
}

/// Concise-form Green function with the incomplete integral computed by quadrature.
inline GreenEval greens_closed(const Point& x, const Point& z, double r, int n, const FracOrder& s,
                               const QuadSpec& q) {
  const BallKernels k(BallDomain(n, r), s);
  const double sep = distance(x, z);
  if (sep <= 1e-8 * r) throw SingularityError("Green function evaluated at (near-)coincident points");
  GreenEval g;
  g.r0 = k.r0(x, z);
  QuadResult I = incomplete_integral(g.r0, n, s, q);
  if (!I.converged) throw ConvergenceError("greens_closed: incomplete integral", I.value, I.err_estimate);
  g.incomplete_integral = I.value;
  g.value = k.constants().green * std::pow(sep, -s.riesz_exponent(n)) * I.value;
  return g;
}

inline QuadResult greens_definition(const Point& x, const Point& z, double r, int n, const FracOrder& s,
                                    const QuadSpec& q) {
  return BallKernels(BallDomain(n, r), s).green_definition(x, z, q);
}

}  // namespace fracball
