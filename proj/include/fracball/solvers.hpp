#pragma once

// Representation-formula solvers on the ball B_r:
//   fractional Dirichlet   u = \int_{|y|>r} P_r(x, y) g(y) dy inside, g outside
//   fractional forced      u = \int_{B_r} G(x, y) h(y) dy inside, 0 outside
//   classical Dirichlet    harmonic extension through the classical Poisson kernel
//   radial Poisson         -Delta f = c, f(r) = 0, for radial c
// Solutions are lazy fields: each evaluation runs a quadrature, and values are
// memoized per point.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <limits>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "fracball/chebyshev.hpp"
#include "fracball/errors.hpp"
#include "fracball/field.hpp"
#include "fracball/geometry.hpp"
#include "fracball/kernels.hpp"
#include "fracball/quadrature.hpp"

namespace fracball {

namespace detail {

/// Thread-safe point -> value cache keyed on the exact coordinates.
class PointMemo {
 public:
  template <class Compute>
  double get(const Point& x, Compute&& compute) {
    const Key key = make_key(x);
    {
      std::lock_guard<std::mutex> lock(mutex_);
      auto it = table_.find(key);
      if (it != table_.end()) return it->second;
    }
    const double value = compute();
    std::lock_guard<std::mutex> lock(mutex_);
    return table_.emplace(key, value).first->second;
  }

  std::size_t size() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return table_.size();
  }

 private:
  struct Key {
    std::array<double, kMaxDim> c{};
    int dim = 0;
    bool operator==(const Key& o) const { return dim == o.dim && c == o.c; }
  };
  struct Hash {
    std::size_t operator()(const Key& k) const noexcept {
      std::size_t h = std::hash<int>{}(k.dim);
      for (int i = 0; i < k.dim; ++i) {
        std::uint64_t bits;
        std::memcpy(&bits, &k.c[static_cast<std::size_t>(i)], sizeof bits);
        h ^= std::hash<std::uint64_t>{}(bits) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      }
      return h;
    }
  };
  static Key make_key(const Point& x) {
    Key k;
    k.dim = x.dim();
    for (int i = 0; i < x.dim(); ++i) k.c[static_cast<std::size_t>(i)] = x[i] == 0.0 ? 0.0 : x[i];
    return k;
  }

  mutable std::mutex mutex_;
  std::unordered_map<Key, double, Hash> table_;
};

inline Symmetry symmetry_about(const ScalarField& data, const Point& x, QuadSpec& q) {
  if (!data.is_radial()) return Symmetry::none;
  if (x.norm() == 0.0) return Symmetry::radial;
  q.axis = x;
  return Symmetry::axial;
}

inline std::vector<Kink> merged_kinks(std::vector<Kink> a, const std::vector<Kink>& b) {
  for (const Kink& k : b) {
    bool seen = false;
    for (Kink& e : a)
      if (e.radius == k.radius) {
        e.holder_exponent = std::min(e.holder_exponent, k.holder_exponent);
        seen = true;
      }
    if (!seen) a.push_back(k);
  }
  return a;
}

/// Radial exterior data: averaging P_r(x, .) over the sphere |y| = rho with
/// \int_{S^{n-1}} |x - rho w|^{-n} dw = |S^{n-1}| rho^{2-n} / (rho^2 - |x|^2) gives
/// u(x) = c_P |S^{n-1}| (r^2 - |x|^2)^s \int_r^inf rho g(rho) (rho^2 - r^2)^{-s} (rho^2 - |x|^2)^{-1} d rho.
inline QuadResult radial_poisson_integral(const ScalarField& g, double rx, double r, int n, const FracOrder& s,
                                          double poisson_constant, const QuadSpec& q) {
  const double sv = s.value();
  const auto& gt = g.traits();
  // Integrate in the gap sigma = rho - r so the layer singularity sits at an exact zero.
  const double inside = r - rx;
  auto density = [&](double sigma) {
    if (!(sigma > 0.0)) return 0.0;
    const double rho = r + sigma;
    return rho * g.at_radius(rho, n) * std::pow(sigma * (rho + r), -sv) / ((sigma + inside) * (rho + rx));
  };
  std::vector<double> cuts{0.0};
  for (const Kink& k : gt.kinks)
    if (k.radius > r) cuts.push_back(k.radius - r);
  const double end =
      gt.decay.support_radius ? *gt.decay.support_radius - r : std::numeric_limits<double>::infinity();
  if (!(end > 0.0)) return {};
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::remove_if(cuts.begin(), cuts.end(), [end](double c) { return c >= end; }), cuts.end());
  cuts.push_back(end);
  const double tail = std::min(1.0 - s.two_s() + std::max(gt.decay.growth, 0.0), 0.99);
  QuadResult total;
  const double piece_tol = q.tol / static_cast<double>(cuts.size() - 1);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    std::optional<double> left = i == 0 ? std::optional<double>(sv) : std::nullopt;
    std::optional<double> right = std::isinf(cuts[i + 1]) ? std::optional<double>(tail) : std::nullopt;
    total += integrate_interval(density, cuts[i], cuts[i + 1],
                                q.plain().with_tol(piece_tol, q.rel_tol).with_endpoints(left, right));
  }
  const double factor = poisson_constant * sphere_area(n) * std::pow((r - rx) * (r + rx), sv);
  return total.scaled(factor);
}

}  // namespace detail

/// u(x) = \int_{|y|>r} P_r(x, y) g(y) dy in B_r and u = g outside. g must be
/// continuous on the complement and belong to the tail class. Each interior
/// evaluation throws ConvergenceError when the exterior quadrature fails.
inline ScalarField solve_dirichlet_fractional(const ScalarField& g, double r, int n, const FracOrder& s,
                                              const QuadSpec& q = QuadSpec{}.with_tol(1e-10)) {
  q.validate();
  const BallDomain dom(n, r);
  const auto& gt = g.traits();
  if (gt.support == Support::ball) throw DomainError("solve_dirichlet_fractional: g must be given outside the ball");
  if (gt.support == Support::ball_complement && gt.domain_radius > r)
    throw DomainError("solve_dirichlet_fractional: g must be defined on the whole complement of the ball");
  if (!gt.decay.in_tail_class(s.two_s()))
    throw DomainError("solve_dirichlet_fractional: g is not in the weighted tail class");
  auto kernels = std::make_shared<const BallKernels>(dom, s);
  auto memo = std::make_shared<detail::PointMemo>();
  const double far_exponent = std::min(1.0 - s.two_s() + std::max(gt.decay.growth, 0.0), 0.99);
  QuadSpec spec = q.plain().with_endpoints(far_exponent, s.value());

  FieldTraits traits;
  traits.radial = gt.radial;
  traits.decay = gt.decay;
  if (traits.decay.support_radius) traits.decay.support_radius = std::max(*traits.decay.support_radius, r);
  traits.kinks = detail::merged_kinks({{r, s.value()}}, gt.kinks);

  return ScalarField(
      [g, r, kernels, memo, spec](const Point& x) {
        if (x.norm() >= r) return g(x);
        return memo->get(x, [&] {
          if (g.is_radial()) {
            const double factor = kernels->constants().poisson * sphere_area(x.dim()) *
                                  std::pow((r - x.norm()) * (r + x.norm()), kernels->order().value());
            QuadResult res = detail::radial_poisson_integral(g, x.norm(), r, x.dim(), kernels->order(),
                                                             kernels->constants().poisson,
                                                             spec.with_tol(spec.tol / factor, spec.rel_tol));
            if (!res.converged)
              throw ConvergenceError("solve_dirichlet_fractional: radial quadrature", res.value, res.err_estimate);
            return res.value;
          }
          QuadSpec local = spec;
          const Symmetry sym = detail::symmetry_about(g, x, local);
          QuadResult res = integrate_exterior(
              LayerFunction([&](const Point& y, double gap) { return kernels->poisson(x, y, gap) * g(y); }),
              kernels->domain(), local, sym);
          if (!res.converged)
            throw ConvergenceError("solve_dirichlet_fractional: exterior quadrature", res.value, res.err_estimate);
          return res.value;
        });
      },
      traits);
}

/// u(x) = \int_{B_r} G(x, y) h(y) dy in B_r and u = 0 outside. The diagonal
/// singularity |x - y|^{2s-n} is absorbed by integrating in polar coordinates
/// about x.
inline ScalarField solve_forced_fractional(const ScalarField& h, double r, int n, const FracOrder& s,
                                           const QuadSpec& q = QuadSpec{}.with_tol(1e-10)) {
  q.validate();
  const BallDomain dom(n, r);
  auto kernels = std::make_shared<const BallKernels>(dom, s);
  auto memo = std::make_shared<detail::PointMemo>();
  const double two_s = s.two_s();
  QuadSpec spec = q.plain().with_endpoints(1.0 - two_s, -s.value());

  FieldTraits traits;
  traits.radial = h.is_radial();
  traits.decay = DecayClass::compact(r);
  traits.kinks = {{r, s.value()}};

  return ScalarField(
      [h, r, n, kernels, memo, spec](const Point& x) {
        if (x.norm() >= r) return 0.0;
        return memo->get(x, [&] {
          QuadSpec outer = spec;
          outer.sing_left.reset();
          outer.sing_right.reset();
          const Symmetry sym = detail::symmetry_about(h, x, outer);
          const double area = sphere_area(n);
          QuadSpec inner = detail::ray_spec(spec, area);
          std::size_t evals = 0;
          bool ok = true;
          double worst = 0.0;
          auto ray = [&](const Point& w) {
            const double len = detail::ray_exit(x, w, r);
            auto density = [&](double rho) {
              const Point y = x + rho * w;
              return kernels->green_ray_density(x, y, rho) * h(y);
            };
            QuadResult rr = integrate_interval(density, 0.0, len, inner);
            evals += rr.evaluations;
            ok = ok && rr.converged;
            worst = std::max(worst, rr.err_estimate);
            return rr.value;
          };
          QuadResult res = integrate_sphere(ray, n, outer, sym);
          res.err_estimate += area * worst;
          if (!(res.converged && ok))
            throw ConvergenceError("solve_forced_fractional: Green quadrature", res.value, res.err_estimate);
          return res.value;
        });
      },
      traits);
}

/// Harmonic extension of boundary data g (sampled on |y| = r):
/// u(x) = (r^2 - |x|^2) / (|S^{n-1}| r) \int_{|y|=r} g(y) |x - y|^{-n} dS(y).
inline ScalarField solve_dirichlet_classical(const ScalarField& g, double r, int n,
                                             const QuadSpec& q = QuadSpec{}.with_tol(1e-10)) {
  q.validate();
  if (!(r > 0.0)) throw DomainError("solve_dirichlet_classical: radius must be positive");
  auto memo = std::make_shared<detail::PointMemo>();
  QuadSpec spec = q.plain();
  FieldTraits traits;
  traits.radial = g.is_radial();
  traits.support = Support::ball;
  traits.domain_radius = r;
  return ScalarField(
      [g, r, n, memo, spec](const Point& x) {
        const double rx = x.norm();
        if (rx >= r) return g(x * (r / rx));
        return memo->get(x, [&] {
          QuadSpec local = spec;
          if (rx > 0.0) local.axis = x;
          const double area = sphere_area(n);
          auto integrand = [&](const Point& w) {
            const Point y = r * w;
            return g(y) * std::pow(distance(x, y), -n);
          };
          const double factor = (r - rx) * (r + rx) / (area * r) * std::pow(r, n - 1);
          local.tol = spec.tol / factor;
          QuadResult res = integrate_sphere(integrand, n, local, Symmetry::none);
          if (!res.converged)
            throw ConvergenceError("solve_dirichlet_classical: sphere quadrature", factor * res.value,
                                   factor * res.err_estimate);
          return factor * res.value;
        });
      },
      traits);
}

/// Radial solution of -Delta f = c in B_r, f(r) = 0:
/// f(rho) = \int_rho^r t^{1-n} \int_0^t sigma^{n-1} c(sigma) dsigma dt, evaluated
/// after exchanging the order of integration as \int_0^r sigma^{n-1} c(sigma) K(rho, sigma).
/// The result carries its gradient and Laplacian (-c) in closed form.
inline ScalarField solve_radial_poisson(const ScalarField& c, double r, int n,
                                        const QuadSpec& q = QuadSpec{}.with_tol(1e-13)) {
  q.validate();
  if (!c.is_radial()) throw DomainError("solve_radial_poisson: c must be radial");
  if (!(r > 0.0)) throw DomainError("solve_radial_poisson: radius must be positive");
  auto profile = [c, n](double sigma) { return c.at_radius(sigma, n); };
  // \int_{m}^{r} t^{1-n} dt with m = max(rho, sigma).
  auto tail_weight = [r, n](double m) {
    if (n == 2) return std::log(r / m);
    if (n == 1) return r - m;
    return (std::pow(m, 2.0 - n) - std::pow(r, 2.0 - n)) / (n - 2.0);
  };
  const QuadSpec spec = q;
  auto value = [=](double rho) {
    if (rho >= r) return 0.0;
    QuadResult inner = integrate_interval([&](double sig) { return std::pow(sig, n - 1) * profile(sig); }, 0.0,
                                          std::max(rho, 0.0), spec);
    double v = rho > 0.0 ? inner.value * tail_weight(rho) : 0.0;
    QuadResult outer = integrate_interval(
        [&](double sig) { return sig > 0.0 ? std::pow(sig, n - 1) * profile(sig) * tail_weight(sig) : 0.0; },
        std::max(rho, 0.0), r, rho > 0.0 ? spec.plain() : spec);
    if (!(outer.converged && (rho == 0.0 || inner.converged)))
      throw ConvergenceError("solve_radial_poisson: radial quadrature", v + outer.value,
                             outer.err_estimate + inner.err_estimate);
    return v + outer.value;
  };
  auto mass = [=](double rho) {
    if (rho <= 0.0) return 0.0;
    QuadResult m = integrate_interval([&](double sig) { return std::pow(sig, n - 1) * profile(sig); }, 0.0,
                                      std::min(rho, r), spec);
    if (!m.converged) throw ConvergenceError("solve_radial_poisson: mass integral", m.value, m.err_estimate);
    return m.value;
  };
  FieldTraits traits;
  traits.radial = true;
  traits.support = Support::ball;
  traits.domain_radius = r;
  return ScalarField::radial(value, traits)
      .with_gradient([mass, n](const Point& x) {
        const double rho = x.norm();
        if (rho == 0.0) return Point(x.dim());
        return x * (-mass(rho) * std::pow(rho, -n));
      })
      .with_laplacian([c](const Point& x) { return -c(x); });
}

/// A radial solution replaced by a Chebyshev surrogate of
/// psi(rho) = (u(rho) - e(rho)) / (r^2 - rho^2)^s on [0, r], where e is the
/// exterior data (zero for forced problems, defined on the whole space). The
/// surrogate keeps u's boundary behaviour exactly and is cheap to evaluate.
struct RadialSurrogate {
  ScalarField field;
  double interpolation_error = 0.0;
  int degree = 0;
};

inline RadialSurrogate tabulate_radial(const ScalarField& u, const ScalarField& exterior, double r, int n,
                                       const FracOrder& s, double tol = 1e-9, int max_degree = 256) {
  if (!u.is_radial() || !exterior.is_radial()) throw DomainError("tabulate_radial: fields must be radial");
  if (exterior.traits().support != Support::whole_space)
    throw DomainError("tabulate_radial: exterior data must extend to the whole space");
  const double sv = s.value();
  auto psi_exact = [&](double rho) {
    return (u.at_radius(rho, n) - exterior.at_radius(rho, n)) / std::pow((r - rho) * (r + rho), sv);
  };
  // The boundary node is extrapolated from four nodes just inside the sphere.
  const double h = 1e-3 * r;
  auto psi = [&](double rho) {
    if (r - rho >= h) return psi_exact(rho);
    return 4.0 * psi_exact(r - h) - 6.0 * psi_exact(r - 2.0 * h) + 4.0 * psi_exact(r - 3.0 * h) -
           psi_exact(r - 4.0 * h);
  };
  auto table = std::make_shared<const ChebyshevInterpolant>(
      ChebyshevInterpolant::adaptive(psi, 0.0, r, tol, 8, max_degree));
  FieldTraits traits = u.traits();
  traits.support = Support::whole_space;
  RadialSurrogate out{ScalarField::radial(
                          [table, exterior, r, sv, n](double rho) {
                            const double e = exterior.at_radius(rho, n);
                            if (rho >= r) return e;
                            return e + std::pow((r - rho) * (r + rho), sv) * (*table)(rho);
                          },
                          traits),
                      table->error_estimate(), table->degree()};
  return out;
}

}  // namespace fracball
