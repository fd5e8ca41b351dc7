#pragma once

// Maximum-principle laboratory: the logarithmic counterexample family
// u_eps = (-ln(eps |x|))^{-alpha}, manufactured (u, c) and (u, b) pairs, and
// sampled checks of the weak, strong and fractional maximum principles.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "fracball/chebyshev.hpp"
#include "fracball/core_domain.hpp"
#include "fracball/errors.hpp"
#include "fracball/field.hpp"
#include "fracball/frac_operator.hpp"
#include "fracball/geometry.hpp"
#include "fracball/quadrature.hpp"
#include "fracball/solvers.hpp"

namespace fracball {

// ---------------------------------------------------------------------------
// Counterexample family

struct CounterexampleParams {
  int n = 3;
  double alpha = 1.0;
  double eps = 0.1;

  void validate() const {
    if (n < 3) throw DomainError("CounterexampleParams: n must be at least 3");
    if (!(alpha > 0.0)) throw DomainError("CounterexampleParams: alpha must be positive");
    if (!(eps > 0.0 && eps < std::exp(-1.0))) throw DomainError("CounterexampleParams: eps must lie in (0, 1/e)");
  }
  /// Radius up to which -ln(eps |x|) >= 1.
  double natural_radius() const { return std::exp(-1.0) / eps; }
};

namespace detail {

inline FieldTraits counterexample_traits(const CounterexampleParams& p) {
  FieldTraits t;
  t.radial = true;
  t.support = Support::ball;
  t.domain_radius = p.natural_radius();
  return t;
}

}  // namespace detail

/// u_eps(x) = (-ln(eps |x|))^{-alpha}, extended by u_eps(0) = 0, with
/// closed-form gradient and Laplacian.
inline ScalarField counterexample_u(const CounterexampleParams& p) {
  p.validate();
  const double a = p.alpha, le = -std::log(p.eps);
  const int n = p.n;
  return ScalarField::radial(
             [a, le](double rho) {
               if (rho == 0.0) return 0.0;
               return std::pow(le - std::log(rho), -a);
             },
             detail::counterexample_traits(p))
      .with_gradient([a, le](const Point& x) {
        const double rho = x.norm();
        if (rho == 0.0) throw SingularityError("counterexample_u: gradient is unbounded at the origin");
        const double L = le - std::log(rho);
        return x * (a * std::pow(L, -a - 1.0) / (rho * rho));
      })
      .with_laplacian([a, le, n](const Point& x) {
        const double rho = x.norm();
        if (rho == 0.0) throw SingularityError("counterexample_u: Laplacian is unbounded at the origin");
        const double L = le - std::log(rho);
        return a * std::pow(L, -a - 2.0) * ((a + 1.0) + (n - 2.0) * L) / (rho * rho);
      });
}

/// c_eps(x) = (alpha (alpha + 1) / L + alpha (n - 2)) / (|x|^2 L), L = -ln(eps |x|).
/// Carries a logarithmic profile so that norm integrals can follow the
/// origin singularity.
inline ScalarField counterexample_c(const CounterexampleParams& p) {
  p.validate();
  const double a = p.alpha, le = -std::log(p.eps);
  const int n = p.n;
  return ScalarField::radial(
             [a, le, n](double rho) {
               if (rho == 0.0) throw SingularityError("counterexample_c: singular at the origin");
               const double L = le - std::log(rho);
               return (a * (a + 1.0) / L + a * (n - 2.0)) / (rho * rho * L);
             },
             detail::counterexample_traits(p))
      .with_log_profile([a, le, n](double lambda) {
        const double L = le + lambda;
        return std::log(a * (a + 1.0) / L + a * (n - 2.0)) - std::log(L);
      }, 2.0);
}

struct CounterexampleResiduals {
  double closed_form_max = 0.0;
  double finite_difference_max = 0.0;
  int radii = 0;
};

/// max over rho_k = k / radii (k = 1..radii) of |-Delta u_eps + c_eps u_eps|,
/// once with the closed-form Laplacian and once with a fourth-order stencil
/// of step fd_relative_step * rho.
inline CounterexampleResiduals counterexample_residuals(const CounterexampleParams& p, int radii = 50,
                                                        double fd_relative_step = 1e-3) {
  auto u = counterexample_u(p);
  auto c = counterexample_c(p);
  CounterexampleResiduals out;
  out.radii = radii;
  for (int k = 1; k <= radii; ++k) {
    const double rho = static_cast<double>(k) / radii;
    const Point x = Point::unit(p.n, 0, rho);
    const double cu = c(x) * u(x);
    out.closed_form_max = std::max(out.closed_form_max, std::abs(-u.laplacian(x) + cu));
    const double fd = finite_difference_laplacian4(u, x, fd_relative_step * rho);
    out.finite_difference_max = std::max(out.finite_difference_max, std::abs(-fd + cu));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Experiment records

/// One row of a sweep: named numeric columns in output order plus named checks.
struct ExperimentRecord {
  std::vector<std::pair<std::string, double>> columns;
  std::vector<std::pair<std::string, bool>> checks;
  std::string error;

  void set(const std::string& name, double v) {
    for (auto& [k, val] : columns)
      if (k == name) {
        val = v;
        return;
      }
    columns.emplace_back(name, v);
  }
  void check(const std::string& name, bool ok) {
    for (auto& [k, val] : checks)
      if (k == name) {
        val = ok;
        return;
      }
    checks.emplace_back(name, ok);
  }
  double get(const std::string& name) const {
    for (const auto& [k, val] : columns)
      if (k == name) return val;
    throw DomainError("ExperimentRecord: no column " + name);
  }
  bool passed(const std::string& name) const {
    for (const auto& [k, val] : checks)
      if (k == name) return val;
    throw DomainError("ExperimentRecord: no check " + name);
  }
  bool ok() const {
    if (!error.empty()) return false;
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.second; });
  }
};

// ---------------------------------------------------------------------------
// Sampling

struct SamplingSpec {
  int radial_points = 200;
  int random_points = 1000;
  int boundary_points = 200;
  /// Tolerance for sign conclusions: 1e-9 for closed forms, 1e-5 for quadrature-backed fields.
  double tol = 1e-9;
  std::uint64_t seed = 0x5eed5eedULL;
};

struct SampleSet {
  std::vector<Point> interior;
  std::vector<Point> boundary;
};

namespace detail {

/// Uniform direction on S^{n-1} from normalised Gaussian coordinates.
template <class Rng>
Point random_direction(int n, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  for (;;) {
    Point w(n);
    for (int i = 0; i < n; ++i) w[i] = g(rng);
    const double len = w.norm();
    if (len > 1e-12) return w * (1.0 / len);
  }
}

/// +-e_i and +-(1, ..., 1) / sqrt(n).
inline std::vector<Point> grid_directions(int n) {
  std::vector<Point> dirs;
  for (int i = 0; i < n; ++i) {
    dirs.push_back(Point::unit(n, i, 1.0));
    dirs.push_back(Point::unit(n, i, -1.0));
  }
  Point diag(n);
  for (int i = 0; i < n; ++i) diag[i] = 1.0 / std::sqrt(static_cast<double>(n));
  dirs.push_back(diag);
  dirs.push_back(diag * -1.0);
  return dirs;
}

}  // namespace detail

/// Dense radial grid along fixed directions plus seeded uniform points in B_r;
/// boundary samples along the same directions plus seeded random directions.
inline SampleSet make_samples(int n, double r, const SamplingSpec& spec) {
  SampleSet s;
  const auto dirs = detail::grid_directions(n);
  s.interior.push_back(Point::zero(n));
  for (int k = 1; k < spec.radial_points; ++k) {
    const double rho = r * k / spec.radial_points;
    for (const Point& w : dirs) s.interior.push_back(rho * w);
  }
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int k = 0; k < spec.random_points; ++k) {
    const Point w = detail::random_direction(n, rng);
    s.interior.push_back((r * std::pow(unif(rng), 1.0 / n)) * w);
  }
  for (const Point& w : dirs) s.boundary.push_back(r * w);
  for (int k = 0; k < spec.boundary_points; ++k) s.boundary.push_back(r * detail::random_direction(n, rng));
  return s;
}

// ---------------------------------------------------------------------------
// Verdicts

enum class MPStatus {
  holds,                // hypotheses satisfied and conclusion observed
  fails,                // hypotheses (incl. thresholds) satisfied, conclusion violated
  above_threshold,      // hypothesis norms exceed the recorded thresholds
  hypothesis_violated,  // boundary data or differential inequality violated
  critical_case,        // theorem not applicable at this exponent
  vacuous,              // quantitative bound l m <= 0
};

inline const char* to_string(MPStatus s) {
  switch (s) {
    case MPStatus::holds:
      return "HOLDS";
    case MPStatus::fails:
      return "FAILS";
    case MPStatus::above_threshold:
      return "ABOVE_THRESHOLD";
    case MPStatus::hypothesis_violated:
      return "HYPOTHESIS_VIOLATED";
    case MPStatus::critical_case:
      return "CRITICAL_CASE";
    case MPStatus::vacuous:
      return "VACUOUS";
  }
  return "UNKNOWN";
}

struct MPVerdict {
  std::string theorem;
  std::map<std::string, double> hypothesis_norms;
  std::map<std::string, double> thresholds;
  double interior_min = 0.0;
  double interior_max = 0.0;
  double boundary_min = 0.0;
  double residual_max = 0.0;
  bool hypotheses_hold = false;
  bool below_thresholds = false;
  bool conclusion_holds = false;
  std::optional<double> quantitative_bound;
  MPStatus status = MPStatus::hypothesis_violated;
  std::string note;
};

/// Best constant S_n in ||grad v||_2^2 >= S_n ||v||_{2n/(n-2)}^2 on H^1_0:
/// S_n = pi n (n - 2) (Gamma(n/2) / Gamma(n))^{2/n}.
inline double sobolev_constant(int n) {
  if (n < 3) throw DomainError("sobolev_constant: n must be at least 3");
  return std::numbers::pi * n * (n - 2.0) * std::pow(std::tgamma(0.5 * n) / std::tgamma(static_cast<double>(n)), 2.0 / n);
}

/// Sufficient smallness constants: ||c^-||_{L^{n/2}} < S_n for the zero-order
/// weak principle and ||b||_{L^n} < sqrt(S_n) for the drift version.
struct MPThresholds {
  double zero_order = 0.0;
  double drift = 0.0;

  static MPThresholds sobolev(int n) {
    const double S = sobolev_constant(n);
    return {S, std::sqrt(S)};
  }
};

namespace detail {

struct SampleStats {
  double interior_min = std::numeric_limits<double>::infinity();
  double interior_max = -std::numeric_limits<double>::infinity();
  double boundary_min = std::numeric_limits<double>::infinity();
};

inline SampleStats sample_extrema(const ScalarField& u, const SampleSet& s) {
  SampleStats st;
  for (const Point& x : s.interior) {
    const double v = u(x);
    st.interior_min = std::min(st.interior_min, v);
    st.interior_max = std::max(st.interior_max, v);
  }
  for (const Point& x : s.boundary) st.boundary_min = std::min(st.boundary_min, u(x));
  return st;
}

inline double laplacian_or_fd(const ScalarField& u, const Point& x) {
  if (u.has_laplacian()) return u.laplacian(x);
  return finite_difference_laplacian4(u, x, 1e-3);
}

/// min and max of L u over the interior samples, skipping singular points.
/// Returns {min residual / scale, max |residual|}.
template <class Operator>
std::pair<double, double> residual_range(const SampleSet& s, Operator&& op) {
  double worst_negative = 0.0, largest = 0.0;
  for (const Point& x : s.interior) {
    try {
      const auto [value, scale] = op(x);
      largest = std::max(largest, std::abs(value));
      worst_negative = std::min(worst_negative, value / (1.0 + scale));
    } catch (const SingularityError&) {
    }
  }
  return {worst_negative, largest};
}

}  // namespace detail

/// Weak maximum principle check for -Delta u + c u >= 0 in B_r, u >= 0 on the sphere.
inline MPVerdict check_weak_mp(const ScalarField& u, const ScalarField& c, const BallDomain& dom,
                               const MPThresholds& thresholds, const QuadSpec& q = QuadSpec{}.with_tol(1e-8, 1e-8),
                               const SamplingSpec& sampling = {}) {
  const int n = dom.dim();
  MPVerdict v;
  v.theorem = "weak-zero-order";
  const double p = 0.5 * n;
  const QuadResult cm = lp_norm(negative_part(c), dom, p, q);
  v.hypothesis_norms["c_minus_Ln2"] = cm.value;
  v.thresholds["c_minus_Ln2"] = thresholds.zero_order;
  v.below_thresholds = cm.value < thresholds.zero_order;

  const SampleSet s = make_samples(n, dom.radius(), sampling);
  const auto st = detail::sample_extrema(u, s);
  v.interior_min = st.interior_min;
  v.interior_max = st.interior_max;
  v.boundary_min = st.boundary_min;
  const auto [neg, largest] = detail::residual_range(s, [&](const Point& x) {
    const double lap = detail::laplacian_or_fd(u, x);
    const double cu = c(x) * u(x);
    return std::pair<double, double>{-lap + cu, std::abs(lap) + std::abs(cu)};
  });
  v.residual_max = largest;
  v.hypotheses_hold = st.boundary_min >= -sampling.tol && neg >= -sampling.tol;
  v.conclusion_holds = st.interior_min >= -sampling.tol;
  if (!v.hypotheses_hold) {
    v.status = MPStatus::hypothesis_violated;
    v.note = st.boundary_min < -sampling.tol ? "boundary data negative" : "differential inequality violated";
  } else if (!v.below_thresholds) {
    v.status = MPStatus::above_threshold;
  } else {
    v.status = v.conclusion_holds ? MPStatus::holds : MPStatus::fails;
  }
  return v;
}

/// Weak maximum principle check with drift for -Delta u + b . grad u >= 0 in B_r, u >= 0 on the sphere.
inline MPVerdict check_weak_mp(const ScalarField& u, const VectorField& b, const BallDomain& dom,
                               const MPThresholds& thresholds, const QuadSpec& q = QuadSpec{}.with_tol(1e-8, 1e-8),
                               const SamplingSpec& sampling = {}, Symmetry magnitude_symmetry = Symmetry::none) {
  if (!u.has_gradient()) throw DomainError("check_weak_mp: u needs a closed-form gradient for drift checks");
  const int n = dom.dim();
  MPVerdict v;
  v.theorem = "weak-drift";
  const QuadResult bn = vector_lp_norm(b, dom, n, q, magnitude_symmetry);
  v.hypothesis_norms["b_Ln"] = bn.value;
  v.thresholds["b_Ln"] = thresholds.drift;
  v.below_thresholds = bn.value < thresholds.drift;

  const SampleSet s = make_samples(n, dom.radius(), sampling);
  const auto st = detail::sample_extrema(u, s);
  v.interior_min = st.interior_min;
  v.interior_max = st.interior_max;
  v.boundary_min = st.boundary_min;
  const auto [neg, largest] = detail::residual_range(s, [&](const Point& x) {
    const double lap = detail::laplacian_or_fd(u, x);
    const double bg = dot(b(x), u.gradient(x));
    return std::pair<double, double>{-lap + bg, std::abs(lap) + std::abs(bg)};
  });
  v.residual_max = largest;
  v.hypotheses_hold = st.boundary_min >= -sampling.tol && neg >= -sampling.tol;
  v.conclusion_holds = st.interior_min >= -sampling.tol;
  if (!v.hypotheses_hold) {
    v.status = MPStatus::hypothesis_violated;
    v.note = st.boundary_min < -sampling.tol ? "boundary data negative" : "differential inequality violated";
  } else if (!v.below_thresholds) {
    v.status = MPStatus::above_threshold;
  } else {
    v.status = v.conclusion_holds ? MPStatus::holds : MPStatus::fails;
  }
  return v;
}

namespace detail {

/// Fixed quasi-uniform directions on S^{n-1} (Fibonacci lattice for n = 3).
inline std::vector<Point> envelope_directions(int n, int count) {
  std::vector<Point> dirs;
  if (n == 3) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
      const double z = 1.0 - 2.0 * (k + 0.5) / count;
      const double rxy = std::sqrt(1.0 - z * z);
      dirs.push_back(Point{rxy * std::cos(golden * k), rxy * std::sin(golden * k), z});
    }
    return dirs;
  }
  dirs = grid_directions(n);
  std::mt19937_64 rng(17);
  while (static_cast<int>(dirs.size()) < count) dirs.push_back(random_direction(n, rng));
  return dirs;
}

}  // namespace detail

/// Radial envelope rho -> max_w c^+(rho w) over fixed directions; c^+ itself
/// when c is radial.
inline ScalarField radial_positive_envelope(const ScalarField& c, int n, int directions = 200) {
  if (c.is_radial()) {
    return ScalarField::radial([c, n](double rho) { return std::max(c.at_radius(rho, n), 0.0); });
  }
  auto dirs = std::make_shared<const std::vector<Point>>(detail::envelope_directions(n, directions));
  return ScalarField::radial([c, dirs](double rho) {
    double m = 0.0;
    for (const Point& w : *dirs) m = std::max(m, c(rho * w));
    return m;
  });
}

/// Quantitative strong maximum principle: u >= l m with l = 1 - ||f||_inf, -Delta f = c^+ in B_r,
/// f = 0 on the sphere. Requires p > n/2; at or below the critical exponent the
/// verdict is CRITICAL_CASE and records the observed interior minimum.
inline MPVerdict strong_mp_bound(const ScalarField& u, const ScalarField& c, double m, double p,
                                 const BallDomain& dom, const MPThresholds& thresholds,
                                 const QuadSpec& q = QuadSpec{}.with_tol(1e-8, 1e-8),
                                 const SamplingSpec& sampling = {}) {
  const int n = dom.dim();
  MPVerdict v;
  v.theorem = "strong-zero-order";
  const SampleSet s = make_samples(n, dom.radius(), sampling);
  const auto st = detail::sample_extrema(u, s);
  v.interior_min = st.interior_min;
  v.interior_max = st.interior_max;
  v.boundary_min = st.boundary_min;
  const auto [neg, largest] = detail::residual_range(s, [&](const Point& x) {
    const double lap = detail::laplacian_or_fd(u, x);
    const double cu = c(x) * u(x);
    return std::pair<double, double>{-lap + cu, std::abs(lap) + std::abs(cu)};
  });
  v.residual_max = largest;
  v.hypotheses_hold = m > 0.0 && st.boundary_min >= m - sampling.tol && neg >= -sampling.tol;

  if (!(p > 0.5 * n)) {
    v.status = MPStatus::critical_case;
    v.conclusion_holds = st.interior_min > sampling.tol;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "p <= n/2: no positive lower bound l m is available; observed interior minimum %.6g against "
                  "boundary minimum %.6g",
                  st.interior_min, st.boundary_min);
    v.note = buf;
    return v;
  }
  const QuadResult cm = lp_norm(negative_part(c), dom, 0.5 * n, q);
  const QuadResult cp = lp_norm(c, dom, p, q);
  v.hypothesis_norms["c_minus_Ln2"] = cm.value;
  v.hypothesis_norms["c_Lp"] = cp.value;
  v.thresholds["c_minus_Ln2"] = thresholds.zero_order;

  const ScalarField f = solve_radial_poisson(radial_positive_envelope(c, n), dom.radius(), n);
  const double fmax = f(Point::zero(n));
  const double l = 1.0 - fmax;
  v.hypothesis_norms["f_sup"] = fmax;
  v.quantitative_bound = l * m;
  v.below_thresholds = cm.value < thresholds.zero_order && l > 0.0;
  v.conclusion_holds = st.interior_min >= l * m - sampling.tol;
  if (!v.hypotheses_hold) {
    v.status = MPStatus::hypothesis_violated;
    v.note = "boundary data below m or differential inequality violated";
  } else if (!(l > 0.0)) {
    v.status = MPStatus::vacuous;
    v.note = "bound vacuous at this norm: ||f||_inf >= 1";
  } else if (!v.below_thresholds) {
    v.status = MPStatus::above_threshold;
  } else {
    v.status = v.conclusion_holds ? MPStatus::holds : MPStatus::fails;
  }
  return v;
}

/// Strong maximum principle with drift: -Delta u + b . grad u >= 0, u >= m > 0 on the sphere,
/// conclusion u >= m.
inline MPVerdict strong_mp_drift(const ScalarField& u, const VectorField& b, double m, const BallDomain& dom,
                                 const MPThresholds& thresholds, const QuadSpec& q = QuadSpec{}.with_tol(1e-8, 1e-8),
                                 const SamplingSpec& sampling = {}, Symmetry magnitude_symmetry = Symmetry::none) {
  MPVerdict v = check_weak_mp(linear_combination(1.0, u, -m, ScalarField::constant(1.0)), b, dom, thresholds, q,
                              sampling, magnitude_symmetry);
  v.theorem = "strong-drift";
  v.interior_min += m;
  v.interior_max += m;
  v.boundary_min += m;
  v.quantitative_bound = m;
  v.hypotheses_hold = v.hypotheses_hold && m > 0.0;
  if (!(m > 0.0)) {
    v.status = MPStatus::hypothesis_violated;
    v.note = "m must be positive";
  }
  return v;
}

// ---------------------------------------------------------------------------
// Manufactured pairs

/// c = Delta u / u, so that -Delta u + c u = 0. u must be nonvanishing with a
/// closed-form Laplacian.
inline ScalarField manufactured_zero_order(const ScalarField& u, int n = 3, double r = 1.0) {
  if (!u.has_laplacian()) throw DomainError("manufactured_zero_order: u needs a closed-form Laplacian");
  SamplingSpec probe;
  probe.radial_points = 50;
  probe.random_points = 200;
  const SampleSet s = make_samples(n, r, probe);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto* set : {&s.interior, &s.boundary})
    for (const Point& x : *set) {
      lo = std::min(lo, u(x));
      hi = std::max(hi, u(x));
    }
  if (!(lo > 0.0 || hi < 0.0)) throw DomainError("manufactured_zero_order: u vanishes in the ball");
  FieldTraits t;
  t.radial = u.is_radial();
  return ScalarField(
      [u](const Point& x) {
        const double ux = u(x);
        if (ux == 0.0) throw DomainError("manufactured_zero_order: u vanishes");
        return u.laplacian(x) / ux;
      },
      t);
}

struct ManufacturedDrift {
  VectorField b;
  double norm_Ln = 0.0;
  bool radial_magnitude = false;
};

/// b = Delta u grad u / |grad u|^2, so that -Delta u + b . grad u = 0; for
/// radial u this is (Delta u / u'(rho)) x / |x|. Throws AdmissibilityError when
/// the gradient vanishes on an interior interval or b is not in L^n(B_r).
inline ManufacturedDrift manufactured_drift(const ScalarField& u, int n = 3, double r = 1.0,
                                            const QuadSpec& q = QuadSpec{}.with_tol(1e-8, 1e-8)) {
  if (!u.has_gradient() || !u.has_laplacian())
    throw DomainError("manufactured_drift: u needs closed-form gradient and Laplacian");
  const BallDomain dom(n, r);
  ManufacturedDrift out{VectorField([u](const Point& x) {
                          const Point g = u.gradient(x);
                          const double g2 = g.norm2();
                          if (g2 == 0.0) return Point(x.dim());
                          return g * (u.laplacian(x) / g2);
                        }),
                        0.0, u.is_radial()};
  if (u.is_radial()) {
    // Radial derivative must not vanish on an interval of (0, r).
    int zeros = 0;
    for (int k = 1; k < 400; ++k) {
      const double rho = r * k / 400.0;
      if (u.gradient(Point::unit(n, 0, rho)).norm() == 0.0) ++zeros;
      else zeros = 0;
      if (zeros >= 2) throw AdmissibilityError("manufactured_drift: u' vanishes on an interval", 0.0, false);
    }
    auto magnitude = [&](double rho) {
      const Point x = Point::unit(n, 0, rho);
      return std::pow(out.b(x).norm(), n) * std::pow(rho, n - 1);
    };
    // Divergence probe near the origin: a drift in L^n has a vanishing contribution there.
    auto piece = [&](double a, double bnd) {
      return integrate_interval(magnitude, a, bnd, QuadSpec{}.with_tol(1e-12, 1e-10)).value;
    };
    const double inner = piece(1e-12, 1e-6);
    const double total = piece(1e-6, r) + inner;
    if (inner > 1e-3 * std::max(1.0, total))
      throw AdmissibilityError("manufactured_drift: b is not in L^n (divergent at the origin)",
                               std::pow(sphere_area(n) * total, 1.0 / n), false);
    try {
      out.norm_Ln = vector_lp_norm(out.b, dom, n, q, Symmetry::radial).value;
    } catch (const ConvergenceError& e) {
      throw AdmissibilityError("manufactured_drift: b is not in L^n", e.partial_value(), false);
    }
    return out;
  }
  SamplingSpec probe;
  probe.radial_points = 50;
  probe.random_points = 500;
  const SampleSet s = make_samples(n, r, probe);
  double gmin = std::numeric_limits<double>::infinity();
  for (const auto* set : {&s.interior, &s.boundary})
    for (const Point& x : *set) gmin = std::min(gmin, u.gradient(x).norm());
  if (!(gmin > 1e-6))
    throw AdmissibilityError("manufactured_drift: grad u vanishes in the ball, b is unbounded", 0.0, false);
  try {
    out.norm_Ln = vector_lp_norm(out.b, dom, n, q).value;
  } catch (const ConvergenceError& e) {
    throw AdmissibilityError("manufactured_drift: b is not in L^n", e.partial_value(), false);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Critical sweep

/// Per eps: ||c_eps||_{L^{n/2}(B_1)} with its error, u_eps(0), the boundary
/// minimum, the largest closed-form residual and the sampled interior minimum.
inline std::vector<ExperimentRecord> critical_sweep(int n, double alpha, const std::vector<double>& eps_list,
                                                    const QuadSpec& q = QuadSpec{}.with_tol(1e-10, 1e-8),
                                                    const SamplingSpec& sampling = {}) {
  if (eps_list.empty()) throw DomainError("critical_sweep: empty eps list");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    CounterexampleParams{n, alpha, eps_list[i]}.validate();
    if (i > 0 && !(eps_list[i] < eps_list[i - 1]))
      throw DomainError("critical_sweep: eps list must be strictly decreasing");
  }
  const BallDomain dom(n, 1.0);
  const SampleSet s = make_samples(n, 1.0, sampling);
  std::vector<ExperimentRecord> rows;
  for (double eps : eps_list) {
    const CounterexampleParams p{n, alpha, eps};
    ExperimentRecord rec;
    rec.set("eps", eps);
    try {
      const auto u = counterexample_u(p);
      const auto c = counterexample_c(p);
      // Tail of the log-variable integrand decays like w^{-n/2}.
      QuadSpec spec = q.with_endpoints(std::nullopt, 2.0 - 0.5 * n);
      const QuadResult norm = lp_norm(c, dom, 0.5 * n, spec);
      rec.set("norm_c_Lnhalf", norm.value);
      rec.set("norm_error", norm.err_estimate);
      rec.set("u_at_origin", u(Point::zero(n)));
      const auto st = detail::sample_extrema(u, s);
      rec.set("boundary_min", st.boundary_min);
      rec.set("residual_max", counterexample_residuals(p).closed_form_max);
      rec.set("interior_min", st.interior_min);
      rec.check("norm_converged", norm.converged);
      rec.check("norm_relative_error", norm.err_estimate <= 1e-6 * norm.value);
      rec.check("u_origin_zero", u(Point::zero(n)) == 0.0);
      rec.check("boundary_positive", st.boundary_min > 0.0);
      rec.check("boundary_exact", std::abs(st.boundary_min - std::pow(-std::log(eps), -alpha)) <= 1e-14);
      rec.check("weak_mp_holds", st.interior_min >= -sampling.tol);
    } catch (const Error& e) {
      rec.error = e.what();
    }
    rows.push_back(std::move(rec));
  }
  return rows;
}

struct SweepSummary {
  bool all_rows_ok = false;
  bool strictly_decreasing = false;
  bool consecutive_ratios_below_one = false;
  double last_over_first = 0.0;
  bool halved = false;
  bool strong_mp_fails_everywhere = false;
  std::optional<std::size_t> first_failing_row;
};

/// Invariants of a critical sweep: decreasing norms, last/first below 1/2, and
/// for every row boundary_min > 0 = interior_min = u(0).
inline SweepSummary summarize_sweep(const std::vector<ExperimentRecord>& rows) {
  SweepSummary s;
  s.all_rows_ok = true;
  s.strictly_decreasing = true;
  s.strong_mp_fails_everywhere = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].ok()) {
      s.all_rows_ok = false;
      if (!s.first_failing_row) s.first_failing_row = i;
      s.strictly_decreasing = false;
      s.strong_mp_fails_everywhere = false;
      continue;
    }
    if (i > 0 && rows[i - 1].ok() && !(rows[i].get("norm_c_Lnhalf") < rows[i - 1].get("norm_c_Lnhalf"))) {
      s.strictly_decreasing = false;
      if (!s.first_failing_row) s.first_failing_row = i;
    }
    const bool witness = rows[i].get("boundary_min") > 0.0 && rows[i].get("u_at_origin") == 0.0 &&
                         rows[i].get("interior_min") <= 0.0;
    s.strong_mp_fails_everywhere = s.strong_mp_fails_everywhere && witness;
  }
  s.consecutive_ratios_below_one = s.strictly_decreasing;
  if (!rows.empty() && rows.front().ok() && rows.back().ok()) {
    s.last_over_first = rows.back().get("norm_c_Lnhalf") / rows.front().get("norm_c_Lnhalf");
    s.halved = s.last_over_first < 0.5;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Fractional checks

struct FractionalMPInput {
  int n = 3;
  double r = 1.0;
  FracOrder s{0.5};
  std::optional<ScalarField> exterior;  // g >= 0 outside the ball
  std::optional<ScalarField> forcing;   // h >= 0 inside the ball
  std::optional<ScalarField> zero_order;
  std::optional<VectorField> drift;
  Symmetry drift_magnitude_symmetry = Symmetry::none;
};

/// Solves with the representation formulas, samples the interior sign and
/// reports the perturbation norms ||c^-||_{L^{n/2s}}, ||b||_{W^{1,n/2s}} and
/// ||b/d||_{L^{n/2s}}. With exterior minimum m > 0 and h >= 0 the conclusion
/// also requires u >= m.
inline MPVerdict fractional_mp_check(const FractionalMPInput& in, const SamplingSpec& sampling,
                                     const QuadSpec& q = QuadSpec{}.with_tol(1e-10)) {
  const int n = in.n;
  const BallDomain dom(n, in.r);
  if (in.drift) in.s.require_drift_range();
  if (!in.exterior && !in.forcing) throw DomainError("fractional_mp_check: need exterior data or forcing");
  MPVerdict v;
  v.theorem = "fractional";
  const double p = in.s.critical_exponent(n);
  const QuadSpec norm_q = QuadSpec{}.with_tol(1e-7, 1e-7);
  if (in.zero_order) v.hypothesis_norms["c_minus_Ln2s"] = lp_norm(negative_part(*in.zero_order), dom, p, norm_q).value;
  if (in.drift) {
    v.hypothesis_norms["b_W1_n2s"] =
        sobolev_w1p_norm(*in.drift, dom, p, norm_q, true, in.drift_magnitude_symmetry).value;
    v.hypothesis_norms["b_over_d_Ln2s"] =
        drift_over_distance_norm(*in.drift, dom, p, norm_q, in.drift_magnitude_symmetry).value;
  }

  const SampleSet s = make_samples(n, in.r, sampling);
  // Exterior samples along the boundary directions out to 10 r.
  double ext_min = std::numeric_limits<double>::infinity();
  if (in.exterior) {
    for (const Point& w : s.boundary)
      for (double t : {1.0, 1.1, 1.5, 2.0, 4.0, 10.0}) ext_min = std::min(ext_min, (*in.exterior)(w * t));
  } else {
    ext_min = 0.0;
  }
  double h_min = std::numeric_limits<double>::infinity();
  if (in.forcing)
    for (const Point& x : s.interior) h_min = std::min(h_min, (*in.forcing)(x));

  std::vector<ScalarField> parts;
  bool radial = true;
  if (in.exterior) {
    auto u = solve_dirichlet_fractional(*in.exterior, in.r, n, in.s, q);
    if (in.exterior->is_radial() && in.exterior->traits().support == Support::whole_space)
      parts.push_back(tabulate_radial(u, *in.exterior, in.r, n, in.s).field);
    else
      parts.push_back(u), radial = false;
  }
  if (in.forcing) {
    auto u = solve_forced_fractional(*in.forcing, in.r, n, in.s, q);
    if (in.forcing->is_radial())
      parts.push_back(tabulate_radial(u, ScalarField::constant(0.0), in.r, n, in.s).field);
    else
      parts.push_back(u), radial = false;
  }
  ScalarField u = parts.size() == 1 ? parts[0] : linear_combination(1.0, parts[0], 1.0, parts[1]);
  (void)radial;

  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const Point& x : s.interior) {
    const double ux = u(x);
    lo = std::min(lo, ux);
    hi = std::max(hi, ux);
  }
  v.interior_min = lo;
  v.interior_max = hi;
  v.boundary_min = ext_min;
  v.residual_max = 0.0;
  v.hypotheses_hold = ext_min >= -sampling.tol && (!in.forcing || h_min >= -sampling.tol);
  v.below_thresholds = !in.zero_order && !in.drift;
  const double m = std::max(ext_min, 0.0);
  v.quantitative_bound = m;
  v.conclusion_holds = lo >= m - sampling.tol;
  if (!v.hypotheses_hold) {
    v.status = MPStatus::hypothesis_violated;
    v.note = "negative exterior data or forcing";
  } else if (!v.below_thresholds) {
    v.status = v.conclusion_holds ? MPStatus::holds : MPStatus::above_threshold;
    v.note = "perturbation norms recorded; the unperturbed solve is sampled";
  } else {
    v.status = v.conclusion_holds ? MPStatus::holds : MPStatus::fails;
  }
  return v;
}

struct MollificationCheck {
  double eps = 0.0;
  double surrogate_error = 0.0;
  std::vector<Point> points;
  std::vector<double> values;
  std::vector<double> errors;
  double max_value = 0.0;
  double bound = 0.0;
  bool holds = false;
};

/// w solves (-Delta)^s w = -1 in B_1, w = 0 outside; the mollified w_eps
/// should satisfy (-Delta)^s w_eps <= 0 in B_{1-eps}. Evaluated at `count`
/// fixed points of B_{0.9}.
inline MollificationCheck mollification_sign_check(int n, const FracOrder& s, double eps, int count = 10,
                                                   double bound = 1e-2,
                                                   const QuadSpec& q = QuadSpec{}.with_tol(1e-6)) {
  if (!(eps > 0.0 && eps < 0.1)) throw DomainError("mollification_sign_check: eps must lie in (0, 0.1)");
  const ScalarField h = ScalarField::constant(-1.0);
  const auto w = solve_forced_fractional(h, 1.0, n, s, QuadSpec{}.with_tol(1e-11));
  const auto tab = tabulate_radial(w, ScalarField::constant(0.0), 1.0, n, s);
  const ScalarField w_exact = mollify(tab.field, eps, QuadSpec{}.with_tol(1e-11));
  // Radial Chebyshev table of w_eps, pieces ending at the edges of the smoothing layer.
  auto table = std::make_shared<const PiecewiseChebyshev>(
      [&](double rho) { return w_exact(Point::unit(n, 0, rho)); },
      std::vector<double>{0.0, 0.5, 1.0 - 2.0 * eps, 1.0 - eps, 1.0, 1.0 + eps}, 1e-10);
  FieldTraits traits = w_exact.traits();
  traits.kinks.push_back({1.0, 1.0});
  const double top = 1.0 + eps;
  const ScalarField w_eps =
      ScalarField::radial([table, top](double rho) { return rho >= top ? 0.0 : (*table)(rho); }, traits);
  MollificationCheck out;
  out.surrogate_error = table->error_estimate();
  out.eps = eps;
  out.bound = bound;
  out.max_value = -std::numeric_limits<double>::infinity();
  const auto dirs = detail::envelope_directions(n, count);
  for (int k = 0; k < count; ++k) {
    const double rho = 0.85 * k / std::max(1, count - 1);
    const Point x = rho * dirs[static_cast<std::size_t>(k)];
    const QuadResult r = pv_fractional_laplacian(w_eps, x, s, {}, q);
    out.points.push_back(x);
    out.values.push_back(r.value);
    out.errors.push_back(r.err_estimate);
    out.max_value = std::max(out.max_value, r.value);
  }
  out.holds = out.max_value <= bound;
  return out;
}

// ---------------------------------------------------------------------------
// Falsification corpus

enum class MPTheorem { weak_zero_order, strong_zero_order, weak_drift, strong_drift };

inline const char* to_string(MPTheorem t) {
  switch (t) {
    case MPTheorem::weak_zero_order:
      return "weak-zero-order";
    case MPTheorem::strong_zero_order:
      return "strong-zero-order";
    case MPTheorem::weak_drift:
      return "weak-drift";
    case MPTheorem::strong_drift:
      return "strong-drift";
  }
  return "unknown";
}

/// A named closed-form u from which the coefficient is manufactured.
struct ManufacturedFamily {
  std::string name;
  bool drift = false;             // drift pair (b) instead of zero-order (c)
  std::function<ScalarField()> u;
  /// Explicit coefficient (e.g. the counterexample c_eps); manufactured from u when empty.
  std::function<ScalarField()> c;
  double strong_p = 3.0;  // exponent for the strong zero-order check
};

namespace detail {

inline ScalarField quadratic_field(double a0, const Point& lin, double quad_coeff) {
  const int n = lin.dim();
  FieldTraits t;
  t.radial = lin.norm() == 0.0;
  return ScalarField([=](const Point& x) { return a0 + dot(lin, x) + quad_coeff * x.norm2(); }, t)
      .with_gradient([=](const Point& x) { return lin + x * (2.0 * quad_coeff); })
      .with_laplacian([=](const Point&) { return 2.0 * n * quad_coeff; });
}

inline ScalarField radial_sinc(double k, double sign) {
  // sin(k rho) / (k rho) solves -Delta u = k^2 u in R^3.
  auto prof = [k, sign](double rho) { return rho == 0.0 ? sign : sign * std::sin(k * rho) / (k * rho); };
  auto dprof = [k, sign](double rho) {
    return sign * (k * rho * std::cos(k * rho) - std::sin(k * rho)) / (k * rho * rho);
  };
  return ScalarField::radial(prof)
      .with_gradient([dprof](const Point& x) {
        const double rho = x.norm();
        if (rho == 0.0) return Point(x.dim());
        return x * (dprof(rho) / rho);
      })
      .with_laplacian([prof, k](const Point& x) { return -k * k * prof(x.norm()); });
}

}  // namespace detail

/// The manufactured corpus in R^3: 17 zero-order and 9 drift families.
inline std::vector<ManufacturedFamily> manufactured_corpus() {
  using detail::quadratic_field;
  std::vector<ManufacturedFamily> f;
  const Point o{0.0, 0.0, 0.0};
  f.push_back({"constant", false, [] { return ScalarField::constant(1.0); }, {}, 3.0});
  f.push_back({"paraboloid", false, [o] { return quadratic_field(1.0, o, 1.0); }, {}, 3.0});
  f.push_back({"exponential-x1", false,
               [] {
                 return ScalarField([](const Point& x) { return std::exp(x[0]); })
                     .with_gradient([](const Point& x) { return Point::unit(x.dim(), 0, std::exp(x[0])); })
                     .with_laplacian([](const Point& x) { return std::exp(x[0]); });
               },
               {}, 3.0});
  f.push_back({"gaussian", false,
               [] {
                 return ScalarField::radial([](double rho) { return std::exp(-rho * rho); })
                     .with_gradient([](const Point& x) { return x * (-2.0 * std::exp(-x.norm2())); })
                     .with_laplacian([](const Point& x) {
                       const double r2 = x.norm2();
                       return (4.0 * r2 - 6.0) * std::exp(-r2);
                     });
               },
               {}, 3.0});
  f.push_back({"dome-2", false, [o] { return quadratic_field(2.0, o, -1.0); }, {}, 3.0});
  f.push_back({"dome-5", false, [o] { return quadratic_field(5.0, o, -1.0); }, {}, 3.0});
  for (double k : {0.5, 1.0, 1.4, 2.5}) {
    f.push_back({"helmholtz-k" + std::to_string(k).substr(0, 3), false, [k] { return detail::radial_sinc(k, 1.0); },
                 {}, 3.0});
  }
  for (double k : {4.0, 5.0}) {
    // -sin(k rho) / (k rho) changes sign inside the ball, so c = -k^2 is given explicitly.
    f.push_back({"helmholtz-flipped-k" + std::to_string(k).substr(0, 3), false,
                 [k] { return detail::radial_sinc(k, -1.0); }, [k] { return ScalarField::constant(-k * k); }, 3.0});
  }
  f.push_back({"harmonic-saddle", false,
               [] {
                 return ScalarField([](const Point& x) { return 2.0 + x[0] * x[1]; })
                     .with_gradient([](const Point& x) { return Point{x[1], x[0], 0.0}; })
                     .with_laplacian([](const Point&) { return 0.0; });
               },
               {}, 3.0});
  f.push_back({"harmonic-quadratic", false,
               [] {
                 return ScalarField([](const Point& x) { return 1.5 + x[0] * x[0] - x[1] * x[1] + 0.5 * x[2]; })
                     .with_gradient([](const Point& x) { return Point{2.0 * x[0], -2.0 * x[1], 0.5}; })
                     .with_laplacian([](const Point&) { return 0.0; });
               },
               {}, 3.0});
  f.push_back({"sine-shift", false,
               [] {
                 return ScalarField([](const Point& x) { return 3.0 + std::sin(x[0]); })
                     .with_gradient([](const Point& x) { return Point::unit(x.dim(), 0, std::cos(x[0])); })
                     .with_laplacian([](const Point& x) { return -std::sin(x[0]); });
               },
               {}, 3.0});
  for (double eps : {0.1, 0.01}) {
    const CounterexampleParams p{3, 1.0, eps};
    f.push_back({"counterexample-eps" + std::string(eps == 0.1 ? "0.1" : "0.01"), false,
                 [p] { return counterexample_u(p); }, [p] { return counterexample_c(p); }, 1.5});
  }
  // Drift families.
  f.push_back({"tilted-paraboloid-0.2", true, [] { return quadratic_field(2.0, Point{1.0, 0.0, 0.0}, 0.2); }, {}});
  f.push_back({"tilted-paraboloid-0.4", true, [] { return quadratic_field(1.5, Point{1.0, 0.0, 0.0}, 0.4); }, {}});
  f.push_back({"tilted-paraboloid-0.45", true,
               [] { return quadratic_field(2.0, Point{0.6, -0.8, 0.0}, 0.45); }, {}});
  f.push_back({"axis-quadratic", true,
               [] {
                 return ScalarField([](const Point& x) { return 1.0 + x[0] + 0.3 * x[0] * x[0]; })
                     .with_gradient([](const Point& x) { return Point::unit(x.dim(), 0, 1.0 + 0.6 * x[0]); })
                     .with_laplacian([](const Point&) { return 0.6; });
               },
               {}});
  f.push_back({"exp-ramp", true,
               [] {
                 return ScalarField([](const Point& x) { return 2.0 + std::exp(x[0]) + x[1]; })
                     .with_gradient([](const Point& x) { return Point{std::exp(x[0]), 1.0, 0.0}; })
                     .with_laplacian([](const Point& x) { return std::exp(x[0]); });
               },
               {}});
  f.push_back({"harmonic-linear", true, [] { return quadratic_field(1.5, Point{1.0, 0.0, 0.0}, 0.0); }, {}});
  f.push_back({"negative-boundary", true, [] { return quadratic_field(0.0, Point{1.0, 0.0, 0.0}, 0.2); }, {}});
  f.push_back({"radial-square", true, [o] { return quadratic_field(0.0, o, 1.0); }, {}});
  f.push_back({"radial-exponential", true,
               [] {
                 return ScalarField::radial([](double rho) { return std::exp(rho * rho); })
                     .with_gradient([](const Point& x) { return x * (2.0 * std::exp(x.norm2())); })
                     .with_laplacian([](const Point& x) {
                       const double r2 = x.norm2();
                       return (6.0 + 4.0 * r2) * std::exp(r2);
                     });
               },
               {}});
  return f;
}

struct FalsificationEntry {
  std::string family;
  MPTheorem theorem = MPTheorem::weak_zero_order;
  std::optional<MPVerdict> verdict;
  std::string rejection;  // admissibility or construction failure
};

struct FalsificationReport {
  std::vector<FalsificationEntry> entries;
  std::size_t families = 0;
  std::size_t instances = 0;
  std::size_t below_threshold = 0;
  std::size_t rejected = 0;
  std::size_t falsified = 0;  // below thresholds, hypotheses hold, conclusion fails
  bool passed() const { return falsified == 0; }
};

/// Runs the weak and strong checks on every family; counts instances whose
/// hypotheses hold with norms below the thresholds but whose conclusion fails.
inline FalsificationReport falsification_harness(const std::vector<ManufacturedFamily>& corpus,
                                                 const MPThresholds& thresholds, const SamplingSpec& sampling = {},
                                                 const QuadSpec& q = QuadSpec{}.with_tol(1e-8, 1e-8)) {
  FalsificationReport rep;
  rep.families = corpus.size();
  const int n = 3;
  const BallDomain dom(n, 1.0);
  for (const ManufacturedFamily& fam : corpus) {
    const ScalarField u = fam.u();
    auto record = [&](MPTheorem th, auto&& run) {
      FalsificationEntry e;
      e.family = fam.name;
      e.theorem = th;
      try {
        e.verdict = run();
        ++rep.instances;
        if (e.verdict->below_thresholds && e.verdict->hypotheses_hold) {
          ++rep.below_threshold;
          if (!e.verdict->conclusion_holds) ++rep.falsified;
        }
      } catch (const DomainError& err) {
        e.rejection = err.what();
        ++rep.rejected;
      }
      rep.entries.push_back(std::move(e));
    };
    if (!fam.drift) {
      std::optional<ScalarField> c;
      std::string failure;
      try {
        c = fam.c ? fam.c() : manufactured_zero_order(u, n);
      } catch (const DomainError& err) {
        failure = err.what();
      }
      if (!c) {
        for (MPTheorem th : {MPTheorem::weak_zero_order, MPTheorem::strong_zero_order}) {
          rep.entries.push_back({fam.name, th, std::nullopt, failure});
          ++rep.rejected;
        }
        continue;
      }
      QuadSpec cq = q;
      if (c->has_log_profile()) cq = q.with_endpoints(std::nullopt, 2.0 - 0.5 * n);
      record(MPTheorem::weak_zero_order, [&] { return check_weak_mp(u, *c, dom, thresholds, cq, sampling); });
      record(MPTheorem::strong_zero_order, [&] {
        const auto st = detail::sample_extrema(u, make_samples(n, 1.0, sampling));
        return strong_mp_bound(u, *c, st.boundary_min, fam.strong_p, dom, thresholds, cq, sampling);
      });
    } else {
      std::optional<ManufacturedDrift> md;
      std::string failure;
      try {
        md = manufactured_drift(u, n, 1.0, q);
      } catch (const DomainError& err) {
        failure = err.what();
      }
      if (!md) {
        for (MPTheorem th : {MPTheorem::weak_drift, MPTheorem::strong_drift}) {
          rep.entries.push_back({fam.name, th, std::nullopt, failure});
          ++rep.rejected;
        }
        continue;
      }
      const Symmetry sym = md->radial_magnitude ? Symmetry::radial : Symmetry::none;
      record(MPTheorem::weak_drift, [&] { return check_weak_mp(u, md->b, dom, thresholds, q, sampling, sym); });
      record(MPTheorem::strong_drift, [&] {
        const auto st = detail::sample_extrema(u, make_samples(n, 1.0, sampling));
        return strong_mp_drift(u, md->b, st.boundary_min, dom, thresholds, q, sampling, sym);
      });
    }
  }
  return rep;
}

}  // namespace fracball
