#include <cmath>
#include <limits>
#include <numbers>

#include <gtest/gtest.h>

#include "fracball/quadrature.hpp"

using namespace fracball;

namespace {
constexpr double kPi = std::numbers::pi;
const double kInf = std::numeric_limits<double>::infinity();
}  // namespace

TEST(IntegrateInterval, SmoothPolynomialIsExact) {
  QuadSpec q;
  auto r = integrate_interval([](double t) { return t * t * t - 2.0 * t; }, -1.0, 2.0, q);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, (16.0 / 4.0 - 4.0) - (1.0 / 4.0 - 1.0), 1e-13);
}

TEST(IntegrateInterval, AlgebraicEndpointSingularities) {
  QuadSpec q;
  q.tol = 1e-11;
  for (double beta : {0.25, 0.5, 0.9}) {
    auto left = integrate_interval([beta](double t) { return std::pow(t, -beta); }, 0.0, 1.0,
                                   q.with_endpoints(beta, std::nullopt));
    EXPECT_TRUE(left.converged) << beta;
    EXPECT_NEAR(left.value, 1.0 / (1.0 - beta), 1e-10) << beta;
  }
  // At a right endpoint the integrand only sees the rounded abscissa, which
  // bounds the attainable accuracy by about (eps b)^{1 - beta}.
  for (double beta : {0.25, 0.5}) {
    auto right = integrate_interval([beta](double t) { return std::pow(2.0 - t, -beta); }, 0.0, 2.0,
                                    q.with_tol(1e-7).with_endpoints(std::nullopt, beta));
    EXPECT_NEAR(right.value, std::pow(2.0, 1.0 - beta) / (1.0 - beta), 1e-7) << beta;
  }
  // Hoelder-type right endpoint: (1 - t)^{3/4}.
  auto holder = integrate_interval([](double t) { return std::pow(1.0 - t, 0.75); }, 0.0, 1.0,
                                   q.with_endpoints(std::nullopt, -0.75));
  EXPECT_TRUE(holder.converged);
  EXPECT_NEAR(holder.value, 1.0 / 1.75, 1e-11);
}

TEST(IntegrateInterval, BothEndpointsHinted) {
  // B(1/2, 3/2) = pi / 2.
  QuadSpec q = QuadSpec{}.with_endpoints(0.5, -0.5);
  auto r = integrate_interval([](double t) { return std::sqrt((1.0 - t) / t); }, 0.0, 1.0, q);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, kPi / 2.0, 1e-10);
}

TEST(IntegrateInterval, LogarithmicEndpoint) {
  QuadSpec q;
  q.log_substitution = true;
  auto r = integrate_interval([](double t) { return std::log(t); }, 0.0, 1.0, q);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, -1.0, 1e-10);
  auto sq = integrate_interval([](double t) { return std::log(t) * std::log(t); }, 0.0, 1.0, q);
  EXPECT_NEAR(sq.value, 2.0, 1e-10);
  auto mixed = integrate_interval([](double t) { return std::log(t) / std::sqrt(t); }, 0.0, 1.0, q);
  EXPECT_NEAR(mixed.value, -4.0, 1e-9);
}

TEST(IntegrateInterval, InfiniteIntervals) {
  QuadSpec q;
  auto e = integrate_interval([](double t) { return std::exp(-t); }, 0.0, kInf, q);
  EXPECT_NEAR(e.value, 1.0, 1e-10);
  auto p = integrate_interval([](double t) { return std::pow(t, -2.5); }, 1.0, kInf, q);
  EXPECT_NEAR(p.value, 1.0 / 1.5, 1e-10);
  auto g = integrate_interval([](double t) { return std::exp(-t * t); }, -kInf, kInf, q);
  EXPECT_NEAR(g.value, std::sqrt(kPi), 1e-10);
  // Slow algebraic tail t^{-3/2}: compactified exponent 1/2 at infinity.
  auto slow = integrate_interval([](double t) { return std::pow(1.0 + t, -1.5); }, 0.0, kInf,
                                 q.with_endpoints(std::nullopt, 0.5));
  EXPECT_TRUE(slow.converged);
  EXPECT_NEAR(slow.value, 2.0, 1e-10);
  auto reversed = integrate_interval([](double t) { return std::exp(-t); }, kInf, 0.0, q);
  EXPECT_NEAR(reversed.value, -1.0, 1e-10);
}

TEST(IntegrateInterval, NonConvergenceIsFlagged) {
  QuadSpec q;
  q.tol = 1e-14;
  q.max_subdiv = 3;
  auto r = integrate_interval([](double t) { return std::pow(t, -0.9); }, 0.0, 1.0, q);
  EXPECT_FALSE(r.converged);
  EXPECT_GT(r.err_estimate, 0.0);
}

TEST(QuadSpec, ValidationRejectsBadSpecs) {
  QuadSpec q;
  q.tol = 0.0;
  EXPECT_THROW(q.validate(), DomainError);
  QuadSpec nonintegrable = QuadSpec{}.with_endpoints(1.0, std::nullopt);
  EXPECT_THROW(nonintegrable.validate(), DomainError);
}

TEST(IntegrateSphere, AreasAndSecondMoments) {
  QuadSpec q;
  auto one = [](const Point&) { return 1.0; };
  auto x1sq = [](const Point& w) { return w[0] * w[0]; };
  for (int n : {1, 2, 3}) {
    auto r = integrate_sphere(one, n, q);
    EXPECT_NEAR(r.value, sphere_area(n), 1e-10) << n;
    // By symmetry \int w_1^2 = |S^{n-1}| / n.
    auto m = integrate_sphere(x1sq, n, q);
    EXPECT_NEAR(m.value, sphere_area(n) / n, 1e-9) << n;
  }
  // Off-axis polar frame still integrates a non-symmetric integrand.
  QuadSpec tilted = q;
  tilted.axis = Point{0.3, 0.5, -0.2};
  auto m = integrate_sphere([](const Point& w) { return w[0] * w[0] + w[1]; }, 3, tilted);
  EXPECT_NEAR(m.value, 4.0 * kPi / 3.0, 1e-9);
}

TEST(IntegrateSphere, MonteCarloHigherDimensions) {
  QuadSpec q;
  q.tol = 1e-2;
  q.mc_samples = 100000;
  auto r = integrate_sphere([](const Point& w) { return w[0] * w[0]; }, 4, q);
  EXPECT_NEAR(r.value, sphere_area(4) / 4.0, 5.0 * r.err_estimate + 1e-12);
  auto again = integrate_sphere([](const Point& w) { return w[0] * w[0]; }, 4, q);
  EXPECT_EQ(r.value, again.value);  // seeded
}

TEST(IntegrateBall, PolarAboutOriginAndOffCentre) {
  QuadSpec q;
  BallDomain dom(3, 1.0);
  auto rho2 = [](const Point& x) { return x.norm2(); };
  auto centred = integrate_ball(rho2, dom, q, Symmetry::radial);
  EXPECT_NEAR(centred.value, 4.0 * kPi / 5.0, 1e-10);
  QuadSpec off = q;
  off.center = Point{0.3, 0.0, 0.0};
  auto shifted = integrate_ball(rho2, dom, off, Symmetry::axial);
  EXPECT_NEAR(shifted.value, 4.0 * kPi / 5.0, 1e-8);
  off.center = Point{0.2, -0.3, 0.1};
  auto general = integrate_ball([](const Point& x) { return x[0] * x[0] + x[2]; }, dom, off, Symmetry::none);
  EXPECT_NEAR(general.value, 4.0 * kPi / 15.0, 1e-8);
}

TEST(IntegrateBall, SingularAtPolarCentre) {
  // \int_{B_1} |x - c|^{-2} over the unit ball, c = 0: 4 pi.
  QuadSpec q;
  BallDomain dom(3, 1.0);
  auto r = integrate_ball([](const Point& x) { return 1.0 / x.norm2(); }, dom, q, Symmetry::radial);
  EXPECT_NEAR(r.value, 4.0 * kPi, 1e-9);
  EXPECT_THROW(integrate_ball([](const Point&) { return 1.0; }, dom,
                              [] {
                                QuadSpec bad;
                                bad.center = Point{1.0, 0.0, 0.0};
                                return bad;
                              }(),
                              Symmetry::none),
               DomainError);
}

TEST(IntegrateExterior, PowerDecay) {
  // \int_{|y|>1} |y|^{-5} dy = 4 pi \int_1^inf rho^{-3} = 2 pi in R^3.
  QuadSpec q;
  BallDomain dom(3, 1.0);
  auto r = integrate_exterior([](const Point& y) { return std::pow(y.norm(), -5.0); }, dom, q, Symmetry::radial);
  EXPECT_NEAR(r.value, 2.0 * kPi, 1e-9);
  // 2D: \int_{|y|>2} |y|^{-4} = 2 pi \int_2^inf rho^{-3} = pi / 4.
  auto r2 = integrate_exterior([](const Point& y) { return std::pow(y.norm(), -4.0); }, BallDomain(2, 2.0), q,
                               Symmetry::none);
  EXPECT_NEAR(r2.value, kPi / 4.0, 1e-9);
  // Boundary layer built from the exact gap: \int_{|y|>1} (|y| - 1)^{-1/2} |y|^{-5}
  // = 4 pi B(1/2, 5/2) in R^3.
  QuadSpec layer = q.with_endpoints(std::nullopt, 0.5);
  auto r3 = integrate_exterior(LayerFunction([](const Point& y, double gap) { return std::pow(gap, -0.5) * std::pow(y.norm(), -5.0); }),
                               dom, layer, Symmetry::radial);
  EXPECT_NEAR(r3.value, 4.0 * kPi * std::tgamma(0.5) * std::tgamma(2.5) / std::tgamma(3.0), 1e-9);
}

TEST(IntegrateExterior, FieldOverloadSkipsCompactSupport) {
  FieldTraits t;
  t.radial = true;
  t.decay = DecayClass::compact(1.0);
  ScalarField f([](const Point&) { return 0.0; }, t);
  auto r = integrate_exterior(f, BallDomain(3, 1.0), QuadSpec{});
  EXPECT_EQ(r.value, 0.0);
  EXPECT_EQ(r.evaluations, 0u);
}
