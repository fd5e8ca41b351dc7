#include <cmath>
#include <numbers>

#include <boost/math/special_functions/hypergeometric_1F1.hpp>
#include <gtest/gtest.h>

#include "fracball/frac_operator.hpp"

using namespace fracball;

namespace {

constexpr double kPi = std::numbers::pi;

ScalarField gaussian(bool radial) {
  FieldTraits t;
  t.decay = DecayClass::power(-20.0);
  if (radial) return ScalarField::radial([](double rho) { return std::exp(-rho * rho); }, t);
  return ScalarField([](const Point& x) { return std::exp(-x.norm2()); }, t);
}

// (-Delta)^s exp(-|x|^2) through its Fourier representation.
double gaussian_oracle(const Point& x, double s) {
  const double n = x.dim();
  return std::pow(4.0, s) * std::tgamma(0.5 * n + s) / std::tgamma(0.5 * n) *
         boost::math::hypergeometric_1F1(0.5 * n + s, 0.5 * n, -x.norm2());
}

// (1 - |x|^2)_+^s, whose fractional Laplacian is constant in the unit ball.
ScalarField torsion_shape(double s) {
  FieldTraits t;
  t.decay = DecayClass::compact(1.0);
  t.kinks = {{1.0, s}};
  return ScalarField::radial([s](double rho) { return rho < 1.0 ? std::pow(1.0 - rho * rho, s) : 0.0; }, t);
}

double torsion_constant(int n, double s) {
  return std::pow(4.0, s) * std::tgamma(1.0 + s) * std::tgamma(0.5 * n + s) / std::tgamma(0.5 * n);
}

}  // namespace

TEST(PVFractionalLaplacian, GaussianMatchesHypergeometricOracle) {
  for (double s : {0.25, 0.5, 0.75}) {
    FracOrder order(s);
    for (const Point& x : {Point{0.0, 0.0, 0.0}, Point{0.3, 0.0, 0.0}, Point{0.4, -0.5, 0.2}}) {
      auto r = pv_fractional_laplacian(gaussian(true), x, order, {}, QuadSpec{}.with_tol(1e-8));
      EXPECT_TRUE(r.converged);
      EXPECT_NEAR(r.value, gaussian_oracle(x, s), 1e-6) << "s=" << s << " |x|=" << x.norm();
    }
  }
  // Without the radial flag the full sphere is integrated.
  Point x{0.2, 0.1, -0.3};
  auto general = pv_fractional_laplacian(gaussian(false), x, FracOrder(0.6), {}, QuadSpec{}.with_tol(1e-7));
  EXPECT_NEAR(general.value, gaussian_oracle(x, 0.6), 1e-5);
}

TEST(PVFractionalLaplacian, TwoDimensionalGaussian) {
  Point x{0.5, 0.5};
  auto r = pv_fractional_laplacian(gaussian(true), x, FracOrder(0.4), {}, QuadSpec{}.with_tol(1e-8));
  EXPECT_NEAR(r.value, gaussian_oracle(x, 0.4), 1e-6);
}

TEST(PVFractionalLaplacian, TorsionShapeIsConstantInsideBall) {
  for (double s : {0.3, 0.75}) {
    const double expected = torsion_constant(3, s);
    for (const Point& x : {Point{0.0, 0.0, 0.0}, Point{0.5, 0.0, 0.0}, Point{0.0, 0.3, 0.6}}) {
      auto r = pv_fractional_laplacian(torsion_shape(s), x, FracOrder(s), {}, QuadSpec{}.with_tol(1e-8));
      EXPECT_NEAR(r.value / expected, 1.0, 1e-5) << "s=" << s << " |x|=" << x.norm();
    }
  }
}

TEST(PVFractionalLaplacian, ConstantsAndLinearity) {
  FracOrder s(0.75);
  Point x{0.1, 0.2, 0.3};
  EXPECT_NEAR(pv_fractional_laplacian(ScalarField::constant(2.5), x, s).value, 0.0, 1e-12);
  auto g = gaussian(true);
  auto combo = linear_combination(2.0, g, -3.0, torsion_shape(0.75));
  const double expected = 2.0 * gaussian_oracle(x, 0.75) - 3.0 * torsion_constant(3, 0.75);
  auto r = pv_fractional_laplacian(combo, x, s, {}, QuadSpec{}.with_tol(1e-8));
  EXPECT_NEAR(r.value, expected, 1e-5);
}

TEST(PVFractionalLaplacian, IndependentOfRegularisation) {
  FracOrder s(0.5);
  Point x{0.3, 0.0, 0.0};
  QuadSpec q = QuadSpec{}.with_tol(1e-9);
  PVSpec a, b;
  a.delta = 0.05;
  b.delta = 0.025;
  b.far_cutoff = 5.0;
  const double va = pv_fractional_laplacian(gaussian(true), x, s, a, q).value;
  const double vb = pv_fractional_laplacian(gaussian(true), x, s, b, q).value;
  EXPECT_NEAR(va, vb, 1e-7);
}

TEST(PVFractionalLaplacian, RejectsInsufficientSmoothnessAndGrowth) {
  FracOrder s(0.75);
  auto u = torsion_shape(0.75);
  EXPECT_THROW(pv_fractional_laplacian(u, Point{1.0, 0.0, 0.0}, s), DomainError);
  PVSpec wide;
  wide.delta = 0.2;
  EXPECT_THROW(pv_fractional_laplacian(u, Point{0.9, 0.0, 0.0}, s, wide), DomainError);
  FieldTraits growing;
  growing.decay = DecayClass::power(1.6);
  ScalarField g([](const Point& x) { return x.norm2(); }, growing);
  EXPECT_THROW(pv_fractional_laplacian(g, Point{0.0, 0.0, 0.0}, s), DomainError);
  FieldTraits ball;
  ball.support = Support::ball;
  ball.domain_radius = 1.0;
  EXPECT_THROW(pv_fractional_laplacian(ScalarField([](const Point&) { return 1.0; }, ball), Point{0.0, 0.0, 0.0}, s),
               DomainError);
}

TEST(ClassicalLaplacian, ClosedFormAndFiniteDifferences) {
  auto u = ScalarField([](const Point& x) { return x[0] * x[0] * x[1] + std::sin(x[2]); })
               .with_laplacian([](const Point& x) { return 2.0 * x[1] - std::sin(x[2]); });
  Point x{0.3, -0.4, 0.7};
  EXPECT_DOUBLE_EQ(classical_laplacian(u, x), 2.0 * x[1] - std::sin(x[2]));
  EXPECT_NEAR(finite_difference_laplacian(u, x, 1e-3), 2.0 * x[1] - std::sin(x[2]), 1e-6);
  ScalarField bare([](const Point& p) { return p.norm2(); });
  EXPECT_NEAR(classical_laplacian(bare, x, 1e-3), 6.0, 1e-6);
  EXPECT_THROW(classical_laplacian(bare, x), DomainError);
}

TEST(Mollify, PreservesConstantsAndAffineFunctions) {
  const double eps = 0.1;
  auto one = mollify(ScalarField::constant(1.0), eps);
  EXPECT_NEAR(one(Point{0.2, 0.3, 0.0}), 1.0, 1e-9);
  auto lin = mollify(ScalarField([](const Point& x) { return 1.0 + 2.0 * x[0] - x[2]; }), eps);
  Point x{0.3, 0.1, -0.2};
  EXPECT_NEAR(lin(x), 1.0 + 2.0 * x[0] - x[2], 1e-9);
}

TEST(Mollify, QuadraticPicksUpSecondMoment) {
  // eta_eps * |x|^2 = |x|^2 + eps^2 \int eta |z|^2, second moment by Simpson.
  const int N = 20000;
  double mass = 0.0, moment = 0.0;
  for (int i = 0; i <= N; ++i) {
    const double t = static_cast<double>(i) / N;
    const double w = (i == 0 || i == N) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    const double b = t < 1.0 ? std::exp(-1.0 / (1.0 - t * t)) : 0.0;
    mass += w * b * t * t;
    moment += w * b * t * t * t * t;
  }
  const double m2 = moment / mass;
  const double eps = 0.2;
  auto u = ScalarField::radial([](double rho) { return rho * rho; });
  auto v = mollify(u, eps);
  EXPECT_TRUE(v.is_radial());
  for (const Point& x : {Point{0.0, 0.0, 0.0}, Point{0.5, 0.2, 0.1}})
    EXPECT_NEAR(v(x), x.norm2() + eps * eps * m2, 1e-9);
  EXPECT_NEAR(standard_mollifier(Point{0.0, 0.0, 0.0}), std::exp(-1.0) / (4.0 * kPi * mass / (3.0 * N)), 1e-8);
}

TEST(Mollify, SupportShrinksAndBreakpointsSpread) {
  FieldTraits t;
  t.support = Support::ball;
  t.domain_radius = 1.0;
  t.kinks = {{0.5, 0.5}};
  ScalarField u([](const Point& x) { return 1.0 - x.norm2(); }, t);
  auto v = mollify(u, 0.1);
  EXPECT_DOUBLE_EQ(v.traits().domain_radius, 0.9);
  ASSERT_EQ(v.traits().kinks.size(), 2u);
  EXPECT_DOUBLE_EQ(v.traits().kinks[0].radius, 0.4);
  EXPECT_FALSE(v.evaluable_at(Point{0.95, 0.0, 0.0}));
  EXPECT_THROW(mollify(u, 1.5), DomainError);
}

TEST(TruncateMin, NegativePartAndGradient) {
  auto u = ScalarField::radial([](double rho) { return rho * rho - 0.25; })
               .with_gradient([](const Point& x) { return x * 2.0; });
  auto v = truncate_min(u);
  EXPECT_TRUE(v.is_radial());
  EXPECT_DOUBLE_EQ(v(Point{0.1, 0.0}), 0.01 - 0.25);
  EXPECT_DOUBLE_EQ(v(Point{0.9, 0.0}), 0.0);
  EXPECT_DOUBLE_EQ(v.gradient(Point{0.1, 0.0})[0], 0.2);
  EXPECT_DOUBLE_EQ(v.gradient(Point{0.9, 0.0})[0], 0.0);
}

TEST(TruncationWeakForm, SpotCheckHolds) {
  const double s = 0.75;
  auto u = ScalarField::radial([](double rho) { return 1.0 - 2.0 * std::exp(-rho * rho / 0.36); },
                               [] {
                                 FieldTraits t;
                                 t.decay = DecayClass::bounded();
                                 return t;
                               }())
               .with_gradient([](const Point& x) { return x * (4.0 / 0.36 * std::exp(-x.norm2() / 0.36)); });
  VectorField b = VectorField([](const Point& x) { return Point{1.0 + x[1], 0.5 * x[0] * x[2], -0.3}; })
                      .with_divergence([](const Point&) { return 0.0; });
  ScalarField c([](const Point& x) { return 0.5 + x[0] * x[0]; });
  std::vector<TestFunction> tests{{Point{0.0, 0.0, 0.0}, 0.6, 1.0}, {Point{0.2, -0.1, 0.0}, 0.3, 2.0}};
  auto report = truncation_weak_form_check(u, b, c, tests, FracOrder(s));
  EXPECT_NEAR(report.negative_set_radius, 0.6 * std::sqrt(std::log(2.0)), 1e-10);
  ASSERT_EQ(report.terms.size(), 2u);
  for (const auto& t : report.terms) {
    EXPECT_TRUE(t.holds) << t.difference << " budget " << t.error_budget;
  }
  EXPECT_TRUE(report.all_hold);
  EXPECT_THROW(truncation_weak_form_check(u, b, c, tests, FracOrder(0.4)), DomainError);
}
