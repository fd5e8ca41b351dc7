#include <cmath>

#include <gtest/gtest.h>

#include "fracball/chebyshev.hpp"

using namespace fracball;

TEST(Chebyshev, FixedDegreeReproducesPolynomials) {
  auto cubic = [](double x) { return 2.0 * x * x * x - x + 0.5; };
  ChebyshevInterpolant p(cubic, -1.0, 3.0, 3);
  for (double x : {-1.0, -0.3, 0.0, 1.7, 3.0}) EXPECT_NEAR(p(x), cubic(x), 1e-12) << x;
  EXPECT_THROW(p(3.5), DomainError);
  EXPECT_THROW(ChebyshevInterpolant(cubic, 1.0, 1.0, 4), DomainError);
}

TEST(Chebyshev, AdaptiveConvergesForAnalyticFunctions) {
  auto f = [](double x) { return std::exp(std::sin(3.0 * x)); };
  auto p = ChebyshevInterpolant::adaptive(f, 0.0, 2.0, 1e-12);
  EXPECT_TRUE(p.converged(1e-12));
  EXPECT_LE(p.degree(), 128);
  for (int i = 0; i <= 200; ++i) {
    const double x = 2.0 * i / 200.0;
    EXPECT_NEAR(p(x), f(x), 1e-11) << x;
  }
}

TEST(Chebyshev, AdaptiveReportsFailureOnKink) {
  auto p = ChebyshevInterpolant::adaptive([](double x) { return std::abs(x - 0.1); }, -1.0, 1.0, 1e-12, 16, 64);
  EXPECT_FALSE(p.converged(1e-12));
  EXPECT_GT(p.error_estimate(), 1e-6);
}

TEST(PiecewiseChebyshev, BreakpointAtKink) {
  auto f = [](double x) { return std::abs(x - 0.1) * std::cos(x); };
  PiecewiseChebyshev p(f, {-1.0, 0.1, 1.0}, 1e-12);
  EXPECT_EQ(p.pieces().size(), 2u);
  EXPECT_LE(p.error_estimate(), 1e-12);
  for (double x : {-1.0, -0.5, 0.1, 0.4, 1.0}) EXPECT_NEAR(p(x), f(x), 1e-11) << x;
  EXPECT_THROW(PiecewiseChebyshev(f, {0.0, -1.0}, 1e-8), DomainError);
}
