#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "fracball/field.hpp"
#include "fracball/geometry.hpp"

using namespace fracball;

TEST(Point, ArithmeticAndNorms) {
  Point a{1.0, 2.0, 2.0};
  Point b{0.0, -1.0, 4.0};
  EXPECT_DOUBLE_EQ(a.norm(), 3.0);
  EXPECT_DOUBLE_EQ(dot(a, b), 6.0);
  EXPECT_EQ(a + b, (Point{1.0, 1.0, 6.0}));
  EXPECT_EQ(2.0 * a, (Point{2.0, 4.0, 4.0}));
  EXPECT_DOUBLE_EQ(distance(a, a), 0.0);
  EXPECT_THROW(Point(0), DomainError);
  EXPECT_THROW(Point(kMaxDim + 1), DomainError);
}

TEST(Measures, SphereAreaAndBallVolume) {
  const double pi = std::numbers::pi;
  EXPECT_NEAR(sphere_area(1), 2.0, 1e-14);
  EXPECT_NEAR(sphere_area(2), 2.0 * pi, 1e-13);
  EXPECT_NEAR(sphere_area(3), 4.0 * pi, 1e-13);
  EXPECT_NEAR(sphere_area(4), 2.0 * pi * pi, 1e-12);
  EXPECT_NEAR(ball_volume(3, 2.0), 4.0 * pi * 8.0 / 3.0, 1e-12);
}

TEST(BallDomain, ContainsAndDistance) {
  BallDomain dom(3, 2.0);
  EXPECT_TRUE(dom.contains(Point{1.0, 1.0, 1.0}));
  EXPECT_FALSE(dom.contains(Point{2.0, 0.0, 0.0}));
  EXPECT_TRUE(dom.contains_closed(Point{2.0, 0.0, 0.0}));
  EXPECT_DOUBLE_EQ(distance_to_boundary(Point{0.5, 0.0, 0.0}, dom), 1.5);
  EXPECT_THROW(distance_to_boundary(Point{3.0, 0.0, 0.0}, dom), DomainError);
  EXPECT_THROW(BallDomain(3, 0.0), DomainError);
  EXPECT_THROW(BallDomain(0, 1.0), DomainError);
}

TEST(FracOrder, RangeAndExponents) {
  EXPECT_THROW(FracOrder(0.0), DomainError);
  EXPECT_THROW(FracOrder(1.0), DomainError);
  EXPECT_THROW(FracOrder(1.5), DomainError);
  FracOrder s(0.75);
  EXPECT_DOUBLE_EQ(s.critical_exponent(3), 2.0);
  EXPECT_DOUBLE_EQ(s.solution_exponent(), 4.0);
  EXPECT_DOUBLE_EQ(s.riesz_exponent(3), 1.5);
  EXPECT_NO_THROW(s.require_drift_range());
  EXPECT_THROW(FracOrder(0.4).require_drift_range(), DomainError);
}

TEST(Frame, IsOrthonormal) {
  for (const Point& axis : {Point{0.0, 0.0, 1.0}, Point{0.3, -0.4, 0.2}, Point{1.0, 1.0, 1.0}}) {
    Frame f = frame_around(axis);
    EXPECT_NEAR(f.axis.norm(), 1.0, 1e-14);
    EXPECT_NEAR(f.e1.norm(), 1.0, 1e-14);
    EXPECT_NEAR(f.e2.norm(), 1.0, 1e-14);
    EXPECT_NEAR(dot(f.axis, f.e1), 0.0, 1e-14);
    EXPECT_NEAR(dot(f.axis, f.e2), 0.0, 1e-14);
    EXPECT_NEAR(dot(f.e1, f.e2), 0.0, 1e-14);
  }
}

TEST(ScalarField, SupportAndDerived) {
  FieldTraits t;
  t.support = Support::ball;
  t.domain_radius = 1.0;
  ScalarField u([](const Point& x) { return x[0]; }, t);
  EXPECT_DOUBLE_EQ(u(Point{0.5, 0.0, 0.0}), 0.5);
  EXPECT_THROW(u(Point{1.5, 0.0, 0.0}), DomainError);

  ScalarField c([](const Point& x) { return x[0] - 0.2; });
  EXPECT_DOUBLE_EQ(positive_part(c)(Point{0.0, 0.0, 0.0}), 0.0);
  EXPECT_DOUBLE_EQ(negative_part(c)(Point{0.0, 0.0, 0.0}), 0.2);

  ScalarField r = ScalarField::radial([](double rho) { return rho * rho; });
  EXPECT_TRUE(r.is_radial());
  EXPECT_DOUBLE_EQ(r.at_radius(0.5, 3), 0.25);
  EXPECT_THROW(c.at_radius(0.5, 3), DomainError);

  ScalarField comb = linear_combination(2.0, r, -1.0, ScalarField::constant(1.0));
  EXPECT_DOUBLE_EQ(comb(Point{0.5, 0.0, 0.0}), -0.5);
  EXPECT_TRUE(comb.is_radial());
}
