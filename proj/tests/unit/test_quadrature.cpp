#include <gtest/gtest.h>

#include <cmath>

#include "biharm/quadrature.hpp"

using namespace biharm;

namespace {

// int_{ref triangle} x^a y^b = a! b! / (a+b+2)!
double monomial_integral(int a, int b) {
  return std::tgamma(a + 1) * std::tgamma(b + 1) / std::tgamma(a + b + 3);
}

}  // namespace

TEST(Quadrature, TriangleRulesAreExactToTheirDegree) {
  for (int d = 1; d <= 20; ++d) {
    const TriangleRule& r = triangle_rule(d);
    EXPECT_GE(r.exact_degree, d);
    for (int a = 0; a <= d; ++a)
      for (int b = 0; a + b <= d; ++b) {
        double s = 0.0;
        for (std::size_t q = 0; q < r.size(); ++q) s += r.weights[q] * std::pow(r.points[q].x, a) * std::pow(r.points[q].y, b);
        EXPECT_NEAR(s, monomial_integral(a, b), 1e-14) << "degree " << d << " monomial " << a << "," << b;
      }
  }
}

TEST(Quadrature, TrianglePointsAreInside) {
  for (int d = 1; d <= 20; ++d)
    for (const Point& p : triangle_rule(d).points) {
      EXPECT_GE(p.x, 0.0);
      EXPECT_GE(p.y, 0.0);
      EXPECT_LE(p.x + p.y, 1.0 + 1e-15);
    }
}

TEST(Quadrature, EdgeRulesIntegrateOnUnitInterval) {
  for (int d = 1; d <= 20; ++d) {
    const IntervalRule& r = edge_rule(d);
    for (int k = 0; k <= d; ++k) {
      double s = 0.0;
      for (std::size_t q = 0; q < r.size(); ++q) s += r.weights[q] * std::pow(r.points[q], k);
      EXPECT_NEAR(s, 1.0 / (k + 1), 1e-14);
    }
  }
}

TEST(Quadrature, GaussLegendreHasDegree2nMinus1) {
  for (int n = 1; n <= 8; ++n) {
    const IntervalRule r = gauss_legendre(n);
    EXPECT_EQ(r.size(), static_cast<std::size_t>(n));
    EXPECT_EQ(r.exact_degree, 2 * n - 1);
  }
}

TEST(Quadrature, MapToTriangleHitsCorners) {
  const Point a{1, 2}, b{3, 2}, c{1, 5};
  const Point pb = map_to_triangle(a, b, c, {1, 0});
  const Point pc = map_to_triangle(a, b, c, {0, 1});
  EXPECT_DOUBLE_EQ(pb.x, 3);
  EXPECT_DOUBLE_EQ(pc.y, 5);
}

TEST(Quadrature, OutOfRangeDegreeThrows) { EXPECT_THROW(triangle_rule(99), std::exception); }
