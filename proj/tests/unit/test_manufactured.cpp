#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "biharm/manufactured.hpp"

using namespace biharm;

TEST(Taylor, ProductAndCompositionMatchClosedForms) {
  const Taylor2 x = Taylor2::variable_x(0.3);
  const Taylor2 y = Taylor2::variable_y(0.7);
  const Taylor2 f = sin(x) * exp(y);
  EXPECT_NEAR(f.value(), std::sin(0.3) * std::exp(0.7), 1e-15);
  EXPECT_NEAR(f.derivative(1, 0), std::cos(0.3) * std::exp(0.7), 1e-14);
  EXPECT_NEAR(f.derivative(2, 2), -std::sin(0.3) * std::exp(0.7), 1e-13);
  EXPECT_NEAR(f.derivative(4, 0), std::sin(0.3) * std::exp(0.7), 1e-12);
  EXPECT_NEAR(cos(y).derivative(0, 3), std::sin(0.7), 1e-13);
}

TEST(Manufactured, SinSquaredProfileJet) {
  const double pi = std::numbers::pi;
  const Point p{0.2, 0.45};
  const Jet j = evaluate_profile(sin_squared_profile(), p);
  auto s = [&](double t) { return std::sin(pi * t) * std::sin(pi * t); };
  auto s2 = [&](double t) { return 2 * pi * pi * std::cos(2 * pi * t); };
  EXPECT_NEAR(j.value, s(p.x) * s(p.y), 1e-14);
  EXPECT_NEAR(j.lap, s2(p.x) * s(p.y) + s(p.x) * s2(p.y), 1e-11);
}

TEST(Manufactured, ForcingIsTimeDerivativePlusBilaplacian) {
  for (const char* name : {"u1", "u2"}) {
    const ManufacturedSolution u = solution_by_name(name);
    const Point p{0.37, 0.61};
    const double t = 0.43;
    EXPECT_NEAR(u.forcing(p, t), u.time_derivative(p, t) + u.bilaplacian(p, t), 1e-9 * std::abs(u.forcing(p, t)) + 1e-12);
  }
}

TEST(Manufactured, ClampedOnTheBoundary) {
  for (const char* name : {"u1", "u2"}) {
    const ManufacturedSolution u = solution_by_name(name);
    for (double s : {0.0, 0.3, 0.8}) {
      EXPECT_NEAR(u.value({s, 0.0}, 0.5), 0.0, 1e-8);
      EXPECT_NEAR(u.value({1.0, s}, 0.5), 0.0, 1e-8);
      EXPECT_NEAR(u.gradient({0.0, s}, 0.5).x, 0.0, 1e-6);
    }
  }
}

TEST(Manufactured, UnknownNameThrows) { EXPECT_THROW(solution_by_name("u3"), std::exception); }

TEST(Manufactured, CachedAndFreshEvaluationsAgree) {
  const ManufacturedSolution a = solution_u2();
  const ManufacturedSolution b = solution_u2();
  const Point p{0.11, 0.93};
  const double first = a.bilaplacian(p, 0.2);
  EXPECT_EQ(a.bilaplacian(p, 0.2), first);
  EXPECT_EQ(b.bilaplacian(p, 0.2), first);
}

TEST(Manufactured, AveragedForcingMatchesQuadrature) {
  const ManufacturedSolution u = solution_u1();
  const Point p{0.4, 0.3};
  const double t0 = 0.1, t1 = 0.3;
  const double avg = u.averaged_forcing(t0, t1)(p);
  double ref = 0.0;
  const int n = 2000;
  for (int i = 0; i < n; ++i) ref += u.forcing(p, t0 + (i + 0.5) * (t1 - t0) / n) / n;
  EXPECT_NEAR(avg, ref, 1e-5 * std::abs(ref) + 1e-10);
}
