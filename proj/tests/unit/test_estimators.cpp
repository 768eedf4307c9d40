#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "biharm/estimators.hpp"

using namespace biharm;

TEST(Estimators, LambdaExponentDependsOnDegree) {
  EXPECT_EQ(estimator_lambda(2), 2);
  EXPECT_EQ(estimator_lambda(3), 0);
  EXPECT_EQ(estimator_lambda(4), 0);
}

TEST(Estimators, EocOfPowerLawIsExact) {
  const std::vector<double> h{0.5, 0.25, 0.125};
  const std::vector<double> a{3 * std::pow(0.5, 2.5), 3 * std::pow(0.25, 2.5), 3 * std::pow(0.125, 2.5)};
  EXPECT_NEAR(*eoc(a, h, 0), 2.5, 1e-13);
  EXPECT_NEAR(*eoc(a, h, 1), 2.5, 1e-13);
  EXPECT_FALSE(eoc(a, h, 2).has_value());
}

TEST(Estimators, IeiIsErrorOverEstimator) {
  EXPECT_NEAR(*iei(1.0, 1.0, 1.0), 0.5, 1e-15);
  EXPECT_NEAR(*iei(2.0, 3.0, 5.0), 0.25, 1e-15);
  EXPECT_FALSE(iei(1.0, 0.0, 0.0).has_value());
}

TEST(Estimators, EllipticEstimatorVanishesForExactPolynomialData) {
  // A clamped-incompatible polynomial still has nonzero boundary jumps, so
  // only the interior contributions are tested here.
  auto s = std::make_shared<const DgSpace>(Mesh::unit_square(2), 2);
  const FeFunction v = l2_project(s, [](Point p) { return p.x * p.x; });
  const auto est = elliptic_estimate(v, SpaceFunction([](Point) { return 0.0; }), PenaltyConfig{});
  double interior_jumps = 0.0;
  for (double x : est.volume) interior_jumps += x;
  EXPECT_LT(interior_jumps, 1e-18);
  EXPECT_GT(est.total(), 0.0);
  EXPECT_EQ(est.local().size(), s->mesh().n_elements());
}

TEST(Estimators, EllipticEstimatorDecreasesUnderRefinement) {
  const double pi = std::numbers::pi;
  const SpaceFunction f = [&](Point p) { return std::sin(pi * p.x) * std::sin(pi * p.y); };
  double prev = 1e300;
  for (int level : {1, 3}) {
    auto s = std::make_shared<const DgSpace>(Mesh::unit_square(level), 2);
    const EllipticOperator op(s, {});
    const double e = elliptic_estimate(solve_elliptic(op, f), f, op.penalty()).total();
    EXPECT_LT(e, prev);
    prev = e;
  }
}

TEST(Estimators, ProjectionDefectVanishesOnRefinement) {
  const Mesh coarse = Mesh::unit_square(2);
  auto sc = std::make_shared<const DgSpace>(coarse, 2);
  auto sf = std::make_shared<const DgSpace>(coarse.uniform(3), 2);
  const FeFunction u = l2_project(sc, [](Point p) { return std::exp(p.x - p.y); });
  EXPECT_LT(projection_defect_squared(u, sf), 1e-26);
  const FeFunction uf = l2_project(sf, [](Point p) { return std::exp(p.x - p.y); });
  EXPECT_GT(projection_defect_squared(uf, sc), 1e-12);
}

TEST(Estimators, DataEstimatorIsZeroForTimeIndependentForcing) {
  const Mesh m = Mesh::unit_square(2);
  const SpaceTimeFunction f = [](Point p, double) { return p.x; };
  const DataEstimate d = data_estimators(m, f, [](Point p) { return p.x; }, 0.0, 0.1, 6);
  EXPECT_NEAR(d.beta_inf, 0.0, 1e-20);
  EXPECT_NEAR(d.beta_2, 0.0, 1e-20);
}

TEST(Estimators, DataEstimatorOfLinearInTimeForcing) {
  // f = t, f~ = mean: int (t - m)^2 dt = lambda^3 / 12 over a unit area.
  const Mesh m = Mesh::unit_square(1);
  const double t0 = 0.2, t1 = 0.5;
  const SpaceTimeFunction f = [](Point, double t) { return t; };
  const DataEstimate d = data_estimators(m, f, [&](Point) { return 0.5 * (t0 + t1); }, t0, t1, 4);
  EXPECT_NEAR(d.beta_inf, std::pow(t1 - t0, 3) / 12.0, 1e-12);
}

TEST(Estimators, AccumulationFollowsSquaredSums) {
  ParabolicStepEstimators s;
  s.gamma_inf = 4.0;
  s.gamma_2 = 1.0;
  s.eta_inf = 9.0;
  s.eta_2 = 2.0;
  s.beta_inf = 1.0;
  s.beta_2 = 0.5;
  s.elliptic = 3.0;
  s.lambda = 0.25;
  AccumulatedEstimators acc = start_accumulation(1.0, 0.1);
  acc = accumulate(s, acc);
  acc = accumulate(s, acc);
  EXPECT_NEAR(acc.space(NormFlavor::linf_l2), 3.0, 1e-15);
  EXPECT_NEAR(acc.space(NormFlavor::l2_l2), std::sqrt(4.5), 1e-15);
  EXPECT_NEAR(acc.coarsen(NormFlavor::linf_l2), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(acc.coarsen(NormFlavor::l2_l2), std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(acc.time(NormFlavor::linf_l2), std::sqrt(5.0), 1e-15);
  EXPECT_NEAR(acc.time(NormFlavor::l2_l2), std::sqrt(1.25), 1e-15);
  EXPECT_NEAR(acc.e0, 0.1, 1e-15);
}

TEST(Estimators, TimeIncrementIncludesEtaTildeOnRequest) {
  ParabolicStepEstimators s;
  s.eta_inf = 1.0;
  s.beta_inf = 1.0;
  s.eta_tilde_inf = 2.0;
  s.lambda = 0.1;
  EXPECT_NEAR(time_increment(s, NormFlavor::linf_l2, false), std::sqrt(0.2), 1e-15);
  EXPECT_NEAR(time_increment(s, NormFlavor::linf_l2, true), std::sqrt(2.2), 1e-15);
}

TEST(Estimators, ErrorAccumulatorIsZeroForExactInterpolant) {
  auto s = std::make_shared<const DgSpace>(Mesh::unit_square(1), 2);
  const SpaceTimeFunction exact = [](Point p, double t) { return t * p.x * p.y; };
  ErrorAccumulator acc(exact);
  const FeFunction u0 = l2_project(s, [](Point) { return 0.0; });
  acc.start(u0, 0.0);
  const FeFunction u1 = l2_project(s, [](Point p) { return 0.5 * p.x * p.y; });
  acc.add_interval(u0, u1, 0.0, 0.5);
  EXPECT_LT(acc.linf_l2(), 1e-12);
  EXPECT_LT(acc.l2_l2(), 1e-12);
}
