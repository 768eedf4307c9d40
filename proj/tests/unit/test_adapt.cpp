#include <gtest/gtest.h>

#include <cmath>

#include "biharm/adapt.hpp"

using namespace biharm;

TEST(Dorfler, MarksWhileSumBeforeIsBelowBulk) {
  const std::vector<double> ind{1.0, 4.0, 2.0, 3.0};
  // Sorted: 4 (sum 0), 3 (sum 4), 2 (sum 7), 1 (sum 9); total 10.
  auto m = dorfler_mark(ind, 0.5);
  std::sort(m.begin(), m.end());
  EXPECT_EQ(m, (std::vector<int>{1, 3}));
  m = dorfler_mark(ind, 0.7);
  std::sort(m.begin(), m.end());
  EXPECT_EQ(m, (std::vector<int>{1, 3}));
  m = dorfler_mark(ind, 0.71);
  std::sort(m.begin(), m.end());
  EXPECT_EQ(m, (std::vector<int>{1, 2, 3}));
  EXPECT_EQ(dorfler_mark(ind, 1.0).size(), 4u);
}

TEST(Dorfler, TiesBrokenByIndex) {
  const std::vector<double> ind{1.0, 1.0, 1.0, 1.0};
  EXPECT_EQ(dorfler_mark(ind, 0.3), (std::vector<int>{0, 1}));
}

TEST(Dorfler, RejectsBadInput) {
  const std::vector<double> ind{1.0, -1.0};
  EXPECT_THROW(dorfler_mark(ind, 0.5), std::exception);
  const std::vector<double> ok{1.0};
  EXPECT_THROW(dorfler_mark(ok, 0.0), std::exception);
  EXPECT_THROW(dorfler_mark(ok, 1.5), std::exception);
}

TEST(Dorfler, AllZeroMarksNothing) {
  const std::vector<double> ind{0.0, 0.0};
  EXPECT_TRUE(dorfler_mark(ind, 0.5).empty());
}

TEST(Adapt, SpaceCoarseningOnlyTouchesSmallIndicators) {
  const Mesh m = Mesh::unit_square(3);
  std::vector<double> ind(m.n_elements(), 1.0);
  EXPECT_EQ(space_coarsening(m, ind, 0.5), m);
  std::fill(ind.begin(), ind.end(), 0.0);
  ind[0] = 1.0;
  EXPECT_LT(space_coarsening(m, ind, 0.5).n_elements(), m.n_elements());
}

TEST(Adapt, ConfigValidation) {
  AdaptiveConfig c;
  EXPECT_NO_THROW(c.validate());
  c.tol_time_min = 2 * c.tol_time;
  EXPECT_THROW(c.validate(), std::exception);
  c = AdaptiveConfig{};
  c.lambda0 = -1.0;
  EXPECT_THROW(c.validate(), std::exception);
}

namespace {

Problem steady_free() {
  // u = 0 solves the problem with zero data.
  Problem p;
  p.name = "zero";
  p.initial = [](Point) { return 0.0; };
  p.forcing = [](Point, double) { return 0.0; };
  p.exact = [](Point, double) { return 0.0; };
  return p;
}

}  // namespace

TEST(Adapt, ZeroDataGivesZeroEstimators) {
  const Problem p = steady_free();
  Discretization d;
  const RunLog log = fixed_step_run(p, d, Mesh::unit_square(1), 0.25, 1.0);
  ASSERT_EQ(log.steps.size(), 4u);
  EXPECT_NEAR(log.final_time(), 1.0, 1e-15);
  EXPECT_EQ(log.final_error(NormFlavor::linf_l2), 0.0);
  EXPECT_EQ(log.final_accumulators().time(NormFlavor::linf_l2), 0.0);
}

TEST(Adapt, RejectedSolvesLeaveNoTrace) {
  const Problem p = Problem::manufactured(solution_u1());
  Discretization d;
  auto space = std::make_shared<const DgSpace>(Mesh::unit_square(2), 2);
  Evolution evo(p, d, l2_project(space, p.initial), 0.0);
  const SolvedStep a = evo.solve(evo.mesh(), 0.1);
  const SolvedStep b = evo.solve(evo.mesh().uniform(3), 0.05);
  (void)b;
  const SolvedStep c = evo.solve(evo.mesh(), 0.1);
  EXPECT_EQ(a.u.coeffs(), c.u.coeffs());
  EXPECT_EQ(evo.time(), 0.0);
  EXPECT_TRUE(evo.log().steps.empty());
  const ParabolicStepEstimators est = evo.estimate(a);
  evo.accept(a, est);
  EXPECT_EQ(evo.time(), 0.1);
  EXPECT_EQ(evo.log().steps.size(), 1u);
}

TEST(Adapt, FixedStepRunIsDeterministic) {
  const Problem p = Problem::manufactured(solution_u1());
  Discretization d;
  const RunLog a = fixed_step_run(p, d, Mesh::unit_square(1), 0.125, 0.5);
  const RunLog b = fixed_step_run(p, d, Mesh::unit_square(1), 0.125, 0.5);
  ASSERT_EQ(a.steps.size(), b.steps.size());
  for (std::size_t i = 0; i < a.steps.size(); ++i) {
    EXPECT_EQ(a.steps[i].err_linf, b.steps[i].err_linf);
    EXPECT_EQ(a.steps[i].acc.time_inf_sq, b.steps[i].acc.time_inf_sq);
  }
}

TEST(Adapt, ImplicitDriverRespectsTimeTolerance) {
  const Problem p = Problem::manufactured(solution_u1());
  Discretization d;
  d.eta_tilde = EtaTildeMode::per_step;
  AdaptiveConfig c;
  c.tol_space = 200.0;
  c.tol_time = 40.0;
  c.tol_time_min = 4.0;
  c.lambda0 = 0.125;
  c.T = 0.25;
  c.initial_level = 1;
  const RunLog log = implicit_time_step_control(p, d, c);
  EXPECT_NEAR(log.final_time(), c.T, 1e-12);
  for (const auto& s : log.steps) EXPECT_LE(s.time_increment, c.tol_time);
}

TEST(Adapt, ExplicitDriverReachesFinalTime) {
  const Problem p = Problem::manufactured(solution_u1());
  Discretization d;
  d.eta_tilde = EtaTildeMode::per_step;
  AdaptiveConfig c;
  c.tol_space = 200.0;
  c.tol_time = 40.0;
  c.tol_time_min = 4.0;
  c.lambda0 = 0.125;
  c.T = 0.25;
  c.initial_level = 1;
  const RunLog log = explicit_time_step_control(p, d, c);
  EXPECT_NEAR(log.final_time(), c.T, 1e-12);
  EXPECT_EQ(log.rejected_steps, 0);
}
