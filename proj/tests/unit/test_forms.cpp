#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "biharm/forms.hpp"

using namespace biharm;

namespace {

FeFunction random_function(std::shared_ptr<const DgSpace> s, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  Vector c(static_cast<Eigen::Index>(s->dim()));
  for (auto& x : c) x = n(rng);
  return FeFunction(std::move(s), c);
}

}  // namespace

TEST(Forms, StiffnessIsSymmetric) {
  for (int r : {2, 3}) {
    const DgSpace s(Mesh::unit_square(2), r);
    EXPECT_LT(assemble_stiffness(s, {}).asymmetry(), 1e-12);
  }
}

TEST(Forms, MassIsIdentityForOrthonormalBasis) {
  const DgSpace s(Mesh::unit_square(2), 2);
  const SparseMatrix m = assemble_mass(s);
  Eigen::MatrixXd d = Eigen::MatrixXd(m.values) - Eigen::MatrixXd::Identity(s.dim(), s.dim());
  EXPECT_LT(d.norm(), 1e-11);
}

TEST(Forms, QuadraticWithClampedDataHasZeroEnergyOnlyForZero) {
  auto s = std::make_shared<const DgSpace>(Mesh::unit_square(2), 2);
  const EllipticOperator op(s, {});
  const FeFunction w = random_function(s, 3);
  EXPECT_GT(op.form(w, w), 0.0);
}

TEST(Forms, NegativePenaltyIsRejected) { EXPECT_THROW((PenaltyConfig{-1.0, 20.0}.validate()), std::exception); }

TEST(Forms, PenaltiesScaleWithFaceWeight) {
  const PenaltyConfig p{20.0, 10.0};
  EXPECT_DOUBLE_EQ(p.sigma(0.5), 160.0);
  EXPECT_DOUBLE_EQ(p.xi(0.5), 20.0);
}

TEST(Forms, SolverAgreesWithDirectSolve) {
  auto s = std::make_shared<const DgSpace>(Mesh::unit_square(3), 2);
  SparseMatrix a = assemble_stiffness(*s, {});
  a.values += assemble_mass(*s).values;
  const Vector b = random_function(s, 4).coeffs();
  SolverOptions direct;
  SolverOptions iterative;
  iterative.direct_threshold = 0;
  iterative.tol = 1e-12;
  const Vector x1 = SpdSolver(a, direct).solve(b);
  const SpdSolver it(a, iterative);
  const Vector x2 = it.solve(b);
  EXPECT_FALSE(it.direct());
  EXPECT_LT((x1 - x2).norm(), 1e-8 * x1.norm());
  EXPECT_LT((a.values * x1 - b).norm(), 1e-9 * b.norm());
}

TEST(Forms, EllipticSolveRecoversQuarticBubbleApproximately) {
  // u = x^2(1-x)^2 y^2(1-y)^2 has clamped boundary values.
  auto q = [](double t) { return t * t * (1 - t) * (1 - t); };
  auto q2 = [](double t) { return 2 - 12 * t + 12 * t * t; };
  const SpaceFunction u = [&](Point p) { return q(p.x) * q(p.y); };
  const SpaceFunction f = [&](Point p) { return 24 * q(p.y) + 2 * q2(p.x) * q2(p.y) + 24 * q(p.x); };
  double prev = 1e300;
  for (int level : {2, 4}) {
    auto s = std::make_shared<const DgSpace>(Mesh::unit_square(level), 3);
    const EllipticOperator op(s, {100.0, 20.0});
    const double err = std::sqrt(l2_error_squared(solve_elliptic(op, f), u));
    EXPECT_LT(err, prev);
    prev = err;
  }
  EXPECT_LT(prev, 1e-4);
}

TEST(Forms, TimeAverageOfLinearFunctionIsMidpointValue) {
  const SpaceTimeFunction f = [](Point p, double t) { return p.x + 3 * t; };
  const SpaceFunction avg = time_average(f, 0.2, 0.6);
  EXPECT_NEAR(avg({0.5, 0.0}), 0.5 + 1.2, 1e-14);
}

TEST(Forms, BackwardEulerStepSatisfiesDiscreteEquation) {
  auto s = std::make_shared<const DgSpace>(Mesh::unit_square(2), 2);
  const FeFunction u0 = l2_project(s, [](Point p) { return std::sin(3 * p.x) * p.y; });
  const SpaceFunction f = [](Point p) { return p.x * p.y; };
  const double lambda = 0.01;
  const FeFunction u1 = backward_euler_step(u0, lambda, f, s, {});
  const SparseMatrix b = assemble_stiffness(*s, {});
  const Vector load = assemble_load(*s, f);
  const Vector residual = (u1.coeffs() - u0.coeffs()) / lambda + b.values * u1.coeffs() - load;
  EXPECT_LT(residual.norm(), 1e-8 * load.norm() + 1e-8);
}

TEST(Forms, GProjectsOntoDiscreteOperator) {
  auto s = std::make_shared<const DgSpace>(Mesh::unit_square(2), 2);
  const EllipticOperator op(s, {});
  const FeFunction u = random_function(s, 9);
  const SpaceFunction f = [](Point p) { return p.x * p.x * p.y; };
  const GRepresentation g = compute_g(op, u, f);
  // Projecting g = B u - P f + f onto the space gives B u.
  const FeFunction pg = l2_project(s, [&](Point p) { return g.analytic(p); });
  const Vector projected = g.fe_part.coeffs() + pg.coeffs();
  const Vector bu = op.stiffness().values * u.coeffs();
  EXPECT_LT((projected - bu).norm(), 1e-10 * bu.norm());
  EXPECT_NEAR(g.value(0, {0.1, 0.05}), g.fe_part.eval(0, {0.1, 0.05}).value + f({0.1, 0.05}), 1e-12);
}
