#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "biharm/dg_space.hpp"

using namespace biharm;

TEST(DgSpace, DimensionMatchesPolynomialSpace) {
  for (int r : {2, 3}) {
    const DgSpace s(Mesh::unit_square(2), r);
    EXPECT_EQ(s.n_local(), polynomial_dim(r));
    EXPECT_EQ(s.dim(), 16u * polynomial_dim(r));
  }
}

TEST(DgSpace, BasisIsL2Orthonormal) {
  const Mesh m = Mesh::unit_square(3);
  for (int r : {2, 3}) {
    const DgSpace s(m, r);
    const TriangleRule& rule = triangle_rule(2 * r);
    for (int k : {0, 7, 31}) {
      const auto c = m.corners(k);
      const int n = s.n_local();
      Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
      BasisJets j;
      j.resize(n);
      for (std::size_t q = 0; q < rule.size(); ++q) {
        s.basis(k).evaluate(map_to_triangle(c[0], c[1], c[2], rule.points[q]), j);
        gram += 2.0 * m.area(k) * rule.weights[q] * j.value * j.value.transpose();
      }
      EXPECT_LT((gram - Eigen::MatrixXd::Identity(n, n)).norm(), 1e-12);
    }
  }
}

TEST(DgSpace, ProjectionReproducesPolynomials) {
  auto space = std::make_shared<const DgSpace>(Mesh::unit_square(2), 3);
  const SpaceFunction p = [](Point x) { return 1.0 + x.x * x.x * x.y - 2.0 * x.y * x.y * x.y; };
  const FeFunction ph = l2_project(space, p);
  EXPECT_LT(l2_error_squared(ph, p), 1e-26);
  const Jet j = ph.eval(5, space->mesh().forest().centroid(space->mesh().leaf(5)));
  const Point c = space->mesh().forest().centroid(space->mesh().leaf(5));
  EXPECT_NEAR(j.lap, 2.0 * c.y - 12.0 * c.y, 1e-10);
  EXPECT_NEAR(j.bilap, 0.0, 1e-9);
}

TEST(DgSpace, TransferToFinerMeshIsExact) {
  const Mesh coarse = Mesh::unit_square(2);
  const Mesh fine = bisect(coarse, std::vector<int>{0, 1, 2});
  auto sc = std::make_shared<const DgSpace>(coarse, 2);
  auto sf = std::make_shared<const DgSpace>(fine, 2);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  Vector c(static_cast<Eigen::Index>(sc->dim()));
  for (auto& x : c) x = n(rng);
  const FeFunction u(sc, c);
  const FeFunction uf = transfer(u, sf);
  EXPECT_LT(l2_distance_squared(u, uf), 1e-24 * l2_norm_squared(u));
  EXPECT_NEAR(l2_norm_squared(u), c.squaredNorm(), 1e-10 * c.squaredNorm());
}

TEST(DgSpace, TransferToCoarserMeshIsContraction) {
  const Mesh coarse = Mesh::unit_square(2);
  const Mesh fine = coarse.uniform(3);
  auto sc = std::make_shared<const DgSpace>(coarse, 2);
  auto sf = std::make_shared<const DgSpace>(fine, 2);
  const FeFunction u = l2_project(sf, [](Point p) { return std::sin(7 * p.x) * std::cos(5 * p.y); });
  const FeFunction uc = transfer(u, sc);
  EXPECT_LE(l2_norm_squared(uc), l2_norm_squared(u) + 1e-14);
  EXPECT_NEAR(l2_distance_squared(u, uc) + l2_norm_squared(uc), l2_norm_squared(u), 1e-12);
}

TEST(DgSpace, OverlayMapCoversBothMeshes) {
  const Mesh a = bisect(Mesh::unit_square(1), std::vector<int>{0});
  const Mesh b = bisect(a, std::vector<int>{4});
  const OverlayMap ov = make_overlay_map(a, b);
  EXPECT_EQ(ov.mesh, b);
  ASSERT_EQ(ov.in_a.size(), ov.mesh.n_elements());
  ASSERT_EQ(ov.in_b.size(), ov.mesh.n_elements());
  for (std::size_t k = 0; k < ov.in_a.size(); ++k) {
    EXPECT_TRUE(a.forest().is_ancestor_or_self(a.leaf(ov.in_a[k]), ov.mesh.leaf(static_cast<int>(k))));
    EXPECT_EQ(b.leaf(ov.in_b[k]), ov.mesh.leaf(static_cast<int>(k)));
  }
}

TEST(DgSpace, EdgeTraceJumpsVanishForSmoothProjection) {
  auto space = std::make_shared<const DgSpace>(Mesh::unit_square(2), 2);
  const FeFunction u = l2_project(space, [](Point p) { return p.x * p.x - p.y; });
  const IntervalRule& rule = edge_rule(6);
  for (int e = 0; e < static_cast<int>(space->mesh().edges().size()); ++e) {
    const EdgeTrace tr = edge_traces(u, e, rule);
    if (tr.boundary()) continue;
    for (std::size_t q = 0; q < tr.points.size(); ++q) {
      EXPECT_NEAR(tr.jump_value(q), 0.0, 1e-12);
      EXPECT_NEAR(tr.jump_normal_grad(q), 0.0, 1e-11);
    }
  }
}
