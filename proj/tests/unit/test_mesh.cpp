#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "biharm/mesh.hpp"

using namespace biharm;

namespace {

double total_area(const Mesh& m) {
  double a = 0.0;
  for (int k = 0; k < static_cast<int>(m.n_elements()); ++k) a += m.area(k);
  return a;
}

std::vector<int> all(const Mesh& m) {
  std::vector<int> v(m.n_elements());
  std::iota(v.begin(), v.end(), 0);
  return v;
}

}  // namespace

TEST(Mesh, UniformLevelsHaveExpectedCountsAndSizes) {
  for (int level = 0; level <= 5; ++level) {
    const Mesh m = Mesh::unit_square(level);
    EXPECT_EQ(m.n_elements(), 4u << level);
    EXPECT_NEAR(total_area(m), 1.0, 1e-14);
    for (int k = 0; k < static_cast<int>(m.n_elements()); ++k)
      EXPECT_NEAR(m.element_size(k), std::pow(2.0, -0.5 * level - 1.0), 1e-14);
    EXPECT_EQ(count_nonconforming(m), 0u);
  }
}

TEST(Mesh, DiagonalMacroHasTwoElements) {
  const Mesh m = Mesh::unit_square_diagonal(0);
  EXPECT_EQ(m.n_elements(), 2u);
  EXPECT_NEAR(total_area(m), 1.0, 1e-15);
  EXPECT_EQ(m.edges().size(), 5u);
}

TEST(Mesh, EdgesAreCountedOnce) {
  const Mesh m = Mesh::unit_square(2);
  int boundary = 0, interior = 0;
  for (const auto& e : m.edges()) (e.is_boundary() ? boundary : interior)++;
  // Euler: 3T = 2 E_int + E_bdry.
  EXPECT_EQ(3 * static_cast<int>(m.n_elements()), 2 * interior + boundary);
  EXPECT_EQ(boundary, 8);
}

TEST(Mesh, NormalsPointOutOfThePlusElement) {
  const Mesh m = Mesh::unit_square(3);
  for (int e = 0; e < static_cast<int>(m.edges().size()); ++e) {
    const auto& edge = m.edges()[e];
    const auto c = m.corners(edge.elem[0]);
    const Point g{(c[0].x + c[1].x + c[2].x) / 3, (c[0].y + c[1].y + c[2].y) / 3};
    EXPECT_GT(dot(m.edge_point(e, 0.5) - g, m.normal(e)), 0.0);
    EXPECT_NEAR(std::hypot(m.normal(e).x, m.normal(e).y), 1.0, 1e-14);
  }
}

TEST(Mesh, BisectionClosureKeepsConformity) {
  Mesh m = Mesh::unit_square(1);
  for (int i = 0; i < 6; ++i) {
    m = bisect(m, std::vector<int>{0});
    EXPECT_EQ(count_nonconforming(m), 0u);
    EXPECT_NEAR(total_area(m), 1.0, 1e-14);
  }
  EXPECT_GT(m.n_elements(), 8u + 6u);
}

TEST(Mesh, CoarseningUndoesOneUniformRefinement) {
  const Mesh m2 = Mesh::unit_square(2);
  const Mesh m3 = bisect(m2, all(m2));
  EXPECT_EQ(m3, m2.uniform(3));
  EXPECT_EQ(coarsen(m3, all(m3)), m2);
}

TEST(Mesh, CoarseningNeverGoesBelowMacro) {
  const Mesh m0 = Mesh::unit_square(0);
  EXPECT_EQ(coarsen(m0, all(m0)), m0);
}

TEST(Mesh, CommonCoarseningAndOverlayOfNestedMeshes) {
  const Mesh a = Mesh::unit_square(2);
  const Mesh b = bisect(a, std::vector<int>{3, 7});
  EXPECT_EQ(finest_common_coarsening(a, b), a);
  EXPECT_EQ(overlay(a, b), b);
  EXPECT_EQ(finest_common_coarsening(b, a), a);
}

TEST(Mesh, RandomAdaptationStaysConforming) {
  std::mt19937 rng(5);
  Mesh m = Mesh::unit_square(2);
  for (int i = 0; i < 20; ++i) {
    std::vector<int> mark;
    for (int k = 0; k < static_cast<int>(m.n_elements()); ++k)
      if (rng() % 5 == 0) mark.push_back(k);
    m = (i % 3 == 2) ? coarsen(m, mark) : bisect(m, mark);
    ASSERT_EQ(count_nonconforming(m), 0u);
    ASSERT_NEAR(total_area(m), 1.0, 1e-13);
  }
}

TEST(Mesh, UniformRefinementIsRelativeToTheMacroMesh) {
  const Mesh m = Mesh::unit_square(1);
  EXPECT_EQ(m.uniform(3).n_elements(), 32u);
  EXPECT_TRUE(m.uniform(3).compatible_with(m));
}

TEST(Mesh, MeshesFromDifferentForestsAreIncompatible) {
  EXPECT_FALSE(Mesh::unit_square(1).compatible_with(Mesh::unit_square(1)));
  const Mesh m = Mesh::unit_square(1);
  EXPECT_TRUE(m.compatible_with(bisect(m, std::vector<int>{0})));
}

TEST(Mesh, FromTrianglesRejectsClockwiseInput) {
  const std::vector<Point> v{{0, 0}, {1, 0}, {0, 1}};
  const std::array<VertexId, 3> cw{0, 2, 1};
  EXPECT_THROW(Forest::from_triangles(v, std::span(&cw, 1)), std::exception);
}
