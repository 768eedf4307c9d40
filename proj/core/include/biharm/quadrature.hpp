#pragma once

#include <vector>

#include "biharm/mesh.hpp"

namespace biharm {

/// Rule on the reference triangle {(s,t): s,t >= 0, s+t <= 1}. Weights sum
/// to the reference area 1/2.
struct TriangleRule {
  std::vector<Point> points;
  std::vector<double> weights;
  int exact_degree = 0;

  std::size_t size() const { return weights.size(); }
};

/// Rule on [0, 1]. Weights sum to 1.
struct IntervalRule {
  std::vector<double> points;
  std::vector<double> weights;
  int exact_degree = 0;

  std::size_t size() const { return weights.size(); }
};

/// Collapsed (Duffy) tensor Gauss rule, exact for total degree <= degree.
/// Valid for 1 <= degree <= 20. Returns a reference to a cached rule.
const TriangleRule& triangle_rule(int degree);

/// Gauss-Legendre on [0,1] exact for polynomials of degree <= degree.
const IntervalRule& edge_rule(int degree);

/// n-point Gauss-Legendre on [0,1], n in [1, 10].
const IntervalRule& time_rule(int points);

/// n-point Gauss-Legendre on [0,1] for arbitrary n >= 1 (uncached).
IntervalRule gauss_legendre(int n);

/// Affine image of a reference point in the triangle (a, b, c).
inline Point map_to_triangle(const Point& a, const Point& b, const Point& c, const Point& ref) {
  return {a.x + ref.x * (b.x - a.x) + ref.y * (c.x - a.x), a.y + ref.x * (b.y - a.y) + ref.y * (c.y - a.y)};
}

}  // namespace biharm
