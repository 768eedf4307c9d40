#include "biharm/quadrature.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace biharm {

IntervalRule gauss_legendre(int n) {
  if (n < 1) throw std::out_of_range("gauss_legendre: need at least one point");
  IntervalRule rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  rule.exact_degree = 2 * n - 1;
  // Newton on P_n over [-1,1], Chebyshev initial guesses.
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      const double pn = n == 1 ? x : p1;
      const double pn1 = n == 1 ? 1.0 : p0;
      dp = n * (x * pn - pn1) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute derivative at the converged node for the weight.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    const double pn = n == 1 ? x : p1;
    const double pn1 = n == 1 ? 1.0 : p0;
    dp = n * (x * pn - pn1) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // Map to [0,1], ascending order.
    rule.points[n - 1 - i] = 0.5 * (x + 1.0);
    rule.weights[n - 1 - i] = 0.5 * w;
  }
  return rule;
}

namespace {

constexpr int kMaxTriangleDegree = 20;
constexpr int kMaxEdgeDegree = 63;

TriangleRule build_triangle_rule(int degree) {
  // The collapse adds one degree in the first direction.
  const int n = (degree + 3) / 2;
  const IntervalRule g = gauss_legendre(n);
  TriangleRule rule;
  rule.exact_degree = degree;
  for (int i = 0; i < n; ++i) {
    const double u = g.points[i];
    for (int j = 0; j < n; ++j) {
      rule.points.push_back({u, (1.0 - u) * g.points[j]});
      rule.weights.push_back(g.weights[i] * g.weights[j] * (1.0 - u));
    }
  }
  return rule;
}

}  // namespace

const TriangleRule& triangle_rule(int degree) {
  if (degree < 1 || degree > kMaxTriangleDegree)
    throw std::out_of_range("triangle_rule: degree " + std::to_string(degree) + " not in [1, 20]");
  static const auto rules = [] {
    std::array<TriangleRule, kMaxTriangleDegree + 1> r;
    for (int d = 1; d <= kMaxTriangleDegree; ++d) r[d] = build_triangle_rule(d);
    return r;
  }();
  return rules[degree];
}

const IntervalRule& edge_rule(int degree) {
  if (degree < 1 || degree > kMaxEdgeDegree)
    throw std::out_of_range("edge_rule: degree " + std::to_string(degree) + " not in [1, 63]");
  static const auto rules = [] {
    std::array<IntervalRule, kMaxEdgeDegree + 1> r;
    for (int d = 1; d <= kMaxEdgeDegree; ++d) {
      r[d] = gauss_legendre((d + 2) / 2);
      r[d].exact_degree = 2 * ((d + 2) / 2) - 1;
    }
    return r;
  }();
  return rules[degree];
}

const IntervalRule& time_rule(int points) {
  if (points < 1 || points > 10)
    throw std::out_of_range("time_rule: points " + std::to_string(points) + " not in [1, 10]");
  static const auto rules = [] {
    std::array<IntervalRule, 11> r;
    for (int n = 1; n <= 10; ++n) r[n] = gauss_legendre(n);
    return r;
  }();
  return rules[points];
}

}  // namespace biharm
