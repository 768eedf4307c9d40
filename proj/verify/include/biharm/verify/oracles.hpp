#pragma once

// Reference computations that share no code path with the library routines
// they check: geometry is recomputed from corner coordinates, overlays are
// found by brute-force ancestry tests and projections use monomial bases.

#include <array>
#include <functional>
#include <vector>

#include "biharm/forms.hpp"
#include "biharm/quadrature.hpp"

namespace biharm::oracle {

/// The seven terms of B(w, v): volume, the two grad-lap consistency terms,
/// the two lap consistency terms, value penalty, gradient penalty.
struct BilinearTerms {
  std::array<double, 7> terms{};
  double sum() const;
};

BilinearTerms dense_bilinear(const FeFunction& w, const FeFunction& v, const PenaltyConfig& penalty);

/// Sum over elements of the boundary integral of v q.n, and the edge form
/// int_Gamma [v].{q} + int_Gamma_int {v}[q].
struct BoundaryIdentity {
  double element_sum = 0.0;
  double edge_sum = 0.0;
};
BoundaryIdentity boundary_identity(const FeFunction& v, const FeFunction& qx, const FeFunction& qy);

/// Nested five-point Laplacian with two Richardson levels over steps h, 2h
/// and 4h, so the truncation error is O(h^6).
double fd_bilaplacian(const std::function<double(Point)>& u, Point p, double h = 4e-3);
/// Central difference with Richardson extrapolation over dt and 2 dt.
double fd_time_derivative(const std::function<double(double)>& u, double t, double dt = 1e-4);

/// A triangle of the common refinement with the leaves containing it.
struct Piece {
  int elem_a = -1;
  int elem_b = -1;
  std::array<Point, 3> corners{};
};
std::vector<Piece> overlay_pieces(const Mesh& a, const Mesh& b);

/// Forest nodes of the overlay and of the finest common coarsening, sorted.
std::vector<ElementId> overlay_leaves(const Mesh& a, const Mesh& b);
std::vector<ElementId> common_coarsening_leaves(const Mesh& a, const Mesh& b);

/// ||u - P u||^2 with P the L2 projection onto degree-r polynomials on
/// each leaf of `target`, computed with a monomial basis.
double projection_defect_squared(const FeFunction& u, const Mesh& target, int degree);

/// ||g_a - g_b||^2 on the brute-force overlay.
double g_distance_squared(const GRepresentation& a, const GRepresentation& b);

/// int_{t0}^{t1} ||f_tilde - f(t)||^2 dt with a composite 3-point Gauss rule
/// on `subintervals` pieces.
double beta_inf(const Mesh& mesh, const SpaceTimeFunction& f, const SpaceFunction& f_tilde, double t0, double t1,
                int subintervals = 64);

/// Spearman rank correlation.
double rank_correlation(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace biharm::oracle
