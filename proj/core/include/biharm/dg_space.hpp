#pragma once

#include <Eigen/Dense>
#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

#include "biharm/mesh.hpp"
#include "biharm/quadrature.hpp"

namespace biharm {

using Vector = Eigen::VectorXd;
using SpaceFunction = std::function<double(Point)>;

/// Value and the derivatives the interior penalty form needs.
struct Jet {
  double value = 0.0;
  Point grad;
  double lap = 0.0;
  Point grad_lap;
  double bilap = 0.0;

  Jet& operator-=(const Jet& o);
  Jet& operator+=(const Jet& o);
  Jet& operator*=(double s);
};

/// Derivative jets of every local basis function at one point.
struct BasisJets {
  Vector value, dx, dy, lap, dlap_x, dlap_y, bilap;

  void resize(int n);
};

/// L2(kappa)-orthonormal basis of P_r on one physical element. Basis
/// functions are combinations of scaled monomials ((x-xc)/h)^a ((y-yc)/h)^b.
class ElementBasis {
 public:
  ElementBasis(const std::array<Point, 3>& corners, int degree);

  int size() const { return static_cast<int>(exponents_.size()); }
  void evaluate(Point p, BasisJets& out) const;
  /// Evaluates sum_k coeffs[k] phi_k at p.
  Jet evaluate(Point p, const double* coeffs) const;

 private:
  void monomials(Point p, BasisJets& out) const;

  std::vector<std::array<int, 2>> exponents_;
  Point centre_;
  double scale_ = 1.0;
  Eigen::MatrixXd transform_;  // rows: basis functions in monomial coordinates
};

/// Broken polynomial space S^r on a mesh.
class DgSpace {
 public:
  DgSpace(std::shared_ptr<const Mesh> mesh, int degree);
  DgSpace(const Mesh& mesh, int degree) : DgSpace(std::make_shared<const Mesh>(mesh), degree) {}

  const Mesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
  int degree() const { return degree_; }
  int n_local() const { return n_local_; }
  std::size_t dim() const { return mesh_->n_elements() * n_local_; }
  std::size_t offset(int elem) const { return static_cast<std::size_t>(elem) * n_local_; }
  const ElementBasis& basis(int elem) const { return bases_[elem]; }

  /// Volume rule used for smooth, non-polynomial integrands.
  int default_quadrature_degree() const { return 2 * degree_ + 4; }

 private:
  std::shared_ptr<const Mesh> mesh_;
  int degree_;
  int n_local_;
  std::vector<ElementBasis> bases_;
};

inline int polynomial_dim(int degree) { return (degree + 1) * (degree + 2) / 2; }

class FeFunction {
 public:
  FeFunction() = default;
  explicit FeFunction(std::shared_ptr<const DgSpace> space);
  FeFunction(std::shared_ptr<const DgSpace> space, Vector coeffs);

  const DgSpace& space() const { return *space_; }
  const std::shared_ptr<const DgSpace>& space_ptr() const { return space_; }
  const Vector& coeffs() const { return coeffs_; }
  Vector& coeffs() { return coeffs_; }
  const double* element_coeffs(int elem) const { return coeffs_.data() + space_->offset(elem); }

  /// Evaluation at a physical point of leaf `elem`.
  Jet eval(int elem, Point p) const;
  /// Evaluation at reference coordinates of leaf `elem`.
  Jet eval_reference(int elem, Point ref) const;

  void dump(std::ostream& os) const;

 private:
  std::shared_ptr<const DgSpace> space_;
  Vector coeffs_;
};

/// Elementwise orthogonal L2 projection of a callable.
FeFunction l2_project(std::shared_ptr<const DgSpace> space, const SpaceFunction& phi, int quad_degree = 0);

/// Overlay of two compatible meshes with, per overlay leaf, the index of
/// the containing leaf in each input.
struct OverlayMap {
  Mesh mesh;
  std::vector<int> in_a;
  std::vector<int> in_b;
};
OverlayMap make_overlay_map(const Mesh& a, const Mesh& b);

/// L2 projection of f onto `target`, integrated exactly on the overlay.
FeFunction transfer(const FeFunction& f, std::shared_ptr<const DgSpace> target);

/// Squared L2 norm of f - g for functions on compatible meshes.
double l2_distance_squared(const FeFunction& f, const FeFunction& g);
double l2_norm_squared(const FeFunction& f);

/// Squared L2 norm of f - phi, integrated on f's mesh.
double l2_error_squared(const FeFunction& f, const SpaceFunction& phi, int quad_degree = 0);

/// Traces of one or two functions on an edge of their (shared) mesh.
struct EdgeTrace {
  std::vector<Point> points;
  std::vector<double> weights;  // physical: include the edge length
  std::vector<Jet> plus;
  std::vector<Jet> minus;  // empty on boundary edges
  Point normal;            // outward normal of the "+" element

  bool boundary() const { return minus.empty(); }

  /// Scalar jump coefficient: <<v>> = jump_value(q) * normal.
  double jump_value(std::size_t q) const;
  double jump_normal_grad(std::size_t q) const;
  double jump_normal_grad_lap(std::size_t q) const;
  double jump_lap(std::size_t q) const;
  double mean_value(std::size_t q) const;
  double mean_lap(std::size_t q) const;
  Point mean_grad(std::size_t q) const;
  Point mean_grad_lap(std::size_t q) const;
};

EdgeTrace edge_traces(const FeFunction& f, int edge, const IntervalRule& rule);

}  // namespace biharm
