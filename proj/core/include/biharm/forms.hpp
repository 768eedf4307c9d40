#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <memory>

#include "biharm/dg_space.hpp"

namespace biharm {

struct SparseMatrix {
  Eigen::SparseMatrix<double> values;
  bool symmetric = false;

  std::size_t dim() const { return static_cast<std::size_t>(values.rows()); }
  /// max |A - A^T| / max |A|.
  double asymmetry() const;
};

/// sigma|_e = sigma0 * h_e^-3 and xi|_e = xi0 * h_e^-1, with h_e the face weight.
struct PenaltyConfig {
  double sigma0 = 20.0;
  double xi0 = 20.0;

  void validate() const;
  double sigma(double face_weight) const { return sigma0 / (face_weight * face_weight * face_weight); }
  double xi(double face_weight) const { return xi0 / face_weight; }
};

/// Symmetric interior penalty form
///   (D_h w, D_h v) + int_Gamma ({grad Dw}.[v] + {grad Dv}.[w] - {Dw}[grad v]
///                              - {Dv}[grad w] + sigma [w].[v] + xi [grad w][grad v])
/// in the orthonormal basis of `space`.
SparseMatrix assemble_stiffness(const DgSpace& space, const PenaltyConfig& penalty);
SparseMatrix assemble_mass(const DgSpace& space);
Vector assemble_load(const DgSpace& space, const SpaceFunction& phi, int quad_degree = 0);

struct SolverOptions {
  double tol = 1e-10;
  int max_iterations = 20000;
  /// Systems smaller than this are factorized directly.
  std::size_t direct_threshold = 2000;
  /// Element block size for the block-Jacobi preconditioner.
  int block_size = 1;
};

/// Solver for a symmetric positive definite system. Small systems use a
/// sparse LDL^T factorization, larger ones block-Jacobi preconditioned CG.
/// Throws SingularSystemError on indefinite matrices or breakdown.
class SpdSolver {
 public:
  SpdSolver(const SparseMatrix& a, SolverOptions opts = {});

  Vector solve(const Vector& b) const;
  bool direct() const { return direct_ != nullptr; }
  int last_iterations() const { return last_iterations_; }

 private:
  Vector pcg(const Vector& b) const;

  SparseMatrix a_;
  SolverOptions opts_;
  std::shared_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> direct_;
  std::vector<Eigen::MatrixXd> block_inverse_;
  mutable int last_iterations_ = 0;
};

Vector solve_spd(const SparseMatrix& a, const Vector& b, double tol = 1e-10);

/// A^n on S^n: <A^n phi, chi> = B^n(phi, chi). With the orthonormal basis
/// the coefficients of A^n U are B * u.
class EllipticOperator {
 public:
  EllipticOperator(std::shared_ptr<const DgSpace> space, PenaltyConfig penalty);

  const DgSpace& space() const { return *space_; }
  const std::shared_ptr<const DgSpace>& space_ptr() const { return space_; }
  const PenaltyConfig& penalty() const { return penalty_; }
  const SparseMatrix& stiffness() const { return stiffness_; }

  FeFunction apply(const FeFunction& u) const;
  double form(const FeFunction& w, const FeFunction& v) const;

 private:
  std::shared_ptr<const DgSpace> space_;
  PenaltyConfig penalty_;
  SparseMatrix stiffness_;
};

FeFunction apply_discrete_elliptic(const FeFunction& u, const PenaltyConfig& penalty);

/// dG solution of the steady problem: B(u, v) = (phi, v).
FeFunction solve_elliptic(const EllipticOperator& op, const SpaceFunction& phi);

/// g = A U - Pi f + f, kept as a finite element part plus the analytic f.
struct GRepresentation {
  FeFunction fe_part;
  SpaceFunction analytic;

  double value(int elem, Point p) const {
    return (fe_part.space_ptr() ? fe_part.eval(elem, p).value : 0.0) + (analytic ? analytic(p) : 0.0);
  }
};

GRepresentation compute_g(const EllipticOperator& op, const FeFunction& u, const SpaceFunction& f_tilde);

/// f~ = (1/lambda) int_{t0}^{t1} f dt by a fixed Gauss rule in time.
using SpaceTimeFunction = std::function<double(Point, double)>;
SpaceFunction time_average(SpaceTimeFunction f, double t0, double t1, int points = 3);

/// (I/lambda + B) u = Pi u_prev / lambda + l(f~) on a fixed space and step.
class BackwardEulerStepper {
 public:
  BackwardEulerStepper(std::shared_ptr<const EllipticOperator> op, double lambda, SolverOptions opts = {});

  double lambda() const { return lambda_; }
  const EllipticOperator& op() const { return *op_; }
  FeFunction step(const FeFunction& u_prev, const SpaceFunction& f_tilde) const;
  /// Step with an already projected previous state and assembled load.
  FeFunction step_projected(const FeFunction& u_prev_projected, const Vector& load) const;

 private:
  std::shared_ptr<const EllipticOperator> op_;
  double lambda_;
  SparseMatrix system_;
  std::unique_ptr<SpdSolver> solver_;
};

FeFunction backward_euler_step(const FeFunction& u_prev, double lambda, const SpaceFunction& f_tilde,
                               std::shared_ptr<const DgSpace> space, const PenaltyConfig& penalty);

}  // namespace biharm
