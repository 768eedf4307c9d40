#include "biharm/forms.hpp"

#include <cmath>
#include <stdexcept>

#include "biharm/error.hpp"

namespace biharm {

double SparseMatrix::asymmetry() const {
  const Eigen::SparseMatrix<double> t = values.transpose();
  const Eigen::SparseMatrix<double> d = values - t;
  double dmax = 0.0;
  double amax = 0.0;
  for (int k = 0; k < d.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(d, k); it; ++it) dmax = std::max(dmax, std::abs(it.value()));
  for (int k = 0; k < values.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(values, k); it; ++it)
      amax = std::max(amax, std::abs(it.value()));
  return amax > 0.0 ? dmax / amax : 0.0;
}

void PenaltyConfig::validate() const {
  if (!(sigma0 > 0.0) || !(xi0 > 0.0)) throw std::invalid_argument("penalty parameters must be positive");
}

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

void add_block(Triplets& t, std::size_t row0, std::size_t col0, const Eigen::MatrixXd& block) {
  for (int j = 0; j < block.cols(); ++j)
    for (int i = 0; i < block.rows(); ++i)
      t.emplace_back(static_cast<int>(row0 + i), static_cast<int>(col0 + j), block(i, j));
}

}  // namespace

SparseMatrix assemble_stiffness(const DgSpace& space, const PenaltyConfig& penalty) {
  penalty.validate();
  const Mesh& mesh = space.mesh();
  const int n = space.n_local();
  const int r = space.degree();
  Triplets trip;
  trip.reserve(mesh.n_elements() * n * n * 7);

  const TriangleRule& vrule = triangle_rule(std::max(1, 2 * r));
  BasisJets bj;
  for (std::size_t i = 0; i < mesh.n_elements(); ++i) {
    const int e = static_cast<int>(i);
    const auto c = mesh.corners(e);
    const double jac = 2.0 * mesh.area(e);
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t q = 0; q < vrule.size(); ++q) {
      space.basis(e).evaluate(map_to_triangle(c[0], c[1], c[2], vrule.points[q]), bj);
      local.noalias() += (jac * vrule.weights[q]) * bj.lap * bj.lap.transpose();
    }
    add_block(trip, space.offset(e), space.offset(e), local);
  }

  // Per edge, each side contributes trace vectors over its n basis
  // functions: j0 = s*phi, j1 = s*grad(phi).n, a3 = a*grad(lap phi).n and
  // a2 = a*lap(phi), with s = +-1 the side sign and a the averaging weight.
  const IntervalRule& erule = edge_rule(std::max(1, 2 * r));
  for (std::size_t k = 0; k < mesh.edges().size(); ++k) {
    const int ei = static_cast<int>(k);
    const Edge& edge = mesh.edges()[k];
    const Point nrm = mesh.normal(ei);
    const double hw = mesh.face_weight(ei);
    const double sig = penalty.sigma(hw);
    const double xi = penalty.xi(hw);
    const double len = mesh.edge_size(ei);
    const int sides = edge.is_boundary() ? 1 : 2;
    const double avg = edge.is_boundary() ? 1.0 : 0.5;
    const int m = sides * n;
    Vector j0(m), j1(m), a3(m), a2(m);
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(m, m);
    for (std::size_t q = 0; q < erule.size(); ++q) {
      const Point x = mesh.edge_point(ei, erule.points[q]);
      for (int s = 0; s < sides; ++s) {
        const double sign = s == 0 ? 1.0 : -1.0;
        space.basis(edge.elem[s]).evaluate(x, bj);
        j0.segment(s * n, n) = sign * bj.value;
        j1.segment(s * n, n) = sign * (nrm.x * bj.dx + nrm.y * bj.dy);
        a3.segment(s * n, n) = avg * (nrm.x * bj.dlap_x + nrm.y * bj.dlap_y);
        a2.segment(s * n, n) = avg * bj.lap;
      }
      const double w = len * erule.weights[q];
      local.noalias() += w * (j0 * a3.transpose() + a3 * j0.transpose() - j1 * a2.transpose() -
                              a2 * j1.transpose() + sig * j0 * j0.transpose() + xi * j1 * j1.transpose());
    }
    for (int s = 0; s < sides; ++s)
      for (int t = 0; t < sides; ++t)
        add_block(trip, space.offset(edge.elem[s]), space.offset(edge.elem[t]), local.block(s * n, t * n, n, n));
  }

  SparseMatrix out;
  const auto dim = static_cast<int>(space.dim());
  out.values.resize(dim, dim);
  out.values.setFromTriplets(trip.begin(), trip.end());
  out.values.makeCompressed();
  out.symmetric = true;
  return out;
}

SparseMatrix assemble_mass(const DgSpace& space) {
  const Mesh& mesh = space.mesh();
  const int n = space.n_local();
  const TriangleRule& rule = triangle_rule(std::max(1, 2 * space.degree()));
  Triplets trip;
  BasisJets bj;
  for (std::size_t i = 0; i < mesh.n_elements(); ++i) {
    const int e = static_cast<int>(i);
    const auto c = mesh.corners(e);
    const double jac = 2.0 * mesh.area(e);
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      space.basis(e).evaluate(map_to_triangle(c[0], c[1], c[2], rule.points[q]), bj);
      local.noalias() += (jac * rule.weights[q]) * bj.value * bj.value.transpose();
    }
    add_block(trip, space.offset(e), space.offset(e), local);
  }
  SparseMatrix out;
  const auto dim = static_cast<int>(space.dim());
  out.values.resize(dim, dim);
  out.values.setFromTriplets(trip.begin(), trip.end());
  out.symmetric = true;
  return out;
}

Vector assemble_load(const DgSpace& space, const SpaceFunction& phi, int quad_degree) {
  // The basis is orthonormal, so the load vector equals the coefficients
  // of the L2 projection.
  auto dummy = std::shared_ptr<const DgSpace>(&space, [](const DgSpace*) {});
  return l2_project(dummy, phi, quad_degree).coeffs();
}

// ---------------------------------------------------------------------------

SpdSolver::SpdSolver(const SparseMatrix& a, SolverOptions opts) : a_(a), opts_(opts) {
  if (a_.dim() < opts_.direct_threshold) {
    direct_ = std::make_shared<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>();
    direct_->compute(a_.values);
    if (direct_->info() != Eigen::Success) throw SingularSystemError("LDL^T factorization failed");
    if (!(direct_->vectorD().minCoeff() > 0.0))
      throw SingularSystemError("matrix is not positive definite (non-positive pivot)");
    return;
  }
  const int bs = std::max(1, opts_.block_size);
  const auto n = static_cast<int>(a_.dim());
  if (n % bs != 0) throw std::invalid_argument("SpdSolver: block size does not divide dimension");
  block_inverse_.reserve(n / bs);
  for (int b0 = 0; b0 < n; b0 += bs) {
    Eigen::MatrixXd blk = Eigen::MatrixXd(a_.values.block(b0, b0, bs, bs));
    Eigen::LLT<Eigen::MatrixXd> llt(blk);
    if (llt.info() != Eigen::Success) throw SingularSystemError("indefinite diagonal block in preconditioner");
    block_inverse_.push_back(llt.solve(Eigen::MatrixXd::Identity(bs, bs)));
  }
}

Vector SpdSolver::solve(const Vector& b) const {
  const double bnorm = b.norm();
  if (bnorm == 0.0) return Vector::Zero(b.size());
  if (!direct_) return pcg(b);
  Vector x = direct_->solve(b);
  for (int refine = 0; refine < 3; ++refine) {
    const Vector r = b - a_.values * x;
    if (r.norm() <= opts_.tol * bnorm) break;
    x += direct_->solve(r);
  }
  last_iterations_ = 1;
  return x;
}

Vector SpdSolver::pcg(const Vector& b) const {
  const int bs = std::max(1, opts_.block_size);
  auto precondition = [&](const Vector& r) {
    Vector z(r.size());
    for (std::size_t k = 0; k < block_inverse_.size(); ++k) {
      const auto off = static_cast<Eigen::Index>(k * bs);
      z.segment(off, bs).noalias() = block_inverse_[k] * r.segment(off, bs);
    }
    return z;
  };
  const double bnorm = b.norm();
  Vector x = Vector::Zero(b.size());
  Vector r = b;
  Vector z = precondition(r);
  Vector p = z;
  double rz = r.dot(z);
  for (int it = 1; it <= opts_.max_iterations; ++it) {
    const Vector q = a_.values * p;
    const double pq = p.dot(q);
    if (!(pq > 0.0)) throw SingularSystemError("conjugate gradient breakdown: matrix is not positive definite");
    const double alpha = rz / pq;
    x += alpha * p;
    r -= alpha * q;
    if (r.norm() <= opts_.tol * bnorm) {
      last_iterations_ = it;
      return x;
    }
    z = precondition(r);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  throw SingularSystemError("conjugate gradient did not converge within the iteration cap");
}

Vector solve_spd(const SparseMatrix& a, const Vector& b, double tol) {
  SolverOptions opts;
  opts.tol = tol;
  return SpdSolver(a, opts).solve(b);
}

// ---------------------------------------------------------------------------

EllipticOperator::EllipticOperator(std::shared_ptr<const DgSpace> space, PenaltyConfig penalty)
    : space_(std::move(space)), penalty_(penalty), stiffness_(assemble_stiffness(*space_, penalty_)) {}

FeFunction EllipticOperator::apply(const FeFunction& u) const {
  return FeFunction(space_, stiffness_.values * u.coeffs());
}

double EllipticOperator::form(const FeFunction& w, const FeFunction& v) const {
  return v.coeffs().dot(stiffness_.values * w.coeffs());
}

FeFunction apply_discrete_elliptic(const FeFunction& u, const PenaltyConfig& penalty) {
  return EllipticOperator(u.space_ptr(), penalty).apply(u);
}

FeFunction solve_elliptic(const EllipticOperator& op, const SpaceFunction& phi) {
  SolverOptions opts;
  opts.block_size = op.space().n_local();
  const SpdSolver solver(op.stiffness(), opts);
  return FeFunction(op.space_ptr(), solver.solve(assemble_load(op.space(), phi)));
}

GRepresentation compute_g(const EllipticOperator& op, const FeFunction& u, const SpaceFunction& f_tilde) {
  Vector fe = op.stiffness().values * u.coeffs();
  fe -= assemble_load(op.space(), f_tilde);
  return {FeFunction(op.space_ptr(), std::move(fe)), f_tilde};
}

SpaceFunction time_average(SpaceTimeFunction f, double t0, double t1, int points) {
  const IntervalRule& rule = time_rule(points);
  const double len = t1 - t0;
  return [f = std::move(f), t0, len, &rule](Point x) {
    double s = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) s += rule.weights[q] * f(x, t0 + len * rule.points[q]);
    return s;
  };
}

// ---------------------------------------------------------------------------

BackwardEulerStepper::BackwardEulerStepper(std::shared_ptr<const EllipticOperator> op, double lambda,
                                           SolverOptions opts)
    : op_(std::move(op)), lambda_(lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("time step must be positive");
  const auto dim = static_cast<int>(op_->space().dim());
  Eigen::SparseMatrix<double> id(dim, dim);
  id.setIdentity();
  system_.values = op_->stiffness().values + (1.0 / lambda) * id;
  system_.symmetric = true;
  opts.block_size = op_->space().n_local();
  solver_ = std::make_unique<SpdSolver>(system_, opts);
}

FeFunction BackwardEulerStepper::step_projected(const FeFunction& u_prev_projected, const Vector& load) const {
  const Vector rhs = (1.0 / lambda_) * u_prev_projected.coeffs() + load;
  return FeFunction(op_->space_ptr(), solver_->solve(rhs));
}

FeFunction BackwardEulerStepper::step(const FeFunction& u_prev, const SpaceFunction& f_tilde) const {
  const FeFunction projected = transfer(u_prev, op_->space_ptr());
  return step_projected(projected, assemble_load(op_->space(), f_tilde));
}

FeFunction backward_euler_step(const FeFunction& u_prev, double lambda, const SpaceFunction& f_tilde,
                               std::shared_ptr<const DgSpace> space, const PenaltyConfig& penalty) {
  if (!(lambda > 0.0)) throw std::invalid_argument("time step must be positive");
  auto op = std::make_shared<const EllipticOperator>(std::move(space), penalty);
  return BackwardEulerStepper(op, lambda).step(u_prev, f_tilde);
}

}  // namespace biharm
