#include "biharm/dg_space.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "biharm/error.hpp"

namespace biharm {

Jet& Jet::operator-=(const Jet& o) {
  value -= o.value;
  grad = grad - o.grad;
  lap -= o.lap;
  grad_lap = grad_lap - o.grad_lap;
  bilap -= o.bilap;
  return *this;
}

Jet& Jet::operator+=(const Jet& o) {
  value += o.value;
  grad = grad + o.grad;
  lap += o.lap;
  grad_lap = grad_lap + o.grad_lap;
  bilap += o.bilap;
  return *this;
}

Jet& Jet::operator*=(double s) {
  value *= s;
  grad = s * grad;
  lap *= s;
  grad_lap = s * grad_lap;
  bilap *= s;
  return *this;
}

void BasisJets::resize(int n) {
  value.resize(n);
  dx.resize(n);
  dy.resize(n);
  lap.resize(n);
  dlap_x.resize(n);
  dlap_y.resize(n);
  bilap.resize(n);
}

// ---------------------------------------------------------------------------

ElementBasis::ElementBasis(const std::array<Point, 3>& corners, int degree) {
  for (int d = 0; d <= degree; ++d)
    for (int j = 0; j <= d; ++j) exponents_.push_back({d - j, j});

  const Point& a = corners[0];
  const Point& b = corners[1];
  const Point& c = corners[2];
  const double area = 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
  if (!(area > 0.0)) throw GeometryError("ElementBasis: non-positive element area");
  centre_ = (1.0 / 3.0) * (a + b + c);
  scale_ = std::sqrt(area);

  const int n = size();
  transform_ = Eigen::MatrixXd::Identity(n, n);
  const TriangleRule& rule = triangle_rule(std::max(1, 2 * degree));
  Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(n, n);
  BasisJets m;
  m.resize(n);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    monomials(map_to_triangle(a, b, c, rule.points[q]), m);
    mass.noalias() += (2.0 * area * rule.weights[q]) * m.value * m.value.transpose();
  }
  Eigen::LLT<Eigen::MatrixXd> llt(mass);
  if (llt.info() != Eigen::Success) throw GeometryError("ElementBasis: singular monomial mass matrix");
  const Eigen::MatrixXd lower = llt.matrixL();
  transform_ = lower.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(n, n));
}

void ElementBasis::monomials(Point p, BasisJets& out) const {
  const int n = size();
  out.resize(n);
  const double inv = 1.0 / scale_;
  const double xi = (p.x - centre_.x) * inv;
  const double eta = (p.y - centre_.y) * inv;
  int max_deg = 0;
  for (const auto& e : exponents_) max_deg = std::max(max_deg, e[0] + e[1]);
  std::array<double, 16> px{};
  std::array<double, 16> py{};
  px[0] = py[0] = 1.0;
  for (int k = 1; k <= max_deg; ++k) {
    px[k] = px[k - 1] * xi;
    py[k] = py[k - 1] * eta;
  }
  // D^(p,q) of xi^a eta^b, including the chain-rule factor h^-(p+q).
  auto deriv = [&](int a, int b, int dp, int dq) {
    if (dp > a || dq > b) return 0.0;
    double f = 1.0;
    for (int k = 0; k < dp; ++k) f *= (a - k);
    for (int k = 0; k < dq; ++k) f *= (b - k);
    return f * px[a - dp] * py[b - dq] * std::pow(inv, dp + dq);
  };
  for (int k = 0; k < n; ++k) {
    const int a = exponents_[k][0];
    const int b = exponents_[k][1];
    out.value[k] = px[a] * py[b];
    out.dx[k] = deriv(a, b, 1, 0);
    out.dy[k] = deriv(a, b, 0, 1);
    out.lap[k] = deriv(a, b, 2, 0) + deriv(a, b, 0, 2);
    out.dlap_x[k] = deriv(a, b, 3, 0) + deriv(a, b, 1, 2);
    out.dlap_y[k] = deriv(a, b, 2, 1) + deriv(a, b, 0, 3);
    out.bilap[k] = deriv(a, b, 4, 0) + 2.0 * deriv(a, b, 2, 2) + deriv(a, b, 0, 4);
  }
}

void ElementBasis::evaluate(Point p, BasisJets& out) const {
  thread_local BasisJets m;
  monomials(p, m);
  out.resize(size());
  out.value.noalias() = transform_ * m.value;
  out.dx.noalias() = transform_ * m.dx;
  out.dy.noalias() = transform_ * m.dy;
  out.lap.noalias() = transform_ * m.lap;
  out.dlap_x.noalias() = transform_ * m.dlap_x;
  out.dlap_y.noalias() = transform_ * m.dlap_y;
  out.bilap.noalias() = transform_ * m.bilap;
}

Jet ElementBasis::evaluate(Point p, const double* coeffs) const {
  thread_local BasisJets m;
  monomials(p, m);
  const Eigen::Map<const Vector> c(coeffs, size());
  const Vector mc = transform_.transpose() * c;
  Jet j;
  j.value = mc.dot(m.value);
  j.grad = {mc.dot(m.dx), mc.dot(m.dy)};
  j.lap = mc.dot(m.lap);
  j.grad_lap = {mc.dot(m.dlap_x), mc.dot(m.dlap_y)};
  j.bilap = mc.dot(m.bilap);
  return j;
}

// ---------------------------------------------------------------------------

DgSpace::DgSpace(std::shared_ptr<const Mesh> mesh, int degree)
    : mesh_(std::move(mesh)), degree_(degree), n_local_(polynomial_dim(degree)) {
  if (degree < 0 || degree > 6) throw std::out_of_range("DgSpace: degree must be in [0, 6]");
  bases_.reserve(mesh_->n_elements());
  for (std::size_t i = 0; i < mesh_->n_elements(); ++i)
    bases_.emplace_back(mesh_->corners(static_cast<int>(i)), degree);
}

FeFunction::FeFunction(std::shared_ptr<const DgSpace> space)
    : space_(std::move(space)), coeffs_(Vector::Zero(space_->dim())) {}

FeFunction::FeFunction(std::shared_ptr<const DgSpace> space, Vector coeffs)
    : space_(std::move(space)), coeffs_(std::move(coeffs)) {
  if (static_cast<std::size_t>(coeffs_.size()) != space_->dim())
    throw std::invalid_argument("FeFunction: coefficient vector has wrong length");
}

Jet FeFunction::eval(int elem, Point p) const {
  if (elem < 0 || static_cast<std::size_t>(elem) >= space_->mesh().n_elements())
    throw GeometryError("FeFunction::eval: element " + std::to_string(elem) + " is not a leaf");
  return space_->basis(elem).evaluate(p, element_coeffs(elem));
}

Jet FeFunction::eval_reference(int elem, Point ref) const {
  const auto c = space_->mesh().corners(elem);
  return eval(elem, map_to_triangle(c[0], c[1], c[2], ref));
}

void FeFunction::dump(std::ostream& os) const {
  const Mesh& mesh = space_->mesh();
  os.precision(17);
  os << "degree " << space_->degree() << " mesh " << mesh.forest().tag() << " elements "
     << mesh.n_elements() << '\n';
  for (std::size_t i = 0; i < mesh.n_elements(); ++i) {
    os << mesh.leaf(static_cast<int>(i));
    const double* c = element_coeffs(static_cast<int>(i));
    for (int k = 0; k < space_->n_local(); ++k) os << ' ' << c[k];
    os << '\n';
  }
}

// ---------------------------------------------------------------------------

FeFunction l2_project(std::shared_ptr<const DgSpace> space, const SpaceFunction& phi, int quad_degree) {
  const DgSpace& s = *space;
  const Mesh& mesh = s.mesh();
  const TriangleRule& rule = triangle_rule(quad_degree > 0 ? quad_degree : s.default_quadrature_degree());
  FeFunction out(space);
  BasisJets bj;
  for (std::size_t i = 0; i < mesh.n_elements(); ++i) {
    const int e = static_cast<int>(i);
    const auto c = mesh.corners(e);
    const double jac = 2.0 * mesh.area(e);
    auto local = out.coeffs().segment(s.offset(e), s.n_local());
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Point x = map_to_triangle(c[0], c[1], c[2], rule.points[q]);
      const double v = phi(x);
      if (!std::isfinite(v)) throw NonFiniteError("l2_project: non-finite integrand value");
      s.basis(e).evaluate(x, bj);
      local += (jac * rule.weights[q] * v) * bj.value;
    }
  }
  return out;
}

OverlayMap make_overlay_map(const Mesh& a, const Mesh& b) {
  OverlayMap m{overlay(a, b), {}, {}};
  m.in_a.reserve(m.mesh.n_elements());
  m.in_b.reserve(m.mesh.n_elements());
  for (ElementId e : m.mesh.leaves()) {
    m.in_a.push_back(a.ancestor_leaf(e));
    m.in_b.push_back(b.ancestor_leaf(e));
  }
  return m;
}

FeFunction transfer(const FeFunction& f, std::shared_ptr<const DgSpace> target) {
  const DgSpace& src = f.space();
  if (src.mesh() == target->mesh() && src.degree() == target->degree())
    return FeFunction(std::move(target), f.coeffs());
  if (!src.mesh().compatible_with(target->mesh()))
    throw IncompatibleMeshError("transfer: source and target meshes are incompatible");

  const OverlayMap ov = make_overlay_map(src.mesh(), target->mesh());
  const TriangleRule& rule = triangle_rule(std::max(1, src.degree() + target->degree()));
  FeFunction out(target);
  BasisJets bj;
  for (std::size_t k = 0; k < ov.mesh.n_elements(); ++k) {
    const int e = static_cast<int>(k);
    const auto c = ov.mesh.corners(e);
    const double jac = 2.0 * ov.mesh.area(e);
    const int is = ov.in_a[k];
    const int it = ov.in_b[k];
    auto local = out.coeffs().segment(target->offset(it), target->n_local());
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Point x = map_to_triangle(c[0], c[1], c[2], rule.points[q]);
      const double v = src.basis(is).evaluate(x, f.element_coeffs(is)).value;
      target->basis(it).evaluate(x, bj);
      local += (jac * rule.weights[q] * v) * bj.value;
    }
  }
  return out;
}

double l2_distance_squared(const FeFunction& f, const FeFunction& g) {
  const DgSpace& sf = f.space();
  const DgSpace& sg = g.space();
  if (!sf.mesh().compatible_with(sg.mesh()))
    throw IncompatibleMeshError("l2_distance: incompatible meshes");
  const OverlayMap ov = make_overlay_map(sf.mesh(), sg.mesh());
  const TriangleRule& rule = triangle_rule(std::max(1, 2 * std::max(sf.degree(), sg.degree())));
  double sum = 0.0;
  for (std::size_t k = 0; k < ov.mesh.n_elements(); ++k) {
    const int e = static_cast<int>(k);
    const auto c = ov.mesh.corners(e);
    const double jac = 2.0 * ov.mesh.area(e);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Point x = map_to_triangle(c[0], c[1], c[2], rule.points[q]);
      const double d = f.eval(ov.in_a[k], x).value - g.eval(ov.in_b[k], x).value;
      sum += jac * rule.weights[q] * d * d;
    }
  }
  return sum;
}

double l2_norm_squared(const FeFunction& f) { return f.coeffs().squaredNorm(); }

double l2_error_squared(const FeFunction& f, const SpaceFunction& phi, int quad_degree) {
  const DgSpace& s = f.space();
  const Mesh& mesh = s.mesh();
  const TriangleRule& rule = triangle_rule(quad_degree > 0 ? quad_degree : s.default_quadrature_degree());
  double sum = 0.0;
  for (std::size_t i = 0; i < mesh.n_elements(); ++i) {
    const int e = static_cast<int>(i);
    const auto c = mesh.corners(e);
    const double jac = 2.0 * mesh.area(e);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Point x = map_to_triangle(c[0], c[1], c[2], rule.points[q]);
      const double d = f.eval(e, x).value - phi(x);
      sum += jac * rule.weights[q] * d * d;
    }
  }
  return sum;
}

// ---------------------------------------------------------------------------

double EdgeTrace::jump_value(std::size_t q) const {
  return boundary() ? plus[q].value : plus[q].value - minus[q].value;
}

double EdgeTrace::jump_normal_grad(std::size_t q) const {
  const Point g = boundary() ? plus[q].grad : plus[q].grad - minus[q].grad;
  return dot(g, normal);
}

double EdgeTrace::jump_normal_grad_lap(std::size_t q) const {
  const Point g = boundary() ? plus[q].grad_lap : plus[q].grad_lap - minus[q].grad_lap;
  return dot(g, normal);
}

double EdgeTrace::jump_lap(std::size_t q) const {
  return boundary() ? plus[q].lap : plus[q].lap - minus[q].lap;
}

double EdgeTrace::mean_value(std::size_t q) const {
  return boundary() ? plus[q].value : 0.5 * (plus[q].value + minus[q].value);
}

double EdgeTrace::mean_lap(std::size_t q) const {
  return boundary() ? plus[q].lap : 0.5 * (plus[q].lap + minus[q].lap);
}

Point EdgeTrace::mean_grad(std::size_t q) const {
  return boundary() ? plus[q].grad : 0.5 * (plus[q].grad + minus[q].grad);
}

Point EdgeTrace::mean_grad_lap(std::size_t q) const {
  return boundary() ? plus[q].grad_lap : 0.5 * (plus[q].grad_lap + minus[q].grad_lap);
}

EdgeTrace edge_traces(const FeFunction& f, int edge, const IntervalRule& rule) {
  const Mesh& mesh = f.space().mesh();
  const Edge& e = mesh.edges()[edge];
  EdgeTrace t;
  t.normal = mesh.normal(edge);
  const double len = mesh.edge_size(edge);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const Point x = mesh.edge_point(edge, rule.points[q]);
    t.points.push_back(x);
    t.weights.push_back(len * rule.weights[q]);
    t.plus.push_back(f.eval(e.elem[0], x));
    if (!e.is_boundary()) t.minus.push_back(f.eval(e.elem[1], x));
  }
  return t;
}

}  // namespace biharm
