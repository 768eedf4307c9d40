#include "biharm/verify/oracles.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace biharm::oracle {

namespace {

double triangle_area(const std::array<Point, 3>& c) {
  return 0.5 * std::abs((c[1].x - c[0].x) * (c[2].y - c[0].y) - (c[2].x - c[0].x) * (c[1].y - c[0].y));
}

Point centroid(const std::array<Point, 3>& c) {
  return {(c[0].x + c[1].x + c[2].x) / 3.0, (c[0].y + c[1].y + c[2].y) / 3.0};
}

// Unit normal of segment ab pointing away from `inside`.
Point outward_normal(Point a, Point b, Point inside) {
  const Point d = b - a;
  const double len = std::hypot(d.x, d.y);
  Point n{d.y / len, -d.x / len};
  if (dot(n, 0.5 * (a + b) - inside) < 0.0) n = -1.0 * n;
  return n;
}

template <class F>
double integrate_triangle(const std::array<Point, 3>& c, int degree, F&& f) {
  const TriangleRule& rule = triangle_rule(degree);
  const double jac = 2.0 * triangle_area(c);
  double s = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q) s += jac * rule.weights[q] * f(map_to_triangle(c[0], c[1], c[2], rule.points[q]));
  return s;
}

std::array<Point, 3> node_corners(const Forest& forest, ElementId e) {
  const auto& v = forest.node(e).v;
  return {forest.vertex(v[0]), forest.vertex(v[1]), forest.vertex(v[2])};
}

// Ancestors of every leaf, leaves included.
std::set<ElementId> ancestor_closure(const Mesh& m) {
  std::set<ElementId> out;
  for (ElementId e : m.leaves())
    for (ElementId x = e; x != kNoElement && out.insert(x).second; x = m.forest().node(x).parent) {
    }
  return out;
}

}  // namespace

double BilinearTerms::sum() const { return std::accumulate(terms.begin(), terms.end(), 0.0); }

BilinearTerms dense_bilinear(const FeFunction& w, const FeFunction& v, const PenaltyConfig& penalty) {
  BilinearTerms t;
  const Mesh& mesh = w.space().mesh();
  const int r = w.space().degree();
  auto h_of = [&](int k) { return std::sqrt(triangle_area(mesh.corners(k))); };
  for (int k = 0; k < static_cast<int>(mesh.n_elements()); ++k)
    t.terms[0] += integrate_triangle(mesh.corners(k), 2 * r + 2,
                                     [&](Point x) { return w.eval(k, x).lap * v.eval(k, x).lap; });

  const IntervalRule& rule = edge_rule(2 * r + 4);
  for (const Edge& e : mesh.edges()) {
    const Point a = mesh.forest().vertex(e.v[0]);
    const Point b = mesh.forest().vertex(e.v[1]);
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    const bool boundary = e.elem[1] < 0;
    const double hw = boundary ? h_of(e.elem[0]) : 0.5 * (h_of(e.elem[0]) + h_of(e.elem[1]));
    const double sigma = penalty.sigma0 / (hw * hw * hw);
    const double xi = penalty.xi0 / hw;
    const int sides = boundary ? 1 : 2;
    const double avg = boundary ? 1.0 : 0.5;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Point x = a + rule.points[q] * (b - a);
      const double wq = len * rule.weights[q];
      Point jw, jv, mglw, mglv;
      double jgw = 0.0, jgv = 0.0, mlw = 0.0, mlv = 0.0;
      for (int s = 0; s < sides; ++s) {
        const int k = e.elem[s];
        const Point n = outward_normal(a, b, centroid(mesh.corners(k)));
        const Jet W = w.eval(k, x);
        const Jet V = v.eval(k, x);
        jw = jw + W.value * n;
        jv = jv + V.value * n;
        jgw += dot(W.grad, n);
        jgv += dot(V.grad, n);
        mglw = mglw + avg * W.grad_lap;
        mglv = mglv + avg * V.grad_lap;
        mlw += avg * W.lap;
        mlv += avg * V.lap;
      }
      t.terms[1] += wq * dot(mglw, jv);
      t.terms[2] += wq * dot(mglv, jw);
      t.terms[3] -= wq * mlw * jgv;
      t.terms[4] -= wq * mlv * jgw;
      t.terms[5] += wq * sigma * dot(jw, jv);
      t.terms[6] += wq * xi * jgw * jgv;
    }
  }
  return t;
}

BoundaryIdentity boundary_identity(const FeFunction& v, const FeFunction& qx, const FeFunction& qy) {
  BoundaryIdentity out;
  const Mesh& mesh = v.space().mesh();
  const int r = v.space().degree();
  const IntervalRule& rule = edge_rule(2 * r + 2);
  auto q_at = [&](int k, Point x) { return Point{qx.eval(k, x).value, qy.eval(k, x).value}; };

  for (int k = 0; k < static_cast<int>(mesh.n_elements()); ++k) {
    const auto c = mesh.corners(k);
    const Point m = centroid(c);
    for (int i = 0; i < 3; ++i) {
      const Point a = c[i];
      const Point b = c[(i + 1) % 3];
      const Point n = outward_normal(a, b, m);
      const double len = std::hypot(b.x - a.x, b.y - a.y);
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const Point x = a + rule.points[q] * (b - a);
        out.element_sum += len * rule.weights[q] * v.eval(k, x).value * dot(q_at(k, x), n);
      }
    }
  }

  for (const Edge& e : mesh.edges()) {
    const Point a = mesh.forest().vertex(e.v[0]);
    const Point b = mesh.forest().vertex(e.v[1]);
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    const bool boundary = e.elem[1] < 0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Point x = a + rule.points[q] * (b - a);
      const double wq = len * rule.weights[q];
      Point jump_v, mean_q;
      double mean_v = 0.0, jump_q = 0.0;
      const int sides = boundary ? 1 : 2;
      const double avg = boundary ? 1.0 : 0.5;
      for (int s = 0; s < sides; ++s) {
        const int k = e.elem[s];
        const Point n = outward_normal(a, b, centroid(mesh.corners(k)));
        const double vv = v.eval(k, x).value;
        const Point qq = q_at(k, x);
        jump_v = jump_v + vv * n;
        mean_q = mean_q + avg * qq;
        mean_v += avg * vv;
        jump_q += dot(qq, n);
      }
      out.edge_sum += wq * dot(jump_v, mean_q);
      if (!boundary) out.edge_sum += wq * mean_v * jump_q;
    }
  }
  return out;
}

double fd_bilaplacian(const std::function<double(Point)>& u, Point p, double h) {
  auto lap = [&](Point x, double s) {
    return (u({x.x + s, x.y}) + u({x.x - s, x.y}) + u({x.x, x.y + s}) + u({x.x, x.y - s}) - 4.0 * u(x)) / (s * s);
  };
  auto bilap = [&](double s) {
    return (lap({p.x + s, p.y}, s) + lap({p.x - s, p.y}, s) + lap({p.x, p.y + s}, s) + lap({p.x, p.y - s}, s) -
            4.0 * lap(p, s)) /
           (s * s);
  };
  const double a = bilap(h), b = bilap(2.0 * h), c = bilap(4.0 * h);
  const double r1 = (4.0 * a - b) / 3.0, r2 = (4.0 * b - c) / 3.0;
  return (16.0 * r1 - r2) / 15.0;
}

double fd_time_derivative(const std::function<double(double)>& u, double t, double dt) {
  auto d = [&](double s) { return (u(t + s) - u(t - s)) / (2.0 * s); };
  return (4.0 * d(dt) - d(2.0 * dt)) / 3.0;
}

std::vector<Piece> overlay_pieces(const Mesh& a, const Mesh& b) {
  if (!a.compatible_with(b)) throw std::invalid_argument("overlay_pieces: meshes do not share a forest");
  const Forest& f = a.forest();
  std::vector<Piece> out;
  for (int i = 0; i < static_cast<int>(a.n_elements()); ++i)
    for (int j = 0; j < static_cast<int>(b.n_elements()); ++j) {
      const ElementId ea = a.leaf(i);
      const ElementId eb = b.leaf(j);
      if (f.is_ancestor_or_self(ea, eb))
        out.push_back({i, j, node_corners(f, eb)});
      else if (f.is_ancestor_or_self(eb, ea))
        out.push_back({i, j, node_corners(f, ea)});
    }
  return out;
}

std::vector<ElementId> overlay_leaves(const Mesh& a, const Mesh& b) {
  const Forest& f = a.forest();
  std::set<ElementId> out;
  for (ElementId ea : a.leaves())
    for (ElementId eb : b.leaves()) {
      if (f.is_ancestor_or_self(ea, eb)) out.insert(eb);
      else if (f.is_ancestor_or_self(eb, ea)) out.insert(ea);
    }
  return {out.begin(), out.end()};
}

std::vector<ElementId> common_coarsening_leaves(const Mesh& a, const Mesh& b) {
  const auto ca = ancestor_closure(a);
  const auto cb = ancestor_closure(b);
  std::set<ElementId> common;
  std::set_intersection(ca.begin(), ca.end(), cb.begin(), cb.end(), std::inserter(common, common.end()));
  std::vector<ElementId> out;
  for (ElementId e : common) {
    const auto& node = a.forest().node(e);
    if (!node.has_children() || !common.count(node.children[0])) out.push_back(e);
  }
  return out;
}

double projection_defect_squared(const FeFunction& u, const Mesh& target, int degree) {
  const auto pieces = overlay_pieces(u.space().mesh(), target);
  const int n = (degree + 1) * (degree + 2) / 2;
  const int qd = 2 * std::max(degree, u.space().degree()) + 2;
  double total = 0.0;
  for (int k = 0; k < static_cast<int>(target.n_elements()); ++k) {
    const auto c = target.corners(k);
    const Point m = centroid(c);
    const double h = std::sqrt(triangle_area(c));
    auto monomials = [&](Point x) {
      Eigen::VectorXd phi(n);
      int idx = 0;
      for (int d = 0; d <= degree; ++d)
        for (int j = 0; j <= d; ++j) phi[idx++] = std::pow((x.x - m.x) / h, d - j) * std::pow((x.y - m.y) / h, j);
      return phi;
    };
    Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    for (const Piece& p : pieces) {
      if (p.elem_b != k) continue;
      const TriangleRule& rule = triangle_rule(qd);
      const double jac = 2.0 * triangle_area(p.corners);
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const Point x = map_to_triangle(p.corners[0], p.corners[1], p.corners[2], rule.points[q]);
        const Eigen::VectorXd phi = monomials(x);
        const double w = jac * rule.weights[q];
        mass += w * phi * phi.transpose();
        rhs += w * u.eval(p.elem_a, x).value * phi;
      }
    }
    const Eigen::VectorXd coef = mass.ldlt().solve(rhs);
    for (const Piece& p : pieces) {
      if (p.elem_b != k) continue;
      total += integrate_triangle(p.corners, qd, [&](Point x) {
        const double d = u.eval(p.elem_a, x).value - monomials(x).dot(coef);
        return d * d;
      });
    }
  }
  return total;
}

double g_distance_squared(const GRepresentation& a, const GRepresentation& b) {
  const Mesh& ma = a.fe_part.space().mesh();
  const Mesh& mb = b.fe_part.space().mesh();
  const int qd = 20;
  double total = 0.0;
  for (const Piece& p : overlay_pieces(ma, mb))
    total += integrate_triangle(p.corners, qd, [&](Point x) {
      const double d = a.value(p.elem_a, x) - b.value(p.elem_b, x);
      return d * d;
    });
  return total;
}

double beta_inf(const Mesh& mesh, const SpaceTimeFunction& f, const SpaceFunction& f_tilde, double t0, double t1,
                int subintervals) {
  const double g = std::sqrt(3.0 / 5.0);
  const double nodes[3] = {-g, 0.0, g};
  const double weights[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  const double dt = (t1 - t0) / subintervals;
  double total = 0.0;
  for (int s = 0; s < subintervals; ++s) {
    const double mid = t0 + (s + 0.5) * dt;
    for (int q = 0; q < 3; ++q) {
      const double t = mid + 0.5 * dt * nodes[q];
      double space = 0.0;
      for (int k = 0; k < static_cast<int>(mesh.n_elements()); ++k)
        space += integrate_triangle(mesh.corners(k), 20, [&](Point x) {
          const double d = f_tilde(x) - f(x, t);
          return d * d;
        });
      total += 0.5 * dt * weights[q] * space;
    }
  }
  return total;
}

double rank_correlation(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) throw std::invalid_argument("rank_correlation: need equal sizes >= 2");
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      for (std::size_t k = i; k <= j; ++k) r[idx[k]] = 0.5 * static_cast<double>(i + j);
      i = j + 1;
    }
    return r;
  };
  const auto ra = ranks(a);
  const auto rb = ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  return saa > 0.0 && sbb > 0.0 ? sab / std::sqrt(saa * sbb) : 0.0;
}

}  // namespace biharm::oracle
