#include "biharm/estimators.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "biharm/error.hpp"

namespace biharm {

void EstimatorConstants::validate() const {
  if (!(multiplier > 0.0)) throw std::invalid_argument("estimator multiplier must be positive");
}

int estimator_lambda(int degree) { return 2 * (2 - std::min(2, degree - 1)); }

std::vector<double> EllipticIndicatorField::local() const {
  std::vector<double> out(size());
  const double c2 = multiplier * multiplier;
  for (std::size_t i = 0; i < size(); ++i)
    out[i] = c2 * (volume[i] + grad_lap_jump[i] + lap_jump[i] + grad_jump[i] + value_jump[i]);
  return out;
}

double EllipticIndicatorField::total_squared() const {
  const auto l = local();
  return std::accumulate(l.begin(), l.end(), 0.0);
}

double EllipticIndicatorField::total() const { return std::sqrt(total_squared()); }

namespace {

using JetAt = std::function<Jet(int, Point)>;
using ValueAt = std::function<double(int, Point)>;

struct EdgeWeights {
  double face;    // bold h
  double length;  // h_e
};

struct Weights {
  std::function<double(int)> element;
  std::function<EdgeWeights(int)> edge;
};

// Shared by the per-mesh estimator and the common-coarsening variant: v is
// evaluated per (element, point), sizes come from `weights`.
EllipticIndicatorField estimate_on(const Mesh& mesh, int degree, const JetAt& v, const ValueAt& phi,
                                   const Weights& weights, const PenaltyConfig& penalty,
                                   const EstimatorConstants& consts) {
  consts.validate();
  const std::size_t n = mesh.n_elements();
  EllipticIndicatorField f;
  f.multiplier = consts.multiplier;
  f.volume.assign(n, 0.0);
  f.grad_lap_jump.assign(n, 0.0);
  f.lap_jump.assign(n, 0.0);
  f.grad_jump.assign(n, 0.0);
  f.value_jump.assign(n, 0.0);
  const double lam = estimator_lambda(degree);

  const TriangleRule& vrule = triangle_rule(2 * degree + 4);
  for (std::size_t i = 0; i < n; ++i) {
    const int e = static_cast<int>(i);
    const auto c = mesh.corners(e);
    const double jac = 2.0 * mesh.area(e);
    double s = 0.0;
    for (std::size_t q = 0; q < vrule.size(); ++q) {
      const Point x = map_to_triangle(c[0], c[1], c[2], vrule.points[q]);
      const double r = phi(e, x) - v(e, x).bilap;
      s += jac * vrule.weights[q] * r * r;
    }
    f.volume[i] = std::pow(weights.element(e), 8.0 - lam) * s;
  }

  const IntervalRule& erule = edge_rule(2 * degree + 2);
  const double grad_factor = 1.0 + penalty.xi0 * penalty.xi0;
  const double value_factor = 1.0 + penalty.sigma0 * penalty.sigma0;
  for (std::size_t k = 0; k < mesh.edges().size(); ++k) {
    const int ei = static_cast<int>(k);
    const Edge& edge = mesh.edges()[k];
    const Point nrm = mesh.normal(ei);
    const double len = mesh.edge_size(ei);
    double sgl = 0.0, sl = 0.0, sg = 0.0, sv = 0.0;
    for (std::size_t q = 0; q < erule.size(); ++q) {
      const Point x = mesh.edge_point(ei, erule.points[q]);
      const double w = len * erule.weights[q];
      Jet d = v(edge.elem[0], x);
      if (!edge.is_boundary()) d -= v(edge.elem[1], x);
      const double jv = d.value;
      const double jg = dot(d.grad, nrm);
      sv += w * jv * jv;
      sg += w * jg * jg;
      if (!edge.is_boundary()) {
        const double jgl = dot(d.grad_lap, nrm);
        sgl += w * jgl * jgl;
        sl += w * d.lap * d.lap;
      }
    }
    const EdgeWeights ew = weights.edge(ei);
    const double tgl = std::pow(ew.face, 7.0 - lam) * sgl;
    const double tl = std::pow(ew.face, 5.0 - lam) * sl;
    const double tg = std::pow(ew.length, 3.0 - lam) * grad_factor * sg;
    const double tv = std::pow(ew.length, 1.0 - lam) * value_factor * sv;
    const double share = edge.is_boundary() ? 1.0 : 0.5;
    for (int s = 0; s < (edge.is_boundary() ? 1 : 2); ++s) {
      const auto el = static_cast<std::size_t>(edge.elem[s]);
      f.grad_lap_jump[el] += share * tgl;
      f.lap_jump[el] += share * tl;
      f.grad_jump[el] += share * tg;
      f.value_jump[el] += share * tv;
    }
  }
  return f;
}

Weights mesh_weights(const Mesh& mesh) {
  return {[&mesh](int e) { return mesh.element_size(e); },
          [&mesh](int k) { return EdgeWeights{mesh.face_weight(k), mesh.edge_size(k)}; }};
}

double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }

}  // namespace

EllipticIndicatorField elliptic_estimate(const FeFunction& v, const GRepresentation& phi,
                                         const PenaltyConfig& penalty, const EstimatorConstants& consts) {
  const Mesh& mesh = v.space().mesh();
  if (phi.fe_part.space_ptr() && !(phi.fe_part.space().mesh() == mesh))
    throw IncompatibleMeshError("elliptic_estimate: load lives on a different mesh");
  return estimate_on(
      mesh, v.space().degree(), [&v](int e, Point x) { return v.eval(e, x); },
      [&phi](int e, Point x) { return phi.value(e, x); }, mesh_weights(mesh), penalty, consts);
}

EllipticIndicatorField elliptic_estimate(const FeFunction& v, const SpaceFunction& phi, const PenaltyConfig& penalty,
                                         const EstimatorConstants& consts) {
  return elliptic_estimate(v, GRepresentation{FeFunction(), phi}, penalty, consts);
}

double projection_defect_squared(const FeFunction& u_prev, const std::shared_ptr<const DgSpace>& space_n) {
  if (u_prev.space().mesh() == space_n->mesh() && u_prev.space().degree() == space_n->degree()) return 0.0;
  return l2_distance_squared(u_prev, transfer(u_prev, space_n));
}

double g_distance_squared(const GRepresentation& a, const GRepresentation& b, int quad_degree) {
  const FeFunction& fa = a.fe_part;
  const FeFunction& fb = b.fe_part;
  if (!fa.space_ptr() || !fb.space_ptr()) throw std::invalid_argument("g_distance_squared: missing finite element part");
  if (!fa.space().mesh().compatible_with(fb.space().mesh()))
    throw IncompatibleMeshError("g_distance_squared: incompatible meshes");
  const OverlayMap ov = make_overlay_map(fa.space().mesh(), fb.space().mesh());
  const int r = std::max(fa.space().degree(), fb.space().degree());
  // g carries the non-polynomial forcing, so the rule is richer than for
  // discrete data.
  const TriangleRule& rule = triangle_rule(quad_degree > 0 ? quad_degree : std::min(20, 2 * r + 10));
  double sum = 0.0;
  for (std::size_t k = 0; k < ov.mesh.n_elements(); ++k) {
    const int e = static_cast<int>(k);
    const auto c = ov.mesh.corners(e);
    const double jac = 2.0 * ov.mesh.area(e);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Point x = map_to_triangle(c[0], c[1], c[2], rule.points[q]);
      double d = fa.eval(ov.in_a[k], x).value - fb.eval(ov.in_b[k], x).value;
      if (a.analytic) d += a.analytic(x);
      if (b.analytic) d -= b.analytic(x);
      sum += jac * rule.weights[q] * d * d;
    }
  }
  return sum;
}

DataEstimate data_estimators(const Mesh& mesh, const SpaceTimeFunction& f, const SpaceFunction& f_tilde, double t0,
                             double t1, int quad_degree, int time_points) {
  if (!(t1 > t0)) throw std::invalid_argument("data_estimators: empty interval");
  const IntervalRule& trule = time_rule(time_points);
  const TriangleRule& rule = triangle_rule(quad_degree);
  const double len = t1 - t0;
  double sum = 0.0;
  for (std::size_t i = 0; i < mesh.n_elements(); ++i) {
    const int e = static_cast<int>(i);
    const auto c = mesh.corners(e);
    const double jac = 2.0 * mesh.area(e);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Point x = map_to_triangle(c[0], c[1], c[2], rule.points[q]);
      const double ft = f_tilde(x);
      double s = 0.0;
      for (std::size_t j = 0; j < trule.size(); ++j) {
        const double d = ft - f(x, t0 + len * trule.points[j]);
        s += trule.weights[j] * d * d;
      }
      sum += jac * rule.weights[q] * len * s;
    }
  }
  return {sum, len * sum};
}

double common_coarsening_estimate(const FeFunction& u_n, const FeFunction& u_prev, const GRepresentation& g_n,
                                  const GRepresentation& g_prev, const PenaltyConfig& penalty,
                                  const EstimatorConstants& consts) {
  const Mesh& mn = u_n.space().mesh();
  const Mesh& mp = u_prev.space().mesh();
  if (!mn.compatible_with(mp)) throw IncompatibleMeshError("common_coarsening_estimate: incompatible meshes");
  if (!g_n.fe_part.space_ptr() || !(g_n.fe_part.space().mesh() == mn) || !g_prev.fe_part.space_ptr() ||
      !(g_prev.fe_part.space().mesh() == mp))
    throw IncompatibleMeshError("common_coarsening_estimate: g and U must share meshes");

  const Mesh hat = finest_common_coarsening(mn, mp);
  const OverlayMap ov = make_overlay_map(mn, mp);
  const Mesh& om = ov.mesh;
  std::vector<int> in_hat(om.n_elements());
  for (std::size_t k = 0; k < om.n_elements(); ++k) in_hat[k] = hat.ancestor_leaf(om.leaf(static_cast<int>(k)));

  auto v = [&](int k, Point x) {
    Jet j = u_n.eval(ov.in_a[k], x);
    j -= u_prev.eval(ov.in_b[k], x);
    return j;
  };
  auto phi = [&](int k, Point x) {
    double s = g_n.fe_part.eval(ov.in_a[k], x).value - g_prev.fe_part.eval(ov.in_b[k], x).value;
    if (g_n.analytic) s += g_n.analytic(x);
    if (g_prev.analytic) s -= g_prev.analytic(x);
    return s;
  };
  // Length of the T^ edge of element `h` that contains the segment (a, b).
  auto hat_edge_length = [&](int h, Point a, Point b) {
    for (int ei : hat.element_edges(h)) {
      const Edge& he = hat.edges()[ei];
      const Point p = hat.forest().vertex(he.v[0]);
      const Point q = hat.forest().vertex(he.v[1]);
      const Point d = q - p;
      const double tol = 1e-12 * dot(d, d);
      if (std::abs(cross(d, a - p)) <= tol && std::abs(cross(d, b - p)) <= tol) return hat.edge_size(ei);
    }
    throw GeometryError("common_coarsening_estimate: overlay edge not on a coarse edge");
  };
  Weights w;
  w.element = [&](int k) { return hat.element_size(in_hat[k]); };
  w.edge = [&](int k) {
    const Edge& e = om.edges()[k];
    const int h0 = in_hat[e.elem[0]];
    if (!e.is_boundary() && in_hat[e.elem[1]] == h0) {
      const double h = hat.element_size(h0);
      return EdgeWeights{h, h};
    }
    const Point a = om.forest().vertex(e.v[0]);
    const Point b = om.forest().vertex(e.v[1]);
    const double face = e.is_boundary() ? hat.element_size(h0)
                                        : 0.5 * (hat.element_size(h0) + hat.element_size(in_hat[e.elem[1]]));
    return EdgeWeights{face, hat_edge_length(h0, a, b)};
  };
  const int degree = std::max(u_n.space().degree(), u_prev.space().degree());
  return estimate_on(om, degree, v, phi, w, penalty, consts).total_squared();
}

ParabolicStepEstimators step_estimators(const StepEstimatorInput& in, const RunningSums& history) {
  if (!in.u_prev || !in.u_n || !in.g_prev || !in.g_n || !in.indicators)
    throw std::invalid_argument("step_estimators: incomplete input");
  const double lambda = in.t1 - in.t0;
  if (!(lambda > 0.0)) throw std::invalid_argument("step_estimators: non-positive time step");
  ParabolicStepEstimators s;
  s.lambda = lambda;
  s.defect_squared = projection_defect_squared(*in.u_prev, in.u_n->space_ptr());
  s.gamma_inf = s.defect_squared / lambda;
  s.gamma_2 = s.defect_squared + history.coarsening;

  s.g_jump_squared = g_distance_squared(*in.g_n, *in.g_prev);
  s.eta_inf = s.g_jump_squared * lambda;
  s.eta_2 = s.g_jump_squared * lambda * lambda + history.time;

  const DataEstimate d = data_estimators(in.u_n->space().mesh(), in.f, in.f_tilde, in.t0, in.t1,
                                         std::min(20, in.u_n->space().default_quadrature_degree() + 6));
  s.beta_inf = d.beta_inf;
  s.beta_2 = d.beta_2;

  s.elliptic = in.indicators->total();
  if (in.eta_tilde == EtaTildeMode::per_step)
    s.eta_tilde_inf = s.elliptic * s.elliptic;
  else
    s.eta_tilde_inf = common_coarsening_estimate(*in.u_n, *in.u_prev, *in.g_n, *in.g_prev, in.penalty, in.consts);
  return s;
}

RunningSums advance(RunningSums history, const ParabolicStepEstimators& step) {
  history.coarsening += step.defect_squared;
  history.time += step.lambda * step.lambda * step.g_jump_squared;
  ++history.steps;
  return history;
}

double time_increment(const ParabolicStepEstimators& step, NormFlavor norm, bool include_eta_tilde) {
  if (norm == NormFlavor::linf_l2) {
    double v = (step.eta_inf + step.beta_inf) * step.lambda;
    if (include_eta_tilde) v += step.eta_tilde_inf;
    return std::sqrt(v);
  }
  return std::sqrt((step.eta_2 + step.beta_2) * step.lambda);
}

double AccumulatedEstimators::coarsen(NormFlavor norm) const {
  return std::sqrt(norm == NormFlavor::linf_l2 ? coarsen_inf_sq : coarsen_2_sq);
}

double AccumulatedEstimators::time(NormFlavor norm) const {
  return std::sqrt(norm == NormFlavor::linf_l2 ? time_inf_sq : time_2_sq);
}

double AccumulatedEstimators::space(NormFlavor norm) const {
  return norm == NormFlavor::linf_l2 ? space_inf : std::sqrt(space_2_sq);
}

AccumulatedEstimators start_accumulation(double elliptic0, double e0) {
  AccumulatedEstimators acc;
  acc.space_inf = elliptic0;
  acc.e0 = e0;
  return acc;
}

AccumulatedEstimators accumulate(const ParabolicStepEstimators& step, AccumulatedEstimators acc) {
  const double l = step.lambda;
  acc.coarsen_inf_sq += step.gamma_inf * l;
  acc.coarsen_2_sq += step.gamma_2 * l;
  acc.time_inf_sq += (step.eta_inf + step.beta_inf) * l + step.eta_tilde_inf;
  acc.time_2_sq += (step.eta_2 + step.beta_2) * l;
  acc.space_inf = std::max(acc.space_inf, step.elliptic);
  acc.space_2_sq += step.elliptic * step.elliptic * l;
  return acc;
}

double combined_error_squared(const FeFunction& a, double wa, const FeFunction& b, double wb, const SpaceFunction& phi,
                              int quad_degree) {
  if (!a.space().mesh().compatible_with(b.space().mesh()))
    throw IncompatibleMeshError("combined_error_squared: incompatible meshes");
  const OverlayMap ov = make_overlay_map(a.space().mesh(), b.space().mesh());
  const int r = std::max(a.space().degree(), b.space().degree());
  // g carries the non-polynomial forcing, so the rule is richer than for
  // discrete data.
  const TriangleRule& rule = triangle_rule(quad_degree > 0 ? quad_degree : std::min(20, 2 * r + 10));
  double sum = 0.0;
  for (std::size_t k = 0; k < ov.mesh.n_elements(); ++k) {
    const int e = static_cast<int>(k);
    const auto c = ov.mesh.corners(e);
    const double jac = 2.0 * ov.mesh.area(e);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Point x = map_to_triangle(c[0], c[1], c[2], rule.points[q]);
      double d = -phi(x);
      if (wa != 0.0) d += wa * a.eval(ov.in_a[k], x).value;
      if (wb != 0.0) d += wb * b.eval(ov.in_b[k], x).value;
      sum += jac * rule.weights[q] * d * d;
    }
  }
  return sum;
}

void ErrorAccumulator::start(const FeFunction& u0, double t0) {
  const auto& ex = exact_;
  linf_ = std::sqrt(l2_error_squared(u0, [&](Point p) { return ex(p, t0); }));
  l2_sq_ = 0.0;
}

void ErrorAccumulator::add_interval(const FeFunction& u_prev, const FeFunction& u_n, double t0, double t1) {
  const double len = t1 - t0;
  if (!(len > 0.0)) throw std::invalid_argument("ErrorAccumulator: empty interval");
  const auto& ex = exact_;
  auto at = [&](double s) {
    const double t = t0 + s * len;
    return combined_error_squared(u_n, s, u_prev, 1.0 - s, [&](Point p) { return ex(p, t); });
  };
  const IntervalRule& rule = time_rule(2);
  for (std::size_t q = 0; q < rule.size(); ++q) l2_sq_ += len * rule.weights[q] * at(rule.points[q]);
  linf_ = std::max({linf_, std::sqrt(at(0.5)), std::sqrt(at(1.0))});
}

ErrorNorms exact_error_norms(std::span<const TrajectoryPoint> trajectory, const SpaceTimeFunction& exact) {
  if (trajectory.empty()) return {};
  ErrorAccumulator acc(exact);
  acc.start(trajectory.front().u, trajectory.front().t);
  for (std::size_t n = 1; n < trajectory.size(); ++n)
    acc.add_interval(trajectory[n - 1].u, trajectory[n].u, trajectory[n - 1].t, trajectory[n].t);
  return {acc.linf_l2(), acc.l2_l2()};
}

std::optional<double> iei(double err, double e_time, double e_space) {
  const double d = e_time + e_space;
  if (!(d > 0.0) || !std::isfinite(err)) return std::nullopt;
  return err / d;
}

std::optional<double> eoc(std::span<const double> a, std::span<const double> h, std::size_t i) {
  if (i + 1 >= a.size() || i + 1 >= h.size()) return std::nullopt;
  if (!(a[i] > 0.0) || !(a[i + 1] > 0.0) || !(h[i] > 0.0) || !(h[i + 1] > 0.0) || h[i] == h[i + 1])
    return std::nullopt;
  return std::log(a[i + 1] / a[i]) / std::log(h[i + 1] / h[i]);
}

}  // namespace biharm
