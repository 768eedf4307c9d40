#include "biharm/adapt.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "biharm/error.hpp"

namespace biharm {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Next step end from t with nominal step lambda, landing exactly on T.
double next_time(double t, double lambda, double T) {
  const double t1 = t + lambda;
  if (t1 >= T - 1e-12 * std::max(1.0, T)) return T;
  return t1;
}

bool finished(double t, double T) { return t >= T - 1e-12 * std::max(1.0, T); }

std::vector<double> local_projection_errors(const FeFunction& f, const SpaceFunction& phi) {
  const DgSpace& s = f.space();
  const Mesh& mesh = s.mesh();
  const TriangleRule& rule = triangle_rule(s.default_quadrature_degree());
  std::vector<double> out(mesh.n_elements(), 0.0);
  for (std::size_t i = 0; i < mesh.n_elements(); ++i) {
    const int e = static_cast<int>(i);
    const auto c = mesh.corners(e);
    const double jac = 2.0 * mesh.area(e);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Point x = map_to_triangle(c[0], c[1], c[2], rule.points[q]);
      const double d = f.eval(e, x).value - phi(x);
      out[i] += jac * rule.weights[q] * d * d;
    }
  }
  return out;
}

}  // namespace

Problem Problem::manufactured(const ManufacturedSolution& u) {
  Problem p;
  p.name = u.name();
  p.initial = u.initial();
  p.forcing = u.forcing_function();
  p.averaged_forcing = [u](double t0, double t1) { return u.averaged_forcing(t0, t1); };
  p.exact = u.value_function();
  return p;
}

SpaceFunction Problem::f_tilde(double t0, double t1) const {
  if (averaged_forcing) return averaged_forcing(t0, t1);
  return time_average(forcing, t0, t1, 3);
}

std::vector<int> dorfler_mark(std::span<const double> indicators, double xi) {
  if (!(xi > 0.0 && xi <= 1.0)) throw std::invalid_argument("dorfler_mark: fraction must lie in (0, 1]");
  double total = 0.0;
  for (double v : indicators) {
    if (!(v >= 0.0)) throw std::invalid_argument("dorfler_mark: indicators must be non-negative");
    total += v;
  }
  std::vector<int> order(indicators.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return indicators[a] > indicators[b]; });
  std::vector<int> marked;
  double sum = 0.0;
  for (int i : order) {
    if (!(sum < xi * total)) break;
    sum += indicators[i];
    marked.push_back(i);
  }
  return marked;
}

Mesh space_coarsening(const Mesh& mesh, std::span<const double> indicators, double tol_coarse) {
  if (!(tol_coarse > 0.0) || indicators.empty()) return mesh;
  if (indicators.size() != mesh.n_elements())
    throw std::invalid_argument("space_coarsening: one indicator per leaf required");
  const double mean = std::accumulate(indicators.begin(), indicators.end(), 0.0) / indicators.size();
  std::vector<int> marked;
  for (std::size_t i = 0; i < indicators.size(); ++i)
    if (indicators[i] < tol_coarse * mean) marked.push_back(static_cast<int>(i));
  return coarsen(mesh, marked);
}

// ---------------------------------------------------------------------------

std::size_t RunLog::total_dofs() const {
  std::size_t s = 0;
  for (const auto& r : steps) s += r.dofs;
  return s;
}

double RunLog::min_lambda() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& r : steps) m = std::min(m, r.lambda);
  return m;
}

double RunLog::final_error(NormFlavor n) const {
  return steps.empty() ? std::numeric_limits<double>::quiet_NaN() : steps.back().error(n);
}

std::optional<double> RunLog::final_iei(NormFlavor n) const {
  const auto& acc = final_accumulators();
  return iei(final_error(n), acc.time(n), acc.space(n));
}

// ---------------------------------------------------------------------------

Evolution::Evolution(Problem problem, Discretization disc, FeFunction u0, double t0)
    : problem_(std::move(problem)), disc_(disc), t_(t0), u_(std::move(u0)) {
  if (!problem_.forcing) throw std::invalid_argument("Evolution: problem has no forcing");
  disc_.penalty.validate();
  disc_.consts.validate();
  const EllipticOperator op(u_.space_ptr(), disc_.penalty);
  const SpaceTimeFunction& f = problem_.forcing;
  g_ = compute_g(op, u_, [f, t0](Point p) { return f(p, t0); });
  indicators_ = elliptic_estimate(u_, g_, disc_.penalty, disc_.consts);
  const double e0 = problem_.initial ? std::sqrt(l2_error_squared(u_, problem_.initial)) : 0.0;
  acc_ = start_accumulation(indicators_.total(), e0);
  if (problem_.exact) {
    errors_.emplace(problem_.exact);
    errors_->start(u_, t0);
  }
  log_.problem = problem_.name;
  log_.degree = u_.space().degree();
  log_.norm = disc_.norm;
  log_.initial_dofs = u_.space().dim();
  log_.initial = acc_;
  if (disc_.keep_meshes) log_.meshes.push_back(mesh());
}

RunLog Evolution::take_log() {
  log_.final_solution = u_;
  return std::move(log_);
}

SolvedStep Evolution::solve(const Mesh& mesh, double t1) const {
  if (!(t1 > t_)) throw std::invalid_argument("Evolution::solve: step must advance in time");
  auto space = std::make_shared<const DgSpace>(mesh, disc_.degree);
  auto op = std::make_shared<const EllipticOperator>(space, disc_.penalty);
  SolvedStep s;
  s.t0 = t_;
  s.t1 = t1;
  SpaceFunction f_tilde = problem_.f_tilde(t_, t1);
  const BackwardEulerStepper stepper(op, t1 - t_, disc_.solver);
  const Vector load = assemble_load(*space, f_tilde);
  s.u = stepper.step_projected(transfer(u_, space), load);
  ++solves_;
  s.g = GRepresentation{FeFunction(space, op->stiffness().values * s.u.coeffs() - load), std::move(f_tilde)};
  s.indicators = elliptic_estimate(s.u, s.g, disc_.penalty, disc_.consts);
  return s;
}

ParabolicStepEstimators Evolution::estimate(const SolvedStep& step) const {
  StepEstimatorInput in;
  in.u_prev = &u_;
  in.u_n = &step.u;
  in.g_prev = &g_;
  in.g_n = &step.g;
  in.indicators = &step.indicators;
  in.f = problem_.forcing;
  in.f_tilde = step.g.analytic;
  in.t0 = step.t0;
  in.t1 = step.t1;
  in.penalty = disc_.penalty;
  in.consts = disc_.consts;
  in.eta_tilde = disc_.eta_tilde;
  return step_estimators(in, sums_);
}

double Evolution::time_increment(const ParabolicStepEstimators& est) const {
  return biharm::time_increment(est, disc_.norm, disc_.eta_tilde == EtaTildeMode::common_coarsening);
}

const StepRecord& Evolution::accept(SolvedStep step, const ParabolicStepEstimators& est, int rejected,
                                    int space_iterations, bool space_converged, double wall_time) {
  if (std::abs(step.t0 - t_) > 0.0) throw std::logic_error("Evolution::accept: step does not start at current time");
  acc_ = accumulate(est, acc_);
  sums_ = advance(sums_, est);
  StepRecord r;
  r.n = static_cast<int>(log_.steps.size()) + 1;
  r.t = step.t1;
  r.lambda = step.t1 - step.t0;
  r.dofs = step.u.space().dim();
  r.elements = step.u.space().mesh().n_elements();
  r.rejected = rejected;
  r.est = est;
  r.acc = acc_;
  r.time_increment = time_increment(est);
  r.space_iterations = space_iterations;
  r.space_converged = space_converged;
  r.wall_time = wall_time;
  if (errors_) {
    errors_->add_interval(u_, step.u, step.t0, step.t1);
    r.err_linf = errors_->linf_l2();
    r.err_l2 = errors_->l2_l2();
  }
  t_ = step.t1;
  u_ = std::move(step.u);
  g_ = std::move(step.g);
  indicators_ = std::move(step.indicators);
  log_.steps.push_back(r);
  log_.rejected_steps += rejected;
  log_.linear_solves = solves_;
  if (!space_converged) log_.space_unconverged = true;
  if (disc_.keep_meshes) log_.meshes.push_back(mesh());
  return log_.steps.back();
}

// ---------------------------------------------------------------------------

void AdaptiveConfig::validate() const {
  if (!(tol_time > 0.0) || !(tol_space > 0.0) || !(tol_time_min > 0.0) || tol_coarse < 0.0)
    throw std::invalid_argument("adaptive tolerances must be positive");
  if (!(tol_time_min < tol_time)) throw std::invalid_argument("tol_time_min must be below tol_time");
  if (!(xi_refine > 0.0 && xi_refine <= 1.0)) throw std::invalid_argument("xi_refine must lie in (0, 1]");
  if (!(lambda0 > 0.0) || !(T > 0.0)) throw std::invalid_argument("lambda0 and T must be positive");
  if (max_space_iters < 1 || max_halvings < 0) throw std::invalid_argument("iteration caps must be positive");
  if (initial_level < 0 || initial_level > 24) throw std::invalid_argument("initial_level must lie in [0, 24]");
}

SpaceAdaptivityResult space_adaptivity(const Evolution& evo, const AdaptiveConfig& config, double t1,
                                       const Mesh& mesh_in) {
  Mesh mesh = mesh_in;
  if (mesh_in == evo.mesh()) mesh = space_coarsening(mesh_in, evo.indicators().local(), config.tol_coarse);
  SpaceAdaptivityResult res;
  for (int it = 1;; ++it) {
    res.step = evo.solve(mesh, t1);
    res.iterations = it;
    if (res.step.space_estimate() <= config.tol_space) return res;
    if (it >= config.max_space_iters || mesh.n_elements() >= config.max_elements) {
      res.converged = false;
      return res;
    }
    const auto marked = dorfler_mark(res.step.indicators.local(), config.xi_refine);
    mesh = bisect(mesh, marked);
  }
}

InitialAdaptivityResult initial_space_adaptivity(const SpaceFunction& u0, const Mesh& mesh0, int degree, double xi,
                                                 double tol, int max_iters, std::size_t max_elements) {
  if (!(tol > 0.0)) throw std::invalid_argument("initial_space_adaptivity: tolerance must be positive");
  InitialAdaptivityResult res{FeFunction(), mesh0, 0, true};
  for (int it = 0;; ++it) {
    auto space = std::make_shared<const DgSpace>(res.mesh, degree);
    res.u0 = l2_project(space, u0);
    res.iterations = it;
    const auto local = local_projection_errors(res.u0, u0);
    const double err = std::sqrt(std::accumulate(local.begin(), local.end(), 0.0));
    if (err <= tol) return res;
    if (it >= max_iters || res.mesh.n_elements() >= max_elements) {
      res.converged = false;
      return res;
    }
    res.mesh = bisect(res.mesh, dorfler_mark(local, xi));
  }
}

namespace {

Evolution start_adaptive(const Problem& problem, const Discretization& disc, const AdaptiveConfig& config) {
  config.validate();
  const double tol0 = config.tol_initial > 0.0 ? config.tol_initial : config.tol_space;
  const auto init = initial_space_adaptivity(problem.initial, Mesh::unit_square(config.initial_level), disc.degree,
                                             config.xi_refine, tol0, config.max_initial_iters, config.max_elements);
  return Evolution(problem, disc, init.u0, 0.0);
}

[[noreturn]] void underflow(double lambda, double t) {
  throw DriverAbort("time step " + std::to_string(lambda) + " fell below the minimum at t = " + std::to_string(t));
}

}  // namespace

RunLog implicit_time_step_control(const Problem& problem, const Discretization& disc, const AdaptiveConfig& config) {
  const auto start = Clock::now();
  Evolution evo = start_adaptive(problem, disc, config);
  const double floor = config.lambda0 * std::ldexp(1.0, -config.max_halvings);
  double lambda = config.lambda0;
  while (!finished(evo.time(), config.T)) {
    const auto step_start = Clock::now();
    int rejected = 0;
    for (;;) {
      const double t1 = next_time(evo.time(), lambda, config.T);
      const double used = t1 - evo.time();
      auto res = space_adaptivity(evo, config, t1, evo.mesh());
      const auto est = evo.estimate(res.step);
      if (evo.time_increment(est) > config.tol_time) {
        ++rejected;
        lambda = used / 2.0;
        if (lambda < floor) underflow(lambda, evo.time());
        continue;
      }
      evo.accept(std::move(res.step), est, rejected, res.iterations, res.converged, seconds_since(step_start));
      lambda = 2.0 * used;
      break;
    }
  }
  RunLog log = evo.take_log();
  log.wall_time = seconds_since(start);
  return log;
}

RunLog explicit_time_step_control(const Problem& problem, const Discretization& disc, const AdaptiveConfig& config) {
  const auto start = Clock::now();
  Evolution evo = start_adaptive(problem, disc, config);
  const double floor = config.lambda0 * std::ldexp(1.0, -config.max_halvings);
  double lambda = config.lambda0;
  while (!finished(evo.time(), config.T)) {
    const auto step_start = Clock::now();
    const double t1 = next_time(evo.time(), lambda, config.T);
    const double used = t1 - evo.time();
    auto res = space_adaptivity(evo, config, t1, evo.mesh());
    const auto est = evo.estimate(res.step);
    const double inc = evo.time_increment(est);
    evo.accept(std::move(res.step), est, 0, res.iterations, res.converged, seconds_since(step_start));
    if (inc > config.tol_time)
      lambda = used / std::sqrt(2.0);
    else if (inc < config.tol_time_min)
      lambda = used * std::sqrt(2.0);
    else
      lambda = used;
    if (lambda < floor) underflow(lambda, evo.time());
  }
  RunLog log = evo.take_log();
  log.wall_time = seconds_since(start);
  return log;
}

RunLog fixed_step_run(const Problem& problem, const Discretization& disc, const Mesh& mesh, double lambda, double T) {
  if (!(lambda > 0.0) || !(T > 0.0)) throw std::invalid_argument("fixed_step_run: lambda and T must be positive");
  const auto start = Clock::now();
  auto space = std::make_shared<const DgSpace>(mesh, disc.degree);
  Evolution evo(problem, disc, l2_project(space, problem.initial), 0.0);
  const auto steps = static_cast<long>(std::ceil(T / lambda - 1e-9));
  for (long n = 1; n <= steps; ++n) {
    const auto step_start = Clock::now();
    const double t1 = n == steps ? T : std::min(T, static_cast<double>(n) * lambda);
    auto s = evo.solve(mesh, t1);
    const auto est = evo.estimate(s);
    evo.accept(std::move(s), est, 0, 1, true, seconds_since(step_start));
  }
  RunLog log = evo.take_log();
  log.wall_time = seconds_since(start);
  return log;
}

}  // namespace biharm
