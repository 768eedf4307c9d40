#include "biharm/verify/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <random>
#include <sstream>

#include "biharm/study.hpp"
#include "biharm/verify/oracles.hpp"

namespace biharm::verify {

namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string sci(double v) { return fmt("%.3e", v); }
std::string fix(double v) { return fmt("%.3f", v); }
std::string opt(const std::optional<double>& v) { return v ? fix(*v) : std::string("n/a"); }

double rel_diff(double a, double b, double scale) { return std::abs(a - b) / std::max(std::abs(b), scale); }

FeFunction random_function(const std::shared_ptr<const DgSpace>& space, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Vector c(static_cast<Eigen::Index>(space->dim()));
  for (auto& x : c) x = n(rng);
  return FeFunction(space, c);
}

// Marks leaves whose centroid satisfies `pred`.
template <class Pred>
std::vector<int> mark_where(const Mesh& m, Pred pred) {
  std::vector<int> out;
  for (int k = 0; k < static_cast<int>(m.n_elements()); ++k) {
    const auto c = m.corners(k);
    const Point g{(c[0].x + c[1].x + c[2].x) / 3.0, (c[0].y + c[1].y + c[2].y) / 3.0};
    if (pred(g)) out.push_back(k);
  }
  return out;
}

std::vector<int> all_leaves(const Mesh& m) {
  std::vector<int> out(m.n_elements());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = static_cast<int>(k);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// 1

CheckResult check_assembly_oracle() {
  CheckResult r;
  std::mt19937_64 rng(11);
  const PenaltyConfig pen{20.0, 20.0};
  double worst = 0.0;
  std::ostringstream d;
  for (const Mesh& mesh : {Mesh::unit_square_diagonal(0), Mesh::unit_square(1)})
    for (int degree : {2, 3}) {
      auto space = std::make_shared<const DgSpace>(mesh, degree);
      const SparseMatrix b = assemble_stiffness(*space, pen);
      double w_case = 0.0;
      for (int t = 0; t < 20; ++t) {
        const FeFunction w = random_function(space, rng);
        const FeFunction v = random_function(space, rng);
        const auto terms = oracle::dense_bilinear(w, v, pen);
        double scale = 0.0;
        for (double x : terms.terms) scale = std::max(scale, std::abs(x));
        const double assembled = w.coeffs().dot(b.values * v.coeffs());
        w_case = std::max(w_case, rel_diff(assembled, terms.sum(), scale));
      }
      d << mesh.n_elements() << " elements r=" << degree << ": " << sci(w_case) << "; ";
      worst = std::max(worst, w_case);
    }
  r.passed = worst <= 1e-10;
  r.detail = d.str() + "worst relative error " + sci(worst) + " (limit 1e-10)";
  return r;
}

// ---------------------------------------------------------------------------
// 2

CheckResult check_symmetry_coercivity() {
  CheckResult r;
  std::mt19937_64 rng(12);
  const PenaltyConfig pen{20.0, 20.0};
  double worst_asym = 0.0;
  double min_ratio = std::numeric_limits<double>::infinity();
  int negatives = 0;
  for (int degree : {2, 3})
    for (int level = 0; level <= 4; ++level) {
      auto space = std::make_shared<const DgSpace>(Mesh::unit_square(level), degree);
      const SparseMatrix b = assemble_stiffness(*space, pen);
      worst_asym = std::max(worst_asym, b.asymmetry());
      for (int t = 0; t < 200; ++t) {
        const FeFunction w = random_function(space, rng);
        const double q = w.coeffs().dot(b.values * w.coeffs());
        if (q < 0.0) ++negatives;
        min_ratio = std::min(min_ratio, q / w.coeffs().squaredNorm());
      }
    }
  r.passed = worst_asym <= 1e-12 && negatives == 0;
  r.detail = "max asymmetry " + sci(worst_asym) + " (limit 1e-12); negative w'Bw: " + std::to_string(negatives) +
             " of 2000; min w'Bw/|w|^2 = " + sci(min_ratio);
  return r;
}

// ---------------------------------------------------------------------------
// 3

CheckResult check_elliptic_convergence() {
  CheckResult r;
  const double pi = std::numbers::pi;
  auto s = [&](double x) { return std::sin(pi * x) * std::sin(pi * x); };
  auto s2 = [&](double x) { return 2.0 * pi * pi * std::cos(2.0 * pi * x); };
  auto s4 = [&](double x) { return -8.0 * pi * pi * pi * pi * std::cos(2.0 * pi * x); };
  const SpaceFunction u = [&](Point p) { return s(p.x) * s(p.y); };
  const SpaceFunction phi = [&](Point p) { return s4(p.x) * s(p.y) + 2.0 * s2(p.x) * s2(p.y) + s(p.x) * s4(p.y); };

  bool ok = true;
  std::ostringstream d;
  for (int degree : {2, 3}) {
    std::vector<double> h, err, est;
    for (int level = 1; level <= 4; ++level) {
      const Mesh mesh = Mesh::unit_square(level);
      auto space = std::make_shared<const DgSpace>(mesh, degree);
      const PenaltyConfig pen = default_penalty(degree);
      const EllipticOperator op(space, pen);
      const FeFunction uh = solve_elliptic(op, phi);
      h.push_back(uniform_mesh_size(level));
      err.push_back(std::sqrt(l2_error_squared(uh, u)));
      est.push_back(elliptic_estimate(uh, phi, pen).total());
    }
    const auto e_eoc = eoc(err, h, 2);
    const auto s_eoc = eoc(est, h, 2);
    // Consecutive bisection levels alternate between two mesh geometries;
    // the rate over two levels compares like with like.
    const std::vector<double> h2{h[1], h[3]}, err2{err[1], err[3]};
    const auto two_level = eoc(err2, h2, 0);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t i = 0; i < err.size(); ++i) {
      const double v = err[i] / est[i];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double band_lo = degree == 2 ? 1.6 : 3.4;
    const double band_hi = degree == 2 ? 2.6 : 4.6;
    const bool rate_ok = e_eoc && *e_eoc >= band_lo && *e_eoc <= band_hi;
    const bool est_ok = e_eoc && s_eoc && std::abs(*s_eoc - *e_eoc) <= 0.6;
    const bool iei_ok = hi / lo <= 10.0;
    ok = ok && rate_ok && est_ok && iei_ok;
    d << "r=" << degree << ": errors";
    for (double e : err) d << ' ' << sci(e);
    d << ", error EOC " << opt(e_eoc) << " in [" << band_lo << ", " << band_hi << "] " << (rate_ok ? "ok" : "FAIL")
      << " (levels 2->4: " << opt(two_level) << ")"
      << ", estimator EOC " << opt(s_eoc) << (est_ok ? " ok" : " FAIL") << ", IEI spread " << fix(hi / lo)
      << (iei_ok ? " ok" : " FAIL") << "; ";
  }
  r.passed = ok;
  r.detail = d.str();
  return r;
}

// ---------------------------------------------------------------------------
// 4

CheckResult check_parabolic_uniform() {
  CheckResult r;
  RunSpec spec;
  spec.example = "u1";
  spec.degree = 2;
  spec.mode = RunMode::uniform;
  spec.levels = {1, 4};
  spec.law = StepLaw::h2;
  const UniformStudy study = uniform_study(spec);
  bool ok = study.rows.size() == 4;
  std::ostringstream d;
  for (NormFlavor nf : {NormFlavor::linf_l2, NormFlavor::l2_l2}) {
    const auto err = study.errors(nf);
    bool mono = true;
    for (std::size_t i = 1; i < err.size(); ++i) mono = mono && err[i] < err[i - 1];
    const auto last = study.error_eoc(nf, err.size() - 2);
    const bool rate = last && *last >= 0.8;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& row : study.rows) {
      const double v = row.iei(nf).value_or(0.0);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const bool iei_ok = lo > 0.0 && hi / lo <= 10.0;
    ok = ok && mono && rate && iei_ok;
    d << to_string(nf) << ": errors";
    for (double e : err) d << ' ' << sci(e);
    d << (mono ? " monotone" : " NOT monotone") << ", final EOC " << opt(last) << (rate ? " ok" : " FAIL")
      << ", IEI max/min " << fix(hi / lo) << (iei_ok ? " ok" : " FAIL") << "; ";
  }
  r.passed = ok;
  r.detail = d.str();
  return r;
}

// ---------------------------------------------------------------------------
// 5

namespace {

struct Scenario {
  const char* name;
  const char* example;
  Mesh prev;
  Mesh next;
  double t0;
  double t1;
};

}  // namespace

CheckResult check_estimator_components() {
  CheckResult r;
  const Mesh base = Mesh::unit_square(3);
  auto lower_left = [](Point g) { return g.x + g.y < 0.7; };
  auto upper_right = [](Point g) { return g.x + g.y > 1.3; };
  const Mesh graded = bisect(bisect(base, mark_where(base, lower_left)), mark_where(base, lower_left));
  const Mesh graded_fine = bisect(graded, mark_where(graded, lower_left));

  std::vector<Scenario> scenarios;
  scenarios.push_back({"coarsening", "u1", graded_fine, coarsen(graded_fine, all_leaves(graded_fine)), 0.4, 0.41});
  {
    const Mesh c = coarsen(graded, mark_where(graded, lower_left));
    scenarios.push_back({"coarsen+refine", "u2", graded, bisect(c, mark_where(c, upper_right)), 0.31, 0.311});
  }
  scenarios.push_back({"refinement", "u1", base, bisect(base, mark_where(base, upper_right)), 0.6, 0.62});

  double worst = 0.0;
  double nested_gamma = 0.0;
  std::ostringstream d;
  for (const Scenario& s : scenarios) {
    RunSpec spec;
    spec.example = s.example;
    const Problem problem = spec.problem();
    Discretization disc = spec.discretization();
    auto space_prev = std::make_shared<const DgSpace>(s.prev, disc.degree);
    const ManufacturedSolution exact = solution_by_name(s.example);
    const double t0 = s.t0;
    const FeFunction u_prev = l2_project(space_prev, [&](Point p) { return exact.value(p, t0); });
    const Evolution evo(problem, disc, u_prev, s.t0);
    const SolvedStep step = evo.solve(s.next, s.t1);
    const ParabolicStepEstimators est = evo.estimate(step);
    const double lambda = s.t1 - s.t0;

    const double defect = oracle::projection_defect_squared(u_prev, s.next, disc.degree);
    const double gjump = oracle::g_distance_squared(step.g, evo.g());
    const double beta = oracle::beta_inf(s.next, problem.forcing, step.g.analytic, s.t0, s.t1);
    const double norm_sq = l2_norm_squared(u_prev);

    const double e_gamma = rel_diff(est.gamma_inf, defect / lambda, 1e-14 * norm_sq / lambda);
    const double e_eta = rel_diff(est.eta_inf, gjump * lambda, 1e-300);
    const double e_beta = rel_diff(est.beta_inf, beta, 1e-300);
    const double e_beta2 = rel_diff(est.beta_2, beta * lambda, 1e-300);
    worst = std::max({worst, e_gamma, e_eta, e_beta, e_beta2});
    d << s.name << " (" << s.prev.n_elements() << "->" << s.next.n_elements() << "): gamma_inf " << sci(est.gamma_inf)
      << " rel " << sci(e_gamma) << ", eta_inf " << sci(est.eta_inf) << " rel " << sci(e_eta) << ", beta_inf "
      << sci(est.beta_inf) << " rel " << sci(e_beta) << "; ";
    if (std::string(s.name) == "refinement") nested_gamma = est.defect_squared / norm_sq;
  }
  r.passed = worst <= 1e-8 && nested_gamma <= 1e-12;
  r.detail = d.str() + "worst relative mismatch " + sci(worst) + " (limit 1e-8), nested refinement defect " +
             sci(nested_gamma) + " relative to |U|^2 (limit 1e-12)";
  return r;
}

// ---------------------------------------------------------------------------
// 6

CheckResult check_adaptive_beats_uniform() {
  CheckResult r;
  RunSpec uniform;
  uniform.example = "u1";
  uniform.degree = 2;
  uniform.mode = RunMode::uniform;
  uniform.law = StepLaw::h2;
  const LevelResult reference = uniform_level(uniform, 4);
  const double target = reference.error(NormFlavor::linf_l2);

  RunSpec spec = uniform;
  spec.mode = RunMode::adaptive_implicit;
  spec.levels = {2, 2};
  spec.adaptive.tol_space = 90.0;
  spec.adaptive.tol_time = 20.0;
  spec.adaptive.tol_time_min = 2.0;
  spec.adaptive.tol_coarse = 0.1;
  spec.adaptive.lambda0 = 1.0 / 64.0;
  spec.adaptive.T = 1.0;
  const Calibration cal = calibrate_to_error(spec, target, 0.1);
  const double ratio =
      static_cast<double>(cal.log.total_dofs()) / static_cast<double>(reference.log.total_dofs());
  r.passed = cal.matched && ratio < 1.0;
  r.detail = "uniform level 4 (lambda = h^2): error " + sci(target) + ", dofs " +
             std::to_string(reference.log.total_dofs()) + "; adaptive (tol_space " + fix(cal.config.tol_space) +
             ", " + std::to_string(cal.runs) + " calibration runs): error " +
             sci(cal.log.final_error(NormFlavor::linf_l2)) + (cal.matched ? " matched" : " NOT matched") +
             ", dofs " + std::to_string(cal.log.total_dofs()) + ", ratio " + fix(ratio) +
             (ratio <= 0.7 ? " (meets 0.7 target)" : " (above 0.7 target)");
  return r;
}

// ---------------------------------------------------------------------------
// 7

CheckResult check_implicit_driver() {
  CheckResult r;
  RunSpec spec;
  spec.example = "u2";
  spec.degree = 2;
  spec.mode = RunMode::adaptive_implicit;
  spec.levels = {2, 2};
  spec.adaptive.tol_space = 1.0;
  spec.adaptive.tol_time = 0.3;
  spec.adaptive.tol_time_min = 0.03;
  spec.adaptive.lambda0 = 0.05;
  spec.adaptive.T = 1.0;
  const RunLog log = adaptive_run(spec);
  double worst = 0.0;
  std::vector<double> neg_lambda, cosine;
  for (const auto& s : log.steps) {
    worst = std::max(worst, s.time_increment);
    neg_lambda.push_back(-s.lambda);
    cosine.push_back(std::abs(std::cos(20.0 * std::numbers::pi * (s.t - 0.5 * s.lambda))));
  }
  const bool contract = worst <= spec.adaptive.tol_time;
  const bool rejected = log.rejected_steps > 0;
  const bool shrunk = log.min_lambda() < spec.adaptive.lambda0;
  const bool reached = std::abs(log.final_time() - spec.adaptive.T) <= 1e-12;
  r.passed = contract && rejected && shrunk && reached;
  r.detail = std::to_string(log.steps.size()) + " accepted steps, max increment " + sci(worst) + " vs TOL_time " +
             sci(spec.adaptive.tol_time) + (contract ? " ok" : " FAIL") + ", rejected " +
             std::to_string(log.rejected_steps) + (rejected ? " ok" : " FAIL") + ", min lambda " +
             sci(log.min_lambda()) + " vs lambda0 " + sci(spec.adaptive.lambda0) + (shrunk ? " ok" : " FAIL") +
             ", rank correlation of -lambda with |cos(20 pi t)| " +
             fix(neg_lambda.size() > 1 ? oracle::rank_correlation(neg_lambda, cosine) : 0.0);
  return r;
}

// ---------------------------------------------------------------------------
// 8

CheckResult check_identities() {
  CheckResult r;
  std::mt19937_64 rng(18);
  std::ostringstream d;

  double identity = 0.0;
  {
    const Mesh m0 = Mesh::unit_square(2);
    const Mesh m1 = bisect(m0, mark_where(m0, [](Point g) { return g.x < 0.3; }));
    for (const Mesh& m : {m0, m1})
      for (int degree : {2, 3}) {
        auto space = std::make_shared<const DgSpace>(m, degree);
        const auto id = oracle::boundary_identity(random_function(space, rng), random_function(space, rng),
                                                  random_function(space, rng));
        identity = std::max(identity, rel_diff(id.element_sum, id.edge_sum, 1.0));
      }
  }
  d << "boundary identity " << sci(identity) << " (limit 1e-10); ";

  double idem = 0.0, orth = 0.0;
  {
    const Mesh base = Mesh::unit_square(3);
    const Mesh fine = bisect(base, std::vector<int>{0, 5, 9});
    const Mesh coarse = coarsen(base, all_leaves(base));
    const Mesh mixed = bisect(coarse, std::vector<int>{1, 2});
    for (int degree : {2, 3}) {
      auto sf = std::make_shared<const DgSpace>(fine, degree);
      auto sm = std::make_shared<const DgSpace>(mixed, degree);
      const FeFunction u = random_function(sf, rng);
      const FeFunction pu = transfer(u, sm);
      const FeFunction ppu = transfer(pu, sm);
      idem = std::max(idem, (ppu.coeffs() - pu.coeffs()).norm() / pu.coeffs().norm());
      const FeFunction v = random_function(sm, rng);
      double inner = 0.0;
      for (const auto& piece : oracle::overlay_pieces(fine, mixed)) {
        const TriangleRule& rule = triangle_rule(2 * degree + 2);
        const auto& c = piece.corners;
        const double jac = std::abs((c[1].x - c[0].x) * (c[2].y - c[0].y) - (c[2].x - c[0].x) * (c[1].y - c[0].y));
        for (std::size_t q = 0; q < rule.size(); ++q) {
          const Point x = map_to_triangle(c[0], c[1], c[2], rule.points[q]);
          inner += jac * rule.weights[q] * (u.eval(piece.elem_a, x).value - pu.eval(piece.elem_b, x).value) *
                   v.eval(piece.elem_b, x).value;
        }
      }
      orth = std::max(orth, std::abs(inner) / std::sqrt(l2_norm_squared(u) * l2_norm_squared(v)));
    }
  }
  d << "projection idempotency " << sci(idem) << ", orthogonality " << sci(orth) << " (limit 1e-12); ";

  double eoc_err = 0.0;
  {
    std::uniform_real_distribution<double> cd(0.1, 10.0), pd(0.5, 5.0);
    for (int t = 0; t < 20; ++t) {
      const double c = cd(rng), p = pd(rng);
      std::vector<double> h, a;
      for (int i = 1; i <= 5; ++i) {
        h.push_back(uniform_mesh_size(i));
        a.push_back(c * std::pow(h.back(), p));
      }
      for (std::size_t i = 0; i + 1 < h.size(); ++i) eoc_err = std::max(eoc_err, std::abs(*eoc(a, h, i) - p));
    }
  }
  d << "EOC on power laws " << sci(eoc_err) << " (limit 1e-12); ";

  int mismatches = 0, nonconforming = 0, pairs = 0;
  {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int seq = 0; seq < 10; ++seq) {
      Mesh prev = Mesh::unit_square(1);
      for (int op = 0; op < 6; ++op) {
        const double cx = u01(rng), cy = u01(rng), rad = 0.2 + 0.3 * u01(rng);
        auto near = [&](Point g) { return std::hypot(g.x - cx, g.y - cy) < rad; };
        const Mesh next = u01(rng) < 0.6 || prev.n_elements() < 16 ? bisect(prev, mark_where(prev, near))
                                                                  : coarsen(prev, mark_where(prev, near));
        const Mesh fcc = finest_common_coarsening(prev, next);
        const Mesh ov = overlay(prev, next);
        const auto fcc_leaves = oracle::common_coarsening_leaves(prev, next);
        const auto ov_leaves = oracle::overlay_leaves(prev, next);
        if (!std::equal(fcc.leaves().begin(), fcc.leaves().end(), fcc_leaves.begin(), fcc_leaves.end())) ++mismatches;
        if (!std::equal(ov.leaves().begin(), ov.leaves().end(), ov_leaves.begin(), ov_leaves.end())) ++mismatches;
        nonconforming += static_cast<int>(count_nonconforming(next));
        ++pairs;
        prev = next;
      }
    }
  }
  d << "coarsening/overlay oracle mismatches " << mismatches << " over " << pairs << " mesh pairs, nonconforming edges "
    << nonconforming;

  r.passed = identity <= 1e-10 && idem <= 1e-12 && orth <= 1e-12 && eoc_err <= 1e-12 && mismatches == 0 &&
             nonconforming == 0;
  r.detail = d.str();
  return r;
}

// ---------------------------------------------------------------------------
// 9

CheckResult check_derivatives() {
  CheckResult r;
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u01(0.05, 0.95);
  double worst_bilap = 0.0, worst_dt = 0.0;
  for (const char* name : {"u1", "u2"}) {
    const ManufacturedSolution u = solution_by_name(name);
    for (int k = 0; k < 20; ++k) {
      const Point p{u01(rng), u01(rng)};
      const double t = u01(rng);
      const double fd = oracle::fd_bilaplacian([&](Point x) { return u.value(x, t); }, p);
      worst_bilap = std::max(worst_bilap, rel_diff(u.bilaplacian(p, t), fd, 1e-12));
      const double fdt = oracle::fd_time_derivative([&](double s) { return u.value(p, s); }, t);
      worst_dt = std::max(worst_dt, rel_diff(u.time_derivative(p, t), fdt, 1e-12));
    }
  }
  r.passed = worst_bilap <= 1e-5 && worst_dt <= 1e-5;
  r.detail = "bilaplacian worst relative error " + sci(worst_bilap) + ", time derivative " + sci(worst_dt) +
             " (limit 1e-5)";
  return r;
}

// ---------------------------------------------------------------------------

const std::vector<CheckInfo>& acceptance_checks() {
  static const std::vector<CheckInfo> checks{
      {1, "assembly oracle equivalence", 10.0, check_assembly_oracle},
      {2, "symmetry and coercivity surrogate", 30.0, check_symmetry_coercivity},
      {3, "elliptic convergence and estimator efficiency", 300.0, check_elliptic_convergence},
      {4, "parabolic uniform study", 900.0, check_parabolic_uniform},
      {5, "estimator component oracles", 60.0, check_estimator_components},
      {6, "adaptive beats uniform", 1200.0, check_adaptive_beats_uniform},
      {7, "implicit driver contract", 600.0, check_implicit_driver},
      {8, "identity and property suite", 60.0, check_identities},
      {9, "manufactured solution derivatives", 5.0, check_derivatives},
  };
  return checks;
}

CheckResult run_check(const CheckInfo& info) {
  const auto start = Clock::now();
  CheckResult r;
  try {
    r = info.run();
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.id = info.id;
  r.name = info.name;
  r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  r.budget_seconds = info.budget_seconds;
  if (r.seconds > r.budget_seconds) {
    r.passed = false;
    r.detail += "; runtime " + fix(r.seconds) + " s exceeds budget";
  }
  return r;
}

std::vector<CheckResult> run_checks(std::span<const int> ids) {
  std::vector<CheckResult> out;
  for (const auto& c : acceptance_checks())
    if (ids.empty() || std::find(ids.begin(), ids.end(), c.id) != ids.end()) out.push_back(run_check(c));
  return out;
}

std::string format(const CheckResult& r) {
  std::ostringstream o;
  o << (r.passed ? "[PASS] " : "[FAIL] ") << r.id << ' ' << r.name << " (" << fmt("%.2f", r.seconds) << " s of "
    << fmt("%.0f", r.budget_seconds) << " s): " << r.detail;
  return o.str();
}

}  // namespace biharm::verify
