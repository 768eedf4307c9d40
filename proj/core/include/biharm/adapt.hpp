#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "biharm/estimators.hpp"
#include "biharm/manufactured.hpp"

namespace biharm {

/// Data of u_t + bilap u = f with clamped boundary conditions.
struct Problem {
  std::string name;
  SpaceFunction initial;
  SpaceTimeFunction forcing;
  /// f~ on [t0, t1]; when empty the forcing is averaged by 3-point Gauss.
  std::function<SpaceFunction(double, double)> averaged_forcing;
  /// Exact solution, if known.
  SpaceTimeFunction exact;

  static Problem manufactured(const ManufacturedSolution& u);
  SpaceFunction f_tilde(double t0, double t1) const;
};

struct Discretization {
  int degree = 2;
  PenaltyConfig penalty;
  EstimatorConstants consts;
  SolverOptions solver;
  EtaTildeMode eta_tilde = EtaTildeMode::common_coarsening;
  NormFlavor norm = NormFlavor::linf_l2;
  /// Keep every accepted mesh in the run log.
  bool keep_meshes = false;
};

/// Indices of a minimal bulk set: indicators are visited in descending order
/// (ties by ascending index) and each is marked while the running sum before
/// it is below xi * total.
std::vector<int> dorfler_mark(std::span<const double> indicators, double xi);

/// Coarsens leaves whose indicator is below tol_coarse times the mean.
Mesh space_coarsening(const Mesh& mesh, std::span<const double> indicators, double tol_coarse);

struct StepRecord {
  int n = 0;
  double t = 0.0;
  double lambda = 0.0;
  std::size_t dofs = 0;
  std::size_t elements = 0;
  int rejected = 0;
  ParabolicStepEstimators est;
  AccumulatedEstimators acc;
  double time_increment = 0.0;
  /// Errors on [0, t]; NaN without an exact solution.
  double err_linf = std::numeric_limits<double>::quiet_NaN();
  double err_l2 = std::numeric_limits<double>::quiet_NaN();
  int space_iterations = 0;
  bool space_converged = true;
  double wall_time = 0.0;

  double error(NormFlavor norm) const { return norm == NormFlavor::linf_l2 ? err_linf : err_l2; }
};

struct RunLog {
  std::string problem;
  int degree = 2;
  NormFlavor norm = NormFlavor::linf_l2;
  std::size_t initial_dofs = 0;
  AccumulatedEstimators initial;
  std::vector<StepRecord> steps;
  std::vector<Mesh> meshes;  // T_0, T_1, ... when requested
  FeFunction final_solution;
  std::size_t linear_solves = 0;
  int rejected_steps = 0;
  bool space_unconverged = false;
  double wall_time = 0.0;

  /// Sum over n >= 1 of dofs(T_n).
  std::size_t total_dofs() const;
  double final_time() const { return steps.empty() ? 0.0 : steps.back().t; }
  double min_lambda() const;
  const AccumulatedEstimators& final_accumulators() const { return steps.empty() ? initial : steps.back().acc; }
  double final_error(NormFlavor norm) const;
  std::optional<double> final_iei(NormFlavor norm) const;
};

/// A solved but not yet accepted step.
struct SolvedStep {
  FeFunction u;
  GRepresentation g;
  EllipticIndicatorField indicators;
  double t0 = 0.0;
  double t1 = 0.0;

  double space_estimate() const { return indicators.total(); }
};

/// Backward Euler-dG time stepping with estimator and error bookkeeping.
/// Accepted steps are appended to the run log; solving a step never changes
/// the state, so rejected attempts leave no trace.
class Evolution {
 public:
  Evolution(Problem problem, Discretization disc, FeFunction u0, double t0 = 0.0);

  double time() const { return t_; }
  const FeFunction& solution() const { return u_; }
  const GRepresentation& g() const { return g_; }
  const Mesh& mesh() const { return u_.space().mesh(); }
  const EllipticIndicatorField& indicators() const { return indicators_; }
  const Discretization& discretization() const { return disc_; }
  const Problem& problem() const { return problem_; }
  const RunningSums& history() const { return sums_; }
  const RunLog& log() const { return log_; }
  /// Moves the log out, attaching the current solution.
  RunLog take_log();

  /// One step from the current state to t1 on `mesh`.
  SolvedStep solve(const Mesh& mesh, double t1) const;
  ParabolicStepEstimators estimate(const SolvedStep& step) const;
  const StepRecord& accept(SolvedStep step, const ParabolicStepEstimators& est, int rejected = 0,
                           int space_iterations = 1, bool space_converged = true, double wall_time = 0.0);

  /// The local E_time increment used by the step controllers.
  double time_increment(const ParabolicStepEstimators& est) const;

 private:
  Problem problem_;
  Discretization disc_;
  double t_;
  FeFunction u_;
  GRepresentation g_;
  EllipticIndicatorField indicators_;
  RunningSums sums_;
  AccumulatedEstimators acc_;
  std::optional<ErrorAccumulator> errors_;
  RunLog log_;
  mutable std::size_t solves_ = 0;
};

struct AdaptiveConfig {
  double tol_time = 1e-2;
  double tol_time_min = 1e-3;
  double tol_space = 1e-2;
  double tol_coarse = 0.1;
  double lambda0 = 0.01;
  double T = 1.0;
  double xi_refine = 0.75;
  int max_space_iters = 10;
  int max_halvings = 20;
  /// Initial condition tolerance; negative means tol_space.
  double tol_initial = -1.0;
  int max_initial_iters = 10;
  int initial_level = 2;
  /// Refinement stops once a mesh reaches this many elements.
  std::size_t max_elements = 200000;

  void validate() const;
};

struct SpaceAdaptivityResult {
  SolvedStep step;
  int iterations = 0;
  bool converged = true;
};

/// Coarsen with the previous indicators, then solve, estimate, mark and
/// refine until E(T_n, U^n, g^n) <= tol_space or the iteration cap.
SpaceAdaptivityResult space_adaptivity(const Evolution& evo, const AdaptiveConfig& config, double t1,
                                       const Mesh& mesh_in);

struct InitialAdaptivityResult {
  FeFunction u0;
  Mesh mesh;
  int iterations = 0;
  bool converged = true;
};

/// U^0 = Pi^0 u_0, refining by Doerfler marking on the local projection
/// errors until ||u_0 - Pi^0 u_0|| <= tol.
InitialAdaptivityResult initial_space_adaptivity(const SpaceFunction& u0, const Mesh& mesh0, int degree, double xi,
                                                 double tol, int max_iters = 10,
                                                 std::size_t max_elements = 200000);

RunLog implicit_time_step_control(const Problem& problem, const Discretization& disc, const AdaptiveConfig& config);
RunLog explicit_time_step_control(const Problem& problem, const Discretization& disc, const AdaptiveConfig& config);

/// Fixed mesh and fixed step lambda on [0, T], final step clipped.
RunLog fixed_step_run(const Problem& problem, const Discretization& disc, const Mesh& mesh, double lambda, double T);

}  // namespace biharm
