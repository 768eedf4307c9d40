#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "biharm/forms.hpp"

namespace biharm {

/// All constants of the a posteriori bounds collapsed into one multiplier.
struct EstimatorConstants {
  double multiplier = 1.0;
  void validate() const;
};

/// lambda = 2 (2 - min{2, r - 1}).
int estimator_lambda(int degree);

/// Per-element squared contributions of the five estimator terms, without
/// the multiplier. Edge terms are split evenly between the two adjacent
/// elements (fully to the element on a boundary edge).
struct EllipticIndicatorField {
  std::vector<double> volume;
  std::vector<double> grad_lap_jump;
  std::vector<double> lap_jump;
  std::vector<double> grad_jump;
  std::vector<double> value_jump;
  double multiplier = 1.0;

  std::size_t size() const { return volume.size(); }
  /// multiplier^2 times the sum of the five terms on each element.
  std::vector<double> local() const;
  double total_squared() const;
  double total() const;
};

/// E(T, v, phi) on the mesh of v; phi's finite element part must live on
/// the same mesh.
EllipticIndicatorField elliptic_estimate(const FeFunction& v, const GRepresentation& phi,
                                         const PenaltyConfig& penalty, const EstimatorConstants& consts = {});
EllipticIndicatorField elliptic_estimate(const FeFunction& v, const SpaceFunction& phi, const PenaltyConfig& penalty,
                                         const EstimatorConstants& consts = {});

/// ||(I - Pi^n) U^{n-1}||^2 with Pi^n the projection onto `space_n`.
double projection_defect_squared(const FeFunction& u_prev, const std::shared_ptr<const DgSpace>& space_n);

/// ||g_a - g_b||^2, integrating the finite element and analytic parts
/// jointly on the overlay of their meshes.
double g_distance_squared(const GRepresentation& a, const GRepresentation& b, int quad_degree = 0);

struct DataEstimate {
  double beta_inf = 0.0;
  double beta_2 = 0.0;
};

/// beta_inf = int_{t0}^{t1} ||f~ - f||^2 dt by a Gauss rule with
/// `time_points` nodes; beta_2 = (t1 - t0) beta_inf.
DataEstimate data_estimators(const Mesh& mesh, const SpaceTimeFunction& f, const SpaceFunction& f_tilde, double t0,
                             double t1, int quad_degree, int time_points = 8);

/// E(T^, U^n - U^{n-1}, g^n - g^{n-1})^2 with T^ the finest common coarsening
/// of the two meshes. All terms are integrated on overlay sub-elements and
/// weighted with the sizes of the containing T^ entities; overlay edges
/// inside a T^ element carry that element's size.
double common_coarsening_estimate(const FeFunction& u_n, const FeFunction& u_prev, const GRepresentation& g_n,
                                  const GRepresentation& g_prev, const PenaltyConfig& penalty,
                                  const EstimatorConstants& consts = {});

enum class EtaTildeMode { per_step, common_coarsening };
enum class NormFlavor { linf_l2, l2_l2 };

/// History needed by the 2-flavour estimators: sum over accepted steps
/// i < n of ||(I - Pi^i) U^{i-1}||^2 and of lambda_i^2 ||g^i - g^{i-1}||^2.
struct RunningSums {
  double coarsening = 0.0;
  double time = 0.0;
  int steps = 0;
};

struct ParabolicStepEstimators {
  double gamma_inf = 0.0;
  double gamma_2 = 0.0;
  double eta_inf = 0.0;
  double eta_2 = 0.0;
  double beta_inf = 0.0;
  double beta_2 = 0.0;
  double eta_tilde_inf = 0.0;
  /// E(T_n, U^n, g^n).
  double elliptic = 0.0;
  /// ||(I - Pi^n) U^{n-1}||^2 and ||g^n - g^{n-1}||^2.
  double defect_squared = 0.0;
  double g_jump_squared = 0.0;
  double lambda = 0.0;
};

struct StepEstimatorInput {
  const FeFunction* u_prev = nullptr;
  const FeFunction* u_n = nullptr;
  const GRepresentation* g_prev = nullptr;
  const GRepresentation* g_n = nullptr;
  const EllipticIndicatorField* indicators = nullptr;  // of E(T_n, U^n, g^n)
  SpaceTimeFunction f;
  SpaceFunction f_tilde;
  double t0 = 0.0;
  double t1 = 0.0;
  PenaltyConfig penalty;
  EstimatorConstants consts;
  EtaTildeMode eta_tilde = EtaTildeMode::common_coarsening;
};

ParabolicStepEstimators step_estimators(const StepEstimatorInput& in, const RunningSums& history);

/// Adds an accepted step to the history.
RunningSums advance(RunningSums history, const ParabolicStepEstimators& step);

/// The step's own contribution to E_time in the given flavour:
/// sqrt((eta + beta) lambda [+ eta~]).
double time_increment(const ParabolicStepEstimators& step, NormFlavor norm, bool include_eta_tilde);

struct AccumulatedEstimators {
  double coarsen_inf_sq = 0.0;
  double coarsen_2_sq = 0.0;
  double time_inf_sq = 0.0;
  double time_2_sq = 0.0;
  double space_inf = 0.0;  // running max of E(T_n, U^n, g^n)
  double space_2_sq = 0.0;
  double e0 = 0.0;         // ||Pi^0 u_0 - u_0||, reported separately

  double coarsen(NormFlavor norm) const;
  double time(NormFlavor norm) const;
  double space(NormFlavor norm) const;
};

/// Starts the accumulation with E(T_0, U^0, g^0) and ||e(0)||.
AccumulatedEstimators start_accumulation(double elliptic0, double e0);
AccumulatedEstimators accumulate(const ParabolicStepEstimators& step, AccumulatedEstimators acc);

/// ||w_a a + w_b b - phi||^2 on the overlay of the meshes of a and b.
double combined_error_squared(const FeFunction& a, double wa, const FeFunction& b, double wb, const SpaceFunction& phi,
                              int quad_degree = 0);

/// L-infinity(L2) and L2(L2) errors of the piecewise linear in time U(t)
/// against an exact solution, accumulated one interval at a time.
class ErrorAccumulator {
 public:
  ErrorAccumulator() = default;
  explicit ErrorAccumulator(SpaceTimeFunction exact) : exact_(std::move(exact)) {}

  void start(const FeFunction& u0, double t0 = 0.0);
  void add_interval(const FeFunction& u_prev, const FeFunction& u_n, double t0, double t1);

  double linf_l2() const { return linf_; }
  double l2_l2() const { return std::sqrt(l2_sq_); }
  double error(NormFlavor norm) const { return norm == NormFlavor::linf_l2 ? linf_l2() : l2_l2(); }

 private:
  SpaceTimeFunction exact_;
  double linf_ = 0.0;
  double l2_sq_ = 0.0;
};

struct TrajectoryPoint {
  double t;
  FeFunction u;
};

struct ErrorNorms {
  double linf_l2 = 0.0;
  double l2_l2 = 0.0;
};

ErrorNorms exact_error_norms(std::span<const TrajectoryPoint> trajectory, const SpaceTimeFunction& exact);

/// err / (E_time + E_space); empty when the denominator is not positive.
std::optional<double> iei(double err, double e_time, double e_space);
/// log(a[i+1]/a[i]) / log(h[i+1]/h[i]); empty when undefined.
std::optional<double> eoc(std::span<const double> a, std::span<const double> h, std::size_t i);

}  // namespace biharm
