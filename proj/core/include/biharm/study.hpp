#pragma once

#include <optional>
#include <string>
#include <vector>

#include "biharm/adapt.hpp"

namespace biharm {

enum class RunMode { uniform, adaptive_implicit, adaptive_explicit };
/// Uniform runs use lambda = (max h)^3 or (max h)^2.
enum class StepLaw { h3, h2 };

/// Penalties used when none are given: sigma0 = xi0 = 20 for r = 2. For
/// r = 3 that choice is not coercive on these meshes, so sigma0 = 100.
PenaltyConfig default_penalty(int degree);

struct LevelRange {
  int first = 1;
  int last = 4;
};

struct RunSpec {
  std::string example = "u1";
  int degree = 2;
  RunMode mode = RunMode::uniform;
  LevelRange levels;
  StepLaw law = StepLaw::h3;
  std::optional<PenaltyConfig> penalty;
  NormFlavor norm = NormFlavor::linf_l2;
  /// Default: per-step in adaptive runs, common coarsening in uniform runs.
  std::optional<EtaTildeMode> eta_tilde;
  AdaptiveConfig adaptive;
  /// Uniform levels whose space exceeds this many dofs are skipped.
  std::size_t max_dofs = 200000;

  void validate() const;
  Discretization discretization() const;
  Problem problem() const;
  double final_time() const { return adaptive.T; }
};

std::string to_string(RunMode mode);
std::string to_string(StepLaw law);
std::string to_string(NormFlavor norm);
std::string to_string(EtaTildeMode mode);
RunMode parse_run_mode(const std::string& s);
StepLaw parse_step_law(const std::string& s);
NormFlavor parse_norm(const std::string& s);
EtaTildeMode parse_eta_tilde(const std::string& s);

/// max_k h_k of the uniform mesh of this level, 2^{-level/2-1}.
double uniform_mesh_size(int level);
double step_for_law(double h, StepLaw law);

struct LevelResult {
  int level = 0;
  double h = 0.0;
  double lambda = 0.0;
  RunLog log;

  double error(NormFlavor norm) const { return log.final_error(norm); }
  /// E_time + E_space at the final time.
  double estimator(NormFlavor norm) const;
  std::optional<double> iei(NormFlavor norm) const { return log.final_iei(norm); }
};

struct UniformStudy {
  RunSpec spec;
  std::vector<LevelResult> rows;
  std::vector<std::string> warnings;

  std::vector<double> mesh_sizes() const;
  std::vector<double> errors(NormFlavor norm) const;
  std::vector<double> estimators(NormFlavor norm) const;
  /// EOC between rows i and i+1.
  std::optional<double> error_eoc(NormFlavor norm, std::size_t i) const;
  std::optional<double> estimator_eoc(NormFlavor norm, std::size_t i) const;
};

/// Fixed-mesh backward Euler runs over the level range of `spec`.
UniformStudy uniform_study(const RunSpec& spec);
LevelResult uniform_level(const RunSpec& spec, int level);

/// Runs the selected adaptive driver from the uniform mesh of level
/// spec.levels.first.
RunLog adaptive_run(const RunSpec& spec);

struct AdaptiveStudy {
  RunSpec spec;
  RunLog log;
  /// The uniform level in spec.levels whose final error is closest to the
  /// adaptive one in ratio.
  std::optional<LevelResult> paired;

  std::optional<double> dof_ratio() const;
};

AdaptiveStudy adaptive_study(const RunSpec& spec);

struct Calibration {
  AdaptiveConfig config;
  RunLog log;
  int runs = 0;
  bool matched = false;
};

/// Scales tol_space, tol_time and tol_time_min by a common factor until the
/// final error of the adaptive run is within rel_tol of `target`.
Calibration calibrate_to_error(const RunSpec& spec, double target, double rel_tol = 0.1, int max_runs = 10);

}  // namespace biharm
