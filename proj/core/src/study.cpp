#include "biharm/study.hpp"

#include "biharm/error.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace biharm {

PenaltyConfig default_penalty(int degree) {
  if (degree == 3) return {100.0, 20.0};
  return {20.0, 20.0};
}

namespace {

template <class E>
struct Name {
  E value;
  const char* text;
};

constexpr Name<RunMode> kModes[] = {{RunMode::uniform, "uniform"},
                                    {RunMode::adaptive_implicit, "adaptive-implicit"},
                                    {RunMode::adaptive_explicit, "adaptive-explicit"}};
constexpr Name<StepLaw> kLaws[] = {{StepLaw::h3, "h3"}, {StepLaw::h2, "h2"}};
constexpr Name<NormFlavor> kNorms[] = {{NormFlavor::linf_l2, "linf-l2"}, {NormFlavor::l2_l2, "l2-l2"}};
constexpr Name<EtaTildeMode> kEtaTilde[] = {{EtaTildeMode::per_step, "per-step"},
                                            {EtaTildeMode::common_coarsening, "common-coarsening"}};

template <class E, std::size_t N>
std::string name_of(const Name<E> (&table)[N], E v) {
  for (const auto& n : table)
    if (n.value == v) return n.text;
  throw std::logic_error("unnamed enumerator");
}

template <class E, std::size_t N>
E parse(const Name<E> (&table)[N], const std::string& s, const char* what) {
  for (const auto& n : table)
    if (s == n.text) return n.value;
  throw std::invalid_argument(std::string("unknown ") + what + ": " + s);
}

}  // namespace

std::string to_string(RunMode mode) { return name_of(kModes, mode); }
std::string to_string(StepLaw law) { return name_of(kLaws, law); }
std::string to_string(NormFlavor norm) { return name_of(kNorms, norm); }
std::string to_string(EtaTildeMode mode) { return name_of(kEtaTilde, mode); }
RunMode parse_run_mode(const std::string& s) { return parse(kModes, s, "mode"); }
StepLaw parse_step_law(const std::string& s) { return parse(kLaws, s, "time step law"); }
NormFlavor parse_norm(const std::string& s) { return parse(kNorms, s, "norm"); }
EtaTildeMode parse_eta_tilde(const std::string& s) { return parse(kEtaTilde, s, "eta-tilde mode"); }

void RunSpec::validate() const {
  solution_by_name(example);
  if (degree != 2 && degree != 3) throw std::invalid_argument("degree must be 2 or 3");
  if (levels.first < 0 || levels.last < levels.first || levels.last > 24)
    throw std::invalid_argument("level range must satisfy 0 <= first <= last <= 24");
  if (penalty) penalty->validate();
  if (mode == RunMode::uniform) {
    if (!(adaptive.T > 0.0)) throw std::invalid_argument("final time must be positive");
  } else {
    adaptive.validate();
  }
}

Discretization RunSpec::discretization() const {
  Discretization d;
  d.degree = degree;
  d.penalty = penalty.value_or(default_penalty(degree));
  d.norm = norm;
  d.eta_tilde = eta_tilde.value_or(mode == RunMode::uniform ? EtaTildeMode::common_coarsening : EtaTildeMode::per_step);
  return d;
}

Problem RunSpec::problem() const { return Problem::manufactured(solution_by_name(example)); }

double uniform_mesh_size(int level) { return std::pow(2.0, -0.5 * level - 1.0); }

double step_for_law(double h, StepLaw law) { return law == StepLaw::h3 ? h * h * h : h * h; }

double LevelResult::estimator(NormFlavor norm) const {
  const auto& acc = log.final_accumulators();
  return acc.time(norm) + acc.space(norm);
}

std::vector<double> UniformStudy::mesh_sizes() const {
  std::vector<double> h;
  for (const auto& r : rows) h.push_back(r.h);
  return h;
}

std::vector<double> UniformStudy::errors(NormFlavor norm) const {
  std::vector<double> e;
  for (const auto& r : rows) e.push_back(r.error(norm));
  return e;
}

std::vector<double> UniformStudy::estimators(NormFlavor norm) const {
  std::vector<double> e;
  for (const auto& r : rows) e.push_back(r.estimator(norm));
  return e;
}

std::optional<double> UniformStudy::error_eoc(NormFlavor norm, std::size_t i) const {
  return eoc(errors(norm), mesh_sizes(), i);
}

std::optional<double> UniformStudy::estimator_eoc(NormFlavor norm, std::size_t i) const {
  return eoc(estimators(norm), mesh_sizes(), i);
}

LevelResult uniform_level(const RunSpec& spec, int level) {
  const Mesh mesh = Mesh::unit_square(level);
  double h = 0.0;
  for (std::size_t k = 0; k < mesh.n_elements(); ++k) h = std::max(h, mesh.element_size(static_cast<int>(k)));
  LevelResult r;
  r.level = level;
  r.h = h;
  r.lambda = step_for_law(h, spec.law);
  r.log = fixed_step_run(spec.problem(), spec.discretization(), mesh, r.lambda, spec.final_time());
  return r;
}

UniformStudy uniform_study(const RunSpec& spec) {
  spec.validate();
  UniformStudy study;
  study.spec = spec;
  const int n_local = (spec.degree + 1) * (spec.degree + 2) / 2;
  for (int level = spec.levels.first; level <= spec.levels.last; ++level) {
    const std::size_t dofs = static_cast<std::size_t>(n_local) * (std::size_t{4} << level);
    if (dofs > spec.max_dofs) {
      study.warnings.push_back("levels from " + std::to_string(level) + " skipped: " + std::to_string(dofs) +
                               " dofs exceed the limit of " + std::to_string(spec.max_dofs));
      break;
    }
    study.rows.push_back(uniform_level(spec, level));
  }
  return study;
}

RunLog adaptive_run(const RunSpec& spec) {
  spec.validate();
  if (spec.mode == RunMode::uniform) throw std::invalid_argument("adaptive_run: mode is uniform");
  AdaptiveConfig config = spec.adaptive;
  config.initial_level = spec.levels.first;
  const Problem problem = spec.problem();
  const Discretization disc = spec.discretization();
  try {
    return spec.mode == RunMode::adaptive_implicit ? implicit_time_step_control(problem, disc, config)
                                                   : explicit_time_step_control(problem, disc, config);
  } catch (const DriverAbort& e) {
    throw DriverAbort(spec.example + ", r = " + std::to_string(spec.degree) + ", " + to_string(spec.mode) + ": " +
                      e.what());
  }
}

std::optional<double> AdaptiveStudy::dof_ratio() const {
  if (!paired || paired->log.total_dofs() == 0) return std::nullopt;
  return static_cast<double>(log.total_dofs()) / static_cast<double>(paired->log.total_dofs());
}

AdaptiveStudy adaptive_study(const RunSpec& spec) {
  AdaptiveStudy study;
  study.spec = spec;
  study.log = adaptive_run(spec);
  const double target = study.log.final_error(spec.norm);
  if (!std::isfinite(target) || !(target > 0.0)) return study;
  RunSpec uniform = spec;
  uniform.mode = RunMode::uniform;
  uniform.eta_tilde.reset();
  double best = std::numeric_limits<double>::infinity();
  for (const auto& row : uniform_study(uniform).rows) {
    const double gap = std::abs(std::log(row.error(spec.norm) / target));
    if (gap < best) {
      best = gap;
      study.paired = row;
    }
  }
  return study;
}

Calibration calibrate_to_error(const RunSpec& spec, double target, double rel_tol, int max_runs) {
  if (!(target > 0.0) || !(rel_tol > 0.0) || max_runs < 1)
    throw std::invalid_argument("calibrate_to_error: invalid target or tolerance");
  Calibration cal;
  double scale = 1.0;
  double lo = 0.0;  // largest scale known to undershoot the target
  double hi = 0.0;  // smallest scale known to overshoot
  for (cal.runs = 1; cal.runs <= max_runs; ++cal.runs) {
    RunSpec s = spec;
    s.adaptive.tol_space *= scale;
    s.adaptive.tol_time *= scale;
    s.adaptive.tol_time_min *= scale;
    cal.config = s.adaptive;
    cal.log = adaptive_run(s);
    const double ratio = cal.log.final_error(spec.norm) / target;
    if (!std::isfinite(ratio)) return cal;
    if (std::abs(ratio - 1.0) <= rel_tol) {
      cal.matched = true;
      return cal;
    }
    if (ratio > 1.0)
      hi = hi > 0.0 ? std::min(hi, scale) : scale;
    else
      lo = std::max(lo, scale);
    scale = lo > 0.0 && hi > 0.0 ? std::sqrt(lo * hi) : scale / ratio;
  }
  cal.runs = max_runs;
  return cal;
}

}  // namespace biharm
