#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "biharm/verify/acceptance.hpp"
#include "report.hpp"

namespace {

biharm::LevelRange parse_levels(const std::string& s) {
  const auto dots = s.find("..");
  biharm::LevelRange r;
  try {
    if (dots == std::string::npos) {
      r.first = r.last = std::stoi(s);
    } else {
      r.first = std::stoi(s.substr(0, dots));
      r.last = std::stoi(s.substr(dots + 2));
    }
  } catch (const std::exception&) {
    throw CLI::ValidationError("--levels", "expected A..B, got '" + s + "'");
  }
  if (r.first < 0 || r.last < r.first) throw CLI::ValidationError("--levels", "need 0 <= A <= B, got '" + s + "'");
  return r;
}

void print_uniform(const biharm::UniformStudy& s) {
  using biharm::NormFlavor;
  const NormFlavor nf = s.spec.norm;
  std::printf("%5s %10s %10s %8s %12s %12s %7s %10s\n", "level", "h", "lambda", "dofs", "error", "estimator", "EOC",
              "IEI");
  for (std::size_t i = 0; i < s.rows.size(); ++i) {
    const auto& r = s.rows[i];
    const auto e = i ? s.error_eoc(nf, i - 1) : std::nullopt;
    std::printf("%5d %10.4g %10.4g %8zu %12.5e %12.5e %7s %10.3e\n", r.level, r.h, r.lambda, r.log.initial_dofs,
                r.error(nf), r.estimator(nf), e ? std::to_string(*e).substr(0, 6).c_str() : "-",
                r.iei(nf).value_or(0.0));
  }
  for (const auto& w : s.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
}

void print_adaptive(const biharm::AdaptiveStudy& s) {
  const auto nf = s.spec.norm;
  const auto& log = s.log;
  std::printf("steps %zu, rejected %d, min lambda %.4g, total dofs %zu\n", log.steps.size(), log.rejected_steps,
              log.min_lambda(), log.total_dofs());
  std::printf("error %s %.5e, IEI %.3e\n", biharm::to_string(nf).c_str(), log.final_error(nf),
              log.final_iei(nf).value_or(0.0));
  if (s.paired)
    std::printf("paired uniform level %d: error %.5e, total dofs %zu, dof ratio %.3f\n", s.paired->level,
                s.paired->error(nf), s.paired->log.total_dofs(), s.dof_ratio().value_or(0.0));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive discontinuous Galerkin solver for the biharmonic heat equation"};
  app.require_subcommand(1);

  biharm::RunSpec spec;
  std::string mode = "uniform", law = "h3", norm = "linf-l2", levels = "1..4", eta_tilde, out;
  std::optional<double> sigma0, xi0;
  bool pair = false;

  auto* solve = app.add_subcommand("solve", "run a uniform study or an adaptive run");
  solve->add_option("--example", spec.example, "manufactured solution")->check(CLI::IsMember({"u1", "u2"}));
  solve->add_option("--degree", spec.degree, "polynomial degree")->check(CLI::IsMember({2, 3}));
  solve->add_option("--mode", mode)->check(CLI::IsMember({"uniform", "adaptive-implicit", "adaptive-explicit"}));
  solve->add_option("--levels", levels, "uniform levels A..B; adaptive runs start from level A");
  solve->add_option("--dt-law", law, "uniform time step law")->check(CLI::IsMember({"h3", "h2"}));
  solve->add_option("--sigma0", sigma0, "value penalty");
  solve->add_option("--xi0", xi0, "gradient penalty");
  solve->add_option("--norm", norm)->check(CLI::IsMember({"linf-l2", "l2-l2"}));
  solve->add_option("--tol-time", spec.adaptive.tol_time);
  solve->add_option("--tol-time-min", spec.adaptive.tol_time_min);
  solve->add_option("--tol-space", spec.adaptive.tol_space);
  solve->add_option("--tol-coarse", spec.adaptive.tol_coarse);
  solve->add_option("--lambda0", spec.adaptive.lambda0);
  solve->add_option("--T", spec.adaptive.T, "final time");
  solve->add_option("--eta-tilde", eta_tilde)->check(CLI::IsMember({"per-step", "common-coarsening"}));
  solve->add_flag("--pair", pair, "adaptive runs: also run the uniform levels and pair by error");
  solve->add_option("--out", out, "output directory")->required();

  std::vector<int> only;
  auto* verify = app.add_subcommand("verify", "run the acceptance checks");
  verify->add_option("--only", only, "check ids to run");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*verify) {
      bool ok = true;
      for (const auto& r : biharm::verify::run_checks(only)) {
        std::cout << biharm::verify::format(r) << std::endl;
        ok = ok && r.passed;
      }
      return ok ? 0 : 1;
    }

    spec.mode = biharm::parse_run_mode(mode);
    spec.law = biharm::parse_step_law(law);
    spec.norm = biharm::parse_norm(norm);
    spec.levels = parse_levels(levels);
    if (!eta_tilde.empty()) spec.eta_tilde = biharm::parse_eta_tilde(eta_tilde);
    if (sigma0 || xi0) {
      biharm::PenaltyConfig p = biharm::default_penalty(spec.degree);
      if (sigma0) p.sigma0 = *sigma0;
      if (xi0) p.xi0 = *xi0;
      spec.penalty = p;
    }
    spec.validate();

    if (spec.mode == biharm::RunMode::uniform) {
      const auto study = biharm::uniform_study(spec);
      print_uniform(study);
      biharm::report::emit(study, out);
    } else if (pair) {
      const auto study = biharm::adaptive_study(spec);
      print_adaptive(study);
      biharm::report::emit(study, out);
    } else {
      biharm::AdaptiveStudy study{spec, biharm::adaptive_run(spec), std::nullopt};
      print_adaptive(study);
      biharm::report::emit(study, out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
