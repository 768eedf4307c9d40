#pragma once

#include <span>
#include <string>
#include <vector>

namespace biharm::verify {

struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double budget_seconds = 0.0;
};

struct CheckInfo {
  int id;
  const char* name;
  double budget_seconds;
  CheckResult (*run)();
};

const std::vector<CheckInfo>& acceptance_checks();

/// Runs one check, catching exceptions and failing it when it exceeds its
/// time budget.
CheckResult run_check(const CheckInfo& info);
/// All checks, or only those listed in `ids`.
std::vector<CheckResult> run_checks(std::span<const int> ids = {});

/// "[PASS] 3 elliptic convergence (1.2 s): ..." on one line.
std::string format(const CheckResult& r);

CheckResult check_assembly_oracle();
CheckResult check_symmetry_coercivity();
CheckResult check_elliptic_convergence();
CheckResult check_parabolic_uniform();
CheckResult check_estimator_components();
CheckResult check_adaptive_beats_uniform();
CheckResult check_implicit_driver();
CheckResult check_identities();
CheckResult check_derivatives();

}  // namespace biharm::verify
