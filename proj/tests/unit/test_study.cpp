#include <gtest/gtest.h>

#include <cmath>

#include "biharm/study.hpp"

using namespace biharm;

TEST(Study, EnumStringsRoundTrip) {
  for (RunMode m : {RunMode::uniform, RunMode::adaptive_implicit, RunMode::adaptive_explicit})
    EXPECT_EQ(parse_run_mode(to_string(m)), m);
  for (StepLaw l : {StepLaw::h2, StepLaw::h3}) EXPECT_EQ(parse_step_law(to_string(l)), l);
  for (NormFlavor n : {NormFlavor::linf_l2, NormFlavor::l2_l2}) EXPECT_EQ(parse_norm(to_string(n)), n);
  for (EtaTildeMode e : {EtaTildeMode::per_step, EtaTildeMode::common_coarsening})
    EXPECT_EQ(parse_eta_tilde(to_string(e)), e);
  EXPECT_EQ(to_string(RunMode::adaptive_explicit), "adaptive-explicit");
  EXPECT_THROW(parse_run_mode("adaptive"), std::exception);
}

TEST(Study, MeshSizeAndStepLaws) {
  EXPECT_DOUBLE_EQ(uniform_mesh_size(0), 0.5);
  EXPECT_DOUBLE_EQ(uniform_mesh_size(2), 0.25);
  EXPECT_DOUBLE_EQ(step_for_law(0.25, StepLaw::h2), 0.0625);
  EXPECT_DOUBLE_EQ(step_for_law(0.25, StepLaw::h3), 0.015625);
}

TEST(Study, DefaultPenalties) {
  EXPECT_DOUBLE_EQ(default_penalty(2).sigma0, 20.0);
  EXPECT_DOUBLE_EQ(default_penalty(3).sigma0, 100.0);
  EXPECT_DOUBLE_EQ(default_penalty(3).xi0, 20.0);
}

TEST(Study, EtaTildeDefaultsDependOnMode) {
  RunSpec s;
  s.mode = RunMode::uniform;
  EXPECT_EQ(s.discretization().eta_tilde, EtaTildeMode::common_coarsening);
  s.mode = RunMode::adaptive_implicit;
  EXPECT_EQ(s.discretization().eta_tilde, EtaTildeMode::per_step);
  s.eta_tilde = EtaTildeMode::common_coarsening;
  EXPECT_EQ(s.discretization().eta_tilde, EtaTildeMode::common_coarsening);
}

TEST(Study, ValidationRejectsBadSpecs) {
  RunSpec s;
  s.example = "u7";
  EXPECT_THROW(s.validate(), std::exception);
  s = RunSpec{};
  s.degree = 5;
  EXPECT_THROW(s.validate(), std::exception);
  s = RunSpec{};
  s.levels = {3, 2};
  EXPECT_THROW(s.validate(), std::exception);
}

TEST(Study, SmallUniformStudyHasOneRowPerLevel) {
  RunSpec s;
  s.levels = {0, 1};
  s.law = StepLaw::h2;
  s.adaptive.T = 0.25;
  const UniformStudy study = uniform_study(s);
  ASSERT_EQ(study.rows.size(), 2u);
  EXPECT_EQ(study.rows[0].level, 0);
  EXPECT_DOUBLE_EQ(study.rows[1].lambda, step_for_law(uniform_mesh_size(1), StepLaw::h2));
  EXPECT_NEAR(study.rows[1].log.final_time(), 0.25, 1e-14);
  EXPECT_EQ(study.errors(NormFlavor::linf_l2).size(), 2u);
}

TEST(Study, DofCapTruncatesWithWarning) {
  RunSpec s;
  s.levels = {0, 3};
  s.law = StepLaw::h2;
  s.adaptive.T = 0.1;
  s.max_dofs = 100;
  const UniformStudy study = uniform_study(s);
  EXPECT_LT(study.rows.size(), 4u);
  EXPECT_FALSE(study.warnings.empty());
}
