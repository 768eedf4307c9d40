#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "report.hpp"

using namespace biharm;

namespace {

UniformStudy small_study() {
  RunSpec s;
  s.levels = {0, 2};
  s.law = StepLaw::h2;
  s.adaptive.T = 0.125;
  return uniform_study(s);
}

}  // namespace

TEST(Report, UniformCsvRoundTripsEoc) {
  const UniformStudy study = small_study();
  std::stringstream ss;
  report::write_uniform_study_csv(ss, study);
  const report::CsvTable t = report::read_csv(ss);
  EXPECT_EQ(t.header, report::uniform_study_columns());
  ASSERT_EQ(t.rows.size(), study.rows.size());
  const auto h = t.column("h");
  const auto err = t.column("err_LinfL2");
  const auto e = t.column("EOC_err_LinfL2");
  EXPECT_TRUE(std::isnan(e[0]));
  for (std::size_t i = 1; i < e.size(); ++i)
    EXPECT_NEAR(e[i], std::log(err[i] / err[i - 1]) / std::log(h[i] / h[i - 1]), 1e-12);
}

TEST(Report, RunLogCsvHasOneRowPerStep) {
  const UniformStudy study = small_study();
  std::stringstream ss;
  report::write_run_log_csv(ss, study.rows.back().log);
  const report::CsvTable t = report::read_csv(ss);
  EXPECT_EQ(t.header, report::run_log_columns());
  EXPECT_EQ(t.rows.size(), study.rows.back().log.steps.size());
  EXPECT_NEAR(t.column("t_n").back(), 0.125, 1e-15);
}

TEST(Report, SummaryJsonKeys) {
  const UniformStudy study = small_study();
  const auto j = report::summary_json(study.spec, study.rows.back().log);
  for (const char* k : {"example", "r", "mode", "final_errors", "accumulators", "total_dofs", "rejected_steps"})
    EXPECT_TRUE(j.contains(k)) << k;
  EXPECT_TRUE(j["final_errors"].contains("linf_l2"));
  EXPECT_TRUE(j["accumulators"].contains("E_time_inf"));
  EXPECT_EQ(j["mode"], "uniform");
}

TEST(Report, OutputIsDeterministicApartFromTiming) {
  const UniformStudy a = small_study();
  const UniformStudy b = small_study();
  std::stringstream sa, sb;
  report::write_uniform_study_csv(sa, a);
  report::write_uniform_study_csv(sb, b);
  const auto ta = report::read_csv(sa);
  const auto tb = report::read_csv(sb);
  for (const auto& col : ta.header) {
    if (report::is_timing_column(col)) continue;
    const auto ca = ta.column(col);
    const auto cb = tb.column(col);
    for (std::size_t i = 0; i < ca.size(); ++i)
      if (!std::isnan(ca[i])) EXPECT_EQ(ca[i], cb[i]) << col;
  }
}

TEST(Report, EmitWritesFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "biharm_report_test";
  std::filesystem::remove_all(dir);
  report::emit(small_study(), dir);
  for (const char* f : {"uniform.csv", "level_0.csv", "level_2.csv", "summary.json"})
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  std::filesystem::remove_all(dir);
}
