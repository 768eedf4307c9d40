#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "biharm/study.hpp"

namespace biharm::report {

/// n, t_n, lambda_n, the seven step estimators, E_n, the three accumulated
/// estimators in the run's norm, both errors, IEI, dofs, rejected, wall_time.
const std::vector<std::string>& run_log_columns();
const std::vector<std::string>& uniform_study_columns();

/// Columns whose values depend on wall-clock timing.
bool is_timing_column(const std::string& name);

void write_run_log_csv(std::ostream& out, const RunLog& log);
void write_uniform_study_csv(std::ostream& out, const UniformStudy& study);

/// Keys: example, r, mode, final_errors, accumulators, total_dofs,
/// rejected_steps.
nlohmann::json summary_json(const RunSpec& spec, const RunLog& log);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column_index(const std::string& name) const;
  /// NaN for empty cells.
  std::vector<double> column(const std::string& name) const;
};

CsvTable read_csv(std::istream& in);

/// Writes uniform.csv, level_<i>.csv and summary.json into `dir`.
void emit(const UniformStudy& study, const std::filesystem::path& dir);
/// Writes run.csv, summary.json, mesh.txt, solution.txt and, when a paired
/// uniform run exists, paired_uniform.csv and paired_summary.json.
void emit(const AdaptiveStudy& study, const std::filesystem::path& dir);

}  // namespace biharm::report
