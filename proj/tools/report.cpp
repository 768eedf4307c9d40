#include "report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace biharm::report {

namespace {

std::string number(double v) {
  if (!std::isfinite(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string number(const std::optional<double>& v) { return v ? number(*v) : std::string(); }

void write_row(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
  out << '\n';
}

nlohmann::json json_number(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

std::ofstream open(const std::filesystem::path& p) {
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot open " + p.string() + " for writing");
  f.exceptions(std::ios::badbit | std::ios::failbit);
  return f;
}

void write_json(const std::filesystem::path& p, const nlohmann::json& j) {
  auto f = open(p);
  f << j.dump(2) << '\n';
}

}  // namespace

const std::vector<std::string>& run_log_columns() {
  static const std::vector<std::string> cols{
      "n",       "t_n",      "lambda_n",   "gamma_inf",  "gamma_2", "eta_inf", "eta_2",
      "beta_inf", "beta_2",  "eta_tilde_inf", "E_n",     "E_coarsen", "E_time", "E_space",
      "err_LinfL2", "err_L2L2", "IEI",    "dofs",       "rejected", "wall_time"};
  return cols;
}

const std::vector<std::string>& uniform_study_columns() {
  static const std::vector<std::string> cols{
      "level",        "h",           "lambda",       "steps",       "dofs",        "total_dofs",
      "err_LinfL2",   "err_L2L2",    "E_coarsen_inf", "E_time_inf", "E_space_inf", "E_coarsen_2",
      "E_time_2",     "E_space_2",   "IEI_inf",      "IEI_2",       "EOC_err_LinfL2", "EOC_err_L2L2",
      "EOC_est_inf",  "EOC_est_2",   "wall_time"};
  return cols;
}

bool is_timing_column(const std::string& name) { return name == "wall_time"; }

void write_run_log_csv(std::ostream& out, const RunLog& log) {
  write_row(out, run_log_columns());
  const NormFlavor nf = log.norm;
  for (const auto& r : log.steps) {
    const auto& e = r.est;
    write_row(out, {std::to_string(r.n), number(r.t), number(r.lambda), number(e.gamma_inf), number(e.gamma_2),
                    number(e.eta_inf), number(e.eta_2), number(e.beta_inf), number(e.beta_2),
                    number(e.eta_tilde_inf), number(e.elliptic), number(r.acc.coarsen(nf)), number(r.acc.time(nf)),
                    number(r.acc.space(nf)), number(r.err_linf), number(r.err_l2),
                    number(iei(r.error(nf), r.acc.time(nf), r.acc.space(nf))), std::to_string(r.dofs),
                    std::to_string(r.rejected), number(r.wall_time)});
  }
}

void write_uniform_study_csv(std::ostream& out, const UniformStudy& study) {
  write_row(out, uniform_study_columns());
  constexpr NormFlavor I = NormFlavor::linf_l2;
  constexpr NormFlavor L = NormFlavor::l2_l2;
  for (std::size_t i = 0; i < study.rows.size(); ++i) {
    const auto& row = study.rows[i];
    const auto& acc = row.log.final_accumulators();
    // EOC of row i is measured from the previous row.
    auto prev = [&](auto f) { return i == 0 ? std::optional<double>() : f(i - 1); };
    write_row(out, {std::to_string(row.level), number(row.h), number(row.lambda), std::to_string(row.log.steps.size()),
                    std::to_string(row.log.initial_dofs), std::to_string(row.log.total_dofs()), number(row.error(I)),
                    number(row.error(L)), number(acc.coarsen(I)), number(acc.time(I)), number(acc.space(I)),
                    number(acc.coarsen(L)), number(acc.time(L)), number(acc.space(L)), number(row.iei(I)),
                    number(row.iei(L)), number(prev([&](std::size_t k) { return study.error_eoc(I, k); })),
                    number(prev([&](std::size_t k) { return study.error_eoc(L, k); })),
                    number(prev([&](std::size_t k) { return study.estimator_eoc(I, k); })),
                    number(prev([&](std::size_t k) { return study.estimator_eoc(L, k); })),
                    number(row.log.wall_time)});
  }
}

nlohmann::json summary_json(const RunSpec& spec, const RunLog& log) {
  const auto& acc = log.final_accumulators();
  nlohmann::json j;
  j["example"] = spec.example;
  j["r"] = spec.degree;
  j["mode"] = to_string(spec.mode);
  j["final_errors"] = {{"linf_l2", json_number(log.final_error(NormFlavor::linf_l2))},
                       {"l2_l2", json_number(log.final_error(NormFlavor::l2_l2))}};
  j["accumulators"] = {{"E_coarsen_inf", json_number(acc.coarsen(NormFlavor::linf_l2))},
                       {"E_time_inf", json_number(acc.time(NormFlavor::linf_l2))},
                       {"E_space_inf", json_number(acc.space(NormFlavor::linf_l2))},
                       {"E_coarsen_2", json_number(acc.coarsen(NormFlavor::l2_l2))},
                       {"E_time_2", json_number(acc.time(NormFlavor::l2_l2))},
                       {"E_space_2", json_number(acc.space(NormFlavor::l2_l2))},
                       {"e0", json_number(acc.e0)}};
  j["total_dofs"] = log.total_dofs();
  j["rejected_steps"] = log.rejected_steps;
  return j;
}

std::size_t CsvTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw std::out_of_range("no CSV column " + name);
}

std::vector<double> CsvTable::column(const std::string& name) const {
  const std::size_t c = column_index(name);
  std::vector<double> v;
  v.reserve(rows.size());
  for (const auto& row : rows) {
    const std::string& cell = c < row.size() ? row[c] : std::string();
    v.push_back(cell.empty() ? std::nan("") : std::stod(cell));
  }
  return v;
}

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (first) {
      t.header = std::move(cells);
      first = false;
    } else if (!line.empty()) {
      t.rows.push_back(std::move(cells));
    }
  }
  return t;
}

void emit(const UniformStudy& study, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    auto f = open(dir / "uniform.csv");
    write_uniform_study_csv(f, study);
  }
  for (const auto& row : study.rows) {
    auto f = open(dir / ("level_" + std::to_string(row.level) + ".csv"));
    write_run_log_csv(f, row.log);
  }
  RunLog empty;
  write_json(dir / "summary.json", summary_json(study.spec, study.rows.empty() ? empty : study.rows.back().log));
}

void emit(const AdaptiveStudy& study, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    auto f = open(dir / "run.csv");
    write_run_log_csv(f, study.log);
  }
  write_json(dir / "summary.json", summary_json(study.spec, study.log));
  if (study.log.final_solution.space_ptr()) {
    auto m = open(dir / "mesh.txt");
    study.log.final_solution.space().mesh().dump(m);
    auto s = open(dir / "solution.txt");
    study.log.final_solution.dump(s);
  }
  if (study.paired) {
    auto f = open(dir / "paired_uniform.csv");
    write_run_log_csv(f, study.paired->log);
    RunSpec uniform = study.spec;
    uniform.mode = RunMode::uniform;
    nlohmann::json j = summary_json(uniform, study.paired->log);
    write_json(dir / "paired_summary.json", j);
  }
}

}  // namespace biharm::report
