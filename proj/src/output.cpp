#include "sbvp/output.hpp"

#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "sbvp/errors.hpp"

namespace sbvp {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.16e}", v);
}

CsvWriter::CsvWriter(std::ostream& out, std::initializer_list<std::string> header) : out_(out) {
  bool first = true;
  for (const auto& h : header) {
    out_ << (first ? "" : ",") << h;
    first = false;
  }
  out_ << '\n';
}

nlohmann::json finite_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

nlohmann::json to_json(const ProblemConfig& problem) {
  nlohmann::json j;
  j["p"] = problem.p;
  j["boundary"] = std::string(to_string(problem.boundary));
  j["B"] = problem.B;
  j["f"] = problem.f;
  j["delta"] = problem.delta;
  j["beta_star"] = problem.beta_star ? finite_or_null(*problem.beta_star) : nlohmann::json(nullptr);
  j["beta"] = problem.beta ? finite_or_null(*problem.beta) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json to_json(const RunSettings& run) {
  return {{"n", run.n},         {"eps", run.eps},   {"ladder", run.ladder},
          {"paths", run.paths}, {"seed", run.seed}, {"tol", run.tol},
          {"max_iter", run.max_iter}};
}

nlohmann::json to_json(const GreenCertificate& cert) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : cert.checks) {
    checks.push_back({{"name", c.name},
                      {"passed", c.passed},
                      {"max_residual", finite_or_null(c.max_residual)},
                      {"tolerance", c.tolerance}});
  }
  return {{"all_passed", cert.all_passed()}, {"checks", checks}};
}

nlohmann::json summary_json(const ConvergenceTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& s : table.summaries) {
    rows.push_back({{"eps", s.eps},
                    {"contraction_bound", finite_or_null(s.contraction_bound)},
                    {"succeeded", s.succeeded},
                    {"failed", s.failed},
                    {"median", finite_or_null(s.median)},
                    {"p90", finite_or_null(s.p90)}});
  }
  return {{"mode", std::string(to_string(table.mode))},
          {"boundary", std::string(to_string(table.boundary))},
          {"n", table.n},
          {"base_seed", table.base_seed},
          {"eps0", table.eps0 ? nlohmann::json(*table.eps0) : nlohmann::json(nullptr)},
          {"median_strictly_decreasing", table.median_strictly_decreasing()},
          {"ladder", rows}};
}

nlohmann::json diagnostics_json(const SolutionPath& sol) {
  return {{"iterations", sol.iterations},
          {"converged", sol.converged},
          {"final_residual", finite_or_null(sol.final_residual)},
          {"theta_est", finite_or_null(sol.theta_est)},
          {"contraction_bound", finite_or_null(sol.contraction_bound)}};
}

void write_table_csv(std::ostream& out, const ConvergenceTable& table) {
  CsvWriter csv(out, {"eps", "seed", "sup_err"});
  for (const auto& c : table.cells) csv.row(c.eps, c.seed, c.sup_err);
}

void write_solution_csv(std::ostream& out, const SolutionPath& sol) {
  CsvWriter csv(out, {"t", "x", "xdot"});
  const double nan = std::nan("");
  for (std::size_t i = 0; i < sol.x.size(); ++i) {
    csv.row(sol.grid.point(i), sol.x[i], sol.xdot.empty() ? nan : sol.xdot[i]);
  }
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("io_error", fmt::format("cannot write '{}'", path.string()));
  out << content;
  if (!out) throw Error("io_error", fmt::format("write to '{}' failed", path.string()));
}

}  // namespace sbvp
