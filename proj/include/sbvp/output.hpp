#pragma once

#include <filesystem>
#include <initializer_list>
#include <ostream>
#include <string>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "sbvp/config.hpp"
#include "sbvp/experiments.hpp"
#include "sbvp/greens.hpp"
#include "sbvp/solver.hpp"

namespace sbvp {

/// 17 significant digits in scientific notation; round-trips every double.
/// Non-finite values print as nan, inf, -inf.
std::string format_double(double v);

/// Comma-separated rows with LF line endings.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::initializer_list<std::string> header);

  template <class... Cells>
  void row(const Cells&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
    out_ << '\n';
  }

 private:
  static std::string cell(double v) { return format_double(v); }
  static std::string cell(const std::string& v) { return v; }
  static std::string cell(const char* v) { return v; }
  template <class I>
    requires std::is_integral_v<I>
  static std::string cell(I v) {
    return std::to_string(v);
  }

  std::ostream& out_;
};

/// NaN and infinities become null.
nlohmann::json finite_or_null(double v);

nlohmann::json to_json(const ProblemConfig& problem);
nlohmann::json to_json(const RunSettings& run);
nlohmann::json to_json(const GreenCertificate& cert);
nlohmann::json summary_json(const ConvergenceTable& table);
nlohmann::json diagnostics_json(const SolutionPath& sol);

void write_table_csv(std::ostream& out, const ConvergenceTable& table);
void write_solution_csv(std::ostream& out, const SolutionPath& sol);

/// Writes `content` to `path`, creating parent directories.
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace sbvp
