#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace sbvp::cli {

/// Process exit codes, one per error class.
enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kConfig = 2,         ///< config_not_found, config_parse_error, usage_error
  kSpec = 3,           ///< invalid_p, condition_c1_violated, condition_c2_violated, derivative_mismatch
  kNoContraction = 4,  ///< no_contraction
  kMaxIter = 5,        ///< max_iter_exceeded
  kDomain = 6,         ///< domain_error, bracket_failure
  kCertification = 7,  ///< certification_failed
};

int exit_code_for(std::string_view error_code) noexcept;

/// Runs `stoch-bvp <args...>` (args exclude the program name). Data goes to
/// the --out file or `out`; diagnostics and error JSON go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sbvp::cli
