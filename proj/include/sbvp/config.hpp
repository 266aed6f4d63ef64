#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sbvp/model.hpp"

namespace sbvp {

/// Problem section of a scenario file. Functions are registry expressions
/// (see registry.hpp); bounds default to the exact bounds of the built-ins.
///
///   [problem]
///   p = 1.0
///   boundary = "second"          # first | second | periodic
///   B = "sin_x(0.5)"
///   f = "constant(1)"
///   delta = "constant(0.5)"
///   beta_star = 0.5              # optional
///   beta = 0.5                   # optional
struct ProblemConfig {
  double p = 1.0;
  BoundaryKind boundary = BoundaryKind::FirstKind;
  std::string B = "zero";
  std::string f = "zero";
  std::string delta = "zero";
  std::optional<double> beta_star;
  std::optional<double> beta;
};

/// Optional [run] section; every field can be overridden on the command line.
struct RunSettings {
  std::size_t n = 1024;
  double eps = 0.01;
  std::vector<double> ladder{1e-1, 1e-2, 1e-3};
  std::size_t paths = 200;
  std::uint64_t seed = 1;
  double tol = 1e-10;
  int max_iter = 200;
};

struct RunConfig {
  std::string source;  ///< file the config came from, empty for inline text
  ProblemConfig problem;
  RunSettings run;
};

/// Reads TOML, or the JSON sidecar the CLI writes next to its outputs when
/// the extension is .json. Throws ConfigError("config_not_found") or
/// ConfigError("config_parse_error").
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(std::string_view text, std::string_view source = "<inline>");

/// Resolves the registry expressions and default bounds. Does not validate.
ProblemSpec build_spec(const ProblemConfig& problem);

}  // namespace sbvp
