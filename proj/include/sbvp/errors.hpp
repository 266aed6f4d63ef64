#pragma once

#include <stdexcept>
#include <string>

namespace sbvp {

/// Base class for every error raised by the library. `code()` is a stable,
/// machine-readable identifier that the CLI forwards into its error JSON.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message);

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

/// Argument outside the mathematical domain of an operation (t, s outside
/// [0,1], eps <= 0, mismatched lengths, too-coarse grids).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& message) : Error("domain_error", message) {}
};

/// Structural conditions on the problem instance do not hold.
/// Codes: "invalid_p", "condition_c1_violated", "condition_c2_violated".
class SpecError : public Error {
 public:
  using Error::Error;
};

/// The a-priori contraction bound of the Picard map is above the accepted
/// threshold, i.e. eps is too large for the fixed-point argument.
class NoContraction : public Error {
 public:
  NoContraction(double bound, double threshold);

  double bound() const noexcept { return bound_; }

 private:
  double bound_;
};

class MaxIterExceeded : public Error {
 public:
  MaxIterExceeded(int iterations, double last_update);
};

/// Root bracket for the inverse of the averaged drift map does not contain a
/// sign change; only possible when the declared bound on |B| is wrong.
class BracketFailure : public Error {
 public:
  explicit BracketFailure(const std::string& message) : Error("bracket_failure", message) {}
};

/// Codes: "config_not_found", "config_parse_error", "usage_error".
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace sbvp
