#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "sbvp/model.hpp"

namespace sbvp {

/// Parsed built-in call such as `sin_txo(0.5, 2)`.
struct BuiltinCall {
  std::string name;
  std::vector<double> args;
};

BuiltinCall parse_builtin(std::string_view expr);

/// Drift built-ins B(t, x), each with its analytic x-derivative and exact
/// uniform bounds (infinite when unbounded):
///
///   zero
///   constant(c)            c
///   sin_txo(b, w)          b sin(w t x)
///   sin_x(a [, w])         a sin(w x)
///   poly(c0, c1, ...)      sum_k c_k x^k
struct DriftBuiltin {
  std::string expr;
  DriftFunction fn;
  DriftFunction dx;
  double sup_abs = 0.0;
  double sup_abs_dx = 0.0;
};

/// Time built-ins f(t), delta(t):
///
///   zero
///   constant(c)
///   poly(c0, c1, ...)      sum_k c_k t^k
struct TimeBuiltin {
  std::string expr;
  TimeFunction fn;
};

DriftBuiltin make_drift(std::string_view expr);
TimeBuiltin make_time_function(std::string_view expr);

}  // namespace sbvp
