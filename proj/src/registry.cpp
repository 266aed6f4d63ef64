#include "sbvp/registry.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "sbvp/errors.hpp"

namespace sbvp {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void bad(std::string_view expr, std::string_view why) {
  throw ConfigError("config_parse_error", fmt::format("bad function '{}': {}", expr, why));
}

void expect_args(const BuiltinCall& call, std::string_view expr, std::size_t lo, std::size_t hi) {
  if (call.args.size() < lo || call.args.size() > hi) {
    bad(expr, fmt::format("{} takes {}..{} arguments, got {}", call.name, lo, hi,
                          call.args.size()));
  }
}

double horner(const std::vector<double>& c, double x) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

std::vector<double> derivative_coefficients(const std::vector<double>& c) {
  std::vector<double> d;
  for (std::size_t k = 1; k < c.size(); ++k) d.push_back(static_cast<double>(k) * c[k]);
  return d;
}

/// Effective degree ignoring trailing zero coefficients; -1 for the zero polynomial.
int degree(const std::vector<double>& c) {
  for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k) {
    if (c[static_cast<std::size_t>(k)] != 0.0) return k;
  }
  return -1;
}

}  // namespace

BuiltinCall parse_builtin(std::string_view expr) {
  const auto s = trim(expr);
  if (s.empty()) bad(expr, "empty expression");
  BuiltinCall call;
  const auto open = s.find('(');
  if (open == std::string_view::npos) {
    call.name = std::string(s);
  } else {
    if (s.back() != ')') bad(expr, "missing ')'");
    call.name = std::string(trim(s.substr(0, open)));
    auto body = trim(s.substr(open + 1, s.size() - open - 2));
    while (!body.empty()) {
      const auto comma = body.find(',');
      const auto tok = trim(body.substr(0, comma));
      double v = 0.0;
      const auto* first = tok.data();
      const auto* last = tok.data() + tok.size();
      if (!tok.empty() && *first == '+') ++first;
      const auto [ptr, ec] = std::from_chars(first, last, v);
      if (tok.empty() || ec != std::errc() || ptr != last) {
        bad(expr, fmt::format("'{}' is not a number", tok));
      }
      call.args.push_back(v);
      if (comma == std::string_view::npos) break;
      body = trim(body.substr(comma + 1));
      if (body.empty()) bad(expr, "trailing ','");
    }
  }
  for (char c : call.name) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) bad(expr, "bad name");
  }
  return call;
}

DriftBuiltin make_drift(std::string_view expr) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const auto call = parse_builtin(expr);
  DriftBuiltin out;
  out.expr = std::string(trim(expr));
  if (call.name == "zero") {
    expect_args(call, expr, 0, 0);
    out.fn = [](double, double) { return 0.0; };
    out.dx = [](double, double) { return 0.0; };
  } else if (call.name == "constant") {
    expect_args(call, expr, 1, 1);
    const double c = call.args[0];
    out.fn = [c](double, double) { return c; };
    out.dx = [](double, double) { return 0.0; };
    out.sup_abs = std::abs(c);
  } else if (call.name == "sin_txo") {
    expect_args(call, expr, 2, 2);
    const double b = call.args[0];
    const double w = call.args[1];
    out.fn = [b, w](double t, double x) { return b * std::sin(w * t * x); };
    out.dx = [b, w](double t, double x) { return b * w * t * std::cos(w * t * x); };
    out.sup_abs = std::abs(b);
    out.sup_abs_dx = std::abs(b * w);
  } else if (call.name == "sin_x") {
    expect_args(call, expr, 1, 2);
    const double a = call.args[0];
    const double w = call.args.size() > 1 ? call.args[1] : 1.0;
    out.fn = [a, w](double, double x) { return a * std::sin(w * x); };
    out.dx = [a, w](double, double x) { return a * w * std::cos(w * x); };
    out.sup_abs = std::abs(a);
    out.sup_abs_dx = std::abs(a * w);
  } else if (call.name == "poly") {
    expect_args(call, expr, 1, 16);
    const auto c = call.args;
    const auto d = derivative_coefficients(c);
    out.fn = [c](double, double x) { return horner(c, x); };
    out.dx = [d](double, double x) { return horner(d, x); };
    const int deg = degree(c);
    out.sup_abs = deg <= 0 ? std::abs(c[0]) : inf;
    out.sup_abs_dx = deg <= 0 ? 0.0 : (deg == 1 ? std::abs(c[1]) : inf);
  } else {
    bad(expr, "unknown drift built-in (zero|constant|sin_txo|sin_x|poly)");
  }
  return out;
}

TimeBuiltin make_time_function(std::string_view expr) {
  const auto call = parse_builtin(expr);
  TimeBuiltin out;
  out.expr = std::string(trim(expr));
  if (call.name == "zero") {
    expect_args(call, expr, 0, 0);
    out.fn = [](double) { return 0.0; };
  } else if (call.name == "constant") {
    expect_args(call, expr, 1, 1);
    const double c = call.args[0];
    out.fn = [c](double) { return c; };
  } else if (call.name == "poly") {
    expect_args(call, expr, 1, 16);
    const auto c = call.args;
    out.fn = [c](double t) { return horner(c, t); };
  } else {
    bad(expr, "unknown time built-in (zero|constant|poly)");
  }
  return out;
}

}  // namespace sbvp
