#include "sbvp/config.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include <json.hpp>
#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include "sbvp/errors.hpp"
#include "sbvp/registry.hpp"

namespace sbvp {
namespace {

[[noreturn]] void parse_error(std::string_view source, const std::string& what) {
  throw ConfigError("config_parse_error", fmt::format("{}: {}", source, what));
}

double number(const toml::node& node, std::string_view source, std::string_view key) {
  if (auto v = node.value<double>()) return *v;
  parse_error(source, fmt::format("'{}' must be a number", key));
}

template <class T>
T count(const toml::node& node, std::string_view source, std::string_view key) {
  const auto v = node.value<std::int64_t>();
  if (!v || *v < 0) parse_error(source, fmt::format("'{}' must be a non-negative integer", key));
  return static_cast<T>(*v);
}

std::string text(const toml::node& node, std::string_view source, std::string_view key) {
  if (auto v = node.value<std::string>()) return *v;
  parse_error(source, fmt::format("'{}' must be a string", key));
}

void read_problem(const toml::table& t, std::string_view source, ProblemConfig& out) {
  for (const auto& [k, node] : t) {
    const std::string_view key = k.str();
    if (key == "p") {
      out.p = number(node, source, key);
    } else if (key == "boundary") {
      out.boundary = parse_boundary_kind(text(node, source, key));
    } else if (key == "B") {
      out.B = text(node, source, key);
    } else if (key == "f") {
      out.f = text(node, source, key);
    } else if (key == "delta") {
      out.delta = text(node, source, key);
    } else if (key == "beta_star") {
      out.beta_star = number(node, source, key);
    } else if (key == "beta") {
      out.beta = number(node, source, key);
    } else {
      parse_error(source, fmt::format("unknown key 'problem.{}'", key));
    }
  }
}

void read_run(const toml::table& t, std::string_view source, RunSettings& out) {
  for (const auto& [k, node] : t) {
    const std::string_view key = k.str();
    if (key == "n") {
      out.n = count<std::size_t>(node, source, key);
    } else if (key == "eps") {
      out.eps = number(node, source, key);
    } else if (key == "ladder") {
      const auto* arr = node.as_array();
      if (!arr) parse_error(source, "'ladder' must be an array of numbers");
      out.ladder.clear();
      for (const auto& e : *arr) out.ladder.push_back(number(e, source, "ladder"));
    } else if (key == "paths") {
      out.paths = count<std::size_t>(node, source, key);
    } else if (key == "seed") {
      out.seed = count<std::uint64_t>(node, source, key);
    } else if (key == "tol") {
      out.tol = number(node, source, key);
    } else if (key == "max_iter") {
      out.max_iter = count<int>(node, source, key);
    } else {
      parse_error(source, fmt::format("unknown key 'run.{}'", key));
    }
  }
}

std::optional<double> optional_number(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<double>();
}

// Sidecar written next to every CLI output: {"problem": {...}, "run": {...}}.
RunConfig parse_config_json(const std::string& content, std::string_view source) {
  RunConfig cfg;
  cfg.source = std::string(source);
  try {
    const auto root = nlohmann::json::parse(content);
    const auto& p = root.at("problem");
    cfg.problem.p = p.at("p").get<double>();
    cfg.problem.boundary = parse_boundary_kind(p.at("boundary").get<std::string>());
    cfg.problem.B = p.at("B").get<std::string>();
    cfg.problem.f = p.at("f").get<std::string>();
    cfg.problem.delta = p.at("delta").get<std::string>();
    cfg.problem.beta_star = optional_number(p, "beta_star");
    cfg.problem.beta = optional_number(p, "beta");
    if (root.contains("run")) {
      const auto& r = root["run"];
      RunSettings& run = cfg.run;
      run.n = r.value("n", run.n);
      run.eps = r.value("eps", run.eps);
      run.ladder = r.value("ladder", run.ladder);
      run.paths = r.value("paths", run.paths);
      run.seed = r.value("seed", run.seed);
      run.tol = r.value("tol", run.tol);
      run.max_iter = r.value("max_iter", run.max_iter);
    }
  } catch (const nlohmann::json::exception& e) {
    parse_error(source, e.what());
  }
  return cfg;
}

}  // namespace

RunConfig parse_config(std::string_view content, std::string_view source) {
  toml::table root;
  try {
    root = toml::parse(content, source);
  } catch (const toml::parse_error& e) {
    parse_error(source, fmt::format("line {}: {}", e.source().begin.line, e.description()));
  }
  RunConfig cfg;
  cfg.source = std::string(source);
  for (const auto& [k, node] : root) {
    const std::string_view key = k.str();
    const auto* table = node.as_table();
    if (!table) parse_error(source, fmt::format("'{}' must be a table", key));
    if (key == "problem") {
      read_problem(*table, source, cfg.problem);
    } else if (key == "run") {
      read_run(*table, source, cfg.run);
    } else {
      parse_error(source, fmt::format("unknown section '{}'", key));
    }
  }
  if (!root.contains("problem")) parse_error(source, "missing [problem] section");
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("config_not_found", fmt::format("cannot open config '{}'", path.string()));
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  if (path.extension() == ".json") return parse_config_json(buf.str(), path.string());
  return parse_config(buf.str(), path.string());
}

ProblemSpec build_spec(const ProblemConfig& problem) {
  const auto B = make_drift(problem.B);
  ProblemSpec spec;
  spec.p = problem.p;
  spec.boundary = problem.boundary;
  spec.B = B.fn;
  spec.B_x = B.dx;
  spec.f = make_time_function(problem.f).fn;
  spec.delta = make_time_function(problem.delta).fn;
  spec.beta_star = problem.beta_star.value_or(B.sup_abs);
  spec.beta = problem.beta.value_or(B.sup_abs_dx);
  return spec;
}

}  // namespace sbvp
