#include "sbvp/cli.hpp"

#include <cmath>
#include <filesystem>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "sbvp/config.hpp"
#include "sbvp/errors.hpp"
#include "sbvp/experiments.hpp"
#include "sbvp/greens.hpp"
#include "sbvp/output.hpp"
#include "sbvp/parallel.hpp"
#include "sbvp/simd/kernels.hpp"
#include "sbvp/solver.hpp"
#include "sbvp/stochastic.hpp"

namespace sbvp::cli {
namespace {

using nlohmann::json;

struct Common {
  std::optional<std::size_t> threads;
  std::string simd = "auto";
};

// Settings a command may take from the config file and override by flag.
struct Overrides {
  CLI::Option* n = nullptr;
  CLI::Option* eps = nullptr;
  CLI::Option* ladder = nullptr;
  CLI::Option* paths = nullptr;
  CLI::Option* seed = nullptr;
  CLI::Option* tol = nullptr;
  CLI::Option* max_iter = nullptr;
  RunSettings values;
};

void apply(const Overrides& o, RunSettings& run) {
  if (o.n && o.n->count()) run.n = o.values.n;
  if (o.eps && o.eps->count()) run.eps = o.values.eps;
  if (o.ladder && o.ladder->count()) run.ladder = o.values.ladder;
  if (o.paths && o.paths->count()) run.paths = o.values.paths;
  if (o.seed && o.seed->count()) run.seed = o.values.seed;
  if (o.tol && o.tol->count()) run.tol = o.values.tol;
  if (o.max_iter && o.max_iter->count()) run.max_iter = o.values.max_iter;
}

BoundaryKind kind_arg(const std::string& s) {
  try {
    return parse_boundary_kind(s);
  } catch (const Error&) {
    throw ConfigError("usage_error", fmt::format("--kind must be first, second or periodic, got '{}'", s));
  }
}

NeumannVariant variant_arg(const std::string& s) {
  if (s == "corrected") return NeumannVariant::Corrected;
  if (s == "as_printed") return NeumannVariant::AsPrinted;
  throw ConfigError("usage_error", fmt::format("--variant must be corrected or as_printed, got '{}'", s));
}

void apply_common(const Common& c) {
  if (c.threads) {
    if (*c.threads == 0) throw ConfigError("usage_error", "--threads must be positive");
    set_thread_count(*c.threads);
  }
  if (c.simd == "auto") return;
  for (auto b : {simd::Backend::Scalar, simd::Backend::Avx2, simd::Backend::Neon}) {
    if (c.simd == simd::to_string(b)) {
      simd::set_backend(b);
      return;
    }
  }
  throw ConfigError("usage_error", fmt::format("--simd must be auto, scalar, avx2 or neon, got '{}'", c.simd));
}

json environment_json() {
  return {{"simd", std::string(simd::to_string(simd::active_backend()))}, {"threads", thread_count()}};
}

json problem_json(const ProblemConfig& problem, const ProblemSpec& spec) {
  ProblemConfig resolved = problem;
  resolved.beta_star = spec.beta_star;
  resolved.beta = spec.beta;
  return to_json(resolved);
}

// Writes the data file and the `<out>.config.json` sidecar, or streams the
// data to `out` when no path was given.
void emit(const std::string& path, const std::string& data, const json& sidecar, std::ostream& out) {
  if (path.empty()) {
    out << data;
    return;
  }
  write_file(path, data);
  write_file(path + ".config.json", sidecar.dump(2) + "\n");
}

RunConfig load(const std::string& path) {
  if (path.empty()) throw ConfigError("usage_error", "--config is required");
  return load_config(path);
}

void check_run(const RunSettings& run) {
  if (run.n < 2) throw ConfigError("usage_error", "--n must be at least 2");
  if (!(run.tol > 0.0)) throw ConfigError("usage_error", "--tol must be positive");
  if (run.max_iter < 1) throw ConfigError("usage_error", "--max-iter must be at least 1");
}

SolveOptions solve_options(const RunSettings& run) {
  SolveOptions opt;
  opt.tol = run.tol;
  opt.max_iter = run.max_iter;
  return opt;
}

std::string greens_csv(const GreenKernel& g, const Grid& grid) {
  std::ostringstream s;
  CsvWriter csv(s, {"t", "s", "G", "G_t_below", "G_t_above"});
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid.point(i);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double u = grid.point(j);
      csv.row(t, u, g.value(t, u), g.dt(t, u, Side::FromBelow), g.dt(t, u, Side::FromAbove));
    }
  }
  return s.str();
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Green-kernel fixed-point solver for stochastic boundary value problems", "stoch-bvp"};
  app.fallthrough();
  app.require_subcommand(1);
  Common common;
  app.add_option("--threads", common.threads, "Worker threads (default: $STOCH_BVP_THREADS or all cores)");
  app.add_option("--simd", common.simd, "Kernel backend: auto, scalar, avx2, neon");

  int status = kOk;

  // greens
  auto* greens = app.add_subcommand("greens", "Tabulate a Green kernel on a grid");
  std::string g_kind = "first";
  std::string g_variant = "corrected";
  double g_eps = 0.5;
  double g_p = 1.0;
  std::size_t g_grid = 128;
  std::string g_out;
  bool g_certify = false;
  greens->add_option("--kind", g_kind, "first | second | periodic")->capture_default_str();
  greens->add_option("--eps", g_eps)->capture_default_str();
  greens->add_option("--p", g_p)->capture_default_str();
  greens->add_option("--grid", g_grid, "Grid intervals")->capture_default_str();
  greens->add_option("--variant", g_variant, "Second-kind form: corrected | as_printed")->capture_default_str();
  greens->add_option("--out", g_out, "CSV path (t, s, G, G_t_below, G_t_above)");
  greens->add_flag("--certify", g_certify, "Also certify the kernel");
  greens->callback([&] {
    apply_common(common);
    const GreenKernel g(kind_arg(g_kind), g_eps, g_p, variant_arg(g_variant));
    const Grid grid(g_grid);
    json info = {{"command", "greens"},
                 {"kind", g_kind},
                 {"variant", g_variant},
                 {"eps", g_eps},
                 {"p", g_p},
                 {"grid", g_grid}};
    if (g_certify) {
      const auto cert = certify_green(g, grid);
      info["certificate"] = to_json(cert);
      if (!cert.all_passed()) status = kCertification;
    }
    json sidecar = info;
    sidecar.erase("certificate");
    sidecar["environment"] = environment_json();
    emit(g_out, greens_csv(g, grid), sidecar, out);
    (g_out.empty() ? err : out) << info.dump() << "\n";
  });

  // certify
  auto* certify = app.add_subcommand("certify", "Certify the defining properties of a Green kernel");
  std::string c_kind = "first";
  std::string c_variant = "corrected";
  std::vector<double> c_eps{0.5};
  std::vector<double> c_p{1.0};
  std::size_t c_grid = 128;
  certify->add_option("--kind", c_kind, "first | second | periodic | all")->capture_default_str();
  certify->add_option("--eps", c_eps, "One or more eps values")->delimiter(',');
  certify->add_option("--p", c_p, "One or more p values")->delimiter(',');
  certify->add_option("--grid", c_grid, "Grid intervals")->capture_default_str();
  certify->add_option("--variant", c_variant, "Second-kind form: corrected | as_printed")->capture_default_str();
  certify->callback([&] {
    apply_common(common);
    std::vector<BoundaryKind> kinds;
    if (c_kind == "all") {
      kinds = {BoundaryKind::FirstKind, BoundaryKind::SecondKind, BoundaryKind::Periodic};
    } else {
      kinds = {kind_arg(c_kind)};
    }
    const auto variant = variant_arg(c_variant);
    const Grid grid(c_grid);
    json reports = json::array();
    bool all = true;
    for (auto kind : kinds) {
      for (double p : c_p) {
        for (double eps : c_eps) {
          const auto cert = certify_green(kind, eps, p, grid, variant);
          all = all && cert.all_passed();
          json r = to_json(cert);
          r["kind"] = std::string(to_string(kind));
          r["eps"] = eps;
          r["p"] = p;
          reports.push_back(r);
        }
      }
    }
    out << json{{"command", "certify"}, {"grid", c_grid}, {"variant", c_variant},
                {"all_passed", all}, {"reports", reports}}
               .dump(2)
        << "\n";
    if (!all) {
      err << json{{"error", {{"code", "certification_failed"},
                             {"message", "at least one kernel property check failed"},
                             {"exit_code", kCertification}}}}
                 .dump()
          << "\n";
      status = kCertification;
    }
  });

  // paths
  auto* paths = app.add_subcommand("paths", "Sample Brownian paths");
  std::size_t p_n = 1024;
  std::uint64_t p_seed = 1;
  std::size_t p_count = 1;
  std::string p_out;
  paths->add_option("--n", p_n, "Grid intervals")->capture_default_str();
  paths->add_option("--seed", p_seed, "Seed of the first path; path m uses seed + m")->capture_default_str();
  paths->add_option("--count", p_count, "Number of paths")->capture_default_str();
  paths->add_option("--out", p_out, "CSV path (seed, t, W)");
  paths->callback([&] {
    apply_common(common);
    std::ostringstream s;
    CsvWriter csv(s, {"seed", "t", "W"});
    for (const auto& path : coupled_paths(p_n, p_count, p_seed)) {
      const auto w = path.values();
      for (std::size_t k = 0; k < w.size(); ++k) csv.row(path.seed(), path.grid().point(k), w[k]);
    }
    json sidecar = {{"command", "paths"}, {"n", p_n}, {"seed", p_seed}, {"count", p_count},
                    {"environment", environment_json()}};
    emit(p_out, s.str(), sidecar, out);
  });

  // Commands that read a problem config.
  auto add_config_options = [](CLI::App* cmd, std::string& config, std::string& outp, Overrides& o) {
    cmd->add_option("--config", config, "Scenario file (TOML, or a .config.json sidecar)");
    cmd->add_option("--out", outp, "Output CSV path");
    o.n = cmd->add_option("--n", o.values.n, "Grid intervals");
    o.seed = cmd->add_option("--seed", o.values.seed, "Path seed (base seed for converge)");
    o.tol = cmd->add_option("--tol", o.values.tol, "Picard tolerance");
    o.max_iter = cmd->add_option("--max-iter", o.values.max_iter, "Picard iteration cap");
  };

  // solve
  auto* solve = app.add_subcommand("solve", "Solve one path by Picard iteration");
  std::string s_config;
  std::string s_out;
  Overrides s_over;
  add_config_options(solve, s_config, s_out, s_over);
  s_over.eps = solve->add_option("--eps", s_over.values.eps, "Small parameter");
  solve->callback([&] {
    apply_common(common);
    RunConfig cfg = load(s_config);
    apply(s_over, cfg.run);
    check_run(cfg.run);
    const ProblemSpec spec = build_spec(cfg.problem);
    require_valid(spec);
    const auto path = sample_path(cfg.run.n, cfg.run.seed);
    const KernelOperator op(spec.boundary, cfg.run.eps, spec.p, path.grid());
    const auto sol = picard_solve(op, spec, path, solve_options(cfg.run));
    const auto check = verify_sde(spec, cfg.run.eps, path, sol);

    std::ostringstream s;
    write_solution_csv(s, sol);
    json sidecar = {{"command", "solve"}, {"config_source", cfg.source},
                    {"problem", problem_json(cfg.problem, spec)}, {"run", to_json(cfg.run)},
                    {"environment", environment_json()}};
    emit(s_out, s.str(), sidecar, out);
    json diag = diagnostics_json(sol);
    diag["sde_residual"] = finite_or_null(check.max_residual);
    diag["boundary_residual"] = {finite_or_null(check.boundary_first), finite_or_null(check.boundary_second)};
    diag["seed"] = cfg.run.seed;
    diag["eps"] = cfg.run.eps;
    err << diag.dump() << "\n";
  });

  // limits
  auto* limits = app.add_subcommand("limits", "Limit objects kappa, eta, zeta for one path");
  std::string l_config;
  std::string l_out;
  Overrides l_over;
  add_config_options(limits, l_config, l_out, l_over);
  limits->callback([&] {
    apply_common(common);
    RunConfig cfg = load(l_config);
    apply(l_over, cfg.run);
    check_run(cfg.run);
    const ProblemSpec spec = build_spec(cfg.problem);
    require_valid(spec);
    const auto path = sample_path(cfg.run.n, cfg.run.seed);
    const auto k = kappa(spec, path);
    const auto e = eta(spec, path);
    const double z = invert_B0(spec, e.value);

    std::ostringstream s;
    CsvWriter csv(s, {"t", "kappa"});
    double kappa_sup = 0.0;
    for (std::size_t i = 0; i < k.values.size(); ++i) {
      csv.row(k.grid.point(i), k.values[i]);
      kappa_sup = std::max(kappa_sup, std::abs(k.values[i]));
    }
    json sidecar = {{"command", "limits"}, {"config_source", cfg.source},
                    {"problem", problem_json(cfg.problem, spec)}, {"run", to_json(cfg.run)},
                    {"environment", environment_json()}};
    if (!l_out.empty()) emit(l_out, s.str(), sidecar, out);
    out << json{{"seed", cfg.run.seed},
                {"n", cfg.run.n},
                {"eta", {{"value", e.value}, {"deterministic", e.deterministic}, {"stochastic", e.stochastic}}},
                {"zeta", z},
                {"kappa", {{"sup_abs", kappa_sup}, {"at_half", k.values[k.grid.nearest(0.5)]}}}}
               .dump(2)
        << "\n";
  });

  // converge
  auto* converge_cmd = app.add_subcommand("converge", "Convergence table along an eps ladder");
  std::string v_config;
  std::string v_out;
  Overrides v_over;
  add_config_options(converge_cmd, v_config, v_out, v_over);
  v_over.ladder = converge_cmd->add_option("--ladder", v_over.values.ladder, "Decreasing eps values")->delimiter(',');
  v_over.paths = converge_cmd->add_option("--paths", v_over.values.paths, "Number of coupled paths");
  converge_cmd->callback([&] {
    apply_common(common);
    RunConfig cfg = load(v_config);
    apply(v_over, cfg.run);
    check_run(cfg.run);
    if (cfg.run.paths == 0) throw ConfigError("usage_error", "--paths must be positive");
    const ProblemSpec spec = build_spec(cfg.problem);
    require_valid(spec);
    const auto paths_v = coupled_paths(cfg.run.n, cfg.run.paths, cfg.run.seed);
    const auto opt = solve_options(cfg.run);
    const auto table = spec.boundary == BoundaryKind::FirstKind
                           ? converge_first_kind(spec, cfg.run.ladder, paths_v, opt)
                           : converge_constant(spec, cfg.run.ladder, paths_v, opt);
    std::ostringstream s;
    write_table_csv(s, table);
    json sidecar = {{"command", "converge"}, {"config_source", cfg.source},
                    {"problem", problem_json(cfg.problem, spec)}, {"run", to_json(cfg.run)},
                    {"environment", environment_json()}};
    emit(v_out, s.str(), sidecar, out);
    (v_out.empty() ? err : out) << summary_json(table).dump(2) << "\n";
  });

  std::vector<const char*> argv{"stoch-bvp"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    throw ConfigError("usage_error", e.what());
  }
  return status;
}

}  // namespace

int exit_code_for(std::string_view code) noexcept {
  if (code == "config_not_found" || code == "config_parse_error" || code == "usage_error") {
    return kConfig;
  }
  if (code == "invalid_p" || code == "condition_c1_violated" || code == "condition_c2_violated" ||
      code == "derivative_mismatch") {
    return kSpec;
  }
  if (code == "no_contraction") return kNoContraction;
  if (code == "max_iter_exceeded") return kMaxIter;
  if (code == "domain_error" || code == "bracket_failure") return kDomain;
  if (code == "certification_failed") return kCertification;
  return kInternal;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  auto fail = [&](const std::string& code, const std::string& message) {
    const int exit_code = exit_code_for(code);
    err << json{{"error", {{"code", code}, {"message", message}, {"exit_code", exit_code}}}}.dump()
        << "\n";
    return exit_code;
  };
  try {
    return dispatch(args, out, err);
  } catch (const Error& e) {
    return fail(e.code(), e.what());
  } catch (const std::exception& e) {
    return fail("internal_error", e.what());
  }
}

}  // namespace sbvp::cli
