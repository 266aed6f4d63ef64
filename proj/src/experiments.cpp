#include "sbvp/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "sbvp/errors.hpp"
#include "sbvp/parallel.hpp"
#include "sbvp/registry.hpp"

namespace sbvp {
namespace {

void check_ladder(std::span<const double> ladder) {
  if (ladder.empty()) throw DomainError("eps ladder is empty");
  for (std::size_t k = 0; k < ladder.size(); ++k) {
    if (!(ladder[k] > 0.0)) throw DomainError(fmt::format("ladder eps {} is not positive", ladder[k]));
    if (k > 0 && !(ladder[k] < ladder[k - 1])) {
      throw DomainError("eps ladder must be strictly decreasing");
    }
  }
}

void check_paths(std::span<const BrownianPath> paths) {
  if (paths.empty()) throw DomainError("need at least one path");
  for (const auto& p : paths) {
    if (!(p.grid() == paths.front().grid())) throw DomainError("paths live on different grids");
  }
}

double max_abs_diff(std::span<const double> a, std::span<const double> b, double scale_a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(scale_a * a[i] - b[i]));
  return m;
}

// Reference values per path: kappa(t) for the scaled mode, zeta broadcast
// over the grid for the constant mode.
using Reference = std::vector<std::vector<double>>;

ConvergenceTable run_table(const ProblemSpec& spec, std::span<const double> ladder,
                           std::span<const BrownianPath> paths, const SolveOptions& options,
                           ConvergenceMode mode, const Reference& ref) {
  ConvergenceTable table;
  table.mode = mode;
  table.boundary = spec.boundary;
  table.eps_ladder.assign(ladder.begin(), ladder.end());
  table.n = paths.front().grid().intervals();
  table.base_seed = paths.front().seed();

  SolveOptions opt = options;
  opt.compute_derivative = false;
  const Grid& grid = paths.front().grid();

  for (double eps : ladder) {
    const KernelOperator op(spec.boundary, eps, spec.p, grid, false);
    LadderSummary summary;
    summary.eps = eps;
    summary.contraction_bound = contraction_bound(op, spec);
    std::vector<ConvergenceCell> cells(paths.size());
    for (std::size_t m = 0; m < paths.size(); ++m) {
      cells[m].eps = eps;
      cells[m].seed = paths[m].seed();
    }
    try {
      const auto sols = picard_solve_batch(op, spec, paths, opt);
      const double scale = mode == ConvergenceMode::FirstKindScaled ? 1.0 / (eps * eps) : 1.0;
      for (std::size_t m = 0; m < paths.size(); ++m) {
        cells[m].iterations = sols[m].iterations;
        cells[m].theta_est = sols[m].theta_est;
        if (!sols[m].converged) {
          cells[m].failed = true;
          cells[m].error = "max_iter_exceeded";
          cells[m].sup_err = std::numeric_limits<double>::quiet_NaN();
          continue;
        }
        cells[m].sup_err = max_abs_diff(sols[m].x, ref[m], scale);
      }
    } catch (const Error& e) {
      for (auto& c : cells) {
        c.failed = true;
        c.error = e.code();
        c.sup_err = std::numeric_limits<double>::quiet_NaN();
      }
    }
    if (summary.contraction_bound <= options.max_contraction && !table.eps0) table.eps0 = eps;

    std::vector<double> ok;
    for (const auto& c : cells) {
      if (c.failed) {
        ++summary.failed;
      } else {
        ok.push_back(c.sup_err);
      }
    }
    summary.succeeded = ok.size();
    if (ok.empty()) {
      summary.median = summary.p90 = std::numeric_limits<double>::quiet_NaN();
    } else {
      summary.median = quantile(ok, 0.5);
      summary.p90 = quantile(ok, 0.9);
    }
    table.summaries.push_back(summary);
    table.cells.insert(table.cells.end(), cells.begin(), cells.end());
  }
  return table;
}

}  // namespace

std::string_view to_string(ConvergenceMode mode) noexcept {
  return mode == ConvergenceMode::FirstKindScaled ? "first_kind_scaled" : "constant";
}

bool ConvergenceTable::median_strictly_decreasing() const noexcept {
  for (std::size_t k = 1; k < summaries.size(); ++k) {
    if (!(summaries[k].median < summaries[k - 1].median)) return false;
  }
  return !summaries.empty();
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw DomainError("quantile of an empty sample");
  if (!(q > 0.0 && q <= 1.0)) throw DomainError(fmt::format("quantile level {} outside (0, 1]", q));
  std::sort(values.begin(), values.end());
  const double rank = std::ceil(q * static_cast<double>(values.size()));
  const auto idx = static_cast<std::size_t>(std::max(1.0, rank)) - 1;
  return values[std::min(idx, values.size() - 1)];
}

std::vector<BrownianPath> coupled_paths(std::size_t n, std::size_t count, std::uint64_t base_seed) {
  std::vector<BrownianPath> out;
  out.reserve(count);
  for (std::size_t m = 0; m < count; ++m) out.push_back(sample_path(n, base_seed + m));
  return out;
}

ConvergenceTable converge_first_kind(const ProblemSpec& spec, std::span<const double> eps_ladder,
                                     std::span<const BrownianPath> paths,
                                     const SolveOptions& options) {
  if (spec.boundary != BoundaryKind::FirstKind) {
    throw DomainError("converge_first_kind needs a first-kind spec");
  }
  check_ladder(eps_ladder);
  check_paths(paths);
  Reference ref(paths.size());
  parallel_for(paths.size(), [&](std::size_t m) { ref[m] = kappa(spec, paths[m]).values; });
  return run_table(spec, eps_ladder, paths, options, ConvergenceMode::FirstKindScaled, ref);
}

ConvergenceTable converge_first_kind(const ProblemSpec& spec, std::span<const double> eps_ladder,
                                     std::size_t M, std::size_t n, std::uint64_t base_seed) {
  const auto paths = coupled_paths(n, M, base_seed);
  return converge_first_kind(spec, eps_ladder, paths);
}

ConvergenceTable converge_constant(const ProblemSpec& spec, std::span<const double> eps_ladder,
                                   std::span<const BrownianPath> paths,
                                   const SolveOptions& options) {
  if (spec.boundary == BoundaryKind::FirstKind) {
    throw DomainError("converge_constant needs a second-kind or periodic spec");
  }
  check_ladder(eps_ladder);
  check_paths(paths);
  const B0Function b0(spec);
  const std::size_t N = paths.front().grid().size();
  Reference ref(paths.size());
  parallel_for(paths.size(), [&](std::size_t m) {
    ref[m].assign(N, invert_B0(b0, eta(spec, paths[m]).value));
  });
  return run_table(spec, eps_ladder, paths, options, ConvergenceMode::Constant, ref);
}

ConvergenceTable converge_constant(const ProblemSpec& spec, std::span<const double> eps_ladder,
                                   std::size_t M, std::size_t n, std::uint64_t base_seed) {
  const auto paths = coupled_paths(n, M, base_seed);
  return converge_constant(spec, eps_ladder, paths);
}

ConvergenceTable converge(const ProblemSpec& spec, std::span<const double> eps_ladder,
                          std::size_t M, std::size_t n, std::uint64_t base_seed) {
  return spec.boundary == BoundaryKind::FirstKind
             ? converge_first_kind(spec, eps_ladder, M, n, base_seed)
             : converge_constant(spec, eps_ladder, M, n, base_seed);
}

std::vector<double> kind_gap(const ProblemSpec& spec, std::span<const double> eps_ladder,
                             std::span<const BrownianPath> paths) {
  check_ladder(eps_ladder);
  check_paths(paths);
  const Grid& grid = paths.front().grid();
  SolveOptions opt;
  opt.compute_derivative = false;
  ProblemSpec second = spec;
  second.boundary = BoundaryKind::SecondKind;
  ProblemSpec periodic = spec;
  periodic.boundary = BoundaryKind::Periodic;

  std::vector<double> out;
  for (double eps : eps_ladder) {
    const KernelOperator op2(BoundaryKind::SecondKind, eps, spec.p, grid, false);
    const KernelOperator op3(BoundaryKind::Periodic, eps, spec.p, grid, false);
    const auto s2 = picard_solve_batch(op2, second, paths, opt);
    const auto s3 = picard_solve_batch(op3, periodic, paths, opt);
    std::vector<double> gaps(paths.size());
    for (std::size_t m = 0; m < paths.size(); ++m) gaps[m] = max_abs_diff(s2[m].x, s3[m].x, 1.0);
    out.push_back(quantile(gaps, 0.5));
  }
  return out;
}

std::vector<DeterministicLimitRow> deterministic_limit_check(double p, const TimeFunction& f,
                                                             std::span<const double> eps_ladder,
                                                             std::size_t n) {
  check_ladder(eps_ladder);
  const Grid grid(n);
  ProblemSpec spec;
  spec.p = p;
  spec.B = make_drift("zero").fn;
  spec.B_x = make_drift("zero").dx;
  spec.f = f;
  spec.delta = make_time_function("zero").fn;
  const double limit = -trapezoid(grid, sample(grid, f)) / p;
  // delta = 0, so the path only fixes the grid.
  const BrownianPath path(grid, std::vector<double>(n, 0.0), 0);

  std::vector<DeterministicLimitRow> rows;
  for (BoundaryKind kind : {BoundaryKind::SecondKind, BoundaryKind::Periodic}) {
    spec.boundary = kind;
    for (double eps : eps_ladder) {
      const KernelOperator op(kind, eps, p, grid, false);
      SolveOptions opt;
      opt.compute_derivative = false;
      const auto sol = picard_solve(op, spec, path, opt);
      double err = 0.0;
      for (double v : sol.x) err = std::max(err, std::abs(v - limit));
      rows.push_back({kind, eps, limit, err});
    }
  }
  return rows;
}

double decomposition_identity_check(const ProblemSpec& spec, double eps, const BrownianPath& path,
                                    const SolutionPath& sol) {
  if (spec.boundary == BoundaryKind::FirstKind) {
    throw DomainError("the decomposition identity needs a second-kind or periodic solution");
  }
  const Grid& grid = sol.grid;
  if (!(grid == path.grid())) throw DomainError("solution and path grids differ");
  const std::size_t N = grid.size();
  const double inv_p = 1.0 / spec.p;
  const KernelOperator op(spec.boundary, eps, spec.p, grid, false);

  std::vector<double> g(N);
  for (std::size_t j = 0; j < N; ++j) {
    const double s = grid.point(j);
    g[j] = spec.B(s, sol.x[j]) + spec.f(s);
  }
  const auto noise = weighted_increments(spec.delta, path);
  double noise_sum = 0.0;
  for (double v : noise) noise_sum += v;
  const double g_int = trapezoid(grid, g);
  const double eta_value = -inv_p * trapezoid(grid, sample(grid, spec.f)) - inv_p * noise_sum;

  std::vector<double> u(N);
  std::vector<double> v(N);
  op.integrate(g, u);
  op.integrate_ito(noise, v);
  const B0Function b0(spec, grid.intervals());
  double residual = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double rhs = eta_value + (u[i] + inv_p * g_int) + (v[i] + inv_p * noise_sum);
    residual = std::max(residual, std::abs(b0(sol.x[i]) - rhs));
  }
  return residual;
}

}  // namespace sbvp
