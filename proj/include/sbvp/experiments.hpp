#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sbvp/model.hpp"
#include "sbvp/solver.hpp"
#include "sbvp/stochastic.hpp"

namespace sbvp {

enum class ConvergenceMode {
  FirstKindScaled,  ///< err = max_t |eps^-2 x - kappa|
  Constant,         ///< err = max_t |x - zeta|, zeta = B0^-1(eta)
};

std::string_view to_string(ConvergenceMode mode) noexcept;

struct ConvergenceCell {
  double eps = 0.0;
  std::uint64_t seed = 0;
  double sup_err = 0.0;
  int iterations = 0;
  double theta_est = 0.0;  ///< measured Picard update ratio
  bool failed = false;
  std::string error;  ///< error code of a failed cell
};

struct LadderSummary {
  double eps = 0.0;
  double contraction_bound = 0.0;
  std::size_t succeeded = 0;
  std::size_t failed = 0;
  double median = 0.0;
  double p90 = 0.0;
};

struct ConvergenceTable {
  ConvergenceMode mode = ConvergenceMode::FirstKindScaled;
  BoundaryKind boundary = BoundaryKind::FirstKind;
  std::vector<double> eps_ladder;
  std::size_t n = 0;
  std::uint64_t base_seed = 0;
  std::vector<ConvergenceCell> cells;  ///< eps-major, seeds ascending
  std::vector<LadderSummary> summaries;
  /// Largest ladder eps whose contraction bound is within the solver
  /// threshold; empty when none is.
  std::optional<double> eps0;

  bool median_strictly_decreasing() const noexcept;
};

/// Nearest-rank order statistic sorted[ceil(q m) - 1] of the values.
double quantile(std::vector<double> values, double q);

/// Paths base_seed + m, m < count, on n intervals.
std::vector<BrownianPath> coupled_paths(std::size_t n, std::size_t count, std::uint64_t base_seed);

/// err = max_t |eps^-2 x^eps - kappa| per (eps, path), every eps sharing the
/// same paths. spec.boundary must be FirstKind.
ConvergenceTable converge_first_kind(const ProblemSpec& spec, std::span<const double> eps_ladder,
                                     std::span<const BrownianPath> paths,
                                     const SolveOptions& options = {});
ConvergenceTable converge_first_kind(const ProblemSpec& spec, std::span<const double> eps_ladder,
                                     std::size_t M, std::size_t n, std::uint64_t base_seed);

/// err = max_t |x^eps - zeta| with zeta from the same path. spec.boundary
/// must be SecondKind or Periodic.
ConvergenceTable converge_constant(const ProblemSpec& spec, std::span<const double> eps_ladder,
                                   std::span<const BrownianPath> paths,
                                   const SolveOptions& options = {});
ConvergenceTable converge_constant(const ProblemSpec& spec, std::span<const double> eps_ladder,
                                   std::size_t M, std::size_t n, std::uint64_t base_seed);

/// Table by boundary kind: first-kind specs go to converge_first_kind, the
/// others to converge_constant.
ConvergenceTable converge(const ProblemSpec& spec, std::span<const double> eps_ladder,
                          std::size_t M, std::size_t n, std::uint64_t base_seed);

/// Median over paths of max_t |x_second - x_periodic| per eps, both kinds
/// solved on the same paths.
std::vector<double> kind_gap(const ProblemSpec& spec, std::span<const double> eps_ladder,
                             std::span<const BrownianPath> paths);

struct DeterministicLimitRow {
  BoundaryKind kind = BoundaryKind::SecondKind;
  double eps = 0.0;
  double limit = 0.0;  ///< -(1/p) int f
  double error = 0.0;  ///< max_t |x^eps - limit|
};

/// delta = 0 and B = 0; second-kind and periodic rows for every eps.
std::vector<DeterministicLimitRow> deterministic_limit_check(double p, const TimeFunction& f,
                                                             std::span<const double> eps_ladder,
                                                             std::size_t n);

/// Residual of B0(x(t)) = eta + u(t) + v(t) with
///   u(t) = int V(t,s) (B(s, x(s)) + f(s)) ds,  v(t) = int V(t,s) delta dW,
///   V = eps^2 G + 1/p,
/// on the solution grid for a second-kind or periodic solution. The identity
/// is exact when B does not depend on x; otherwise the residual is
/// (1/p) |int B(s, x(t)) - B(s, x(s)) ds|, which vanishes only as x
/// flattens with eps -> 0.
double decomposition_identity_check(const ProblemSpec& spec, double eps, const BrownianPath& path,
                                    const SolutionPath& sol);

}  // namespace sbvp
