#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sbvp/greens.hpp"
#include "sbvp/grid.hpp"
#include "sbvp/model.hpp"

namespace sbvp {

/// Brownian increments over a grid: increments[j] = W(t_{j+1}) - W(t_j).
class BrownianPath {
 public:
  BrownianPath(Grid grid, std::vector<double> increments, std::uint64_t seed,
               std::uint64_t stream = 0);

  const Grid& grid() const noexcept { return grid_; }
  std::span<const double> increments() const noexcept { return increments_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  /// W(t_k) for k = 0..n with W(0) = 0.
  std::vector<double> values() const;
  double terminal() const;

  /// Same path on a grid with n / factor intervals (sums of consecutive
  /// increments), so coarse and fine runs see identical W at shared nodes.
  BrownianPath coarsen(std::size_t factor) const;

 private:
  Grid grid_;
  std::vector<double> increments_;
  std::uint64_t seed_;
  std::uint64_t stream_;
};

/// n i.i.d. Normal(0, 1/n) increments from the counter-based stream keyed by
/// (seed, stream). Bit-for-bit reproducible.
BrownianPath sample_path(std::size_t n, std::uint64_t seed, std::uint64_t stream = 0);

/// delta(t_j) * dW_j for j < n.
std::vector<double> weighted_increments(const TimeFunction& delta, const BrownianPath& path);

/// Left-endpoint Ito sum  sum_{j<n} k_j delta(t_j) dW_j. `kernel_row` holds
/// either the n+1 grid samples (the last one is unused) or n per-interval
/// values.
double ito_integral(std::span<const double> kernel_row, const TimeFunction& delta,
                    const BrownianPath& path);

/// Limit process of the scaled first-kind solution:
///   kappa(t) = int Y(t,s) (B(s,0) + f(s)) ds + int Y(t,s) delta(s) dW_s.
struct KappaPath {
  Grid grid{1};
  std::vector<double> values;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

KappaPath kappa(const ProblemSpec& spec, const BrownianPath& path);

/// eta = -(1/p) int f ds - (1/p) int delta dW.
struct EtaValue {
  double value = 0.0;
  double deterministic = 0.0;
  double stochastic = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

EtaValue eta(const ProblemSpec& spec, const BrownianPath& path);

/// Compares xi(t) = int G(t,s) delta dW computed directly against
/// xi(0) + int_0^t D(u) du with D(u) = int G_t(u, v) delta(v) dW_v, using
/// the t >= v branch for increments left of u and the t <= v branch for the
/// increment starting at u and beyond. Returns max_t |difference|, which is
/// first order in h.
double check_ito_lemma(const KernelTable& kernel, const TimeFunction& delta,
                       const BrownianPath& path);

/// Monte Carlo sample moments of an Ito sum over `paths` independent paths
/// (seeds base_seed, base_seed + 1, ...).
struct IsometryEstimate {
  double mean = 0.0;
  double mean_std_error = 0.0;
  double variance = 0.0;
  double variance_std_error = 0.0;
  /// Exact variance of the discrete sum: h sum_{j<n} k_j^2 delta_j^2.
  double discrete_variance = 0.0;
};

IsometryEstimate ito_isometry_check(std::span<const double> kernel_row,
                                    const TimeFunction& delta, std::size_t n,
                                    std::size_t paths, std::uint64_t base_seed = 1);

/// Sample mean and variance with standard errors for an arbitrary batch.
IsometryEstimate sample_moments(std::span<const double> samples);

/// Covariance of Z_t = int G(t,s) dW, G(t,s) = (1-t) 1{s<=t} - t 1{s>t},
/// against min(t,u) - t u on the 5x5 lattice {0, 1/4, 1/2, 3/4, 1}^2.
struct CovarianceCell {
  double t = 0.0;
  double u = 0.0;
  double estimate = 0.0;
  double expected = 0.0;
  double std_error = 0.0;
  bool within_3sigma = false;
};

struct CovarianceReport {
  std::size_t n = 0;
  std::size_t seeds = 0;
  std::vector<CovarianceCell> cells;

  bool all_within() const noexcept;
};

CovarianceReport brownian_bridge_check(std::size_t n, std::size_t seeds,
                                       std::uint64_t base_seed = 1);

}  // namespace sbvp
