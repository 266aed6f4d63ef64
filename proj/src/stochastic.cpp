#include "sbvp/stochastic.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <fmt/format.h>

#include "sbvp/errors.hpp"
#include "sbvp/parallel.hpp"
#include "sbvp/rng.hpp"
#include "sbvp/simd/kernels.hpp"

namespace sbvp {

BrownianPath::BrownianPath(Grid grid, std::vector<double> increments, std::uint64_t seed,
                           std::uint64_t stream)
    : grid_(std::move(grid)), increments_(std::move(increments)), seed_(seed), stream_(stream) {
  if (increments_.size() != grid_.intervals()) {
    throw DomainError(fmt::format("path has {} increments for {} intervals", increments_.size(),
                                  grid_.intervals()));
  }
}

std::vector<double> BrownianPath::values() const {
  std::vector<double> w(grid_.size(), 0.0);
  for (std::size_t j = 0; j < increments_.size(); ++j) w[j + 1] = w[j] + increments_[j];
  return w;
}

double BrownianPath::terminal() const { return values().back(); }

BrownianPath BrownianPath::coarsen(std::size_t factor) const {
  if (factor == 0 || grid_.intervals() % factor != 0) {
    throw DomainError(fmt::format("cannot coarsen {} intervals by {}", grid_.intervals(), factor));
  }
  std::vector<double> coarse(grid_.intervals() / factor, 0.0);
  for (std::size_t j = 0; j < increments_.size(); ++j) coarse[j / factor] += increments_[j];
  const Grid grid(coarse.size());
  return BrownianPath(grid, std::move(coarse), seed_, stream_);
}

BrownianPath sample_path(std::size_t n, std::uint64_t seed, std::uint64_t stream) {
  if (n < 2) throw DomainError("sample_path needs n >= 2");
  const NormalStream normals(seed, stream);
  const double sd = std::sqrt(1.0 / static_cast<double>(n));
  std::vector<double> inc(n);
  for (std::size_t j = 0; j < n; ++j) inc[j] = sd * normals.normal(j);
  return BrownianPath(Grid(n), std::move(inc), seed, stream);
}

std::vector<double> weighted_increments(const TimeFunction& delta, const BrownianPath& path) {
  const auto inc = path.increments();
  std::vector<double> out(inc.size());
  for (std::size_t j = 0; j < inc.size(); ++j) out[j] = delta(path.grid().point(j)) * inc[j];
  return out;
}

double ito_integral(std::span<const double> kernel_row, const TimeFunction& delta,
                    const BrownianPath& path) {
  const std::size_t n = path.grid().intervals();
  if (kernel_row.size() != n && kernel_row.size() != n + 1) {
    throw DomainError(fmt::format("kernel row of length {} does not match a path with {} intervals",
                                  kernel_row.size(), n));
  }
  const auto noise = weighted_increments(delta, path);
  return simd::dot(kernel_row.first(n), noise);
}

KappaPath kappa(const ProblemSpec& spec, const BrownianPath& path) {
  const Grid& grid = path.grid();
  const std::size_t N = grid.size();
  const auto forcing = sample(grid, [&](double s) { return spec.B(s, 0.0) + spec.f(s); });
  const auto noise = weighted_increments(spec.delta, path);
  const auto w = grid.weights();

  KappaPath out{grid, std::vector<double>(N), path.seed(), path.stream()};
  parallel_for(N, [&](std::size_t i) {
    const double t = grid.point(i);
    std::vector<double> row(N);
    for (std::size_t j = 0; j < N; ++j) row[j] = upsilon(t, grid.point(j));
    double det = 0.0;
    for (std::size_t j = 0; j < N; ++j) det += w[j] * row[j] * forcing[j];
    out.values[i] = det + simd::dot(std::span<const double>(row).first(N - 1), noise);
  });
  return out;
}

EtaValue eta(const ProblemSpec& spec, const BrownianPath& path) {
  const Grid& grid = path.grid();
  EtaValue out;
  out.seed = path.seed();
  out.stream = path.stream();
  out.deterministic = -trapezoid(grid, sample(grid, spec.f)) / spec.p;
  const auto noise = weighted_increments(spec.delta, path);
  double acc = 0.0;
  for (double v : noise) acc += v;
  out.stochastic = -acc / spec.p;
  out.value = out.deterministic + out.stochastic;
  return out;
}

double check_ito_lemma(const KernelTable& kernel, const TimeFunction& delta,
                       const BrownianPath& path) {
  if (!(kernel.grid() == path.grid())) throw DomainError("kernel and path grids differ");
  const Grid& grid = kernel.grid();
  const std::size_t N = grid.size();
  const std::size_t n = grid.intervals();
  const auto noise = weighted_increments(delta, path);

  std::vector<double> direct(N);
  std::vector<double> rate(N);
  for (std::size_t i = 0; i < N; ++i) {
    direct[i] = simd::dot(kernel.row(i).first(n), noise);
    // dt_row holds the t >= v branch for v < t_i and the t <= v branch from
    // v = t_i on, which is the split the Ito sum over [t_i, t_{i+1}) needs.
    rate[i] = simd::dot(kernel.dt_row(i).first(n), noise);
  }
  const auto integrated = cumulative_trapezoid(grid, rate);
  double residual = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    residual = std::max(residual, std::abs(direct[i] - (direct[0] + integrated[i])));
  }
  return residual;
}

IsometryEstimate sample_moments(std::span<const double> samples) {
  const double m = static_cast<double>(samples.size());
  if (samples.size() < 2) throw DomainError("need at least two samples");
  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= m;
  double m2 = 0.0;
  double m4 = 0.0;
  for (double v : samples) {
    const double d = (v - mean) * (v - mean);
    m2 += d;
    m4 += d * d;
  }
  IsometryEstimate out;
  out.mean = mean;
  out.variance = m2 / (m - 1.0);
  out.mean_std_error = std::sqrt(out.variance / m);
  const double mu2 = m2 / m;
  const double mu4 = m4 / m;
  out.variance_std_error = std::sqrt(std::max(0.0, mu4 - mu2 * mu2) / m);
  return out;
}

IsometryEstimate ito_isometry_check(std::span<const double> kernel_row,
                                    const TimeFunction& delta, std::size_t n,
                                    std::size_t paths, std::uint64_t base_seed) {
  std::vector<double> samples(paths);
  parallel_for(paths, [&](std::size_t m) {
    samples[m] = ito_integral(kernel_row, delta, sample_path(n, base_seed + m));
  });
  auto out = sample_moments(samples);
  const Grid grid(n);
  double v = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double d = delta(grid.point(j));
    v += kernel_row[j] * kernel_row[j] * d * d;
  }
  out.discrete_variance = v * grid.step();
  return out;
}

bool CovarianceReport::all_within() const noexcept {
  return std::all_of(cells.begin(), cells.end(), [](const auto& c) { return c.within_3sigma; });
}

CovarianceReport brownian_bridge_check(std::size_t n, std::size_t seeds, std::uint64_t base_seed) {
  if (seeds < 100) throw DomainError("brownian_bridge_check needs >= 100 seeds");
  const Grid grid(n);
  constexpr std::array<double, 5> lattice{0.0, 0.25, 0.5, 0.75, 1.0};
  std::array<std::size_t, 5> node{};
  for (std::size_t a = 0; a < lattice.size(); ++a) node[a] = grid.nearest(lattice[a]);

  // The kernel jumps at s = t; an increment over [s_j, s_{j+1}) lies on the
  // s > t side as soon as s_j >= t.
  std::vector<std::vector<double>> rows(lattice.size(), std::vector<double>(n));
  for (std::size_t a = 0; a < lattice.size(); ++a) {
    const double t = grid.point(node[a]);
    for (std::size_t j = 0; j < n; ++j) rows[a][j] = j < node[a] ? 1.0 - t : -t;
  }

  std::vector<std::array<double, 5>> z(seeds);
  parallel_for(seeds, [&](std::size_t m) {
    const auto path = sample_path(n, base_seed + m);
    for (std::size_t a = 0; a < lattice.size(); ++a) z[m][a] = simd::dot(rows[a], path.increments());
  });

  const double M = static_cast<double>(seeds);
  std::array<double, 5> mean{};
  for (const auto& zm : z) {
    for (std::size_t a = 0; a < 5; ++a) mean[a] += zm[a];
  }
  for (auto& v : mean) v /= M;

  CovarianceReport report;
  report.n = n;
  report.seeds = seeds;
  for (std::size_t a = 0; a < 5; ++a) {
    for (std::size_t b = 0; b < 5; ++b) {
      std::vector<double> prod(seeds);
      double cov = 0.0;
      for (std::size_t m = 0; m < seeds; ++m) {
        prod[m] = (z[m][a] - mean[a]) * (z[m][b] - mean[b]);
        cov += prod[m];
      }
      cov /= (M - 1.0);
      double var_prod = 0.0;
      const double pm = cov * (M - 1.0) / M;
      for (double v : prod) var_prod += (v - pm) * (v - pm);
      var_prod /= (M - 1.0);

      CovarianceCell cell;
      cell.t = grid.point(node[a]);
      cell.u = grid.point(node[b]);
      cell.estimate = cov;
      cell.expected = std::min(cell.t, cell.u) - cell.t * cell.u;
      cell.std_error = std::sqrt(var_prod / M);
      cell.within_3sigma =
          std::abs(cell.estimate - cell.expected) <= 3.0 * cell.std_error + 1e-15;
      report.cells.push_back(cell);
    }
  }
  return report;
}

}  // namespace sbvp
