#include "sbvp/solver.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>

#include <fmt/format.h>

#include "sbvp/errors.hpp"
#include "sbvp/parallel.hpp"
#include "sbvp/simd/kernels.hpp"

namespace sbvp {
namespace {

constexpr std::size_t kBatch = 32;

std::size_t padded(std::size_t cols) { return (cols + 3) / 4 * 4; }

double sup_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), stride_(padded(cols)), data_(rows * stride_, 0.0) {}

void DenseMatrix::apply(std::span<const double> x, std::span<double> y) const {
  if (x.size() < cols_ || y.size() < rows_) throw DomainError("matrix-vector size mismatch");
  simd::active().matvec(data_.data(), rows_, cols_, stride_, x.data(), y.data());
}

void DenseMatrix::apply_batch(const double* X, std::size_t nrhs, double* Y) const {
  simd::active().matmat(data_.data(), rows_, cols_, stride_, X, nrhs, nrhs, Y, nrhs);
}

KernelOperator::KernelOperator(const KernelTable& table, bool with_derivative)
    : grid_(table.grid()), kind_(table.kind()), eps_(table.eps()), p_(table.p()) {
  const std::size_t N = grid_.size();
  const std::size_t n = grid_.intervals();
  const double e2 = eps_ * eps_;
  const double h = grid_.step();
  const auto w = grid_.weights();

  quad_ = DenseMatrix(N, N);
  ito_ = DenseMatrix(N, n);
  if (with_derivative) {
    deriv_ = DenseMatrix(N, N);
    deriv_ito_ = DenseMatrix(N, n);
  }
  std::vector<double> row_max(N, 0.0);
  parallel_for(N, [&](std::size_t i) {
    double* q = quad_.row(i);
    double* it = ito_.row(i);
    for (std::size_t j = 0; j < N; ++j) {
      const double g = e2 * table.value(i, j);
      row_max[i] = std::max(row_max[i], std::abs(g));
      q[j] = w[j] * g;
      if (j < n) it[j] = g;
    }
    if (!with_derivative) return;
    // Trapezoid split at s = t_i: [0, t_i] sees the t >= s branch, [t_i, 1]
    // the t <= s branch, and the node s = t_i contributes to both halves.
    double* d = deriv_.row(i);
    double* di = deriv_ito_.row(i);
    for (std::size_t j = 0; j < N; ++j) {
      const double gt = e2 * table.dt(i, j);
      if (j < n) di[j] = gt;
      if (j < i) {
        d[j] = (j == 0 ? 0.5 * h : h) * gt;
      } else if (j > i) {
        d[j] = (j == n ? 0.5 * h : h) * gt;
      } else {
        const double left = i > 0 ? 0.5 * h * e2 * table.dt(i, i, Side::FromAbove) : 0.0;
        const double right = i < n ? 0.5 * h * e2 * table.dt(i, i, Side::FromBelow) : 0.0;
        d[j] = left + right;
      }
    }
  });
  max_abs_ = *std::max_element(row_max.begin(), row_max.end());
}

KernelOperator::KernelOperator(BoundaryKind kind, double eps, double p, const Grid& grid,
                               bool with_derivative, NeumannVariant variant)
    : KernelOperator(KernelTable(kind, eps, p, grid, variant), with_derivative) {}

void KernelOperator::integrate(std::span<const double> g, std::span<double> out) const {
  quad_.apply(g, out);
}

void KernelOperator::integrate_ito(std::span<const double> xi, std::span<double> out) const {
  ito_.apply(xi, out);
}

void KernelOperator::differentiate(std::span<const double> g, std::span<double> out) const {
  if (!has_derivative()) throw DomainError("operator was built without derivative rows");
  deriv_.apply(g, out);
}

void KernelOperator::differentiate_ito(std::span<const double> xi, std::span<double> out) const {
  if (!has_derivative()) throw DomainError("operator was built without derivative rows");
  deriv_ito_.apply(xi, out);
}

std::vector<double> forcing_path(const KernelOperator& op, const ProblemSpec& spec,
                                 const BrownianPath& path) {
  if (!(op.grid() == path.grid())) throw DomainError("operator and path grids differ");
  const std::size_t N = op.grid().size();
  const auto f = sample(op.grid(), spec.f);
  const auto noise = weighted_increments(spec.delta, path);
  std::vector<double> det(N);
  std::vector<double> sto(N);
  op.integrate(f, det);
  // Same summation order as the batched solver.
  op.ito().apply_batch(noise.data(), 1, sto.data());
  for (std::size_t i = 0; i < N; ++i) sto[i] += det[i];
  return sto;
}

std::vector<double> forcing_path(const ProblemSpec& spec, double eps, const BrownianPath& path) {
  const KernelOperator op(spec.boundary, eps, spec.p, path.grid(), false);
  return forcing_path(op, spec, path);
}

double contraction_bound(const KernelOperator& op, const ProblemSpec& spec) {
  return op.max_abs_kernel() * spec.beta;
}

double contraction_bound(const ProblemSpec& spec, double eps, const Grid& grid) {
  return contraction_bound(KernelOperator(spec.boundary, eps, spec.p, grid, false), spec);
}

namespace {

// One chunk of paths, columns of row-major N x K blocks.
void solve_chunk(const KernelOperator& op, const ProblemSpec& spec,
                 std::span<const BrownianPath> paths, const SolveOptions& opt, double bound,
                 std::span<SolutionPath> out) {
  const Grid& grid = op.grid();
  const std::size_t N = grid.size();
  const std::size_t n = grid.intervals();
  const std::size_t K = paths.size();
  const auto t = grid.points();

  // phi = Kq f + Ki (delta dW), the deterministic part shared by all paths.
  const auto f = sample(grid, spec.f);
  std::vector<double> phi_det(N);
  op.integrate(f, phi_det);
  const auto d = sample(grid, spec.delta);
  std::vector<double> noise(n * K);
  for (std::size_t k = 0; k < K; ++k) {
    const auto inc = paths[k].increments();
    for (std::size_t j = 0; j < n; ++j) noise[j * K + k] = d[j] * inc[j];
  }
  std::vector<double> phi(N * K);
  op.ito().apply_batch(noise.data(), K, phi.data());
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t k = 0; k < K; ++k) phi[i * K + k] += phi_det[i];
  }

  std::vector<std::vector<double>> x(K, std::vector<double>(N));
  std::vector<std::vector<double>> b(K, std::vector<double>(N));
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t i = 0; i < N; ++i) x[k][i] = phi[i * K + k] + opt.initial_offset;
  }

  const double stop = opt.tol * (1.0 - bound);
  std::vector<std::size_t> active(K);
  for (std::size_t k = 0; k < K; ++k) {
    active[k] = k;
    out[k].grid = grid;
    out[k].contraction_bound = bound;
  }

  std::vector<double> Bpack;
  std::vector<double> Ypack;
  for (int iter = 1; iter <= opt.max_iter && !active.empty(); ++iter) {
    const std::size_t A = active.size();
    Bpack.assign(N * A, 0.0);
    Ypack.assign(N * A, 0.0);
    for (std::size_t a = 0; a < A; ++a) {
      const std::size_t k = active[a];
      for (std::size_t i = 0; i < N; ++i) {
        b[k][i] = spec.B(t[i], x[k][i]);
        Bpack[i * A + a] = b[k][i];
      }
    }
    op.quadrature().apply_batch(Bpack.data(), A, Ypack.data());

    std::vector<std::size_t> still;
    for (std::size_t a = 0; a < A; ++a) {
      const std::size_t k = active[a];
      SolutionPath& s = out[k];
      double update = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        const double next = Ypack[i * A + a] + phi[i * K + k];
        update = std::max(update, std::abs(next - x[k][i]));
        x[k][i] = next;
      }
      if (std::isnan(update)) update = INFINITY;
      if (!s.update_norms.empty()) {
        // Ratios of updates at rounding level carry no information.
        const double prev = s.update_norms.back();
        const double floor = 64.0 * DBL_EPSILON * std::max(1.0, sup_norm(x[k]));
        if (prev > floor && update > floor) s.theta_est = std::max(s.theta_est, update / prev);
      }
      s.update_norms.push_back(update);
      s.iterations = iter;
      s.final_residual = update;
      if (update < stop || update == 0.0) {
        s.converged = true;
      } else {
        still.push_back(k);
      }
    }
    active.swap(still);
  }

  for (std::size_t k = 0; k < K; ++k) out[k].x = std::move(x[k]);
  if (!opt.compute_derivative || !op.has_derivative()) return;

  // xdot from the same integrands that produced the final iterate.
  std::vector<double> bcols(N * K);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t i = 0; i < N; ++i) bcols[i * K + k] = b[k][i];
  }
  std::vector<double> xd(N * K);
  std::vector<double> xd_noise(N * K);
  op.derivative().apply_batch(bcols.data(), K, xd.data());
  op.derivative_ito().apply_batch(noise.data(), K, xd_noise.data());
  std::vector<double> fdot(N);
  op.differentiate(f, fdot);
  for (std::size_t k = 0; k < K; ++k) {
    out[k].xdot.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
      out[k].xdot[i] = xd[i * K + k] + fdot[i] + xd_noise[i * K + k];
    }
  }
}

}  // namespace

std::vector<SolutionPath> picard_solve_batch(const KernelOperator& op, const ProblemSpec& spec,
                                             std::span<const BrownianPath> paths,
                                             const SolveOptions& options) {
  if (!(options.tol > 0.0)) throw DomainError("tol must be positive");
  if (options.max_iter < 1) throw DomainError("max_iter must be at least 1");
  for (const auto& p : paths) {
    if (!(p.grid() == op.grid())) throw DomainError("operator and path grids differ");
  }
  const double bound = contraction_bound(op, spec);
  if (!(bound <= options.max_contraction)) throw NoContraction(bound, options.max_contraction);

  std::vector<SolutionPath> out(paths.size());
  const std::size_t chunks = (paths.size() + kBatch - 1) / kBatch;
  parallel_for(chunks, [&](std::size_t c) {
    const std::size_t lo = c * kBatch;
    const std::size_t len = std::min(kBatch, paths.size() - lo);
    solve_chunk(op, spec, paths.subspan(lo, len), options, bound,
                std::span<SolutionPath>(out).subspan(lo, len));
  });
  return out;
}

SolutionPath picard_solve(const KernelOperator& op, const ProblemSpec& spec,
                          const BrownianPath& path, const SolveOptions& options) {
  auto out = picard_solve_batch(op, spec, std::span<const BrownianPath>(&path, 1), options);
  if (!out[0].converged) throw MaxIterExceeded(out[0].iterations, out[0].final_residual);
  return std::move(out[0]);
}

SolutionPath picard_solve(const ProblemSpec& spec, double eps, const BrownianPath& path,
                          double tol, int max_iter) {
  const KernelOperator op(spec.boundary, eps, spec.p, path.grid());
  SolveOptions opt;
  opt.tol = tol;
  opt.max_iter = max_iter;
  return picard_solve(op, spec, path, opt);
}

std::pair<double, double> boundary_residual(BoundaryKind kind, const SolutionPath& sol) {
  const auto& x = sol.x;
  const auto& v = sol.xdot;
  switch (kind) {
    case BoundaryKind::FirstKind:
      return {std::abs(x.front()), std::abs(x.back())};
    case BoundaryKind::SecondKind:
      if (v.empty()) throw DomainError("second-kind residual needs the derivative path");
      return {std::abs(v.front()), std::abs(v.back())};
    case BoundaryKind::Periodic:
      if (v.empty()) throw DomainError("periodic residual needs the derivative path");
      return {std::abs(x.front() - x.back()), std::abs(v.front() - v.back())};
  }
  return {0.0, 0.0};
}

B0Function::B0Function(const ProblemSpec& spec, std::size_t quadrature_intervals)
    : spec_(spec), lattice_(quadrature_intervals) {
  if (!(spec.p > 0.0)) throw SpecError("invalid_p", fmt::format("p = {} must be positive", spec.p));
}

double B0Function::operator()(double x) const {
  const auto w = lattice_.weights();
  double acc = 0.0;
  for (std::size_t j = 0; j < lattice_.size(); ++j) acc += w[j] * spec_.B(lattice_.point(j), x);
  return x + acc / spec_.p;
}

double B0Function::derivative(double x) const {
  const auto w = lattice_.weights();
  double acc = 0.0;
  for (std::size_t j = 0; j < lattice_.size(); ++j) acc += w[j] * spec_.B_x(lattice_.point(j), x);
  return 1.0 + acc / spec_.p;
}

double invert_B0(const B0Function& b0, double a, double tol) {
  if (!(tol > 0.0)) throw DomainError("tol must be positive");
  const ProblemSpec& spec = b0.spec();
  const double half = spec.beta_star / spec.p + tol;
  double lo = a - half;
  double hi = a + half;
  if (!std::isfinite(lo) || !std::isfinite(hi)) {
    throw BracketFailure(fmt::format("bracket [{}, {}] is not finite", lo, hi));
  }
  double flo = b0(lo) - a;
  double fhi = b0(hi) - a;
  if (flo > 0.0 || fhi < 0.0) {
    throw BracketFailure(fmt::format(
        "B0 - a has no sign change on [{}, {}] (values {}, {}); sup |B| exceeds beta_star", lo, hi,
        flo, fhi));
  }
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;

  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double fx = b0(x) - a;
    if (std::abs(fx) <= tol) return x;
    if (fx < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    // Newton step, replaced by bisection when it leaves the bracket.
    const double dfx = b0.derivative(x);
    double next = dfx > 0.0 ? x - fx / dfx : lo - 1.0;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == x || hi - lo <= 4.0 * DBL_EPSILON * std::max(1.0, std::abs(x))) {
      const double fn = b0(next) - a;
      return std::abs(fn) < std::abs(fx) ? next : x;
    }
    x = next;
  }
  return x;
}

double invert_B0(const ProblemSpec& spec, double a, double tol) {
  return invert_B0(B0Function(spec), a, tol);
}

SdeResidual verify_sde(const ProblemSpec& spec, double eps, const BrownianPath& path,
                       const SolutionPath& sol) {
  const Grid& grid = sol.grid;
  if (!(grid == path.grid())) throw DomainError("solution and path grids differ");
  if (sol.xdot.size() != grid.size()) throw DomainError("verify_sde needs the derivative path");
  const std::size_t N = grid.size();
  const double e2 = eps * eps;

  std::vector<double> integrand(N);
  for (std::size_t i = 0; i < N; ++i) {
    const double t = grid.point(i);
    integrand[i] = spec.p * sol.x[i] + spec.B(t, sol.x[i]) + spec.f(t);
  }
  const auto drift = cumulative_trapezoid(grid, integrand);
  const auto noise = weighted_increments(spec.delta, path);

  SdeResidual out;
  double ito = 0.0;
  for (std::size_t k = 0; k < N; ++k) {
    if (k > 0) ito += noise[k - 1];
    const double lhs = sol.xdot[k] - sol.xdot[0];
    const double rhs = e2 * (drift[k] + ito);
    out.max_residual = std::max(out.max_residual, std::abs(lhs - rhs));
  }
  const auto [first, second] = boundary_residual(spec.boundary, sol);
  out.boundary_first = first;
  out.boundary_second = second;
  return out;
}

}  // namespace sbvp
