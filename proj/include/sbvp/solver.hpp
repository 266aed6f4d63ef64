#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sbvp/greens.hpp"
#include "sbvp/grid.hpp"
#include "sbvp/model.hpp"
#include "sbvp/stochastic.hpp"

namespace sbvp {

/// Row-major matrix with rows padded to a multiple of four doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t stride() const noexcept { return stride_; }
  double* row(std::size_t r) noexcept { return data_.data() + r * stride_; }
  const double* row(std::size_t r) const noexcept { return data_.data() + r * stride_; }
  const double* data() const noexcept { return data_.data(); }
  bool empty() const noexcept { return data_.empty(); }

  /// y = A x through the active SIMD kernel set.
  void apply(std::span<const double> x, std::span<double> y) const;
  /// Y = A X for `nrhs` right-hand sides; X is cols x nrhs and Y rows x nrhs,
  /// both row-major and dense. Each column of Y is a sequential sum over the
  /// columns of A, so it does not depend on nrhs or on its position.
  void apply_batch(const double* X, std::size_t nrhs, double* Y) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t stride_ = 0;
  std::vector<double> data_;
};

/// Discretized integral operators of the scaled kernel eps^2 G on a grid:
///
///   integrate(g)_i          = trapezoid_s eps^2 G(t_i, s) g(s)
///   integrate_ito(xi)_i     = sum_{j<n} eps^2 G(t_i, s_j) xi_j
///   differentiate(g)_i      = d/dt of integrate, trapezoid split at s = t_i
///   differentiate_ito(xi)_i = sum_{j<n} eps^2 G_t(t_i, s_j) xi_j
///
/// The derivative operators use the t >= s branch left of t_i and the
/// t <= s branch right of it. Immutable after construction.
class KernelOperator {
 public:
  KernelOperator(const KernelTable& table, bool with_derivative = true);
  KernelOperator(BoundaryKind kind, double eps, double p, const Grid& grid,
                 bool with_derivative = true,
                 NeumannVariant variant = NeumannVariant::Corrected);

  const Grid& grid() const noexcept { return grid_; }
  BoundaryKind kind() const noexcept { return kind_; }
  double eps() const noexcept { return eps_; }
  double p() const noexcept { return p_; }
  bool has_derivative() const noexcept { return !deriv_.empty(); }

  /// max over grid pairs of |eps^2 G(t_i, s_j)|.
  double max_abs_kernel() const noexcept { return max_abs_; }

  void integrate(std::span<const double> g, std::span<double> out) const;
  void integrate_ito(std::span<const double> xi, std::span<double> out) const;
  void differentiate(std::span<const double> g, std::span<double> out) const;
  void differentiate_ito(std::span<const double> xi, std::span<double> out) const;

  const DenseMatrix& quadrature() const noexcept { return quad_; }
  const DenseMatrix& ito() const noexcept { return ito_; }
  const DenseMatrix& derivative() const noexcept { return deriv_; }
  const DenseMatrix& derivative_ito() const noexcept { return deriv_ito_; }

 private:
  Grid grid_;
  BoundaryKind kind_;
  double eps_;
  double p_;
  double max_abs_ = 0.0;
  DenseMatrix quad_;
  DenseMatrix ito_;
  DenseMatrix deriv_;
  DenseMatrix deriv_ito_;
};

/// phi(t) = int eps^2 G(t,s) f(s) ds + int eps^2 G(t,s) delta(s) dW_s.
std::vector<double> forcing_path(const KernelOperator& op, const ProblemSpec& spec,
                                 const BrownianPath& path);
std::vector<double> forcing_path(const ProblemSpec& spec, double eps, const BrownianPath& path);

/// max |eps^2 G| times beta: Lipschitz bound of the Picard map.
double contraction_bound(const KernelOperator& op, const ProblemSpec& spec);
double contraction_bound(const ProblemSpec& spec, double eps, const Grid& grid);

struct SolveOptions {
  double tol = 1e-10;
  int max_iter = 200;
  /// NoContraction is raised when the a-priori bound exceeds this.
  double max_contraction = 0.95;
  /// Added to the default initial iterate x0 = phi.
  double initial_offset = 0.0;
  bool compute_derivative = true;
};

struct SolutionPath {
  Grid grid{1};
  std::vector<double> x;
  std::vector<double> xdot;  ///< empty unless the derivative was requested
  int iterations = 0;
  bool converged = false;
  double final_residual = 0.0;  ///< sup-norm of the last Picard update
  double theta_est = 0.0;       ///< largest measured ratio of successive updates
  double contraction_bound = 0.0;
  std::vector<double> update_norms;
};

/// Picard iteration x_{k+1} = int eps^2 G B(s, x_k(s)) ds + phi from x0 = phi
/// (+ initial_offset), stopped once |x_{k+1} - x_k|_* < tol (1 - theta) with
/// theta the a-priori contraction bound.
SolutionPath picard_solve(const KernelOperator& op, const ProblemSpec& spec,
                          const BrownianPath& path, const SolveOptions& options = {});
SolutionPath picard_solve(const ProblemSpec& spec, double eps, const BrownianPath& path,
                          double tol = 1e-10, int max_iter = 200);

/// picard_solve for many paths sharing one operator. Each path stops
/// independently under the same rule and yields bit-identical results to a
/// single-path solve; a path that runs out of iterations comes back with
/// converged = false instead of throwing.
std::vector<SolutionPath> picard_solve_batch(const KernelOperator& op, const ProblemSpec& spec,
                                             std::span<const BrownianPath> paths,
                                             const SolveOptions& options = {});

/// Boundary residuals (first, second) of the declared kind:
///   first: |x(0)|, |x(1)|; second: |x'(0)|, |x'(1)|;
///   periodic: |x(0) - x(1)|, |x'(0) - x'(1)|.
std::pair<double, double> boundary_residual(BoundaryKind kind, const SolutionPath& sol);

/// B0(x) = x + (1/p) int B(s, x) ds with the s-integral by trapezoid on a
/// fixed lattice.
class B0Function {
 public:
  explicit B0Function(const ProblemSpec& spec, std::size_t quadrature_intervals = 1024);

  double operator()(double x) const;
  double derivative(double x) const;
  const ProblemSpec& spec() const noexcept { return spec_; }

 private:
  ProblemSpec spec_;
  Grid lattice_;
};

/// Root of B0(x) = a: bisection on [a - beta*/p, a + beta*/p] refined by
/// safeguarded Newton, |B0(root) - a| <= tol.
double invert_B0(const B0Function& b0, double a, double tol = 1e-12);
double invert_B0(const ProblemSpec& spec, double a, double tol = 1e-12);

/// Checks x'(t_k) - x'(0) = eps^2 trapezoid_0^{t_k}(p x + B(s,x) + f)
///                          + eps^2 sum_{j<k} delta_j dW_j.
struct SdeResidual {
  double max_residual = 0.0;
  double boundary_first = 0.0;
  double boundary_second = 0.0;
};

SdeResidual verify_sde(const ProblemSpec& spec, double eps, const BrownianPath& path,
                       const SolutionPath& sol);

}  // namespace sbvp
