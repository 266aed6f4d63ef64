#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sbvp/grid.hpp"
#include "sbvp/model.hpp"

namespace sbvp {

/// One-sided selector on the diagonal t = s. FromBelow is the limit t -> s-
/// (the t <= s branch), FromAbove the limit t -> s+ (the t >= s branch).
/// Off the diagonal the branch is fixed by the sign of t - s.
enum class Side { FromBelow, FromAbove };

/// Second-kind kernel variant. `AsPrinted` reproduces the published closed
/// form whose second boundary factor is 1 + exp(-2 r max(t,s)); `Corrected`
/// uses 1 + exp(-2 r (1 - max(t,s))), built from cosh(r t) and cosh(r (1-t)).
/// Only `Corrected` satisfies x'(0) = x'(1) = 0; see certify_green.
enum class NeumannVariant { Corrected, AsPrinted };

/// Kernel of u'' - c u = phi with separable branches on either side of the
/// diagonal. Used by certify_green so that perturbed kernels can be checked
/// through the same code path.
class KernelFunction {
 public:
  virtual ~KernelFunction() = default;

  virtual BoundaryKind kind() const = 0;
  /// Coefficient c of the homogeneous equation u'' - c u = 0.
  virtual double ode_coefficient() const = 0;
  virtual double value(double t, double s) const = 0;
  /// The t >= s (FromAbove) or t <= s (FromBelow) closed form, evaluated
  /// regardless of the actual order of t and s.
  virtual double branch_value(double t, double s, Side side) const = 0;
  virtual double dt(double t, double s, Side side) const = 0;
  virtual double dtt(double t, double s, Side side) const = 0;
};

/// Closed-form Green kernel G_eps of u'' - eps^2 p u = phi under the given
/// boundary kind. With r = eps sqrt(p):
///
///   first     -exp(-r|t-s|) (1-exp(-2r min)) (1-exp(-2r(1-max))) / (2r (1-exp(-2r)))
///   second    -exp(-r|t-s|) (1+exp(-2r min)) (1+exp(-2r(1-max))) / (2r (1-exp(-2r)))
///   periodic  -(exp(-r|t-s|) + exp(-r(1-|t-s|))) / (2r (1-exp(-r)))
///
/// All (1 - exp(-a)) factors go through expm1 so the eps -> 0 forms keep full
/// relative accuracy. eps = 0 is rejected; use upsilon or -1/p instead.
class GreenKernel final : public KernelFunction {
 public:
  GreenKernel(BoundaryKind kind, double eps, double p,
              NeumannVariant variant = NeumannVariant::Corrected);

  BoundaryKind kind() const override { return kind_; }
  double ode_coefficient() const override { return rate_ * rate_; }
  double value(double t, double s) const override;
  double branch_value(double t, double s, Side side) const override;
  double dt(double t, double s, Side side) const override;
  double dtt(double t, double s, Side side) const override;

  double eps() const noexcept { return eps_; }
  double p() const noexcept { return p_; }
  double rate() const noexcept { return rate_; }
  NeumannVariant variant() const noexcept { return variant_; }

 private:
  // Closed form in terms of (lo, hi) = (min, max) for the symmetric value, or
  // (s, t) / (t, s) for the above / below branch.
  double form(double lo, double hi) const;
  double dt_above(double t, double s) const;
  double dt_below(double t, double s) const;
  double dtt_above(double t, double s) const;
  double dtt_below(double t, double s) const;

  BoundaryKind kind_;
  NeumannVariant variant_;
  double eps_;
  double p_;
  double rate_;
  double scale_;  // 1 / (2 r (1 - e^{-2r})) or 1 / (2 r (1 - e^{-r}))
};

double green_eval(BoundaryKind kind, double eps, double p, double t, double s);
double green_dt(BoundaryKind kind, double eps, double p, double t, double s, Side side);

/// Limit kernel -min(t,s) (1 - max(t,s)) of the first-kind family.
double upsilon(double t, double s);
double upsilon_dt(double t, double s, Side side);

/// Sup-norm distances whose eps -> 0 limits vanish.
///   first:          d0 = |G - Y|_*,        d1 = |d/dt (G - Y)|_{1,*}
///   second/periodic d0 = |eps^2 G + 1/p|_*, d1 = eps^2 |dG/dt|_{1,*}
/// Maxima over grid nodes; d1 over off-diagonal pairs only.
struct SupNormDiff {
  double d0 = 0.0;
  double d1 = 0.0;
};

SupNormDiff sup_norm_diff(BoundaryKind kind, double eps, double p, const Grid& grid);

/// Grid-sampled kernel with the diagonal t-derivative stored for both sides,
/// so integrals can be split at the kink without interpolating across it.
class KernelTable {
 public:
  KernelTable(const GreenKernel& kernel, const Grid& grid);
  KernelTable(BoundaryKind kind, double eps, double p, const Grid& grid,
              NeumannVariant variant = NeumannVariant::Corrected);

  const Grid& grid() const noexcept { return grid_; }
  BoundaryKind kind() const noexcept { return kind_; }
  double eps() const noexcept { return eps_; }
  double p() const noexcept { return p_; }

  double value(std::size_t i, std::size_t j) const noexcept { return values_[i * stride_ + j]; }
  /// t-derivative at (t_i, s_j); `side` matters only for i == j.
  double dt(std::size_t i, std::size_t j, Side side = Side::FromBelow) const noexcept {
    if (i == j && side == Side::FromAbove) return diag_above_[i];
    return dt_[i * stride_ + j];
  }
  /// Kernel values G(t_i, .) over the grid.
  std::span<const double> row(std::size_t i) const noexcept {
    return {values_.data() + i * stride_, grid_.size()};
  }
  /// G_t(t_i, .) over the grid, natural branch off the diagonal and the
  /// FromBelow value on it.
  std::span<const double> dt_row(std::size_t i) const noexcept {
    return {dt_.data() + i * stride_, grid_.size()};
  }

 private:
  Grid grid_;
  BoundaryKind kind_;
  double eps_;
  double p_;
  std::size_t stride_;
  std::vector<double> values_;
  std::vector<double> dt_;  // off-diagonal natural branch; diagonal from below
  std::vector<double> diag_above_;
};

struct PropertyCheck {
  std::string name;
  bool passed = false;
  double max_residual = 0.0;
  double tolerance = 0.0;
};

struct CertifyTolerances {
  double continuity = 1e-12;
  double ode_relative = 1e-8;
  double symmetry = 1e-12;
  double jump = 1e-10;
  double boundary = 1e-10;
};

/// Numerical certificate of the defining Green-function properties on grid
/// nodes: continuity across the diagonal, off-diagonal ODE residual
/// |G_tt - c G| / (1 + |G|) for |t - s| >= 2h, symmetry, unit jump of G_t at
/// t = s, and the boundary conditions of the kernel's kind applied to
/// t -> G(t, s). Value-type boundary residuals are relative to 1 + |G|.
struct GreenCertificate {
  std::vector<PropertyCheck> checks;

  bool all_passed() const noexcept;
  const PropertyCheck& at(const std::string& name) const;
};

GreenCertificate certify_green(const KernelFunction& kernel, const Grid& grid,
                               const CertifyTolerances& tol = {});
GreenCertificate certify_green(BoundaryKind kind, double eps, double p, const Grid& grid,
                               NeumannVariant variant = NeumannVariant::Corrected);

}  // namespace sbvp
