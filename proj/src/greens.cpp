#include "sbvp/greens.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "sbvp/errors.hpp"
#include "sbvp/parallel.hpp"

namespace sbvp {
namespace {

// 1 - e^{-a} and 1 + e^{-a}.
inline double om(double a) { return -std::expm1(-a); }
inline double op(double a) { return 1.0 + std::exp(-a); }

void check_unit(double t, double s) {
  if (!(t >= 0.0 && t <= 1.0 && s >= 0.0 && s <= 1.0)) {
    throw DomainError(fmt::format("kernel argument ({}, {}) outside the unit square", t, s));
  }
}

bool above(double t, double s, Side side) { return t > s || (t == s && side == Side::FromAbove); }

}  // namespace

GreenKernel::GreenKernel(BoundaryKind kind, double eps, double p, NeumannVariant variant)
    : kind_(kind), variant_(variant), eps_(eps), p_(p) {
  if (!(eps > 0.0)) throw DomainError(fmt::format("eps = {} must be positive", eps));
  if (!(p > 0.0)) throw DomainError(fmt::format("p = {} must be positive", p));
  rate_ = eps * std::sqrt(p);
  scale_ = kind == BoundaryKind::Periodic ? 1.0 / (2.0 * rate_ * om(rate_))
                                          : 1.0 / (2.0 * rate_ * om(2.0 * rate_));
}

double GreenKernel::form(double lo, double hi) const {
  const double r = rate_;
  const double d = hi - lo;
  switch (kind_) {
    case BoundaryKind::FirstKind:
      return -scale_ * std::exp(-r * d) * om(2.0 * r * lo) * om(2.0 * r * (1.0 - hi));
    case BoundaryKind::SecondKind:
      if (variant_ == NeumannVariant::AsPrinted) {
        return -scale_ * std::exp(-r * d) * op(2.0 * r * lo) * op(2.0 * r * hi);
      }
      return -scale_ * std::exp(-r * d) * op(2.0 * r * lo) * op(2.0 * r * (1.0 - hi));
    case BoundaryKind::Periodic:
      return -scale_ * (std::exp(-r * d) + std::exp(-r * (1.0 - d)));
  }
  return 0.0;
}

double GreenKernel::value(double t, double s) const {
  check_unit(t, s);
  return form(std::min(t, s), std::max(t, s));
}

double GreenKernel::branch_value(double t, double s, Side side) const {
  check_unit(t, s);
  return side == Side::FromAbove ? form(s, t) : form(t, s);
}

double GreenKernel::dt_above(double t, double s) const {
  const double r = rate_;
  const double e = std::exp(-r * (t - s));
  switch (kind_) {
    case BoundaryKind::FirstKind:
      return scale_ * r * om(2.0 * r * s) * e * op(2.0 * r * (1.0 - t));
    case BoundaryKind::SecondKind:
      if (variant_ == NeumannVariant::AsPrinted) {
        return scale_ * r * op(2.0 * r * s) * e * (1.0 + 3.0 * std::exp(-2.0 * r * t));
      }
      return scale_ * r * op(2.0 * r * s) * e * om(2.0 * r * (1.0 - t));
    case BoundaryKind::Periodic:
      return scale_ * r * e * om(r * (1.0 - 2.0 * (t - s)));
  }
  return 0.0;
}

double GreenKernel::dt_below(double t, double s) const {
  const double r = rate_;
  const double e = std::exp(-r * (s - t));
  switch (kind_) {
    case BoundaryKind::FirstKind:
      return -scale_ * r * e * op(2.0 * r * t) * om(2.0 * r * (1.0 - s));
    case BoundaryKind::SecondKind:
      if (variant_ == NeumannVariant::AsPrinted) {
        return -scale_ * r * e * om(2.0 * r * t) * op(2.0 * r * s);
      }
      return -scale_ * r * e * om(2.0 * r * t) * op(2.0 * r * (1.0 - s));
    case BoundaryKind::Periodic:
      return -scale_ * r * e * om(r * (1.0 - 2.0 * (s - t)));
  }
  return 0.0;
}

double GreenKernel::dtt_above(double t, double s) const {
  const double r = rate_;
  const double r2 = r * r;
  const double e = std::exp(-r * (t - s));
  switch (kind_) {
    case BoundaryKind::FirstKind:
      return -scale_ * r2 * om(2.0 * r * s) * e * om(2.0 * r * (1.0 - t));
    case BoundaryKind::SecondKind:
      if (variant_ == NeumannVariant::AsPrinted) {
        return -scale_ * r2 * op(2.0 * r * s) * e * (1.0 + 9.0 * std::exp(-2.0 * r * t));
      }
      return -scale_ * r2 * op(2.0 * r * s) * e * op(2.0 * r * (1.0 - t));
    case BoundaryKind::Periodic:
      return -scale_ * r2 * (e + std::exp(-r * (1.0 - (t - s))));
  }
  return 0.0;
}

double GreenKernel::dtt_below(double t, double s) const {
  const double r = rate_;
  const double r2 = r * r;
  const double e = std::exp(-r * (s - t));
  switch (kind_) {
    case BoundaryKind::FirstKind:
      return -scale_ * r2 * e * om(2.0 * r * t) * om(2.0 * r * (1.0 - s));
    case BoundaryKind::SecondKind:
      if (variant_ == NeumannVariant::AsPrinted) {
        return -scale_ * r2 * e * op(2.0 * r * t) * op(2.0 * r * s);
      }
      return -scale_ * r2 * e * op(2.0 * r * t) * op(2.0 * r * (1.0 - s));
    case BoundaryKind::Periodic:
      return -scale_ * r2 * (e + std::exp(-r * (1.0 - (s - t))));
  }
  return 0.0;
}

double GreenKernel::dt(double t, double s, Side side) const {
  check_unit(t, s);
  return above(t, s, side) ? dt_above(t, s) : dt_below(t, s);
}

double GreenKernel::dtt(double t, double s, Side side) const {
  check_unit(t, s);
  return above(t, s, side) ? dtt_above(t, s) : dtt_below(t, s);
}

double green_eval(BoundaryKind kind, double eps, double p, double t, double s) {
  return GreenKernel(kind, eps, p).value(t, s);
}

double green_dt(BoundaryKind kind, double eps, double p, double t, double s, Side side) {
  return GreenKernel(kind, eps, p).dt(t, s, side);
}

double upsilon(double t, double s) {
  check_unit(t, s);
  return -std::min(t, s) * (1.0 - std::max(t, s));
}

double upsilon_dt(double t, double s, Side side) {
  check_unit(t, s);
  return above(t, s, side) ? s : -(1.0 - s);
}

SupNormDiff sup_norm_diff(BoundaryKind kind, double eps, double p, const Grid& grid) {
  if (grid.intervals() < 64) throw DomainError("sup_norm_diff needs a grid with >= 64 intervals");
  const GreenKernel g(kind, eps, p);
  const double e2 = eps * eps;
  const double inv_p = 1.0 / p;
  SupNormDiff out;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid.point(i);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double s = grid.point(j);
      if (kind == BoundaryKind::FirstKind) {
        out.d0 = std::max(out.d0, std::abs(g.value(t, s) - upsilon(t, s)));
        if (i != j) {
          out.d1 = std::max(out.d1, std::abs(g.dt(t, s, Side::FromBelow) -
                                             upsilon_dt(t, s, Side::FromBelow)));
        }
      } else {
        out.d0 = std::max(out.d0, std::abs(e2 * g.value(t, s) + inv_p));
        if (i != j) out.d1 = std::max(out.d1, e2 * std::abs(g.dt(t, s, Side::FromBelow)));
      }
    }
  }
  return out;
}

KernelTable::KernelTable(const GreenKernel& kernel, const Grid& grid)
    : grid_(grid),
      kind_(kernel.kind()),
      eps_(kernel.eps()),
      p_(kernel.p()),
      stride_(grid.size()),
      values_(stride_ * stride_),
      dt_(stride_ * stride_),
      diag_above_(stride_) {
  parallel_for(stride_, [&](std::size_t i) {
    const double t = grid_.point(i);
    for (std::size_t j = 0; j < stride_; ++j) {
      const double s = grid_.point(j);
      values_[i * stride_ + j] = kernel.value(t, s);
      dt_[i * stride_ + j] = kernel.dt(t, s, Side::FromBelow);
    }
    diag_above_[i] = kernel.dt(t, t, Side::FromAbove);
  });
}

KernelTable::KernelTable(BoundaryKind kind, double eps, double p, const Grid& grid,
                         NeumannVariant variant)
    : KernelTable(GreenKernel(kind, eps, p, variant), grid) {}

bool GreenCertificate::all_passed() const noexcept {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

const PropertyCheck& GreenCertificate::at(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return c;
  }
  throw DomainError(fmt::format("no property check named '{}'", name));
}

GreenCertificate certify_green(const KernelFunction& kernel, const Grid& grid,
                               const CertifyTolerances& tol) {
  const std::size_t N = grid.size();
  const double c = kernel.ode_coefficient();
  double continuity = 0.0;
  double ode = 0.0;
  double symmetry = 0.0;
  double jump = 0.0;
  double boundary = 0.0;

  for (std::size_t i = 0; i < N; ++i) {
    const double t = grid.point(i);
    const double lo = kernel.branch_value(t, t, Side::FromBelow);
    const double hi = kernel.branch_value(t, t, Side::FromAbove);
    continuity = std::max(continuity, std::abs(hi - lo) / (1.0 + std::abs(lo)));
    jump = std::max(jump, std::abs(kernel.dt(t, t, Side::FromAbove) -
                                   kernel.dt(t, t, Side::FromBelow) - 1.0));
    for (std::size_t j = 0; j < N; ++j) {
      const double s = grid.point(j);
      const double g = kernel.value(t, s);
      symmetry = std::max(symmetry, std::abs(g - kernel.value(s, t)));
      if ((i > j ? i - j : j - i) >= 2) {
        ode = std::max(ode, std::abs(kernel.dtt(t, s, Side::FromBelow) - c * g) / (1.0 + std::abs(g)));
      }
    }
  }

  // At t = 0 the t <= s branch applies and at t = 1 the t >= s branch.
  for (std::size_t j = 0; j < N; ++j) {
    const double s = grid.point(j);
    double r = 0.0;
    switch (kernel.kind()) {
      case BoundaryKind::FirstKind:
        r = std::max(std::abs(kernel.value(0.0, s)), std::abs(kernel.value(1.0, s)));
        break;
      case BoundaryKind::SecondKind:
        r = std::max(std::abs(kernel.dt(0.0, s, Side::FromBelow)),
                     std::abs(kernel.dt(1.0, s, Side::FromAbove)));
        break;
      case BoundaryKind::Periodic: {
        const double g0 = kernel.value(0.0, s);
        const double g1 = kernel.value(1.0, s);
        r = std::max(std::abs(g0 - g1) / (1.0 + std::abs(g0)),
                     std::abs(kernel.dt(0.0, s, Side::FromBelow) - kernel.dt(1.0, s, Side::FromAbove)));
        break;
      }
    }
    boundary = std::max(boundary, r);
  }

  GreenCertificate cert;
  cert.checks = {
      {"continuity", continuity <= tol.continuity, continuity, tol.continuity},
      {"ode_residual", ode <= tol.ode_relative, ode, tol.ode_relative},
      {"symmetry", symmetry <= tol.symmetry, symmetry, tol.symmetry},
      {"unit_jump", jump <= tol.jump, jump, tol.jump},
      {"boundary_conditions", boundary <= tol.boundary, boundary, tol.boundary},
  };
  return cert;
}

GreenCertificate certify_green(BoundaryKind kind, double eps, double p, const Grid& grid,
                               NeumannVariant variant) {
  return certify_green(GreenKernel(kind, eps, p, variant), grid);
}

}  // namespace sbvp
