#include "sbvp/model.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "sbvp/errors.hpp"

namespace sbvp {

std::string_view to_string(BoundaryKind kind) noexcept {
  switch (kind) {
    case BoundaryKind::FirstKind:
      return "first";
    case BoundaryKind::SecondKind:
      return "second";
    case BoundaryKind::Periodic:
      return "periodic";
  }
  return "first";
}

BoundaryKind parse_boundary_kind(std::string_view name) {
  if (name == "first") return BoundaryKind::FirstKind;
  if (name == "second") return BoundaryKind::SecondKind;
  if (name == "periodic") return BoundaryKind::Periodic;
  throw ConfigError("config_parse_error",
                    fmt::format("unknown boundary kind '{}' (first|second|periodic)", name));
}

double delta_norm_squared(const ProblemSpec& spec, const Grid& grid) {
  const auto sq = sample(grid, [&](double t) {
    const double d = spec.delta(t);
    return d * d;
  });
  return trapezoid(grid, sq);
}

ValidationReport validate_spec(const ProblemSpec& spec, const LatticeOptions& lattice) {
  if (lattice.nt < 2 || lattice.nx < 2) throw DomainError("validation lattice needs >= 2 nodes");
  if (!(lattice.x_range > 0.0)) throw DomainError("validation x_range must be positive");
  if (!(spec.p > 0.0)) throw SpecError("invalid_p", fmt::format("p = {} must be positive", spec.p));
  if (!(spec.beta < spec.p)) {
    throw SpecError("condition_c2_violated",
                    fmt::format("beta = {} is not below p = {}", spec.beta, spec.p));
  }

  ValidationReport report;
  report.beta_below_p = {true, spec.beta, spec.p};

  double max_b = 0.0;
  double max_bx = 0.0;
  double max_fd_err = 0.0;
  const double hfd = lattice.fd_step;
  for (std::size_t i = 0; i < lattice.nt; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(lattice.nt - 1);
    for (std::size_t j = 0; j < lattice.nx; ++j) {
      const double x = -lattice.x_range +
                       2.0 * lattice.x_range * static_cast<double>(j) /
                           static_cast<double>(lattice.nx - 1);
      const double b = spec.B(t, x);
      const double bx = spec.B_x(t, x);
      max_b = std::max(max_b, std::abs(b));
      max_bx = std::max(max_bx, std::abs(bx));
      const double fd = (spec.B(t, x + hfd) - spec.B(t, x - hfd)) / (2.0 * hfd);
      max_fd_err = std::max(max_fd_err, std::abs(bx - fd) / std::max(1.0, std::abs(bx)));
    }
  }
  report.sup_B = {max_b <= spec.beta_star, max_b, spec.beta_star};
  report.sup_B_x = {max_bx <= spec.beta && max_bx < spec.p, max_bx, spec.beta};
  report.derivative_matches = {max_fd_err <= lattice.fd_rel_tol, max_fd_err, lattice.fd_rel_tol};
  return report;
}

void require_valid(const ProblemSpec& spec, const LatticeOptions& lattice) {
  const auto report = validate_spec(spec, lattice);
  if (!report.sup_B.passed) {
    throw SpecError("condition_c1_violated",
                    fmt::format("lattice max |B| = {} exceeds beta_star = {}",
                                report.sup_B.measured, spec.beta_star));
  }
  if (!report.sup_B_x.passed) {
    throw SpecError("condition_c2_violated",
                    fmt::format("lattice max |B_x| = {} exceeds beta = {} (p = {})",
                                report.sup_B_x.measured, spec.beta, spec.p));
  }
  if (!report.derivative_matches.passed) {
    throw SpecError("derivative_mismatch",
                    fmt::format("B_x disagrees with central differences of B (rel err {})",
                                report.derivative_matches.measured));
  }
}

}  // namespace sbvp
