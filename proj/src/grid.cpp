#include "sbvp/grid.hpp"

#include <cmath>

#include "sbvp/errors.hpp"

namespace sbvp {

Grid::Grid(std::size_t intervals) : n_(intervals) {
  if (n_ == 0) throw DomainError("grid needs at least one interval");
  h_ = 1.0 / static_cast<double>(n_);
  points_.resize(n_ + 1);
  weights_.assign(n_ + 1, h_);
  for (std::size_t i = 0; i <= n_; ++i) {
    points_[i] = static_cast<double>(i) / static_cast<double>(n_);
  }
  weights_.front() = 0.5 * h_;
  weights_.back() = 0.5 * h_;
}

std::size_t Grid::nearest(double t) const noexcept {
  if (!(t > 0.0)) return 0;
  if (t >= 1.0) return n_;
  return static_cast<std::size_t>(std::lround(t * static_cast<double>(n_)));
}

double trapezoid(const Grid& grid, std::span<const double> values) {
  if (values.size() != grid.size()) throw DomainError("trapezoid: values do not match grid");
  const auto w = grid.weights();
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) acc += w[i] * values[i];
  return acc;
}

std::vector<double> cumulative_trapezoid(const Grid& grid, std::span<const double> values) {
  if (values.size() != grid.size()) {
    throw DomainError("cumulative_trapezoid: values do not match grid");
  }
  std::vector<double> out(values.size(), 0.0);
  const double half_h = 0.5 * grid.step();
  for (std::size_t k = 1; k < values.size(); ++k) {
    out[k] = out[k - 1] + half_h * (values[k - 1] + values[k]);
  }
  return out;
}

}  // namespace sbvp
