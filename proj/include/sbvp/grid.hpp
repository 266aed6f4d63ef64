#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sbvp {

/// Uniform partition of [0,1] into n intervals; n+1 nodes t_i = i/n.
class Grid {
 public:
  explicit Grid(std::size_t intervals);

  std::size_t intervals() const noexcept { return n_; }
  std::size_t size() const noexcept { return n_ + 1; }
  double step() const noexcept { return h_; }
  double point(std::size_t i) const noexcept { return points_[i]; }
  std::span<const double> points() const noexcept { return points_; }

  /// Composite trapezoid weights over [0,1]: h/2, h, ..., h, h/2.
  std::span<const double> weights() const noexcept { return weights_; }

  /// Node closest to t, clamped to [0, n].
  std::size_t nearest(double t) const noexcept;

  friend bool operator==(const Grid& a, const Grid& b) noexcept { return a.n_ == b.n_; }

 private:
  std::size_t n_;
  double h_;
  std::vector<double> points_;
  std::vector<double> weights_;
};

/// Trapezoid rule of grid-sampled values over [0,1].
double trapezoid(const Grid& grid, std::span<const double> values);

/// Running trapezoid integral: out[k] = integral over [0, t_k].
std::vector<double> cumulative_trapezoid(const Grid& grid, std::span<const double> values);

/// Samples `fn` at every grid node.
template <class Fn>
std::vector<double> sample(const Grid& grid, Fn&& fn) {
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fn(grid.point(i));
  return out;
}

}  // namespace sbvp
