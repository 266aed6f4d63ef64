#include <cmath>

#include "sbvp/simd/kernels.hpp"

namespace sbvp::simd::detail {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void matvec(const double* A, std::size_t rows, std::size_t cols, std::size_t ld, const double* x,
            double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot(A + r * ld, x, cols);
}

void matmat(const double* A, std::size_t rows, std::size_t cols, std::size_t ld, const double* X,
            std::size_t ldx, std::size_t nrhs, double* Y, std::size_t ldy) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* a = A + r * ld;
    double* y = Y + r * ldy;
    for (std::size_t k = 0; k < nrhs; ++k) y[k] = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      const double* x = X + c * ldx;
      for (std::size_t k = 0; k < nrhs; ++k) y[k] += a[c] * x[k];
    }
  }
}

double max_abs_diff(const double* a, const double* b, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = std::abs(a[i] - b[i]);
    if (d > m) m = d;
  }
  return m;
}

}  // namespace

const KernelSet& scalar_kernels() noexcept {
  static const KernelSet set{Backend::Scalar, &dot, &matvec, &matmat, &max_abs_diff};
  return set;
}

}  // namespace sbvp::simd::detail
