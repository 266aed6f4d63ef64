#include <arm_neon.h>

#include <cmath>

#include "sbvp/simd/kernels.hpp"

namespace sbvp::simd::detail {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) acc = std::fma(a[i], b[i], acc);
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
    std::size_t k = 0;
    for (; k + 2 <= nrhs; k += 2) {
      float64x2_t acc = vdupq_n_f64(0.0);
      for (std::size_t c = 0; c < cols; ++c) acc = vfmaq_n_f64(acc, vld1q_f64(X + c * ldx + k), a[c]);
      vst1q_f64(y + k, acc);
    }
    for (; k < nrhs; ++k) {
      double acc = 0.0;
      for (std::size_t c = 0; c < cols; ++c) acc = std::fma(a[c], X[c * ldx + k], acc);
      y[k] = acc;
    }
  }
}

double max_abs_diff(const double* a, const double* b, std::size_t n) {
  float64x2_t m = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) m = vmaxq_f64(m, vabdq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  double out = vmaxvq_f64(m);
  for (; i < n; ++i) {
    const double d = std::abs(a[i] - b[i]);
    out = d > out ? d : out;
  }
  return out;
}

}  // namespace

const KernelSet& neon_kernels() noexcept {
  static const KernelSet set{Backend::Neon, &dot, &matvec, &matmat, &max_abs_diff};
  return set;
}

}  // namespace sbvp::simd::detail
