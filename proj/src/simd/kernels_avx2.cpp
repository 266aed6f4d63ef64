// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include <cmath>

#include "sbvp/simd/kernels.hpp"

namespace sbvp::simd::detail {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  __m256d acc2 = _mm256_setzero_pd();
  __m256d acc3 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    acc2 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 8), _mm256_loadu_pd(b + i + 8), acc2);
    acc3 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 12), _mm256_loadu_pd(b + i + 12), acc3);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double acc = hsum(_mm256_add_pd(_mm256_add_pd(acc0, acc1), _mm256_add_pd(acc2, acc3)));
  for (; i < n; ++i) acc = std::fma(a[i], b[i], acc);
  return acc;
}

void matvec(const double* A, std::size_t rows, std::size_t cols, std::size_t ld, const double* x,
            double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot(A + r * ld, x, cols);
}

// Row-by-row outer product accumulation; columns of X are the right-hand
// sides, contiguous in k so four of them share one register.
void matmat(const double* A, std::size_t rows, std::size_t cols, std::size_t ld, const double* X,
            std::size_t ldx, std::size_t nrhs, double* Y, std::size_t ldy) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* a = A + r * ld;
    double* y = Y + r * ldy;
    std::size_t k = 0;
    for (; k + 8 <= nrhs; k += 8) {
      __m256d y0 = _mm256_setzero_pd();
      __m256d y1 = _mm256_setzero_pd();
      for (std::size_t c = 0; c < cols; ++c) {
        const __m256d av = _mm256_broadcast_sd(a + c);
        y0 = _mm256_fmadd_pd(av, _mm256_loadu_pd(X + c * ldx + k), y0);
        y1 = _mm256_fmadd_pd(av, _mm256_loadu_pd(X + c * ldx + k + 4), y1);
      }
      _mm256_storeu_pd(y + k, y0);
      _mm256_storeu_pd(y + k + 4, y1);
    }
    for (; k + 4 <= nrhs; k += 4) {
      __m256d y0 = _mm256_setzero_pd();
      for (std::size_t c = 0; c < cols; ++c) {
        y0 = _mm256_fmadd_pd(_mm256_broadcast_sd(a + c), _mm256_loadu_pd(X + c * ldx + k), y0);
      }
      _mm256_storeu_pd(y + k, y0);
    }
    for (; k < nrhs; ++k) {
      double acc = 0.0;
      for (std::size_t c = 0; c < cols; ++c) acc = std::fma(a[c], X[c * ldx + k], acc);
      y[k] = acc;
    }
  }
}

double max_abs_diff(const double* a, const double* b, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    m = _mm256_max_pd(m, _mm256_andnot_pd(sign, d));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, m);
  double out = lanes[0];
  for (int l = 1; l < 4; ++l) out = lanes[l] > out ? lanes[l] : out;
  for (; i < n; ++i) {
    const double d = std::abs(a[i] - b[i]);
    out = d > out ? d : out;
  }
  return out;
}

}  // namespace

const KernelSet& avx2_kernels() noexcept {
  static const KernelSet set{Backend::Avx2, &dot, &matvec, &matmat, &max_abs_diff};
  return set;
}

}  // namespace sbvp::simd::detail
