#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace sbvp::simd {

/// Instruction-set variants of the inner-loop kernels. The scalar set is
/// the reference; vector sets must agree with it to rounding (reassociated
/// sums), which the equivalence tests pin per kernel.
enum class Backend { Scalar, Avx2, Neon };

std::string_view to_string(Backend backend) noexcept;

struct KernelSet {
  Backend backend;
  /// sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  /// y[r] = sum_c A[r * ld + c] * x[c] for r < rows
  void (*matvec)(const double* A, std::size_t rows, std::size_t cols, std::size_t ld,
                 const double* x, double* y);
  /// Y[r * ldy + k] = sum_c A[r * ld + c] * X[c * ldx + k] for k < nrhs
  void (*matmat)(const double* A, std::size_t rows, std::size_t cols, std::size_t ld,
                 const double* X, std::size_t ldx, std::size_t nrhs, double* Y, std::size_t ldy);
  /// max_i |a[i] - b[i]|
  double (*max_abs_diff)(const double* a, const double* b, std::size_t n);
};

/// Whether the backend was compiled in and the running CPU supports it.
bool available(Backend backend) noexcept;
std::vector<Backend> available_backends();

/// Kernel set of a specific backend; throws DomainError when unavailable.
const KernelSet& kernels_for(Backend backend);

/// Active kernel set. Chosen once at first use: $STOCH_BVP_SIMD
/// (scalar|avx2|neon|auto) if set, else the widest available backend.
const KernelSet& active();
Backend active_backend();
void set_backend(Backend backend);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  return active().max_abs_diff(a.data(), b.data(), a.size());
}

namespace detail {
const KernelSet& scalar_kernels() noexcept;
#if defined(SBVP_HAVE_AVX2)
const KernelSet& avx2_kernels() noexcept;
#endif
#if defined(SBVP_HAVE_NEON)
const KernelSet& neon_kernels() noexcept;
#endif
}  // namespace detail

}  // namespace sbvp::simd
