#pragma once

#include <array>
#include <cstdint>

namespace sbvp {

/// Philox4x32-10 counter-based block cipher (Salmon et al., Random123).
/// Stateless: the output is a pure function of (counter, key), which is what
/// makes Monte Carlo batches order-independent.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter counter, Key key) noexcept;
};

/// Standard normal quantile, Wichura's AS241 (PPND16) rational
/// approximation; relative accuracy about 1e-16 on (0, 1).
double normal_quantile(double u) noexcept;

/// Deterministic standard-normal stream keyed by (seed, stream). Draw k is
/// computed directly from its index, so streams can be read in any order.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t stream) noexcept;

  /// Uniform in the open interval (0, 1) with 53 random bits.
  double uniform(std::uint64_t k) const noexcept;
  double normal(std::uint64_t k) const noexcept { return normal_quantile(uniform(k)); }

 private:
  Philox4x32::Key key_;
  std::uint64_t stream_;
};

}  // namespace sbvp
