#include <atomic>
#include <cstdlib>
#include <string>

#include <fmt/format.h>

#include "sbvp/errors.hpp"
#include "sbvp/simd/kernels.hpp"

namespace sbvp::simd {
namespace {

bool cpu_supports(Backend backend) noexcept {
  switch (backend) {
    case Backend::Scalar:
      return true;
    case Backend::Avx2:
#if defined(SBVP_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Backend::Neon:
#if defined(SBVP_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelSet* lookup(Backend backend) noexcept {
  if (!cpu_supports(backend)) return nullptr;
  switch (backend) {
    case Backend::Scalar:
      return &detail::scalar_kernels();
    case Backend::Avx2:
#if defined(SBVP_HAVE_AVX2)
      return &detail::avx2_kernels();
#else
      return nullptr;
#endif
    case Backend::Neon:
#if defined(SBVP_HAVE_NEON)
      return &detail::neon_kernels();
#else
      return nullptr;
#endif
  }
  return nullptr;
}

const KernelSet* widest() noexcept {
  for (Backend b : {Backend::Avx2, Backend::Neon}) {
    if (const auto* k = lookup(b)) return k;
  }
  return &detail::scalar_kernels();
}

const KernelSet* initial() {
  const char* env = std::getenv("STOCH_BVP_SIMD");
  if (env == nullptr) return widest();
  const std::string want(env);
  if (want == "auto" || want.empty()) return widest();
  for (Backend b : {Backend::Scalar, Backend::Avx2, Backend::Neon}) {
    if (want == to_string(b)) {
      if (const auto* k = lookup(b)) return k;
      throw DomainError(fmt::format("STOCH_BVP_SIMD={} is not available on this machine", want));
    }
  }
  throw DomainError(fmt::format("STOCH_BVP_SIMD={} is not a known backend", want));
}

std::atomic<const KernelSet*>& current() {
  static std::atomic<const KernelSet*> set{initial()};
  return set;
}

}  // namespace

std::string_view to_string(Backend backend) noexcept {
  switch (backend) {
    case Backend::Scalar:
      return "scalar";
    case Backend::Avx2:
      return "avx2";
    case Backend::Neon:
      return "neon";
  }
  return "scalar";
}

bool available(Backend backend) noexcept { return lookup(backend) != nullptr; }

std::vector<Backend> available_backends() {
  std::vector<Backend> out;
  for (Backend b : {Backend::Scalar, Backend::Avx2, Backend::Neon}) {
    if (available(b)) out.push_back(b);
  }
  return out;
}

const KernelSet& kernels_for(Backend backend) {
  const auto* k = lookup(backend);
  if (k == nullptr) {
    throw DomainError(fmt::format("SIMD backend '{}' is not available", to_string(backend)));
  }
  return *k;
}

const KernelSet& active() { return *current().load(std::memory_order_acquire); }

Backend active_backend() { return active().backend; }

void set_backend(Backend backend) { current().store(&kernels_for(backend), std::memory_order_release); }

}  // namespace sbvp::simd
