#include <atomic>
#include <cstdlib>
#include <string>

#include "haptic/error.hpp"
#include "haptic/simd/kernels.hpp"
#include "kernels_impl.hpp"

namespace haptic::simd {

namespace {

struct KernelTable {
  double (*dot)(const double*, const double*, std::size_t) noexcept;
  void (*j0)(const double*, double*, std::size_t) noexcept;
  void (*j1)(const double*, double*, std::size_t) noexcept;
};

constexpr KernelTable kScalar{detail::dot_scalar, detail::j0_scalar, detail::j1_scalar};
#if defined(HAPTIC_HAVE_AVX2)
constexpr KernelTable kAvx2{detail::dot_avx2, detail::j0_avx2, detail::j1_avx2};
#endif
#if defined(HAPTIC_HAVE_NEON)
constexpr KernelTable kNeon{detail::dot_neon, detail::j0_neon, detail::j1_neon};
#endif

const KernelTable& table_for(Isa isa) {
  switch (isa) {
#if defined(HAPTIC_HAVE_AVX2)
    case Isa::Avx2: return kAvx2;
#endif
#if defined(HAPTIC_HAVE_NEON)
    case Isa::Neon: return kNeon;
#endif
    default: return kScalar;
  }
}

Isa best_supported() noexcept {
  if (is_supported(Isa::Avx2)) return Isa::Avx2;
  if (is_supported(Isa::Neon)) return Isa::Neon;
  return Isa::Scalar;
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{detected_isa()};
  return isa;
}

}  // namespace

std::string_view to_string(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

bool is_supported(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if defined(HAPTIC_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(HAPTIC_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa detected_isa() noexcept {
  if (const char* env = std::getenv("HAPTIC_SIMD")) {
    const std::string want(env);
    for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon}) {
      if (want == to_string(isa) && is_supported(isa)) return isa;
    }
  }
  return best_supported();
}

Isa active_isa() noexcept { return active().load(std::memory_order_relaxed); }

void set_isa(Isa isa) {
  if (!is_supported(isa)) {
    throw Error(ErrorCode::DomainError, "SIMD variant " + std::string(to_string(isa)) +
                                            " is not available on this build/CPU");
  }
  active().store(isa, std::memory_order_relaxed);
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::DomainError, "dot: length mismatch");
  return table_for(active_isa()).dot(a.data(), b.data(), a.size());
}

void bessel_j0(std::span<const double> x, std::span<double> out) {
  if (x.size() != out.size()) throw Error(ErrorCode::DomainError, "bessel_j0: length mismatch");
  table_for(active_isa()).j0(x.data(), out.data(), x.size());
}

void bessel_j1(std::span<const double> x, std::span<double> out) {
  if (x.size() != out.size()) throw Error(ErrorCode::DomainError, "bessel_j1: length mismatch");
  table_for(active_isa()).j1(x.data(), out.data(), x.size());
}

}  // namespace haptic::simd
