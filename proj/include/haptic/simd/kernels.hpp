#pragma once

// Data-parallel inner loops with a scalar reference path and vector
// variants (AVX2+FMA on x86-64, NEON on AArch64) chosen at runtime.
// Every variant is tested for equivalence against the scalar path.

#include <span>
#include <string_view>

namespace haptic::simd {

enum class Isa { Scalar, Avx2, Neon };

std::string_view to_string(Isa isa) noexcept;

/// True when the variant is compiled in and the CPU can run it.
bool is_supported(Isa isa) noexcept;

/// Best supported variant, unless HAPTIC_SIMD=scalar|avx2|neon overrides it.
Isa detected_isa() noexcept;

Isa active_isa() noexcept;

/// Switch the process-wide variant. Throws haptic::Error for unsupported ISAs.
void set_isa(Isa isa);

double dot(std::span<const double> a, std::span<const double> b);

/// Elementwise J0(x) / J1(x) for x >= 0. Inputs are not validated here;
/// use haptic::bessel_j for checked scalar evaluation.
void bessel_j0(std::span<const double> x, std::span<double> out);
void bessel_j1(std::span<const double> x, std::span<double> out);

}  // namespace haptic::simd
