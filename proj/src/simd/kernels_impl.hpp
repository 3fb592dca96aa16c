#pragma once

// Raw-pointer kernel entry points shared by the dispatch layer and the
// per-ISA translation units. ISA-specific TUs include only this header and
// intrinsics so no inline library code is compiled with wider ISA flags.

#include <cstddef>

namespace haptic::simd::detail {

// Regime boundaries shared by all Bessel variants.
inline constexpr double kSeriesLimit = 8.0;
inline constexpr double kAsymptoticStart = 25.0;
inline constexpr int kSeriesTerms = 28;
inline constexpr int kAsymptoticTerms = 16;  // per P and Q

struct BesselTables {
  double j0_series[kSeriesTerms];
  double j1_series[kSeriesTerms];
  // a_{2k} and a_{2k+1} with alternating signs folded in, in powers of 1/x^2.
  double j0_p[kAsymptoticTerms];
  double j0_q[kAsymptoticTerms];
  double j1_p[kAsymptoticTerms];
  double j1_q[kAsymptoticTerms];
};

extern const BesselTables kBesselTables;

// Scalar point evaluation; valid for x >= 0.
double j0_point(double x) noexcept;
double j1_point(double x) noexcept;

double dot_scalar(const double* a, const double* b, std::size_t n) noexcept;
void j0_scalar(const double* x, double* out, std::size_t n) noexcept;
void j1_scalar(const double* x, double* out, std::size_t n) noexcept;

#if defined(HAPTIC_HAVE_AVX2)
double dot_avx2(const double* a, const double* b, std::size_t n) noexcept;
void j0_avx2(const double* x, double* out, std::size_t n) noexcept;
void j1_avx2(const double* x, double* out, std::size_t n) noexcept;
#endif

#if defined(HAPTIC_HAVE_NEON)
double dot_neon(const double* a, const double* b, std::size_t n) noexcept;
void j0_neon(const double* x, double* out, std::size_t n) noexcept;
void j1_neon(const double* x, double* out, std::size_t n) noexcept;
#endif

}  // namespace haptic::simd::detail
