// AVX2 + FMA variants. Compiled with -mavx2 -mfma; selected at runtime only
// when the CPU reports both features.

#include <immintrin.h>

#include "kernels_impl.hpp"

namespace haptic::simd::detail {

namespace {

// pi/2 split for Cody-Waite reduction: the head has 33 significant bits so
// q * kPio2Hi is exact for |q| < 2^20.
constexpr double kPio2Hi = 1.57079632673412561417e+00;
constexpr double kPio2Lo = 6.07710050650619224932e-11;
constexpr double kTwoOverPi = 0.63661977236758134308;

inline __m256d horner(const double* c, int n, __m256d t) {
  __m256d acc = _mm256_set1_pd(c[n - 1]);
  for (int i = n - 2; i >= 0; --i) acc = _mm256_fmadd_pd(acc, t, _mm256_set1_pd(c[i]));
  return acc;
}

// sin and cos of x for |x| < ~1e6.
inline void sincos(__m256d x, __m256d& s, __m256d& c) {
  const __m256d q = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(kTwoOverPi)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(q, _mm256_set1_pd(kPio2Hi), x);
  r = _mm256_fnmadd_pd(q, _mm256_set1_pd(kPio2Lo), r);
  const __m256d r2 = _mm256_mul_pd(r, r);

  // Taylor polynomials on |r| <= pi/4, truncation error < 1e-19.
  __m256d ps = _mm256_set1_pd(1.0 / 355687428096000.0);  // 1/17!
  ps = _mm256_fmadd_pd(ps, r2, _mm256_set1_pd(-1.0 / 1307674368000.0));
  ps = _mm256_fmadd_pd(ps, r2, _mm256_set1_pd(1.0 / 6227020800.0));
  ps = _mm256_fmadd_pd(ps, r2, _mm256_set1_pd(-1.0 / 39916800.0));
  ps = _mm256_fmadd_pd(ps, r2, _mm256_set1_pd(1.0 / 362880.0));
  ps = _mm256_fmadd_pd(ps, r2, _mm256_set1_pd(-1.0 / 5040.0));
  ps = _mm256_fmadd_pd(ps, r2, _mm256_set1_pd(1.0 / 120.0));
  ps = _mm256_fmadd_pd(ps, r2, _mm256_set1_pd(-1.0 / 6.0));
  const __m256d sin_r = _mm256_fmadd_pd(_mm256_mul_pd(ps, r2), r, r);

  __m256d pc = _mm256_set1_pd(1.0 / 6402373705728000.0);  // 1/18!
  pc = _mm256_fmadd_pd(pc, r2, _mm256_set1_pd(-1.0 / 20922789888000.0));
  pc = _mm256_fmadd_pd(pc, r2, _mm256_set1_pd(1.0 / 87178291200.0));
  pc = _mm256_fmadd_pd(pc, r2, _mm256_set1_pd(-1.0 / 479001600.0));
  pc = _mm256_fmadd_pd(pc, r2, _mm256_set1_pd(1.0 / 3628800.0));
  pc = _mm256_fmadd_pd(pc, r2, _mm256_set1_pd(-1.0 / 40320.0));
  pc = _mm256_fmadd_pd(pc, r2, _mm256_set1_pd(1.0 / 720.0));
  pc = _mm256_fmadd_pd(pc, r2, _mm256_set1_pd(-1.0 / 24.0));
  pc = _mm256_fmadd_pd(pc, r2, _mm256_set1_pd(0.5));
  const __m256d cos_r = _mm256_fnmadd_pd(pc, r2, _mm256_set1_pd(1.0));

  // quadrant = q mod 4, widened to 64-bit lane masks
  const __m128i qi = _mm256_cvtpd_epi32(q);
  const __m128i quad = _mm_and_si128(qi, _mm_set1_epi32(3));
  const __m256i quad64 = _mm256_cvtepi32_epi64(quad);
  const __m256d odd = _mm256_castsi256_pd(
      _mm256_cmpeq_epi64(_mm256_and_si256(quad64, _mm256_set1_epi64x(1)), _mm256_set1_epi64x(1)));
  const __m256d sin_neg = _mm256_castsi256_pd(
      _mm256_cmpeq_epi64(_mm256_and_si256(quad64, _mm256_set1_epi64x(2)), _mm256_set1_epi64x(2)));
  const __m256i q_plus_1 = _mm256_add_epi64(quad64, _mm256_set1_epi64x(1));
  const __m256d cos_neg = _mm256_castsi256_pd(
      _mm256_cmpeq_epi64(_mm256_and_si256(q_plus_1, _mm256_set1_epi64x(2)), _mm256_set1_epi64x(2)));

  const __m256d sign_bit = _mm256_set1_pd(-0.0);
  __m256d sv = _mm256_blendv_pd(sin_r, cos_r, odd);
  __m256d cv = _mm256_blendv_pd(cos_r, sin_r, odd);
  sv = _mm256_xor_pd(sv, _mm256_and_pd(sin_neg, sign_bit));
  cv = _mm256_xor_pd(cv, _mm256_and_pd(cos_neg, sign_bit));
  s = sv;
  c = cv;
}

template <int Order>
inline __m256d bessel_vec(__m256d x) {
  const auto& t = kBesselTables;
  const __m256d quarter_x2 = _mm256_mul_pd(_mm256_set1_pd(0.25), _mm256_mul_pd(x, x));
  __m256d series;
  if constexpr (Order == 0) {
    series = horner(t.j0_series, kSeriesTerms, quarter_x2);
  } else {
    series = _mm256_mul_pd(_mm256_mul_pd(_mm256_set1_pd(0.5), x),
                           horner(t.j1_series, kSeriesTerms, quarter_x2));
  }

  const __m256d inv_x = _mm256_div_pd(_mm256_set1_pd(1.0), x);
  const __m256d u = _mm256_mul_pd(inv_x, inv_x);
  const double* p = Order == 0 ? t.j0_p : t.j1_p;
  const double* q = Order == 0 ? t.j0_q : t.j1_q;
  const __m256d pp = horner(p, kAsymptoticTerms, u);
  const __m256d qq = _mm256_mul_pd(horner(q, kAsymptoticTerms, u), inv_x);
  __m256d s, c;
  sincos(x, s, c);
  const __m256d r = _mm256_set1_pd(0.70710678118654752440);
  __m256d cos_chi, sin_chi;
  if constexpr (Order == 0) {
    cos_chi = _mm256_mul_pd(r, _mm256_add_pd(c, s));
    sin_chi = _mm256_mul_pd(r, _mm256_sub_pd(s, c));
  } else {
    cos_chi = _mm256_mul_pd(r, _mm256_sub_pd(s, c));
    sin_chi = _mm256_mul_pd(_mm256_set1_pd(-0.70710678118654752440), _mm256_add_pd(c, s));
  }
  const __m256d amp = _mm256_sqrt_pd(_mm256_mul_pd(_mm256_set1_pd(0.63661977236758134308), inv_x));
  const __m256d asym = _mm256_mul_pd(amp, _mm256_fmsub_pd(pp, cos_chi, _mm256_mul_pd(qq, sin_chi)));

  const __m256d small = _mm256_cmp_pd(x, _mm256_set1_pd(kSeriesLimit), _CMP_LT_OQ);
  return _mm256_blendv_pd(asym, series, small);
}

template <int Order>
void bessel_loop(const double* x, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xv = _mm256_loadu_pd(x + i);
    _mm256_storeu_pd(out + i, bessel_vec<Order>(xv));
    // Lanes in the recurrence band are recomputed on the scalar path.
    const __m256d mid = _mm256_and_pd(
        _mm256_cmp_pd(xv, _mm256_set1_pd(kSeriesLimit), _CMP_GE_OQ),
        _mm256_cmp_pd(xv, _mm256_set1_pd(kAsymptoticStart), _CMP_LT_OQ));
    int mask = _mm256_movemask_pd(mid);
    while (mask != 0) {
      const int lane = __builtin_ctz(static_cast<unsigned>(mask));
      out[i + lane] = Order == 0 ? j0_point(x[i + lane]) : j1_point(x[i + lane]);
      mask &= mask - 1;
    }
  }
  for (; i < n; ++i) out[i] = Order == 0 ? j0_point(x[i]) : j1_point(x[i]);
}

}  // namespace

double dot_avx2(const double* a, const double* b, std::size_t n) noexcept {
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
  const __m256d acc = _mm256_add_pd(_mm256_add_pd(acc0, acc1), _mm256_add_pd(acc2, acc3));
  const __m128d lo = _mm256_castpd256_pd128(acc);
  const __m128d hi = _mm256_extractf128_pd(acc, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  double sum = _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void j0_avx2(const double* x, double* out, std::size_t n) noexcept { bessel_loop<0>(x, out, n); }

void j1_avx2(const double* x, double* out, std::size_t n) noexcept { bessel_loop<1>(x, out, n); }

}  // namespace haptic::simd::detail
