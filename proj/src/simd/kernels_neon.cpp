// NEON (AArch64 Advanced SIMD, float64x2) variants. NEON is mandatory on
// AArch64, so this path is selected whenever it is compiled in.

#include <arm_neon.h>

#include "kernels_impl.hpp"

namespace haptic::simd::detail {

namespace {

constexpr double kPio2Hi = 1.57079632673412561417e+00;
constexpr double kPio2Lo = 6.07710050650619224932e-11;
constexpr double kTwoOverPi = 0.63661977236758134308;

inline float64x2_t horner(const double* c, int n, float64x2_t t) {
  float64x2_t acc = vdupq_n_f64(c[n - 1]);
  for (int i = n - 2; i >= 0; --i) acc = vfmaq_f64(vdupq_n_f64(c[i]), acc, t);
  return acc;
}

inline void sincos(float64x2_t x, float64x2_t& s, float64x2_t& c) {
  const float64x2_t q = vrndnq_f64(vmulq_n_f64(x, kTwoOverPi));
  float64x2_t r = vfmsq_f64(x, q, vdupq_n_f64(kPio2Hi));
  r = vfmsq_f64(r, q, vdupq_n_f64(kPio2Lo));
  const float64x2_t r2 = vmulq_f64(r, r);

  static constexpr double sin_c[] = {-1.0 / 6.0,          1.0 / 120.0,          -1.0 / 5040.0,
                                     1.0 / 362880.0,      -1.0 / 39916800.0,    1.0 / 6227020800.0,
                                     -1.0 / 1307674368000.0, 1.0 / 355687428096000.0};
  static constexpr double cos_c[] = {0.5,
                                     -1.0 / 24.0,
                                     1.0 / 720.0,
                                     -1.0 / 40320.0,
                                     1.0 / 3628800.0,
                                     -1.0 / 479001600.0,
                                     1.0 / 87178291200.0,
                                     -1.0 / 20922789888000.0,
                                     1.0 / 6402373705728000.0};
  const float64x2_t ps = horner(sin_c, 8, r2);
  const float64x2_t sin_r = vfmaq_f64(r, vmulq_f64(ps, r2), r);
  const float64x2_t pc = horner(cos_c, 9, r2);
  const float64x2_t cos_r = vfmsq_f64(vdupq_n_f64(1.0), pc, r2);

  const int64x2_t quad = vandq_s64(vcvtq_s64_f64(q), vdupq_n_s64(3));
  const uint64x2_t odd = vtstq_s64(quad, vdupq_n_s64(1));
  const uint64x2_t sin_neg = vtstq_s64(quad, vdupq_n_s64(2));
  const uint64x2_t cos_neg = vtstq_s64(vaddq_s64(quad, vdupq_n_s64(1)), vdupq_n_s64(2));

  float64x2_t sv = vbslq_f64(odd, cos_r, sin_r);
  float64x2_t cv = vbslq_f64(odd, sin_r, cos_r);
  sv = vbslq_f64(sin_neg, vnegq_f64(sv), sv);
  cv = vbslq_f64(cos_neg, vnegq_f64(cv), cv);
  s = sv;
  c = cv;
}

template <int Order>
inline float64x2_t bessel_vec(float64x2_t x) {
  const auto& t = kBesselTables;
  const float64x2_t quarter_x2 = vmulq_n_f64(vmulq_f64(x, x), 0.25);
  float64x2_t series;
  if constexpr (Order == 0) {
    series = horner(t.j0_series, kSeriesTerms, quarter_x2);
  } else {
    series = vmulq_f64(vmulq_n_f64(x, 0.5), horner(t.j1_series, kSeriesTerms, quarter_x2));
  }
  const float64x2_t inv_x = vdivq_f64(vdupq_n_f64(1.0), x);
  const float64x2_t u = vmulq_f64(inv_x, inv_x);
  const double* p = Order == 0 ? t.j0_p : t.j1_p;
  const double* q = Order == 0 ? t.j0_q : t.j1_q;
  const float64x2_t pp = horner(p, kAsymptoticTerms, u);
  const float64x2_t qq = vmulq_f64(horner(q, kAsymptoticTerms, u), inv_x);
  float64x2_t s, c;
  sincos(x, s, c);
  const double r = 0.70710678118654752440;
  float64x2_t cos_chi, sin_chi;
  if constexpr (Order == 0) {
    cos_chi = vmulq_n_f64(vaddq_f64(c, s), r);
    sin_chi = vmulq_n_f64(vsubq_f64(s, c), r);
  } else {
    cos_chi = vmulq_n_f64(vsubq_f64(s, c), r);
    sin_chi = vmulq_n_f64(vaddq_f64(c, s), -r);
  }
  const float64x2_t amp = vsqrtq_f64(vmulq_n_f64(inv_x, 0.63661977236758134308));
  const float64x2_t asym = vmulq_f64(amp, vfmsq_f64(vmulq_f64(pp, cos_chi), qq, sin_chi));
  const uint64x2_t small = vcltq_f64(x, vdupq_n_f64(kSeriesLimit));
  return vbslq_f64(small, series, asym);
}

template <int Order>
void bessel_loop(const double* x, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(out + i, bessel_vec<Order>(vld1q_f64(x + i)));
    for (std::size_t lane = 0; lane < 2; ++lane) {
      const double xi = x[i + lane];
      if (xi >= kSeriesLimit && xi < kAsymptoticStart) {
        out[i + lane] = Order == 0 ? j0_point(xi) : j1_point(xi);
      }
    }
  }
  for (; i < n; ++i) out[i] = Order == 0 ? j0_point(x[i]) : j1_point(x[i]);
}

}  // namespace

double dot_neon(const double* a, const double* b, std::size_t n) noexcept {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double sum = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void j0_neon(const double* x, double* out, std::size_t n) noexcept { bessel_loop<0>(x, out, n); }

void j1_neon(const double* x, double* out, std::size_t n) noexcept { bessel_loop<1>(x, out, n); }

}  // namespace haptic::simd::detail
