#include <cmath>
#include <numbers>

#include "kernels_impl.hpp"

namespace haptic::simd::detail {

namespace {

constexpr BesselTables make_tables() {
  BesselTables t{};
  double fact_m = 1.0;   // m!
  double fact_m1 = 1.0;  // (m+1)!
  for (int m = 0; m < kSeriesTerms; ++m) {
    if (m > 0) {
      fact_m *= m;
      fact_m1 *= (m + 1);
    }
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    t.j0_series[m] = sign / (fact_m * fact_m);
    t.j1_series[m] = sign / (fact_m * fact_m1);
  }
  for (int order = 0; order <= 1; ++order) {
    const double mu = 4.0 * order * order;
    double a = 1.0;  // a_0
    double* p = order == 0 ? t.j0_p : t.j1_p;
    double* q = order == 0 ? t.j0_q : t.j1_q;
    for (int j = 0; j < 2 * kAsymptoticTerms; ++j) {
      if (j > 0) {
        const double odd = 2.0 * j - 1.0;
        a *= (mu - odd * odd) / (8.0 * j);
      }
      const int k = j / 2;
      const double sign = (k % 2 == 0) ? 1.0 : -1.0;
      if (j % 2 == 0) {
        p[k] = sign * a;
      } else {
        q[k] = sign * a;
      }
    }
  }
  return t;
}

double horner(const double* c, int n, double t) noexcept {
  double acc = c[n - 1];
  for (int i = n - 2; i >= 0; --i) acc = acc * t + c[i];
  return acc;
}

// Backward recurrence normalized by J0 + 2*sum(J_2k) = 1.
void miller(double x, double& j0, double& j1) noexcept {
  int start = static_cast<int>(x + 10.0 * std::sqrt(x) + 20.0);
  if (start % 2 != 0) ++start;
  double next = 0.0;     // J_{n+1}
  double current = 1e-300;  // J_n
  double norm = 0.0;
  double out0 = 0.0, out1 = 0.0;
  for (int n = start; n > 0; --n) {
    const double prev = (2.0 * n / x) * current - next;  // J_{n-1}
    next = current;
    current = prev;
    if (n - 1 == 1) out1 = current;
    if ((n - 1) % 2 == 0 && n - 1 > 0) norm += 2.0 * current;
    if (std::abs(current) > 1e250) {
      current *= 1e-250;
      next *= 1e-250;
      norm *= 1e-250;
      out1 *= 1e-250;
    }
  }
  out0 = current;
  norm += out0;
  j0 = out0 / norm;
  j1 = out1 / norm;
}

double asymptotic(double x, const double* p, const double* q, int order) noexcept {
  const double u = 1.0 / (x * x);
  const double pp = horner(p, kAsymptoticTerms, u);
  const double qq = horner(q, kAsymptoticTerms, u) / x;
  const double s = std::sin(x);
  const double c = std::cos(x);
  // chi = x - pi/4 (order 0) or x - 3pi/4 (order 1), expanded to avoid
  // cancellation in the phase.
  const double r = std::numbers::sqrt2 / 2.0;
  double cos_chi, sin_chi;
  if (order == 0) {
    cos_chi = r * (c + s);
    sin_chi = r * (s - c);
  } else {
    cos_chi = r * (s - c);
    sin_chi = -r * (c + s);
  }
  return std::sqrt(2.0 / (std::numbers::pi * x)) * (pp * cos_chi - qq * sin_chi);
}

}  // namespace

const BesselTables kBesselTables = make_tables();

double j0_point(double x) noexcept {
  const auto& t = kBesselTables;
  if (x < kSeriesLimit) return horner(t.j0_series, kSeriesTerms, 0.25 * x * x);
  if (x < kAsymptoticStart) {
    double j0, j1;
    miller(x, j0, j1);
    return j0;
  }
  return asymptotic(x, t.j0_p, t.j0_q, 0);
}

double j1_point(double x) noexcept {
  const auto& t = kBesselTables;
  if (x < kSeriesLimit) return 0.5 * x * horner(t.j1_series, kSeriesTerms, 0.25 * x * x);
  if (x < kAsymptoticStart) {
    double j0, j1;
    miller(x, j0, j1);
    return j1;
  }
  return asymptotic(x, t.j1_p, t.j1_q, 1);
}

double dot_scalar(const double* a, const double* b, std::size_t n) noexcept {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void j0_scalar(const double* x, double* out, std::size_t n) noexcept {
  for (std::size_t i = 0; i < n; ++i) out[i] = j0_point(x[i]);
}

void j1_scalar(const double* x, double* out, std::size_t n) noexcept {
  for (std::size_t i = 0; i < n; ++i) out[i] = j1_point(x[i]);
}

}  // namespace haptic::simd::detail
