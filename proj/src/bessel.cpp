#include "haptic/bessel.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "haptic/error.hpp"
#include "simd/kernels_impl.hpp"

namespace haptic {

namespace {

using cd = std::complex<double>;
namespace sd = simd::detail;

void check_order(int order) {
  if (order != 0 && order != 1) {
    throw Error(ErrorCode::DomainError, "bessel_j supports orders 0 and 1, got " + std::to_string(order));
  }
}

cd horner(const double* c, int n, cd t) {
  cd acc = c[n - 1];
  for (int i = n - 2; i >= 0; --i) acc = acc * t + c[i];
  return acc;
}

cd series(int order, cd z) {
  const auto& t = sd::kBesselTables;
  const cd q = 0.25 * z * z;
  // extra terms beyond the real table are not needed for |z| < 8
  return order == 0 ? horner(t.j0_series, sd::kSeriesTerms, q)
                    : 0.5 * z * horner(t.j1_series, sd::kSeriesTerms, q);
}

cd miller(int order, cd z) {
  const double az = std::abs(z);
  int start = static_cast<int>(az + 10.0 * std::sqrt(az) + 20.0);
  if (start % 2 != 0) ++start;
  cd next = 0.0;
  cd current = 1e-300;
  cd norm = 0.0;
  cd j1 = 0.0;
  for (int n = start; n > 0; --n) {
    const cd prev = (2.0 * n / z) * current - next;
    next = current;
    current = prev;
    if (n - 1 == 1) j1 = current;
    if ((n - 1) % 2 == 0 && n - 1 > 0) norm += 2.0 * current;
    if (std::abs(current) > 1e250) {
      current *= 1e-250;
      next *= 1e-250;
      norm *= 1e-250;
      j1 *= 1e-250;
    }
  }
  norm += current;
  return (order == 0 ? current : j1) / norm;
}

cd asymptotic(int order, cd z) {
  const auto& t = sd::kBesselTables;
  const cd u = 1.0 / (z * z);
  const cd p = horner(order == 0 ? t.j0_p : t.j1_p, sd::kAsymptoticTerms, u);
  const cd q = horner(order == 0 ? t.j0_q : t.j1_q, sd::kAsymptoticTerms, u) / z;
  const cd chi = z - (0.5 * order + 0.25) * std::numbers::pi;
  return std::sqrt(2.0 / (std::numbers::pi * z)) * (p * std::cos(chi) - q * std::sin(chi));
}

}  // namespace

double bessel_j(int order, double x) {
  check_order(order);
  if (!std::isfinite(x) || x < 0.0) {
    throw Error(ErrorCode::DomainError, "bessel_j requires finite x >= 0");
  }
  return order == 0 ? sd::j0_point(x) : sd::j1_point(x);
}

std::complex<double> bessel_j(int order, std::complex<double> z) {
  check_order(order);
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw Error(ErrorCode::DomainError, "bessel_j requires a finite argument");
  }
  if (z.imag() == 0.0 && z.real() >= 0.0) return bessel_j(order, z.real());
  const double az = std::abs(z);
  if (az < sd::kSeriesLimit) return series(order, z);
  if (az < sd::kAsymptoticStart) return miller(order, z);
  return asymptotic(order, z);
}

}  // namespace haptic
