#pragma once

#include <complex>

namespace haptic {

/// Bessel function of the first kind, order 0 or 1, for real x >= 0.
/// Absolute error below 1e-10 on [0, 100]. Throws DomainError for negative
/// or non-finite x and for orders other than 0 and 1.
double bessel_j(int order, double x);

/// Complex-argument variant used on deformed wavenumber contours.
/// Intended for |arg z| < pi/2 and moderate |Im z|.
std::complex<double> bessel_j(int order, std::complex<double> z);

}  // namespace haptic
