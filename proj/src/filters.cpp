#include "haptic/filters.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "haptic/error.hpp"

namespace haptic {

using cd = std::complex<double>;

cd Biquad::response(double f, double fs) const noexcept {
  const cd z1 = std::polar(1.0, -2.0 * std::numbers::pi * f / fs);
  return (b0 + z1 * (b1 + z1 * b2)) / (1.0 + z1 * (a1 + z1 * a2));
}

double Biquad::pole_radius() const noexcept {
  const double disc = a1 * a1 - 4.0 * a2;
  if (disc < 0.0) return std::sqrt(a2);
  const double s = std::sqrt(disc);
  return std::max(std::abs(-a1 + s), std::abs(-a1 - s)) / 2.0;
}

cd frequency_response(const SosFilter& sos, double f, double fs) noexcept {
  cd h = 1.0;
  for (const auto& s : sos) h *= s.response(f, fs);
  return h;
}

SosFilter butterworth_bandpass(int order, double low, double high, double fs) {
  if (order < 1 || order > 16) throw Error(ErrorCode::InvalidBand, "filter order must be in [1, 16]");
  if (!(fs > 0.0) || !(low > 0.0) || !(high > low) || !(high < fs / 2.0)) {
    throw Error(ErrorCode::InvalidBand, "band-pass needs 0 < low < high < Nyquist");
  }
  const double k = 2.0 * fs;
  const double w1 = k * std::tan(std::numbers::pi * low / fs);
  const double w2 = k * std::tan(std::numbers::pi * high / fs);
  const double bw = w2 - w1;
  const double w0sq = w1 * w2;

  std::vector<cd> zpoles;
  for (int i = 0; i < order; ++i) {
    const cd p = std::polar(1.0, std::numbers::pi * (2.0 * i + order + 1.0) / (2.0 * order));
    // s^2 - p bw s + w0^2 = 0
    const cd disc = std::sqrt(p * p * bw * bw - 4.0 * w0sq);
    for (const cd s : {(p * bw + disc) / 2.0, (p * bw - disc) / 2.0}) zpoles.push_back((k + s) / (k - s));
  }
  SosFilter sos;
  std::vector<double> real_poles;
  for (const cd& z : zpoles) {
    if (z.imag() > 1e-12) {
      sos.push_back({1.0, 0.0, -1.0, -2.0 * z.real(), std::norm(z)});
    } else if (std::abs(z.imag()) <= 1e-12) {
      real_poles.push_back(z.real());
    }
  }
  std::sort(real_poles.begin(), real_poles.end());
  for (std::size_t i = 0; i + 1 < real_poles.size(); i += 2) {
    sos.push_back({1.0, 0.0, -1.0, -(real_poles[i] + real_poles[i + 1]), real_poles[i] * real_poles[i + 1]});
  }
  if (sos.size() != static_cast<std::size_t>(order)) {
    throw Error(ErrorCode::InvalidBand, "band-pass pole pairing failed");
  }
  const double fc = fs / std::numbers::pi * std::atan(std::sqrt(w0sq) / k);
  const double g = std::pow(1.0 / std::abs(frequency_response(sos, fc, fs)), 1.0 / order);
  for (auto& s : sos) {
    s.b0 *= g;
    s.b1 *= g;
    s.b2 *= g;
  }
  return sos;
}

Biquad notch(double f0, double bandwidth, double fs) {
  if (!(fs > 0.0) || !(f0 > 0.0) || !(f0 < fs / 2.0) || !(bandwidth > 0.0)) {
    throw Error(ErrorCode::InvalidBand, "notch needs 0 < f0 < Nyquist and a positive bandwidth");
  }
  const double w0 = 2.0 * std::numbers::pi * f0 / fs;
  const double bw = 2.0 * std::numbers::pi * bandwidth / fs;
  const double g = 1.0 / (1.0 + std::tan(bw / 2.0));
  const double c = std::cos(w0);
  return {g, -2.0 * g * c, g, -2.0 * g * c, 2.0 * g - 1.0};
}

SosFilter comb_notch_filter(double fundamental, double bandwidth, double fs) {
  if (!(fundamental > 0.0) || !(fundamental < fs / 2.0)) {
    throw Error(ErrorCode::InvalidBand, "comb fundamental must lie below Nyquist");
  }
  SosFilter sos;
  for (int m = 1; m * fundamental < fs / 2.0; ++m) sos.push_back(notch(m * fundamental, bandwidth, fs));
  return sos;
}

std::vector<double> sos_filter(const SosFilter& sos, const std::vector<double>& x, std::vector<double>* zi) {
  std::vector<double> state = zi ? *zi : std::vector<double>(2 * sos.size(), 0.0);
  if (state.size() != 2 * sos.size()) throw Error(ErrorCode::InvalidTrace, "filter state has the wrong size");
  std::vector<double> y = x;
  for (std::size_t s = 0; s < sos.size(); ++s) {
    const Biquad& q = sos[s];
    double z1 = state[2 * s], z2 = state[2 * s + 1];
    for (double& v : y) {
      const double in = v;
      const double out = q.b0 * in + z1;
      z1 = q.b1 * in - q.a1 * out + z2;
      z2 = q.b2 * in - q.a2 * out;
      v = out;
    }
    state[2 * s] = z1;
    state[2 * s + 1] = z2;
  }
  if (zi) *zi = std::move(state);
  return y;
}

std::vector<double> sos_steady_state(const SosFilter& sos) {
  std::vector<double> zi;
  double u = 1.0;
  for (const auto& q : sos) {
    const double y = q.dc_gain() * u;
    const double z2 = q.b2 * u - q.a2 * y;
    zi.push_back(y - q.b0 * u);
    zi.push_back(z2);
    u = y;
  }
  return zi;
}

std::size_t effective_length(const SosFilter& sos) {
  double r = 0.0;
  for (const auto& q : sos) r = std::max(r, q.pole_radius());
  if (r <= 0.0) return 1;
  if (r >= 1.0) throw Error(ErrorCode::InvalidBand, "filter is not stable");
  return static_cast<std::size_t>(std::ceil(std::log(1e-3) / std::log(r)));
}

std::vector<double> filtfilt(const SosFilter& sos, const std::vector<double>& x) {
  const std::size_t n = x.size();
  if (n < 2) throw Error(ErrorCode::InvalidTrace, "filtering needs at least 2 samples");
  const std::size_t pad = std::min(3 * effective_length(sos), n - 1);

  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x.front() - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x.back() - x[n - 1 - i]);

  const std::vector<double> zi = sos_steady_state(sos);
  auto scaled = [&](double v) {
    std::vector<double> s = zi;
    for (double& e : s) e *= v;
    return s;
  };
  std::vector<double> state = scaled(ext.front());
  std::vector<double> y = sos_filter(sos, ext, &state);
  std::reverse(y.begin(), y.end());
  state = scaled(y.front());
  y = sos_filter(sos, y, &state);
  std::reverse(y.begin(), y.end());
  return {y.begin() + static_cast<std::ptrdiff_t>(pad), y.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

}  // namespace haptic
