#pragma once

#include <complex>
#include <vector>

namespace haptic {

/// One second-order section, a0 normalized to 1:
/// H(z) = (b0 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2).
struct Biquad {
  double b0, b1, b2;
  double a1, a2;

  std::complex<double> response(double f, double fs) const noexcept;
  double dc_gain() const noexcept { return (b0 + b1 + b2) / (1.0 + a1 + a2); }
  double pole_radius() const noexcept;
};

using SosFilter = std::vector<Biquad>;

std::complex<double> frequency_response(const SosFilter& sos, double f, double fs) noexcept;

/// Digital Butterworth band-pass from an analog low-pass prototype of the
/// given order (band-pass order is twice that), bilinear transform with
/// prewarped edges, unit gain at the geometric centre.
SosFilter butterworth_bandpass(int order, double low, double high, double fs);

/// Second-order notch at f0 with -3 dB bandwidth `bandwidth` (Hz).
Biquad notch(double f0, double bandwidth, double fs);

/// Notches at every multiple of `fundamental` below Nyquist.
SosFilter comb_notch_filter(double fundamental, double bandwidth, double fs);

/// Causal cascade filtering. `zi` holds two state values per section and is
/// updated in place when provided.
std::vector<double> sos_filter(const SosFilter& sos, const std::vector<double>& x, std::vector<double>* zi = nullptr);

/// Per-section states for which a constant input of 1 produces no transient.
std::vector<double> sos_steady_state(const SosFilter& sos);

/// Samples for the slowest pole to decay to 1e-3.
std::size_t effective_length(const SosFilter& sos);

/// Zero-phase forward-backward filtering with odd extension at both ends.
/// Pad length is min(3 * effective_length, n - 1).
std::vector<double> filtfilt(const SosFilter& sos, const std::vector<double>& x);

}  // namespace haptic
