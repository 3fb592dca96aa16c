#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "haptic/filters.hpp"
#include "haptic/skin_solver.hpp"

namespace haptic {

struct MeasurementTrace {
  std::vector<double> samples;  // m
  double sample_rate = 0.0;     // Hz
  double distance_from_edge = 0.0;
  std::string label;

  void validate() const;
  double nyquist() const noexcept { return sample_rate / 2.0; }
};

struct Spectrum {
  std::vector<double> frequencies;
  std::vector<double> magnitudes;
  double resolution = 0.0;
};

struct FrequencyBand {
  double low = 0.0;
  double high = 0.0;
};

struct Peak {
  double frequency = 0.0;
  double amplitude = 0.0;
};

struct DecayFit {
  double alpha = 0.0;      // 1/m
  double amplitude = 0.0;  // A0
  double r_squared = 0.0;
  std::size_t used = 0;
  std::size_t excluded = 0;  // non-positive amplitudes skipped
};

MeasurementTrace bandpass(const MeasurementTrace& trace, double low, double high, int order = 4);
MeasurementTrace comb_notch(const MeasurementTrace& trace, double fundamental, double notch_bandwidth = 1.0);

/// One-sided Hann-windowed magnitude spectrum, scaled so a sine of
/// amplitude A centred on a bin reads A.
Spectrum spectrum(const MeasurementTrace& trace);

/// Largest bin inside the band, refined with the two neighbouring bins
/// using the Hann main-lobe shape.
Peak peak_amplitude(const Spectrum& s, FrequencyBand band);
Peak peak_amplitude(const MeasurementTrace& trace, FrequencyBand band);

enum class ReferenceMode { Edge, Motor };

struct PipelineOptions {
  double bandpass_low = 40.0;
  double bandpass_high = 200.0;
  int bandpass_order = 4;
  double comb_fundamental = 50.0;  // <= 0 disables the comb
  double notch_bandwidth = 1.0;
  ReferenceMode reference = ReferenceMode::Edge;
  double motor_amplitude = 300e-6;  // m, used with ReferenceMode::Motor

  void validate() const;
};

/// bandpass -> comb_notch -> peak_amplitude.
Peak process_trace(const MeasurementTrace& trace, FrequencyBand band, const PipelineOptions& options = {});

/// Per-trace peak amplitudes sorted by distance, normalized to the distance-0
/// trace (or the motor amplitude). Stored in u_z; u_r is zero.
AmplitudeProfile build_profile(const std::vector<MeasurementTrace>& traces, FrequencyBand band,
                               const PipelineOptions& options = {});

/// Log-linear least squares of u_z against radius.
DecayFit fit_decay(const AmplitudeProfile& profile);
DecayFit fit_decay(const std::vector<double>& r, const std::vector<double>& amplitude);

// CSV: t_s,displacement_m with `# rate_hz=` and `# distance_m=` metadata.
MeasurementTrace parse_trace_csv(const std::string& text, const std::string& label = "");
MeasurementTrace load_trace(const std::filesystem::path& path);
std::string format_trace_csv(const MeasurementTrace& trace);

}  // namespace haptic
