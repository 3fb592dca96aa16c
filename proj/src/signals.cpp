#include "haptic/signals.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <numeric>

#include "haptic/error.hpp"
#include "haptic/io.hpp"
#include "haptic/parallel.hpp"

namespace haptic {

namespace {

// FFTW planning is not thread-safe; execution is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

std::vector<double> hann(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n)));
  }
  return w;
}

// Normalized Hann main-lobe magnitude at an offset of d bins.
double hann_lobe(double d) {
  if (std::abs(d) < 1e-12) return 1.0;
  const double x = std::numbers::pi * d;
  return std::abs(std::sin(x) / x / (1.0 - d * d));
}

MeasurementTrace with_samples(const MeasurementTrace& t, std::vector<double> s) {
  MeasurementTrace out = t;
  out.samples = std::move(s);
  return out;
}

}  // namespace

void MeasurementTrace::validate() const {
  if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) {
    throw Error(ErrorCode::InvalidTrace, "sample rate must be positive");
  }
  if (samples.size() < 2) throw Error(ErrorCode::InvalidTrace, "trace needs at least 2 samples");
  for (double v : samples) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidTrace, "trace contains a non-finite sample");
  }
  if (!std::isfinite(distance_from_edge)) throw Error(ErrorCode::InvalidTrace, "distance must be finite");
}

MeasurementTrace bandpass(const MeasurementTrace& trace, double low, double high, int order) {
  trace.validate();
  return with_samples(trace, filtfilt(butterworth_bandpass(order, low, high, trace.sample_rate), trace.samples));
}

MeasurementTrace comb_notch(const MeasurementTrace& trace, double fundamental, double notch_bandwidth) {
  trace.validate();
  return with_samples(trace,
                      filtfilt(comb_notch_filter(fundamental, notch_bandwidth, trace.sample_rate), trace.samples));
}

Spectrum spectrum(const MeasurementTrace& trace) {
  trace.validate();
  const std::size_t n = trace.samples.size();
  const std::vector<double> w = hann(n);
  const double wsum = std::accumulate(w.begin(), w.end(), 0.0);

  std::vector<double> in(n);
  for (std::size_t i = 0; i < n; ++i) in[i] = trace.samples[i] * w[i];
  const std::size_t m = n / 2 + 1;
  std::vector<std::complex<double>> out(m);
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(), reinterpret_cast<fftw_complex*>(out.data()),
                                FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }

  Spectrum s;
  s.resolution = trace.sample_rate / static_cast<double>(n);
  s.frequencies.resize(m);
  s.magnitudes.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    const bool edge = k == 0 || (n % 2 == 0 && k == m - 1);
    s.frequencies[k] = static_cast<double>(k) * s.resolution;
    s.magnitudes[k] = std::abs(out[k]) * (edge ? 1.0 : 2.0) / wsum;
  }
  return s;
}

Peak peak_amplitude(const Spectrum& s, FrequencyBand band) {
  if (s.frequencies.empty()) throw Error(ErrorCode::InvalidBand, "empty spectrum");
  const double nyq = s.frequencies.back() + 0.5 * s.resolution;
  if (!(band.low >= 0.0) || !(band.high >= band.low) || band.high > nyq) {
    throw Error(ErrorCode::InvalidBand, "band must lie within [0, Nyquist]");
  }
  std::size_t best = s.frequencies.size();
  for (std::size_t k = 0; k < s.frequencies.size(); ++k) {
    const double f = s.frequencies[k];
    if (f < band.low || f > band.high) continue;
    if (best == s.frequencies.size() || s.magnitudes[k] > s.magnitudes[best]) best = k;
  }
  if (best == s.frequencies.size()) throw Error(ErrorCode::InvalidBand, "band contains no spectral bins");

  const double peak = s.magnitudes[best];
  if (peak == 0.0) return {s.frequencies[best], 0.0};
  const double left = best > 0 ? s.magnitudes[best - 1] : 0.0;
  const double right = best + 1 < s.magnitudes.size() ? s.magnitudes[best + 1] : 0.0;
  const bool to_right = right >= left;
  const double r = std::min((to_right ? right : left) / peak, 1.0);
  const double d = (2.0 * r - 1.0) / (r + 1.0);
  if (d <= 0.0) return {s.frequencies[best], peak};
  const double offset = to_right ? d : -d;
  return {s.frequencies[best] + offset * s.resolution, peak / hann_lobe(d)};
}

Peak peak_amplitude(const MeasurementTrace& trace, FrequencyBand band) {
  return peak_amplitude(spectrum(trace), band);
}

void PipelineOptions::validate() const {
  if (!(bandpass_low > 0.0) || !(bandpass_high > bandpass_low)) {
    throw Error(ErrorCode::InvalidBand, "band-pass edges must satisfy 0 < low < high");
  }
  if (bandpass_order < 1) throw Error(ErrorCode::InvalidBand, "band-pass order must be positive");
  if (comb_fundamental > 0.0 && !(notch_bandwidth > 0.0)) {
    throw Error(ErrorCode::InvalidBand, "notch bandwidth must be positive");
  }
  if (reference == ReferenceMode::Motor && !(motor_amplitude > 0.0)) {
    throw Error(ErrorCode::DegenerateNormalization, "motor reference amplitude must be positive");
  }
}

Peak process_trace(const MeasurementTrace& trace, FrequencyBand band, const PipelineOptions& options) {
  options.validate();
  MeasurementTrace t = bandpass(trace, options.bandpass_low, options.bandpass_high, options.bandpass_order);
  if (options.comb_fundamental > 0.0) t = comb_notch(t, options.comb_fundamental, options.notch_bandwidth);
  return peak_amplitude(t, band);
}

AmplitudeProfile build_profile(const std::vector<MeasurementTrace>& traces, FrequencyBand band,
                               const PipelineOptions& options) {
  options.validate();
  if (traces.empty()) throw Error(ErrorCode::InvalidTrace, "no traces given");
  std::vector<std::size_t> order(traces.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return traces[a].distance_from_edge < traces[b].distance_from_edge;
  });
  for (std::size_t i = 0; i < order.size(); ++i) {
    traces[order[i]].validate();
    if (traces[order[i]].distance_from_edge < 0.0) throw Error(ErrorCode::InvalidTrace, "distance must be >= 0");
    if (i > 0 && traces[order[i]].distance_from_edge == traces[order[i - 1]].distance_from_edge) {
      throw Error(ErrorCode::InvalidTrace, "trace distances must be distinct");
    }
  }
  if (options.reference == ReferenceMode::Edge && traces[order.front()].distance_from_edge != 0.0) {
    throw Error(ErrorCode::InvalidTrace, "edge normalization needs a trace at distance 0");
  }

  std::vector<double> amp(traces.size());
  parallel_for(traces.size(), [&](std::size_t i) { amp[i] = process_trace(traces[order[i]], band, options).amplitude; });

  const double ref = options.reference == ReferenceMode::Edge ? amp.front() : options.motor_amplitude;
  if (!(ref > 0.0)) throw Error(ErrorCode::DegenerateNormalization, "reference amplitude is zero");
  AmplitudeProfile p;
  p.normalized = true;
  p.reference_amplitude = ref;
  for (std::size_t i = 0; i < order.size(); ++i) {
    p.radii.push_back(traces[order[i]].distance_from_edge);
    p.u_r.push_back(0.0);
    p.u_z.push_back(amp[i] / ref);
  }
  return p;
}

DecayFit fit_decay(const std::vector<double>& r, const std::vector<double>& amplitude) {
  if (r.size() != amplitude.size()) throw Error(ErrorCode::FitFailure, "radius and amplitude lengths differ");
  DecayFit fit;
  std::vector<double> x, y;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!std::isfinite(r[i]) || !std::isfinite(amplitude[i])) throw Error(ErrorCode::FitFailure, "non-finite data");
    if (amplitude[i] > 0.0) {
      x.push_back(r[i]);
      y.push_back(std::log(amplitude[i]));
    } else {
      ++fit.excluded;
    }
  }
  fit.used = x.size();
  if (x.size() < 2) throw Error(ErrorCode::FitFailure, "decay fit needs two positive amplitudes");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorCode::FitFailure, "decay fit needs distinct radii");
  const double slope = sxy / sxx;
  fit.alpha = -slope;
  fit.amplitude = std::exp(my - slope * mx);
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (my + slope * (x[i] - mx));
    ss_res += e * e;
  }
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return fit;
}

DecayFit fit_decay(const AmplitudeProfile& profile) {
  profile.validate();
  return fit_decay(profile.radii, profile.u_z);
}

MeasurementTrace parse_trace_csv(const std::string& text, const std::string& label) {
  const io::CsvTable table = io::parse_csv(text, label.empty() ? "trace" : label);
  MeasurementTrace t;
  t.label = label;
  t.samples = table.column("displacement_m");
  auto number = [&](const std::string& key, double& out) {
    if (const std::string* v = table.find_metadata(key)) {
      try {
        std::size_t used = 0;
        out = std::stod(*v, &used);
        if (used != v->size()) throw std::invalid_argument(key);
      } catch (const std::exception&) {
        throw Error(ErrorCode::InvalidTrace, "metadata " + key + " is not a number");
      }
      return true;
    }
    return false;
  };
  number("distance_m", t.distance_from_edge);
  if (const std::string* v = table.find_metadata("label")) t.label = *v;
  if (!number("rate_hz", t.sample_rate)) {
    const std::vector<double> time = table.column("t_s");
    if (time.size() < 2) throw Error(ErrorCode::InvalidTrace, "trace needs at least 2 samples");
    const double dt = (time.back() - time.front()) / static_cast<double>(time.size() - 1);
    for (std::size_t i = 1; i < time.size(); ++i) {
      if (std::abs(time[i] - time[i - 1] - dt) > 1e-6 * std::abs(dt)) {
        throw Error(ErrorCode::InvalidTrace, "trace is not uniformly sampled");
      }
    }
    if (!(dt > 0.0)) throw Error(ErrorCode::InvalidTrace, "time column must increase");
    t.sample_rate = 1.0 / dt;
  }
  t.validate();
  return t;
}

MeasurementTrace load_trace(const std::filesystem::path& path) {
  return parse_trace_csv(io::read_text_file(path), path.filename().string());
}

std::string format_trace_csv(const MeasurementTrace& trace) {
  trace.validate();
  io::CsvTable table;
  table.metadata = {{"rate_hz", io::format_number(trace.sample_rate)},
                    {"distance_m", io::format_number(trace.distance_from_edge)}};
  if (!trace.label.empty()) table.metadata.emplace_back("label", trace.label);
  table.columns = {"t_s", "displacement_m"};
  for (std::size_t i = 0; i < trace.samples.size(); ++i) {
    table.rows.push_back({static_cast<double>(i) / trace.sample_rate, trace.samples[i]});
  }
  return io::format_csv(table);
}

}  // namespace haptic
