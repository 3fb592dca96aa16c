#include "haptic/elastic.hpp"

#include <cmath>

#include "haptic/error.hpp"

namespace haptic {

double wave_speed(const Material& m, WaveKind kind) {
  const auto [lambda, mu] = lame_constants(m);
  const double modulus = kind == WaveKind::Primary ? lambda + 2.0 * mu : mu;
  return std::sqrt(modulus / m.density());
}

double impedance(const Material& m, WaveKind kind) { return m.density() * wave_speed(m, kind); }

double log_attenuation(const Material& m, double omega, double distance, WaveKind kind) {
  if (!(distance >= 0.0) || !(omega >= 0.0)) {
    throw Error(ErrorCode::DomainError, "attenuation needs distance >= 0 and omega >= 0");
  }
  return -omega * m.viscosity() * distance / (m.elastic_modulus() * wave_speed(m, kind));
}

double attenuation_factor(const Material& m, double omega, double distance, WaveKind kind) {
  return std::exp(log_attenuation(m, omega, distance, kind));
}

InterfaceCoefficients interface_coefficients(double z1, double z2) {
  if (!(z1 >= 0.0) || !(z2 >= 0.0) || !std::isfinite(z1) || !std::isfinite(z2)) {
    throw Error(ErrorCode::DegenerateInterface, "impedances must be finite and non-negative");
  }
  const double sum = z1 + z2;
  if (sum == 0.0) throw Error(ErrorCode::DegenerateInterface, "both impedances are zero");
  return {2.0 * z1 / sum, (z1 - z2) / sum, z1, z2};
}

InterfaceCoefficients interface_coefficients(const Material& incident, const Material& transmitted,
                                             WaveKind kind) {
  return interface_coefficients(impedance(incident, kind), impedance(transmitted, kind));
}

double air::impedance(WaveKind kind) noexcept {
  return kind == WaveKind::Primary ? density * sound_speed : 0.0;
}

}  // namespace haptic
