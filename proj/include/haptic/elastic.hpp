#pragma once

#include "haptic/materials.hpp"

namespace haptic {

enum class WaveKind { Primary, Secondary };

/// Primary: sqrt((lambda + 2 mu) / rho). Secondary: sqrt(mu / rho).
double wave_speed(const Material& m, WaveKind kind);

/// Characteristic acoustic impedance rho * v for the given wave kind.
double impedance(const Material& m, WaveKind kind);

/// Viscous amplitude factor exp(-omega * eta * distance / (E * v)), in (0, 1].
double attenuation_factor(const Material& m, double omega, double distance, WaveKind kind);

/// Natural log of attenuation_factor; additive over path segments.
double log_attenuation(const Material& m, double omega, double distance, WaveKind kind);

struct InterfaceCoefficients {
  double k_t;
  double k_r;
  double incident_impedance;     // Pa*s/m
  double transmitted_impedance;  // Pa*s/m
};

/// Normal-incidence transmission and reflection between two media of the
/// given impedances: k_t = 2 z1 / (z1 + z2), k_r = (z1 - z2) / (z1 + z2).
InterfaceCoefficients interface_coefficients(double incident_impedance, double transmitted_impedance);
InterfaceCoefficients interface_coefficients(const Material& incident, const Material& transmitted,
                                             WaveKind kind);

/// Air at 20 C. Air carries no shear wave, so its secondary impedance is zero.
namespace air {
inline constexpr double density = 1.204;       // kg/m^3
inline constexpr double sound_speed = 343.0;   // m/s
double impedance(WaveKind kind) noexcept;
}  // namespace air

}  // namespace haptic
