#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace haptic {

/// Fallback properties for silicones whose data sheet only gives a modulus.
/// Silicone elastomers are near-incompressible and close to water density.
namespace silicone_defaults {
inline constexpr double poisson_ratio = 0.49;
inline constexpr double density = 1070.0;   // kg/m^3
inline constexpr double viscosity = 5.0;    // Pa*s
}  // namespace silicone_defaults

/// One homogeneous linear viscoelastic medium. SI units throughout.
/// Immutable once constructed; the constructor enforces E > 0, rho > 0,
/// eta >= 0 and -1 < nu < 0.5.
class Material {
 public:
  Material(std::string name, double elastic_modulus,
           double poisson_ratio = silicone_defaults::poisson_ratio,
           double density = silicone_defaults::density,
           double viscosity = silicone_defaults::viscosity);

  const std::string& name() const noexcept { return name_; }
  double elastic_modulus() const noexcept { return elastic_modulus_; }
  double poisson_ratio() const noexcept { return poisson_ratio_; }
  double density() const noexcept { return density_; }
  double viscosity() const noexcept { return viscosity_; }

  bool operator==(const Material&) const = default;

 private:
  std::string name_;
  double elastic_modulus_;
  double poisson_ratio_;
  double density_;
  double viscosity_;
};

struct LameConstants {
  double lambda;  // Pa
  double mu;      // Pa, shear modulus
};

LameConstants lame_constants(double elastic_modulus, double poisson_ratio);
LameConstants lame_constants(const Material& m);

struct StrainStress {
  double strain;
  double stress;  // Pa
};

/// Uniaxial stress-strain record with strictly increasing strain.
class StressStrainCurve {
 public:
  StressStrainCurve(std::vector<StrainStress> samples, std::string label = {});

  const std::vector<StrainStress>& samples() const noexcept { return samples_; }
  const std::string& label() const noexcept { return label_; }

 private:
  std::vector<StrainStress> samples_;
  std::string label_;
};

struct StrainWindow {
  double min = 0.0;
  double max = 0.3;
};

struct ModulusFit {
  double modulus;        // Pa
  StrainWindow window;
  double residual_rms;   // Pa
  int sample_count;
};

/// Least-squares slope of stress against strain inside `window`. Windows
/// that start at zero strain are fitted through the origin; otherwise an
/// intercept is estimated and discarded.
ModulusFit fit_modulus(const StressStrainCurve& curve, StrainWindow window = {});

/// Catalog file: JSON array of {name, E_pa, nu, rho_kg_m3, eta_pa_s}.
/// `name` and `E_pa` are required; the others fall back to silicone_defaults.
std::vector<Material> load_catalog(const std::filesystem::path& path);
std::vector<Material> parse_catalog(const std::string& text);
std::string serialize_catalog(const std::vector<Material>& catalog);
void save_catalog(const std::vector<Material>& catalog, const std::filesystem::path& path);

const Material& find_material(const std::vector<Material>& catalog, const std::string& name);

/// Two-column CSV `strain,stress_pa` with a one-line header.
StressStrainCurve load_stress_strain_csv(const std::filesystem::path& path);

}  // namespace haptic
