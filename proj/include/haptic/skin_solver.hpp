#pragma once

#include <array>
#include <complex>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "haptic/materials.hpp"

namespace haptic {

struct StackLayer {
  Material material;
  double bottom_depth;  // m, measured from the skin surface
};

/// Finite layers over an elastic half-space. Depths strictly increase.
class SkinStack {
 public:
  SkinStack(std::vector<StackLayer> layers, Material substrate);

  const std::vector<StackLayer>& layers() const noexcept { return layers_; }
  const Material& substrate() const noexcept { return substrate_; }
  std::size_t layer_count() const noexcept { return layers_.size(); }
  double thickness(std::size_t i) const;
  const Material& top() const noexcept { return layers_.front().material; }

  /// Homogeneous medium of `m` cut into finite layers at the given depths.
  static SkinStack homogeneous(const Material& m, const std::vector<double>& depths);

 private:
  std::vector<StackLayer> layers_;
  Material substrate_;
};

/// Uniform pressure F1 (positive pushes into the skin) and uniform radial
/// shear F2 over a disk of radius a, oscillating at `frequency`.
struct LoadSpec {
  double normal_traction = 0.0;      // Pa
  double tangential_traction = 0.0;  // Pa
  double disk_radius = 3.5e-3;       // m
  double frequency = 0.0;            // Hz

  double omega() const noexcept;
  void validate() const;
  bool is_zero() const noexcept { return normal_traction == 0.0 && tangential_traction == 0.0; }
};

using cplx = std::complex<double>;

/// Hankel transforms of the disk tractions at wavenumber k.
cplx normal_traction_transform(const LoadSpec& load, cplx k);
cplx tangential_traction_transform(const LoadSpec& load, cplx k);

/// Modal amplitudes at one wavenumber. Finite layers carry
/// [P down, S down, P up, S up]; the substrate carries decaying P and S only.
struct LayerCoefficients {
  cplx k;
  std::vector<std::array<cplx, 4>> layers;
  std::array<cplx, 2> substrate{};
};

/// Boundary-condition matrix of size 4L+2. Rows: surface sigma_zz,
/// surface sigma_zr, then u_r, u_z, sigma_zz, sigma_zr continuity per
/// interface. Stress rows are divided by the largest layer shear modulus.
Eigen::MatrixXcd assemble_system(const SkinStack& stack, double omega, cplx k);

/// Right-hand side matching assemble_system for the given transformed tractions.
Eigen::VectorXcd assemble_rhs(const SkinStack& stack, cplx normal, cplx tangential);

LayerCoefficients solve_layer_coefficients(const SkinStack& stack, const LoadSpec& load, double omega, cplx k);

/// [u_r, u_z, sigma_zz, sigma_zr] at depth `depth` for the given coefficients,
/// with the Bessel factors stripped.
std::array<cplx, 4> state_at_depth(const SkinStack& stack, const LayerCoefficients& c, double omega, double depth);

/// Residual of all boundary equations relative to the largest traction.
double boundary_residual(const SkinStack& stack, const LoadSpec& load, double omega, const LayerCoefficients& c);

/// Closed-form surface u_z transfer of a homogeneous half-space under the
/// transformed normal traction.
cplx halfspace_surface_uz(const Material& m, double omega, cplx k, cplx normal);

struct AmplitudeProfile {
  std::vector<double> radii;  // m
  std::vector<double> u_r;    // m, magnitude
  std::vector<double> u_z;    // m, magnitude
  bool normalized = false;
  double reference_amplitude = 1.0;  // m; 1 for raw profiles

  void validate() const;
};

struct QuadratureOptions {
  int contour_panels = 32;
  int min_real_panels = 64;
  int gauss_points = 16;
  double kmax_factor = 40.0;       // k_max = kmax_factor / a
  bool check_convergence = true;
  double tolerance = 1e-4;
  bool apply_attenuation = true;   // multiply by the top-layer viscous factor
};

/// Surface displacement magnitudes at the given radii.
AmplitudeProfile surface_profile(const SkinStack& stack, const LoadSpec& load, const std::vector<double>& radii,
                                 const QuadratureOptions& options = {});

/// Complex surface displacement before magnitudes and attenuation; used by
/// tests that need phase information.
struct ComplexProfile {
  std::vector<cplx> u_r;
  std::vector<cplx> u_z;
};
ComplexProfile surface_field(const SkinStack& stack, const LoadSpec& load, const std::vector<double>& radii,
                             const QuadratureOptions& options = {});

/// Divides both components by |u_z| at the reference radius (linear
/// interpolation between samples).
AmplitudeProfile normalize_profile(const AmplitudeProfile& p, double reference_radius);

/// Stack file: {"layers": [{name, E_pa, nu, rho_kg_m3, eta_pa_s, bottom_depth_m}...], "substrate": {...}}.
SkinStack parse_stack(const std::string& text);
SkinStack load_stack(const std::filesystem::path& path);
std::string serialize_stack(const SkinStack& stack);
std::string stack_hash(const SkinStack& stack);

/// CSV `r_m,u_r_m,u_z_m` with `#` metadata lines.
std::string format_profile_csv(const AmplitudeProfile& p,
                               const std::vector<std::pair<std::string, std::string>>& metadata);
AmplitudeProfile parse_profile_csv(const std::string& text);

}  // namespace haptic
