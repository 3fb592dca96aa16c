#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "haptic/elastic.hpp"
#include "haptic/materials.hpp"
#include "haptic/skin_solver.hpp"

namespace haptic {

enum class DesignFamily { Embedded, Encapsulating, SingleLayer };

std::string_view to_string(DesignFamily f) noexcept;
DesignFamily parse_family(const std::string& text);

struct LayerSpec {
  Material material;
  double thickness;  // m

  bool operator==(const LayerSpec&) const = default;
};

/// Ring-shaped encapsulation around a motor of radius `inner_radius`.
/// SingleLayer designs hold their material and total thickness in layer1.
class HapticUnitDesign {
 public:
  static HapticUnitDesign two_layer(DesignFamily family, LayerSpec layer1, LayerSpec layer2, double inner_radius);
  static HapticUnitDesign single_layer(LayerSpec layer, double inner_radius);

  DesignFamily family() const noexcept { return family_; }
  const LayerSpec& layer1() const noexcept { return layer1_; }
  const std::optional<LayerSpec>& layer2() const noexcept { return layer2_; }
  double inner_radius() const noexcept { return inner_radius_; }
  double total_thickness() const noexcept;
  double outer_radius() const noexcept { return inner_radius_ + total_thickness(); }

  /// Stable text key; equal designs have equal keys.
  std::string identity() const;

  bool operator==(const HapticUnitDesign&) const = default;

 private:
  HapticUnitDesign(DesignFamily f, LayerSpec l1, std::optional<LayerSpec> l2, double d);

  DesignFamily family_;
  LayerSpec layer1_;
  std::optional<LayerSpec> layer2_;
  double inner_radius_;
};

namespace unit_defaults {
inline constexpr double inner_radius = 4.5e-3;     // m
inline constexpr double layer_thickness = 1.25e-3; // m
inline constexpr double motor_radius = 3.5e-3;     // m
}  // namespace unit_defaults

enum class OuterMedium { Skin, Air };

struct TransmissionOptions {
  OuterMedium outer = OuterMedium::Skin;
  /// Omit the skin-to-first-layer coefficient, as in the closed-form constraint.
  bool paper_faithful = false;
};

struct PathSegment {
  Material material;
  double length;  // m
};

struct PathInterface {
  std::string from;
  std::string to;
  InterfaceCoefficients coefficients;
};

/// Segments traversed from the motor edge to radius r, and the interfaces
/// whose transmission coefficients multiply the amplitude.
struct TransmissionPath {
  WaveKind kind;
  std::vector<PathSegment> segments;
  std::vector<PathInterface> interfaces;

  double total_length() const noexcept;
  double log_factor(double omega) const;
  double factor(double omega) const;
};

TransmissionPath transmission_path(const HapticUnitDesign& design, const Material& skin_top, double r, WaveKind kind,
                                   const TransmissionOptions& options = {});

/// Product of interface transmission coefficients and segment attenuation
/// factors from the motor edge (radius d) to radius r >= outer radius.
double transmitted_amplitude_factor(const HapticUnitDesign& design, const Material& skin_top, double omega, double r,
                                    WaveKind kind, const TransmissionOptions& options = {});

struct EdgeRatio {
  double primary;
  double secondary;
};

/// Candidate factor over control factor at r_edge, per wave kind.
EdgeRatio compare_designs(const HapticUnitDesign& candidate, const HapticUnitDesign& control,
                          const Material& skin_top, double omega, double r_edge,
                          const TransmissionOptions& options = {});

enum class Verdict { Attenuating, Amplifying, Indeterminate };
std::string_view to_string(Verdict v) noexcept;

struct ConstraintEntry {
  char label;  // 'a'..'d'
  double lhs;
  double rhs;
  double margin;
  bool satisfied;
};

struct ConstraintReport {
  std::array<ConstraintEntry, 4> entries;
  Verdict verdict;
};

/// Material inequalities for a two-layer design to attenuate relative to a
/// single layer of `control` with the same total thickness.
ConstraintReport check_constraints(const Material& layer1, const Material& layer2, const Material& control,
                                   double d1, double d2);

std::string constraint_report_json(const ConstraintReport& report);

enum class EdgeNormalization {
  SelfEdge,      // each profile equals 1 at its own edge
  BareSkinEdge,  // divided by the bare-skin amplitude at the edge
};

/// Bare-stack surface profile scaled by the design's transmission relative
/// to uninterrupted skin. radii.front() must be the design's outer radius.
AmplitudeProfile edge_amplitude_profile(const HapticUnitDesign& design, const SkinStack& stack, const LoadSpec& load,
                                        const std::vector<double>& radii, const TransmissionOptions& options = {},
                                        EdgeNormalization normalization = EdgeNormalization::SelfEdge,
                                        const QuadratureOptions& quadrature = {});

/// Design file: {"family", "layer1": {"material", "d1_m"}, "layer2": {"material", "d2_m"}, "inner_radius_m"}.
/// Single-layer designs omit layer2 and carry the total thickness in d1_m.
HapticUnitDesign parse_design(const std::string& text, const std::vector<Material>& catalog);
HapticUnitDesign load_design(const std::filesystem::path& path, const std::vector<Material>& catalog);
std::string serialize_design(const HapticUnitDesign& design);

}  // namespace haptic
