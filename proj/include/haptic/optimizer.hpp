#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "haptic/unit_model.hpp"

namespace haptic {

enum class Direction { MinimizeEdgeRatio, MaximizeEdgeRatio };

struct DesignObjective {
  Direction direction = Direction::MinimizeEdgeRatio;
  double weight_p = 0.5;
  double weight_s = 0.5;
  /// Radius where the ratio is evaluated; unset means each design's own edge.
  std::optional<double> evaluation_radius;

  static DesignObjective uz_only(Direction d = Direction::MinimizeEdgeRatio);
  void validate() const;
  double value(const EdgeRatio& r) const noexcept { return weight_p * r.primary + weight_s * r.secondary; }
  /// True when objective a ranks ahead of b.
  bool better(double a, double b) const noexcept;
};

using ThicknessPair = std::pair<double, double>;  // (d1, d2), m

/// Cartesian product of the two value lists, keeping pairs with d1 + d2 <= bound.
std::vector<ThicknessPair> thickness_grid(const std::vector<double>& d1, const std::vector<double>& d2, double bound);

struct SearchSpace {
  std::vector<Material> catalog;
  std::vector<DesignFamily> families{DesignFamily::Embedded, DesignFamily::Encapsulating};
  std::vector<ThicknessPair> grid;
  double total_thickness_bound = 3e-3;
  double inner_radius = unit_defaults::inner_radius;

  void validate() const;
};

/// family x ordered pair of distinct materials x grid, in that nesting order.
std::vector<HapticUnitDesign> enumerate_designs(const SearchSpace& space);

enum class ControlPairing { Layer2, Layer1 };
std::string_view to_string(ControlPairing p) noexcept;

/// Single layer of the paired material, same inner radius and total thickness.
HapticUnitDesign matched_control(const HapticUnitDesign& design, ControlPairing pairing = ControlPairing::Layer2);

struct EvaluationOptions {
  TransmissionOptions transmission;
  ControlPairing pairing = ControlPairing::Layer2;
};

struct RankedEntry {
  HapticUnitDesign design;
  std::size_t design_id;  // position in enumeration order
  double objective;
  EdgeRatio ratio;
  std::optional<ConstraintReport> constraints;
  std::string error;  // non-empty when evaluation failed

  bool ok() const noexcept { return error.empty(); }
};

struct RankedDesigns {
  std::vector<RankedEntry> entries;
  std::size_t evaluations = 0;
  double elapsed_seconds = 0.0;
};

/// Evaluates one design against its matched control.
RankedEntry evaluate_design(const HapticUnitDesign& design, std::size_t id, const DesignObjective& objective,
                            const Material& skin_top, double omega, const EvaluationOptions& options = {});

/// Deterministic total order used for ranking: objective, then smaller total
/// thickness, then layer names, family and d1. Failed entries sort last.
bool rank_before(const RankedEntry& a, const RankedEntry& b, const DesignObjective& objective);

RankedDesigns optimize(const SearchSpace& space, const DesignObjective& objective, const Material& skin_top,
                       double omega, const EvaluationOptions& options = {});

struct ThicknessBounds {
  double d1_min, d1_max;
  double d2_min, d2_max;
  double total_max;

  void validate() const;
};

/// argmin of a unimodal f on [a, b]; endpoints are checked too.
double golden_section_minimize(const std::function<double(double)>& f, double a, double b, double tol);

struct CoordinateResult {
  double x, y, value;
  int iterations;
};

/// Alternating golden-section descent over a box with x + y <= sum_max,
/// plus a search along the sum edge whenever the iterate lies on it.
/// Stops once both coordinate moves fall below rel_tol relative to the box.
CoordinateResult coordinate_descent(const std::function<double(double, double)>& f, double x, double y,
                                    const ThicknessBounds& box, double rel_tol = 1e-6, int max_iterations = 200);

/// Continuous refinement of (d1, d2) with fixed materials and family.
HapticUnitDesign refine_thickness(const HapticUnitDesign& design, const DesignObjective& objective,
                                  const Material& skin_top, double omega, const ThicknessBounds& bounds,
                                  const EvaluationOptions& options = {});

/// Ranked table: design_id, family, layer1, layer2, d1_mm, d2_mm,
/// edge_ratio_p, edge_ratio_s, objective, verdict, error.
std::string format_ranked_csv(const RankedDesigns& ranked, const std::vector<std::pair<std::string, std::string>>& metadata);
std::string format_ranked_json(const RankedDesigns& ranked);

}  // namespace haptic
