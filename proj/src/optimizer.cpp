#include "haptic/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <set>

#include "haptic/error.hpp"
#include "haptic/io.hpp"
#include "haptic/parallel.hpp"
#include "material_json.hpp"

namespace haptic {

namespace {

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

const std::string& layer2_name(const HapticUnitDesign& d) {
  static const std::string none;
  return d.layer2() ? d.layer2()->material.name() : none;
}

}  // namespace

DesignObjective DesignObjective::uz_only(Direction d) { return {d, 0.0, 1.0, std::nullopt}; }

void DesignObjective::validate() const {
  if (!(weight_p >= 0.0) || !(weight_s >= 0.0) || std::abs(weight_p + weight_s - 1.0) > 1e-12) {
    throw Error(ErrorCode::InvalidSearchSpace, "objective weights must be non-negative and sum to 1");
  }
  if (evaluation_radius && !(*evaluation_radius > 0.0)) {
    throw Error(ErrorCode::InvalidSearchSpace, "evaluation radius must be positive");
  }
}

bool DesignObjective::better(double a, double b) const noexcept {
  return direction == Direction::MinimizeEdgeRatio ? a < b : a > b;
}

std::vector<ThicknessPair> thickness_grid(const std::vector<double>& d1, const std::vector<double>& d2, double bound) {
  std::vector<ThicknessPair> out;
  for (double a : d1) {
    for (double b : d2) {
      if (a + b <= bound * (1.0 + 1e-12)) out.emplace_back(a, b);
    }
  }
  return out;
}

void SearchSpace::validate() const {
  if (catalog.empty()) throw Error(ErrorCode::EmptySpace, "search space has an empty material catalog");
  if (families.empty()) throw Error(ErrorCode::InvalidSearchSpace, "search space lists no design family");
  for (auto f : families) {
    if (f == DesignFamily::SingleLayer) {
      throw Error(ErrorCode::InvalidSearchSpace, "single-layer designs are controls, not search candidates");
    }
  }
  if (grid.empty()) throw Error(ErrorCode::InvalidSearchSpace, "thickness grid is empty");
  if (!(inner_radius > 0.0)) throw Error(ErrorCode::InvalidSearchSpace, "inner radius must be positive");
  for (const auto& [a, b] : grid) {
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
      throw Error(ErrorCode::InvalidSearchSpace, "grid thicknesses must be positive");
    }
    if (a + b > total_thickness_bound * (1.0 + 1e-12)) {
      throw Error(ErrorCode::InvalidSearchSpace, "grid point exceeds the total thickness bound");
    }
  }
  std::set<std::string> names;
  for (const auto& m : catalog) {
    if (!names.insert(m.name()).second) {
      throw Error(ErrorCode::InvalidSearchSpace, "duplicate material name '" + m.name() + "'");
    }
  }
}

std::vector<HapticUnitDesign> enumerate_designs(const SearchSpace& space) {
  space.validate();
  std::vector<HapticUnitDesign> out;
  const std::size_t m = space.catalog.size();
  out.reserve(space.families.size() * m * (m - 1) * space.grid.size());
  for (auto family : space.families) {
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        if (i == j) continue;
        for (const auto& [d1, d2] : space.grid) {
          out.push_back(HapticUnitDesign::two_layer(family, {space.catalog[i], d1}, {space.catalog[j], d2},
                                                    space.inner_radius));
        }
      }
    }
  }
  return out;
}

std::string_view to_string(ControlPairing p) noexcept { return p == ControlPairing::Layer2 ? "layer2" : "layer1"; }

HapticUnitDesign matched_control(const HapticUnitDesign& design, ControlPairing pairing) {
  const Material& m = pairing == ControlPairing::Layer2 && design.layer2() ? design.layer2()->material
                                                                           : design.layer1().material;
  return HapticUnitDesign::single_layer({m, design.total_thickness()}, design.inner_radius());
}

RankedEntry evaluate_design(const HapticUnitDesign& design, std::size_t id, const DesignObjective& objective,
                            const Material& skin_top, double omega, const EvaluationOptions& options) {
  RankedEntry e{design, id, 0.0, {0.0, 0.0}, std::nullopt, {}};
  try {
    const HapticUnitDesign control = matched_control(design, options.pairing);
    const double r = objective.evaluation_radius.value_or(design.outer_radius());
    e.ratio = compare_designs(design, control, skin_top, omega, r, options.transmission);
    e.objective = objective.value(e.ratio);
    if (design.layer2()) {
      e.constraints = check_constraints(design.layer1().material, design.layer2()->material,
                                        control.layer1().material, design.layer1().thickness,
                                        design.layer2()->thickness);
    }
  } catch (const Error& err) {
    e.error = err.what();
  }
  return e;
}

bool rank_before(const RankedEntry& a, const RankedEntry& b, const DesignObjective& objective) {
  if (a.ok() != b.ok()) return a.ok();
  if (!a.ok()) return a.design_id < b.design_id;
  if (a.objective != b.objective) return objective.better(a.objective, b.objective);
  const double ta = a.design.total_thickness(), tb = b.design.total_thickness();
  if (ta != tb) return ta < tb;
  if (a.design.layer1().material.name() != b.design.layer1().material.name()) {
    return a.design.layer1().material.name() < b.design.layer1().material.name();
  }
  if (layer2_name(a.design) != layer2_name(b.design)) return layer2_name(a.design) < layer2_name(b.design);
  if (a.design.family() != b.design.family()) return a.design.family() < b.design.family();
  if (a.design.layer1().thickness != b.design.layer1().thickness) {
    return a.design.layer1().thickness < b.design.layer1().thickness;
  }
  return a.design_id < b.design_id;
}

RankedDesigns optimize(const SearchSpace& space, const DesignObjective& objective, const Material& skin_top,
                       double omega, const EvaluationOptions& options) {
  objective.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto designs = enumerate_designs(space);
  if (designs.empty()) throw Error(ErrorCode::EmptySpace, "search space enumerates no designs");

  std::vector<std::optional<RankedEntry>> slots(designs.size());
  parallel_for(designs.size(), [&](std::size_t i) {
    slots[i] = evaluate_design(designs[i], i, objective, skin_top, omega, options);
  });

  RankedDesigns out;
  out.evaluations = designs.size();
  std::set<std::string> seen;
  for (auto& s : slots) {
    if (seen.insert(s->design.identity()).second) out.entries.push_back(std::move(*s));
  }
  std::sort(out.entries.begin(), out.entries.end(),
            [&](const RankedEntry& a, const RankedEntry& b) { return rank_before(a, b, objective); });
  out.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

void ThicknessBounds::validate() const {
  const bool finite = std::isfinite(d1_min) && std::isfinite(d1_max) && std::isfinite(d2_min) &&
                      std::isfinite(d2_max) && std::isfinite(total_max);
  if (!finite || !(d1_min > 0.0) || !(d2_min > 0.0) || d1_max < d1_min || d2_max < d2_min ||
      d1_min + d2_min > total_max * (1.0 + 1e-12)) {
    throw Error(ErrorCode::InvalidSearchSpace, "thickness bounds are empty or non-positive");
  }
}

double golden_section_minimize(const std::function<double(double)>& f, double a, double b, double tol) {
  if (!(b > a)) return a;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  double best = fc <= fd ? c : d;
  double fbest = std::min(fc, fd);
  // monotone objectives put the optimum on an endpoint
  for (double x : {a, b}) {
    const double fx = f(x);
    if (fx < fbest) {
      fbest = fx;
      best = x;
    }
  }
  return best;
}

CoordinateResult coordinate_descent(const std::function<double(double, double)>& f, double x, double y,
                                    const ThicknessBounds& box, double rel_tol, int max_iterations) {
  box.validate();
  const double scale_x = std::max(box.d1_max, box.d1_min);
  const double scale_y = std::max(box.d2_max, box.d2_min);
  x = std::clamp(x, box.d1_min, box.d1_max);
  y = std::clamp(y, box.d2_min, std::min(box.d2_max, box.total_max - x));
  double value = f(x, y);
  int it = 0;
  for (; it < max_iterations; ++it) {
    const double x_hi = std::max(box.d1_min, std::min(box.d1_max, box.total_max - y));
    double nx = golden_section_minimize([&](double t) { return f(t, y); }, box.d1_min, x_hi, 1e-3 * rel_tol * scale_x);
    double fx = f(nx, y);
    if (!(fx < value)) {
      nx = x;
      fx = value;
    }
    const double y_hi = std::max(box.d2_min, std::min(box.d2_max, box.total_max - nx));
    double ny = golden_section_minimize([&](double t) { return f(nx, t); }, box.d2_min, y_hi, 1e-3 * rel_tol * scale_y);
    double fy = f(nx, ny);
    if (!(fy < fx)) {
      ny = y;
      fy = fx;
    }
    // slide along x + y = total_max when pinned against it
    if (nx + ny >= box.total_max * (1.0 - 1e-12)) {
      const double lo = std::max(box.d1_min, box.total_max - box.d2_max);
      const double hi = std::min(box.d1_max, box.total_max - box.d2_min);
      if (hi > lo) {
        const double ex = golden_section_minimize([&](double t) { return f(t, box.total_max - t); }, lo, hi,
                                                  1e-3 * rel_tol * scale_x);
        const double fe = f(ex, box.total_max - ex);
        if (fe < fy) {
          nx = ex;
          ny = box.total_max - ex;
          fy = fe;
        }
      }
    }
    const double step_x = std::abs(nx - x) / scale_x;
    const double step_y = std::abs(ny - y) / scale_y;
    x = nx;
    y = ny;
    value = fy;
    if (step_x < rel_tol && step_y < rel_tol) {
      ++it;
      break;
    }
  }
  return {x, y, value, it};
}

HapticUnitDesign refine_thickness(const HapticUnitDesign& design, const DesignObjective& objective,
                                  const Material& skin_top, double omega, const ThicknessBounds& bounds,
                                  const EvaluationOptions& options) {
  objective.validate();
  if (!design.layer2()) throw Error(ErrorCode::InvalidDesign, "refinement needs a two-layer design");
  ThicknessBounds box = bounds;
  if (objective.evaluation_radius) {
    box.total_max = std::min(box.total_max, *objective.evaluation_radius - design.inner_radius());
  }
  box.validate();
  const double sign = objective.direction == Direction::MinimizeEdgeRatio ? 1.0 : -1.0;
  auto make = [&](double d1, double d2) {
    return HapticUnitDesign::two_layer(design.family(), {design.layer1().material, d1},
                                       {design.layer2()->material, d2}, design.inner_radius());
  };
  auto f = [&](double d1, double d2) {
    const auto cand = make(d1, d2);
    const auto control = matched_control(cand, options.pairing);
    const double r = objective.evaluation_radius.value_or(cand.outer_radius());
    return sign * objective.value(compare_designs(cand, control, skin_top, omega, r, options.transmission));
  };
  const auto res = coordinate_descent(f, design.layer1().thickness, design.layer2()->thickness, box);
  return make(res.x, res.y);
}

std::string format_ranked_csv(const RankedDesigns& ranked,
                              const std::vector<std::pair<std::string, std::string>>& metadata) {
  std::string out;
  for (const auto& [k, v] : metadata) out += "# " + k + "=" + v + "\n";
  out += "rank,design_id,family,layer1,layer2,d1_mm,d2_mm,edge_ratio_p,edge_ratio_s,objective,verdict,error\n";
  std::size_t rank = 0;
  for (const auto& e : ranked.entries) {
    const auto& d = e.design;
    out += std::to_string(++rank) + "," + std::to_string(e.design_id) + "," + std::string(to_string(d.family())) +
           "," + csv_quote(d.layer1().material.name()) + "," + csv_quote(layer2_name(d)) + "," +
           io::format_number(d.layer1().thickness * 1e3) + "," +
           io::format_number(d.layer2() ? d.layer2()->thickness * 1e3 : 0.0) + ",";
    if (e.ok()) {
      out += io::format_number(e.ratio.primary) + "," + io::format_number(e.ratio.secondary) + "," +
             io::format_number(e.objective) + "," +
             (e.constraints ? std::string(to_string(e.constraints->verdict)) : std::string()) + ",\n";
    } else {
      out += ",,,," + csv_quote(e.error) + "\n";
    }
  }
  return out;
}

std::string format_ranked_json(const RankedDesigns& ranked) {
  ordered_json doc;
  doc["evaluations"] = ranked.evaluations;
  doc["designs"] = ordered_json::array();
  for (const auto& e : ranked.entries) {
    ordered_json rec = ordered_json::parse(serialize_design(e.design));
    rec["design_id"] = e.design_id;
    if (e.ok()) {
      rec["edge_ratio_p"] = e.ratio.primary;
      rec["edge_ratio_s"] = e.ratio.secondary;
      rec["objective"] = e.objective;
      if (e.constraints) rec["constraints"] = ordered_json::parse(constraint_report_json(*e.constraints));
    } else {
      rec["error"] = e.error;
    }
    doc["designs"].push_back(std::move(rec));
  }
  return doc.dump(2) + "\n";
}

}  // namespace haptic
