#include "haptic/unit_model.hpp"

#include <cmath>
#include <cstdio>

#include "haptic/error.hpp"
#include "haptic/io.hpp"
#include "material_json.hpp"

namespace haptic {

namespace {

void check_length(double v, const char* what) {
  if (!std::isfinite(v) || v < 0.0) {
    throw Error(ErrorCode::InvalidDesign, std::string(what) + " must be finite and non-negative");
  }
}

std::string exact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Medium {
  std::string name;
  double impedance;
};

}  // namespace

std::string_view to_string(DesignFamily f) noexcept {
  switch (f) {
    case DesignFamily::Embedded: return "embedded";
    case DesignFamily::Encapsulating: return "encapsulating";
    case DesignFamily::SingleLayer: return "single-layer";
  }
  return "unknown";
}

DesignFamily parse_family(const std::string& text) {
  for (auto f : {DesignFamily::Embedded, DesignFamily::Encapsulating, DesignFamily::SingleLayer}) {
    if (text == to_string(f)) return f;
  }
  throw Error(ErrorCode::InvalidDesign, "unknown design family '" + text + "'");
}

HapticUnitDesign::HapticUnitDesign(DesignFamily f, LayerSpec l1, std::optional<LayerSpec> l2, double d)
    : family_(f), layer1_(std::move(l1)), layer2_(std::move(l2)), inner_radius_(d) {
  if (!std::isfinite(d) || !(d > 0.0)) throw Error(ErrorCode::InvalidDesign, "inner radius must be positive");
  check_length(layer1_.thickness, "layer 1 thickness");
  if (layer2_) check_length(layer2_->thickness, "layer 2 thickness");
}

HapticUnitDesign HapticUnitDesign::two_layer(DesignFamily family, LayerSpec layer1, LayerSpec layer2,
                                             double inner_radius) {
  if (family == DesignFamily::SingleLayer) {
    throw Error(ErrorCode::InvalidDesign, "two-layer design needs the embedded or encapsulating family");
  }
  return HapticUnitDesign(family, std::move(layer1), std::move(layer2), inner_radius);
}

HapticUnitDesign HapticUnitDesign::single_layer(LayerSpec layer, double inner_radius) {
  return HapticUnitDesign(DesignFamily::SingleLayer, std::move(layer), std::nullopt, inner_radius);
}

double HapticUnitDesign::total_thickness() const noexcept {
  return layer1_.thickness + (layer2_ ? layer2_->thickness : 0.0);
}

std::string HapticUnitDesign::identity() const {
  std::string id = std::string(to_string(family_)) + "|" + layer1_.material.name() + "|" + exact(layer1_.thickness);
  if (layer2_) id += "|" + layer2_->material.name() + "|" + exact(layer2_->thickness);
  return id + "|" + exact(inner_radius_);
}

double TransmissionPath::total_length() const noexcept {
  double s = 0.0;
  for (const auto& seg : segments) s += seg.length;
  return s;
}

double TransmissionPath::log_factor(double omega) const {
  double s = 0.0;
  for (const auto& seg : segments) s += log_attenuation(seg.material, omega, seg.length, kind);
  for (const auto& i : interfaces) s += std::log(i.coefficients.k_t);
  return s;
}

double TransmissionPath::factor(double omega) const {
  double f = 1.0;
  for (const auto& seg : segments) f *= attenuation_factor(seg.material, omega, seg.length, kind);
  for (const auto& i : interfaces) f *= i.coefficients.k_t;
  return f;
}

TransmissionPath transmission_path(const HapticUnitDesign& design, const Material& skin_top, double r, WaveKind kind,
                                   const TransmissionOptions& options) {
  const double outer = design.outer_radius();
  if (!std::isfinite(r) || r < outer * (1.0 - 1e-12)) {
    throw Error(ErrorCode::DomainError, "evaluation radius " + io::format_number(r) +
                                            " m lies inside the unit (outer radius " + io::format_number(outer) + " m)");
  }
  std::vector<PathSegment> layers;
  if (design.family() == DesignFamily::Embedded && kind == WaveKind::Secondary) {
    // beneath the board only Layer 2 separates motor and skin
    layers.push_back({design.layer2()->material, design.total_thickness()});
  } else {
    layers.push_back({design.layer1().material, design.layer1().thickness});
    if (design.layer2()) layers.push_back({design.layer2()->material, design.layer2()->thickness});
  }
  std::erase_if(layers, [](const PathSegment& s) { return s.length == 0.0; });

  TransmissionPath path{kind, {}, {}};
  path.segments.push_back({skin_top, design.inner_radius()});
  Medium prev{skin_top.name(), impedance(skin_top, kind)};
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const Medium next{layers[i].material.name(), impedance(layers[i].material, kind)};
    if (i > 0 || !options.paper_faithful) {
      path.interfaces.push_back({prev.name, next.name, interface_coefficients(prev.impedance, next.impedance)});
    }
    path.segments.push_back(layers[i]);
    prev = next;
  }
  if (!layers.empty()) {
    const Medium out = options.outer == OuterMedium::Air ? Medium{"air", air::impedance(kind)}
                                                          : Medium{skin_top.name(), impedance(skin_top, kind)};
    path.interfaces.push_back({prev.name, out.name, interface_coefficients(prev.impedance, out.impedance)});
  }
  path.segments.push_back({skin_top, std::max(0.0, r - outer)});
  return path;
}

double transmitted_amplitude_factor(const HapticUnitDesign& design, const Material& skin_top, double omega, double r,
                                    WaveKind kind, const TransmissionOptions& options) {
  if (!(omega >= 0.0) || !std::isfinite(omega)) throw Error(ErrorCode::DomainError, "omega must be non-negative");
  return transmission_path(design, skin_top, r, kind, options).factor(omega);
}

EdgeRatio compare_designs(const HapticUnitDesign& candidate, const HapticUnitDesign& control,
                          const Material& skin_top, double omega, double r_edge,
                          const TransmissionOptions& options) {
  const auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)); };
  if (!close(candidate.inner_radius(), control.inner_radius()) ||
      !close(candidate.outer_radius(), control.outer_radius())) {
    throw Error(ErrorCode::IncomparableDesigns, "designs differ in inner or outer radius");
  }
  auto ratio = [&](WaveKind kind) {
    return transmitted_amplitude_factor(candidate, skin_top, omega, r_edge, kind, options) /
           transmitted_amplitude_factor(control, skin_top, omega, r_edge, kind, options);
  };
  return {ratio(WaveKind::Primary), ratio(WaveKind::Secondary)};
}

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::Attenuating: return "Attenuating";
    case Verdict::Amplifying: return "Amplifying";
    case Verdict::Indeterminate: return "Indeterminate";
  }
  return "unknown";
}

ConstraintReport check_constraints(const Material& layer1, const Material& layer2, const Material& control,
                                   double d1, double d2) {
  if (!std::isfinite(d1) || !std::isfinite(d2) || !(d1 > 0.0) || !(d2 > 0.0)) {
    throw Error(ErrorCode::InvalidDesign, "layer thicknesses must be positive");
  }
  auto viscous_p = [](const Material& m) {
    const double e = m.elastic_modulus(), nu = m.poisson_ratio();
    return m.viscosity() * std::sqrt((1.0 + nu) * (1.0 - 2.0 * nu) * m.density()) / (e * std::sqrt(e * (1.0 - nu)));
  };
  auto viscous_s = [](const Material& m) {
    const double e = m.elastic_modulus(), nu = m.poisson_ratio();
    return m.viscosity() * std::sqrt(2.0 * (1.0 + nu) * m.density()) / (e * std::sqrt(e));
  };
  auto stiff_p = [](const Material& m) {
    const double nu = m.poisson_ratio();
    return m.elastic_modulus() * m.density() * (1.0 - nu) / ((1.0 + nu) * (1.0 - 2.0 * nu));
  };
  auto stiff_s = [](const Material& m) { return m.elastic_modulus() * m.density() / (1.0 + m.poisson_ratio()); };

  ConstraintReport rep{};
  // margins of (a) and (b) grouped per layer so identical materials give exactly 0
  auto path_entry = [&](char label, auto x) {
    const double x1 = x(layer1), x2 = x(layer2), xc = x(control);
    const double margin = d1 * (x1 - xc) + d2 * (x2 - xc);
    return ConstraintEntry{label, d1 * x1 + d2 * x2, (d1 + d2) * xc, margin, margin > 0.0};
  };
  auto order_entry = [&](char label, auto y) {
    const double lhs = y(layer1), rhs = y(layer2);
    return ConstraintEntry{label, lhs, rhs, rhs - lhs, rhs - lhs > 0.0};
  };
  rep.entries = {path_entry('a', viscous_p), path_entry('b', viscous_s), order_entry('c', stiff_p),
                 order_entry('d', stiff_s)};
  bool all_pos = true, all_neg = true;
  for (const auto& e : rep.entries) {
    all_pos = all_pos && e.margin > 0.0;
    all_neg = all_neg && e.margin < 0.0;
  }
  rep.verdict = all_pos ? Verdict::Attenuating : all_neg ? Verdict::Amplifying : Verdict::Indeterminate;
  return rep;
}

std::string constraint_report_json(const ConstraintReport& report) {
  ordered_json doc;
  doc["entries"] = ordered_json::array();
  for (const auto& e : report.entries) {
    ordered_json rec;
    rec["label"] = std::string(1, e.label);
    rec["lhs"] = e.lhs;
    rec["rhs"] = e.rhs;
    rec["margin"] = e.margin;
    rec["satisfied"] = e.satisfied;
    doc["entries"].push_back(std::move(rec));
  }
  doc["verdict"] = std::string(to_string(report.verdict));
  return doc.dump(2) + "\n";
}

AmplitudeProfile edge_amplitude_profile(const HapticUnitDesign& design, const SkinStack& stack, const LoadSpec& load,
                                        const std::vector<double>& radii, const TransmissionOptions& options,
                                        EdgeNormalization normalization, const QuadratureOptions& quadrature) {
  if (radii.empty()) throw Error(ErrorCode::DomainError, "edge profile needs at least one radius");
  const double edge = radii.front();
  if (std::abs(edge - design.outer_radius()) > 1e-12 * design.outer_radius()) {
    throw Error(ErrorCode::DomainError, "edge profile radii must start at the outer radius " +
                                            io::format_number(design.outer_radius()) + " m");
  }
  const double omega = load.omega();
  const Material& skin = stack.top();
  // The design path and the bare-skin path share the skin beyond the unit,
  // so their ratio does not depend on r.
  auto relative = [&](WaveKind kind) {
    return std::exp(transmission_path(design, skin, edge, kind, options).log_factor(omega) -
                    log_attenuation(skin, omega, edge, kind));
  };
  const double rel_p = relative(WaveKind::Primary);
  const double rel_s = relative(WaveKind::Secondary);

  AmplitudeProfile p = surface_profile(stack, load, radii, quadrature);
  const double bare_edge = p.u_z.front();
  for (auto& v : p.u_r) v *= rel_p;
  for (auto& v : p.u_z) v *= rel_s;
  if (normalization == EdgeNormalization::SelfEdge) return normalize_profile(p, edge);

  if (!(bare_edge > 0.0)) throw Error(ErrorCode::DegenerateNormalization, "bare-skin edge amplitude is zero");
  for (auto& v : p.u_r) v /= bare_edge;
  for (auto& v : p.u_z) v /= bare_edge;
  p.normalized = true;
  p.reference_amplitude = bare_edge;
  return p;
}

HapticUnitDesign parse_design(const std::string& text, const std::vector<Material>& catalog) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidDesign, std::string("design does not parse: ") + e.what());
  }
  auto need = [&](const ordered_json& obj, const char* key, const std::string& where) -> const ordered_json& {
    if (!obj.is_object() || !obj.contains(key)) {
      throw Error(ErrorCode::InvalidDesign, where + ": missing field '" + key + "'");
    }
    return obj[key];
  };
  auto number = [&](const ordered_json& obj, const char* key, const std::string& where) {
    const auto& v = need(obj, key, where);
    if (!v.is_number()) throw Error(ErrorCode::InvalidDesign, where + ": field '" + key + "' is not a number");
    return v.get<double>();
  };
  auto layer = [&](const char* key, const char* thick) {
    const auto& rec = need(doc, key, "design");
    const auto& name = need(rec, "material", key);
    if (!name.is_string()) throw Error(ErrorCode::InvalidDesign, std::string(key) + ": material must be a name");
    return LayerSpec{find_material(catalog, name.get<std::string>()), number(rec, thick, key)};
  };
  const auto& fam = need(doc, "family", "design");
  if (!fam.is_string()) throw Error(ErrorCode::InvalidDesign, "design: family must be text");
  const DesignFamily family = parse_family(fam.get<std::string>());
  const double d = doc.contains("inner_radius_m") ? number(doc, "inner_radius_m", "design") : unit_defaults::inner_radius;
  if (family == DesignFamily::SingleLayer) return HapticUnitDesign::single_layer(layer("layer1", "d1_m"), d);
  return HapticUnitDesign::two_layer(family, layer("layer1", "d1_m"), layer("layer2", "d2_m"), d);
}

HapticUnitDesign load_design(const std::filesystem::path& path, const std::vector<Material>& catalog) {
  return parse_design(io::read_text_file(path), catalog);
}

std::string serialize_design(const HapticUnitDesign& design) {
  ordered_json doc;
  doc["family"] = std::string(to_string(design.family()));
  doc["layer1"] = {{"material", design.layer1().material.name()}, {"d1_m", design.layer1().thickness}};
  if (design.layer2()) {
    doc["layer2"] = {{"material", design.layer2()->material.name()}, {"d2_m", design.layer2()->thickness}};
  }
  doc["inner_radius_m"] = design.inner_radius();
  return doc.dump(2) + "\n";
}

}  // namespace haptic
