#include "haptic/materials.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "haptic/error.hpp"
#include "material_json.hpp"

namespace haptic {

namespace {

std::string describe(const std::string& name) { return name.empty() ? "<unnamed>" : name; }

}  // namespace

Material::Material(std::string name, double elastic_modulus, double poisson_ratio, double density,
                   double viscosity)
    : name_(std::move(name)),
      elastic_modulus_(elastic_modulus),
      poisson_ratio_(poisson_ratio),
      density_(density),
      viscosity_(viscosity) {
  const bool finite = std::isfinite(elastic_modulus) && std::isfinite(poisson_ratio) &&
                      std::isfinite(density) && std::isfinite(viscosity);
  if (!finite) {
    throw Error(ErrorCode::InvalidMaterial, "material " + describe(name_) + " has a non-finite property");
  }
  if (poisson_ratio >= 0.5) {
    throw Error(ErrorCode::IncompressibleMaterial,
                "material " + describe(name_) + " has poisson ratio >= 0.5");
  }
  if (poisson_ratio <= -1.0 || elastic_modulus <= 0.0 || density <= 0.0 || viscosity < 0.0) {
    throw Error(ErrorCode::InvalidMaterial,
                "material " + describe(name_) + " violates E > 0, rho > 0, eta >= 0, nu > -1");
  }
}

LameConstants lame_constants(double elastic_modulus, double poisson_ratio) {
  if (poisson_ratio >= 0.5) {
    throw Error(ErrorCode::IncompressibleMaterial, "lambda diverges for poisson ratio >= 0.5");
  }
  const double nu = poisson_ratio;
  const double lambda = elastic_modulus * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
  const double mu = elastic_modulus / (2.0 * (1.0 + nu));
  return {lambda, mu};
}

LameConstants lame_constants(const Material& m) {
  return lame_constants(m.elastic_modulus(), m.poisson_ratio());
}

StressStrainCurve::StressStrainCurve(std::vector<StrainStress> samples, std::string label)
    : samples_(std::move(samples)), label_(std::move(label)) {
  if (samples_.size() < 2) {
    throw Error(ErrorCode::MalformedCurve, "stress-strain curve needs at least 2 samples");
  }
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (!std::isfinite(samples_[i].strain) || !std::isfinite(samples_[i].stress)) {
      throw Error(ErrorCode::MalformedCurve, "non-finite sample at row " + std::to_string(i));
    }
    if (i > 0 && !(samples_[i].strain > samples_[i - 1].strain)) {
      throw Error(ErrorCode::MalformedCurve,
                  "strain not strictly increasing at row " + std::to_string(i));
    }
  }
}

ModulusFit fit_modulus(const StressStrainCurve& curve, StrainWindow window) {
  if (!(window.max > window.min)) {
    throw Error(ErrorCode::InvalidWindow, "strain window must satisfy min < max");
  }
  std::vector<StrainStress> in;
  for (const auto& s : curve.samples()) {
    if (s.strain >= window.min && s.strain <= window.max) in.push_back(s);
  }
  if (in.size() < 2) {
    throw Error(ErrorCode::InvalidWindow, "strain window contains fewer than 2 samples");
  }

  const double n = static_cast<double>(in.size());
  double slope = 0.0;
  double intercept = 0.0;
  if (window.min == 0.0) {
    double sxy = 0.0, sxx = 0.0;
    for (const auto& s : in) {
      sxy += s.strain * s.stress;
      sxx += s.strain * s.strain;
    }
    if (sxx == 0.0) throw Error(ErrorCode::InvalidWindow, "all samples in window at zero strain");
    slope = sxy / sxx;
  } else {
    double mx = 0.0, my = 0.0;
    for (const auto& s : in) {
      mx += s.strain;
      my += s.stress;
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (const auto& s : in) {
      sxy += (s.strain - mx) * (s.stress - my);
      sxx += (s.strain - mx) * (s.strain - mx);
    }
    slope = sxy / sxx;
    intercept = my - slope * mx;
  }
  if (!(slope > 0.0)) {
    throw Error(ErrorCode::FitFailure, "fitted modulus is not positive");
  }

  double ss = 0.0;
  for (const auto& s : in) {
    const double r = s.stress - (slope * s.strain + intercept);
    ss += r * r;
  }
  return {slope, window, std::sqrt(ss / n), static_cast<int>(in.size())};
}

Material material_from_record(const ordered_json& rec, const std::string& entry, ErrorCode code) {
  if (!rec.is_object()) throw Error(code, entry + " is not an object");
  if (!rec.contains("name") || !rec["name"].is_string()) {
    throw Error(code, entry + ": missing field 'name'");
  }
  const std::string name = rec["name"].get<std::string>();
  const std::string who = entry + " (" + name + ")";
  auto number = [&](const char* key, std::optional<double> fallback) -> double {
    if (!rec.contains(key)) {
      if (fallback) return *fallback;
      throw Error(code, who + ": missing field '" + key + "'");
    }
    const auto& v = rec[key];
    if (!v.is_number()) throw Error(code, who + ": field '" + key + "' is not a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw Error(code, who + ": field '" + key + "' is not finite");
    return x;
  };
  const double e = number("E_pa", std::nullopt);
  const double nu = number("nu", silicone_defaults::poisson_ratio);
  const double rho = number("rho_kg_m3", silicone_defaults::density);
  const double eta = number("eta_pa_s", silicone_defaults::viscosity);
  try {
    return Material(name, e, nu, rho, eta);
  } catch (const Error& err) {
    throw Error(code, who + ": " + err.what());
  }
}

ordered_json material_to_record(const Material& m) {
  ordered_json rec;
  rec["name"] = m.name();
  rec["E_pa"] = m.elastic_modulus();
  rec["nu"] = m.poisson_ratio();
  rec["rho_kg_m3"] = m.density();
  rec["eta_pa_s"] = m.viscosity();
  return rec;
}

std::vector<Material> parse_catalog(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::CatalogValidation, std::string("catalog does not parse: ") + e.what());
  }
  if (!doc.is_array()) throw Error(ErrorCode::CatalogValidation, "catalog must be a JSON array");

  std::vector<Material> out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    out.push_back(material_from_record(doc[i], "entry " + std::to_string(i), ErrorCode::CatalogValidation));
  }
  return out;
}

std::vector<Material> load_catalog(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open catalog " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) return {};
  return parse_catalog(text);
}

std::string serialize_catalog(const std::vector<Material>& catalog) {
  ordered_json doc = ordered_json::array();
  for (const auto& m : catalog) doc.push_back(material_to_record(m));
  return doc.dump(2) + "\n";
}

void save_catalog(const std::vector<Material>& catalog, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write catalog " + path.string());
  out << serialize_catalog(catalog);
}

const Material& find_material(const std::vector<Material>& catalog, const std::string& name) {
  for (const auto& m : catalog) {
    if (m.name() == name) return m;
  }
  throw Error(ErrorCode::CatalogValidation, "material '" + name + "' not in catalog");
}

StressStrainCurve load_stress_strain_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::MalformedCurve, "empty stress-strain file");
  std::vector<StrainStress> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string a, b;
    if (!std::getline(ls, a, ',') || !std::getline(ls, b)) {
      throw Error(ErrorCode::MalformedCurve, "line " + std::to_string(lineno) + " is not 2 columns");
    }
    try {
      rows.push_back({std::stod(a), std::stod(b)});
    } catch (const std::exception&) {
      throw Error(ErrorCode::MalformedCurve, "line " + std::to_string(lineno) + " is not numeric");
    }
  }
  return StressStrainCurve(std::move(rows), path.stem().string());
}

}  // namespace haptic
