#include "haptic/cli.hpp"

#include <fftw3.h>
#include <openssl/crypto.h>

#include <CLI11.hpp>
#include <Eigen/Core>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <numbers>
#include <optional>
#include <sstream>

#include "haptic/error.hpp"
#include "haptic/io.hpp"
#include "haptic/materials.hpp"
#include "haptic/optimizer.hpp"
#include "haptic/parallel.hpp"
#include "haptic/signals.hpp"
#include "haptic/simd/kernels.hpp"
#include "haptic/skin_solver.hpp"
#include "haptic/unit_model.hpp"

namespace haptic::cli {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;
using Metadata = std::vector<std::pair<std::string, std::string>>;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double v) { return io::format_number(v); }

fs::path existing(const std::string& path, const std::string& what) {
  if (path.empty() || !fs::is_regular_file(path)) throw UsageError(what + " not found: " + path);
  return path;
}

fs::path resolve_catalog(const std::string& flag) {
  if (!flag.empty()) return existing(flag, "catalog");
  if (const char* env = std::getenv("HAPTIC_CATALOG"); env && *env) return existing(env, "catalog (HAPTIC_CATALOG)");
  return existing(HAPTIC_DEFAULT_CATALOG, "default catalog");
}

fs::path resolve_stack(const std::string& flag) {
  return existing(flag.empty() ? std::string(HAPTIC_DEFAULT_STACK) : flag, "stack");
}

/// Artifacts of one invocation plus the manifest describing them.
class RunRecord {
 public:
  RunRecord(std::string command, std::vector<std::string> args, fs::path dir)
      : command_(std::move(command)), args_(std::move(args)), dir_(std::move(dir)) {}

  ordered_json& config() { return config_; }

  void input(const fs::path& p) { inputs_.push_back({{"path", p.string()}, {"sha256", io::sha256_file(p)}}); }

  void write(const std::string& name, const std::string& content) {
    io::write_text_file(dir_ / name, content);
    outputs_.push_back({{"file", name}, {"bytes", content.size()}, {"sha256", io::sha256_hex(content)}});
  }

  void finish() const {
    ordered_json m;
    m["tool"] = "hapticsim";
    m["version"] = std::string(kVersion);
    m["command"] = command_;
    m["arguments"] = args_;
    m["config"] = config_;
    m["inputs"] = inputs_;
    m["outputs"] = outputs_;
    m["environment"] = {
        {"simd", std::string(simd::to_string(simd::active_isa()))},
        {"threads", thread_limit()},
        {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                      std::to_string(EIGEN_MINOR_VERSION)},
        {"fftw", std::string(fftw_version)},
        {"openssl", std::string(OpenSSL_version(OPENSSL_VERSION))},
        {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                              std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                              std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
        {"cli11", std::string(CLI11_VERSION)},
    };
    io::write_text_file(dir_ / "manifest.json", m.dump(2) + "\n");
  }

 private:
  std::string command_;
  std::vector<std::string> args_;
  fs::path dir_;
  ordered_json config_ = ordered_json::object();
  ordered_json inputs_ = ordered_json::array();
  ordered_json outputs_ = ordered_json::array();
};

struct Common {
  std::string out_dir = "hapticsim-out";
  std::string catalog;
  unsigned threads = 0;
};

struct Physics {
  double frequency = 125.0;
  std::string stack;
  bool paper_faithful = false;
  std::string outer = "skin";
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("-o,--out", c.out_dir, "Output directory")->capture_default_str();
  sub->add_option("--catalog", c.catalog, "Material catalog JSON (default: $HAPTIC_CATALOG)");
  sub->add_option("--threads", c.threads, "Worker thread bound, 0 = hardware")->capture_default_str();
}

void add_physics(CLI::App* sub, Physics& p, bool transmission) {
  sub->add_option("-f,--frequency", p.frequency, "Excitation frequency in Hz")->capture_default_str();
  sub->add_option("--stack", p.stack, "Skin stack JSON (default: bundled forearm stack)");
  if (transmission) {
    sub->add_flag("--paper-faithful", p.paper_faithful, "Omit the skin-to-layer-1 interface");
    sub->add_option("--outer-medium", p.outer, "Medium beyond the unit: skin or air")
        ->check(CLI::IsMember({"skin", "air"}))
        ->capture_default_str();
  }
}

TransmissionOptions transmission_of(const Physics& p) {
  return {p.outer == "air" ? OuterMedium::Air : OuterMedium::Skin, p.paper_faithful};
}

double checked_frequency(double f, std::ostream& err) {
  if (!std::isfinite(f) || f < 1.0 || f > 1000.0) {
    throw Error(ErrorCode::InvalidLoad, "frequency must lie in [1, 1000] Hz");
  }
  if (f < 100.0 || f > 150.0) err << "warning: frequency " << num(f) << " Hz is outside the 100-150 Hz motor band\n";
  return f;
}

ordered_json physics_config(const Physics& p) {
  return {{"frequency_hz", p.frequency}, {"paper_faithful", p.paper_faithful}, {"outer_medium", p.outer}};
}

ControlPairing parse_pairing(const std::string& s) { return s == "layer1" ? ControlPairing::Layer1 : ControlPairing::Layer2; }

std::string describe(const HapticUnitDesign& d);

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  Common common;
  Physics physics;
  std::string design;
  double pressure = 1000.0;
  double shear = 0.0;
  double disk_radius = unit_defaults::motor_radius;
  std::optional<double> r_min;
  double span = 20e-3;
  std::size_t points = 81;
  std::optional<double> normalize_at;
  std::string edge_norm = "self";
  bool no_attenuation = false;
};

void simulate(const SimulateArgs& a, RunRecord& run, std::ostream& out, std::ostream& err) {
  const double f = checked_frequency(a.physics.frequency, err);
  const fs::path stack_path = resolve_stack(a.physics.stack);
  run.input(stack_path);
  const SkinStack stack = load_stack(stack_path);
  LoadSpec load{a.pressure, a.shear, a.disk_radius, f};
  load.validate();
  if (a.points < 2) throw UsageError("--points must be at least 2");
  if (!(a.span > 0.0)) throw UsageError("--span must be positive");

  std::optional<HapticUnitDesign> design;
  if (!a.design.empty()) {
    const fs::path cat = resolve_catalog(a.common.catalog);
    run.input(cat);
    const fs::path dp = existing(a.design, "design");
    run.input(dp);
    design = load_design(dp, load_catalog(cat));
  }
  const double r0 = a.r_min.value_or(design ? design->outer_radius() : 0.0);
  std::vector<double> radii(a.points);
  for (std::size_t i = 0; i < a.points; ++i) radii[i] = r0 + a.span * static_cast<double>(i) / static_cast<double>(a.points - 1);

  QuadratureOptions quad;
  quad.apply_attenuation = !a.no_attenuation;
  AmplitudeProfile profile;
  Metadata meta = {{"command", "simulate"},
                   {"frequency_hz", num(f)},
                   {"normal_traction_pa", num(load.normal_traction)},
                   {"tangential_traction_pa", num(load.tangential_traction)},
                   {"disk_radius_m", num(load.disk_radius)},
                   {"stack_sha256", stack_hash(stack)}};
  if (design) {
    const auto norm = a.edge_norm == "bare-skin" ? EdgeNormalization::BareSkinEdge : EdgeNormalization::SelfEdge;
    profile = edge_amplitude_profile(*design, stack, load, radii, transmission_of(a.physics), norm, quad);
    meta.emplace_back("design", design->identity());
    meta.emplace_back("edge_radius_m", num(design->outer_radius()));
    meta.emplace_back("edge_normalization", a.edge_norm);
  } else {
    profile = surface_profile(stack, load, radii, quad);
    if (a.normalize_at) {
      profile = normalize_profile(profile, *a.normalize_at);
      meta.emplace_back("edge_radius_m", num(*a.normalize_at));
    }
  }
  run.config() = physics_config(a.physics);
  run.config()["normal_traction_pa"] = load.normal_traction;
  run.config()["tangential_traction_pa"] = load.tangential_traction;
  run.config()["disk_radius_m"] = load.disk_radius;
  run.config()["r_min_m"] = r0;
  run.config()["span_m"] = a.span;
  run.config()["points"] = a.points;
  run.config()["attenuation"] = !a.no_attenuation;
  run.write("profile.csv", format_profile_csv(profile, meta));
  out << "profile: " << profile.radii.size() << " radii from " << num(radii.front()) << " m to "
      << num(radii.back()) << " m\n";
}

// ---------------------------------------------------------------- design-eval

struct DesignEvalArgs {
  Common common;
  Physics physics;
  std::string design;
  std::string control;
  std::string pairing = "layer2";
  std::optional<double> r_edge;
};

ordered_json factor_json(const HapticUnitDesign& d, const Material& skin, double omega, double r,
                         const TransmissionOptions& t) {
  return {{"primary", transmitted_amplitude_factor(d, skin, omega, r, WaveKind::Primary, t)},
          {"secondary", transmitted_amplitude_factor(d, skin, omega, r, WaveKind::Secondary, t)}};
}

void design_eval(const DesignEvalArgs& a, RunRecord& run, std::ostream& out, std::ostream& err) {
  const double f = checked_frequency(a.physics.frequency, err);
  const double omega = 2.0 * std::numbers::pi * f;
  const fs::path cat_path = resolve_catalog(a.common.catalog);
  const fs::path stack_path = resolve_stack(a.physics.stack);
  const fs::path design_path = existing(a.design, "design");
  run.input(cat_path);
  run.input(stack_path);
  run.input(design_path);
  const auto catalog = load_catalog(cat_path);
  const Material skin = load_stack(stack_path).top();
  const HapticUnitDesign design = load_design(design_path, catalog);
  HapticUnitDesign control = matched_control(design, parse_pairing(a.pairing));
  if (!a.control.empty()) {
    const fs::path cp = existing(a.control, "control design");
    run.input(cp);
    control = load_design(cp, catalog);
  }
  const double r = a.r_edge.value_or(design.outer_radius());
  const TransmissionOptions t = transmission_of(a.physics);
  const EdgeRatio ratio = compare_designs(design, control, skin, omega, r, t);

  ordered_json rep;
  rep["design"] = ordered_json::parse(serialize_design(design));
  rep["control"] = ordered_json::parse(serialize_design(control));
  rep["frequency_hz"] = f;
  rep["r_edge_m"] = r;
  rep["skin_top"] = skin.name();
  rep["edge_ratio"] = {{"primary", ratio.primary}, {"secondary", ratio.secondary}};
  rep["factor"] = {{"design", factor_json(design, skin, omega, r, t)},
                   {"control", factor_json(control, skin, omega, r, t)}};
  std::optional<ConstraintReport> constraints;
  if (design.layer2() && control.family() == DesignFamily::SingleLayer) {
    constraints = check_constraints(design.layer1().material, design.layer2()->material, control.layer1().material,
                                    design.layer1().thickness, design.layer2()->thickness);
    rep["constraints"] = ordered_json::parse(constraint_report_json(*constraints));
  }
  run.config() = physics_config(a.physics);
  run.config()["pairing"] = a.pairing;
  run.config()["r_edge_m"] = r;
  run.write("design_eval.json", rep.dump(2) + "\n");
  out << "edge_ratio_p=" << num(ratio.primary) << " edge_ratio_s=" << num(ratio.secondary);
  if (constraints) out << " verdict=" << to_string(constraints->verdict);
  out << "\n";
}

// ---------------------------------------------------------------- check

struct CheckArgs {
  Common common;
  std::string layer1, layer2, control;
  double d1 = unit_defaults::layer_thickness;
  double d2 = unit_defaults::layer_thickness;
};

void check(const CheckArgs& a, RunRecord& run, std::ostream& out) {
  const fs::path cat_path = resolve_catalog(a.common.catalog);
  run.input(cat_path);
  const auto catalog = load_catalog(cat_path);
  const ConstraintReport rep = check_constraints(find_material(catalog, a.layer1), find_material(catalog, a.layer2),
                                                 find_material(catalog, a.control), a.d1, a.d2);
  ordered_json doc = ordered_json::parse(constraint_report_json(rep));
  ordered_json full = {{"layer1", a.layer1}, {"layer2", a.layer2}, {"control", a.control}, {"d1_m", a.d1}, {"d2_m", a.d2}};
  full.update(doc);
  run.config() = {{"layer1", a.layer1}, {"layer2", a.layer2}, {"control", a.control}, {"d1_m", a.d1}, {"d2_m", a.d2}};
  run.write("constraints.json", full.dump(2) + "\n");
  for (const auto& e : rep.entries) {
    out << "(" << e.label << ") margin=" << num(e.margin) << (e.satisfied ? " satisfied" : " violated") << "\n";
  }
  out << "verdict: " << to_string(rep.verdict) << "\n";
}

// ---------------------------------------------------------------- optimize

struct OptimizeArgs {
  Common common;
  Physics physics;
  std::vector<std::string> families{"embedded", "encapsulating"};
  std::vector<double> d1{0.5e-3, 1.0e-3, 1.25e-3, 1.5e-3, 2.0e-3};
  std::vector<double> d2{0.5e-3, 1.0e-3, 1.25e-3, 1.5e-3, 2.0e-3};
  double bound = 3e-3;
  double inner_radius = unit_defaults::inner_radius;
  bool uz_only = false;
  std::vector<double> weights;
  bool maximize = false;
  std::string pairing = "layer2";
  std::optional<double> eval_radius;
  std::size_t top = 5;
  bool refine = false;
};

void optimize_cmd(const OptimizeArgs& a, RunRecord& run, std::ostream& out, std::ostream& err) {
  const double f = checked_frequency(a.physics.frequency, err);
  const double omega = 2.0 * std::numbers::pi * f;
  const fs::path cat_path = resolve_catalog(a.common.catalog);
  const fs::path stack_path = resolve_stack(a.physics.stack);
  run.input(cat_path);
  run.input(stack_path);

  SearchSpace space;
  space.catalog = load_catalog(cat_path);
  space.families.clear();
  for (const auto& fam : a.families) space.families.push_back(parse_family(fam));
  space.total_thickness_bound = a.bound;
  space.inner_radius = a.inner_radius;
  space.grid = thickness_grid(a.d1, a.d2, a.bound);
  const Material skin = load_stack(stack_path).top();

  const Direction dir = a.maximize ? Direction::MaximizeEdgeRatio : Direction::MinimizeEdgeRatio;
  DesignObjective objective = a.uz_only ? DesignObjective::uz_only(dir) : DesignObjective{};
  objective.direction = dir;
  if (!a.weights.empty()) {
    if (a.weights.size() != 2) throw UsageError("--weights takes two values: w_p,w_s");
    objective.weight_p = a.weights[0];
    objective.weight_s = a.weights[1];
  }
  objective.evaluation_radius = a.eval_radius;
  EvaluationOptions eval{transmission_of(a.physics), parse_pairing(a.pairing)};

  const RankedDesigns ranked = optimize(space, objective, skin, omega, eval);

  run.config() = physics_config(a.physics);
  run.config()["families"] = a.families;
  run.config()["d1_m"] = a.d1;
  run.config()["d2_m"] = a.d2;
  run.config()["total_thickness_bound_m"] = a.bound;
  run.config()["inner_radius_m"] = a.inner_radius;
  run.config()["weights"] = {objective.weight_p, objective.weight_s};
  run.config()["direction"] = a.maximize ? "maximize" : "minimize";
  run.config()["pairing"] = a.pairing;
  if (a.eval_radius) run.config()["evaluation_radius_m"] = *a.eval_radius;

  const Metadata meta = {{"command", "optimize"},
                         {"frequency_hz", num(f)},
                         {"weight_p", num(objective.weight_p)},
                         {"weight_s", num(objective.weight_s)},
                         {"direction", a.maximize ? "maximize" : "minimize"},
                         {"pairing", a.pairing},
                         {"skin_top", skin.name()},
                         {"evaluations", std::to_string(ranked.evaluations)}};
  run.write("ranked.csv", format_ranked_csv(ranked, meta));
  run.write("ranked.json", format_ranked_json(ranked));

  out << ranked.evaluations << " designs evaluated\n";
  for (std::size_t i = 0; i < std::min(a.top, ranked.entries.size()); ++i) {
    const auto& e = ranked.entries[i];
    out << i + 1 << ". " << describe(e.design);
    if (e.ok()) out << " objective=" << num(e.objective);
    else out << " error=" << e.error;
    out << "\n";
  }

  if (a.refine && !ranked.entries.empty() && ranked.entries.front().ok() && ranked.entries.front().design.layer2()) {
    const double lo = 1e-4;
    const ThicknessBounds box{lo, a.bound - lo, lo, a.bound - lo, a.bound};
    const HapticUnitDesign best = refine_thickness(ranked.entries.front().design, objective, skin, omega, box, eval);
    const RankedEntry e = evaluate_design(best, 0, objective, skin, omega, eval);
    ordered_json doc = ordered_json::parse(serialize_design(best));
    doc["objective"] = e.objective;
    doc["edge_ratio_p"] = e.ratio.primary;
    doc["edge_ratio_s"] = e.ratio.secondary;
    run.write("refined.json", doc.dump(2) + "\n");
    out << "refined: " << describe(best) << " objective=" << num(e.objective) << "\n";
  }
}

// ---------------------------------------------------------------- fit-modulus

struct FitModulusArgs {
  Common common;
  std::vector<std::string> curves;
  std::vector<std::string> names;
  double strain_min = 0.0;
  double strain_max = 0.3;
  bool write_catalog = false;
};

void fit_modulus_cmd(const FitModulusArgs& a, RunRecord& run, std::ostream& out) {
  if (!a.names.empty() && a.names.size() != a.curves.size()) throw UsageError("--name must be given once per --curve");
  ordered_json fits = ordered_json::array();
  std::vector<Material> catalog;
  for (std::size_t i = 0; i < a.curves.size(); ++i) {
    const fs::path p = existing(a.curves[i], "curve");
    run.input(p);
    const std::string name = a.names.empty() ? p.stem().string() : a.names[i];
    const ModulusFit fit = fit_modulus(load_stress_strain_csv(p), {a.strain_min, a.strain_max});
    fits.push_back({{"name", name},
                    {"modulus_pa", fit.modulus},
                    {"strain_min", fit.window.min},
                    {"strain_max", fit.window.max},
                    {"residual_rms_pa", fit.residual_rms},
                    {"samples", fit.sample_count}});
    catalog.emplace_back(name, fit.modulus);
    out << name << ": E=" << num(fit.modulus) << " Pa over " << fit.sample_count << " samples\n";
  }
  run.config() = {{"strain_min", a.strain_min}, {"strain_max", a.strain_max}};
  run.write("modulus_fit.json", fits.dump(2) + "\n");
  if (a.write_catalog) run.write("catalog.json", serialize_catalog(catalog));
}

// ---------------------------------------------------------------- process-ldv

struct ProcessArgs {
  Common common;
  std::vector<std::string> traces;
  double band_low = 100.0, band_high = 150.0;
  PipelineOptions pipeline;
  std::string reference = "edge";
};

void process_ldv(ProcessArgs a, RunRecord& run, std::ostream& out) {
  std::vector<MeasurementTrace> traces;
  for (const auto& t : a.traces) {
    const fs::path p = existing(t, "trace");
    run.input(p);
    traces.push_back(load_trace(p));
  }
  a.pipeline.reference = a.reference == "motor" ? ReferenceMode::Motor : ReferenceMode::Edge;
  const AmplitudeProfile profile = build_profile(traces, {a.band_low, a.band_high}, a.pipeline);
  const Metadata meta = {{"command", "process-ldv"},
                         {"band_hz", num(a.band_low) + "-" + num(a.band_high)},
                         {"bandpass_hz", num(a.pipeline.bandpass_low) + "-" + num(a.pipeline.bandpass_high)},
                         {"comb_hz", num(a.pipeline.comb_fundamental)},
                         {"reference", a.reference},
                         {"edge_radius_m", "0"}};
  run.config() = {{"band_low_hz", a.band_low},
                  {"band_high_hz", a.band_high},
                  {"bandpass_low_hz", a.pipeline.bandpass_low},
                  {"bandpass_high_hz", a.pipeline.bandpass_high},
                  {"order", a.pipeline.bandpass_order},
                  {"comb_hz", a.pipeline.comb_fundamental},
                  {"notch_bandwidth_hz", a.pipeline.notch_bandwidth},
                  {"reference", a.reference},
                  {"motor_amplitude_m", a.pipeline.motor_amplitude}};
  run.write("measured_profile.csv", format_profile_csv(profile, meta));
  out << "profile: " << profile.radii.size() << " distances, reference " << num(profile.reference_amplitude) << " m\n";
  if (profile.radii.size() >= 2) {
    const DecayFit fit = fit_decay(profile);
    const ordered_json doc = {{"alpha_per_m", fit.alpha},
                              {"amplitude", fit.amplitude},
                              {"r_squared", fit.r_squared},
                              {"used", fit.used},
                              {"excluded", fit.excluded}};
    run.write("decay_fit.json", doc.dump(2) + "\n");
    out << "decay: alpha=" << num(fit.alpha) << " 1/m r2=" << num(fit.r_squared) << "\n";
    if (fit.excluded > 0) out << "warning: " << fit.excluded << " non-positive amplitudes excluded from the fit\n";
  }
}

// ---------------------------------------------------------------- overlay

struct OverlayArgs {
  Common common;
  std::string simulated, measured;
  std::optional<double> edge_radius;
};

double interpolate(const std::vector<double>& x, const std::vector<double>& y, double at) {
  const auto it = std::lower_bound(x.begin(), x.end(), at);
  const std::size_t j = static_cast<std::size_t>(it - x.begin());
  if (x[j] == at || j == 0) return y[j];
  const double t = (at - x[j - 1]) / (x[j] - x[j - 1]);
  return (1.0 - t) * y[j - 1] + t * y[j];
}

void overlay(const OverlayArgs& a, RunRecord& run, std::ostream& out, std::ostream& err) {
  const fs::path sp = existing(a.simulated, "simulated profile");
  const fs::path mp = existing(a.measured, "measured profile");
  run.input(sp);
  run.input(mp);
  const std::string stext = io::read_text_file(sp);
  const io::CsvTable stable = io::parse_csv(stext, sp.string());
  double edge = 0.0;
  if (a.edge_radius) {
    edge = *a.edge_radius;
  } else if (const std::string* v = stable.find_metadata("edge_radius_m")) {
    edge = std::stod(*v);
  } else {
    err << "warning: simulated profile has no edge_radius_m; distances are taken as radii\n";
  }
  const AmplitudeProfile sim = normalize_profile(parse_profile_csv(stext), edge);
  AmplitudeProfile meas = parse_profile_csv(io::read_text_file(mp));
  if (meas.radii.empty() || meas.radii.front() != 0.0) {
    throw Error(ErrorCode::DomainError, "measured profile needs a point at distance 0");
  }
  meas = normalize_profile(meas, 0.0);

  io::CsvTable table;
  table.metadata = {{"command", "overlay"}, {"edge_radius_m", num(edge)}};
  table.columns = {"distance_m", "measured_u_z", "simulated_u_z", "difference"};
  std::size_t skipped = 0;
  for (std::size_t i = 0; i < meas.radii.size(); ++i) {
    const double r = edge + meas.radii[i];
    if (r > sim.radii.back()) {
      ++skipped;
      continue;
    }
    const double s = interpolate(sim.radii, sim.u_z, r);
    table.rows.push_back({meas.radii[i], meas.u_z[i], s, meas.u_z[i] - s});
  }
  if (skipped) err << "warning: " << skipped << " measured distances lie beyond the simulated range\n";
  run.config() = {{"edge_radius_m", edge}};
  run.write("overlay.csv", io::format_csv(table));
  out << "overlay: " << table.rows.size() << " rows\n";
}

std::string describe(const HapticUnitDesign& d) {
  std::string s = std::string(to_string(d.family())) + " " + d.layer1().material.name() + " " +
                  num(d.layer1().thickness * 1e3) + " mm";
  if (d.layer2()) s += " / " + d.layer2()->material.name() + " " + num(d.layer2()->thickness * 1e3) + " mm";
  return s;
}

int status_for(const Error& e) { return e.category() == ErrorCategory::Validation ? Validation : Numerical; }

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Vibrotactile crosstalk simulation, design evaluation and measurement processing", "hapticsim"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Surface amplitude profile of the skin stack");
  add_common(s, sim.common);
  add_physics(s, sim.physics, true);
  s->add_option("--design", sim.design, "Unit design JSON; profile starts at its outer edge");
  s->add_option("--pressure", sim.pressure, "Normal traction amplitude in Pa")->capture_default_str();
  s->add_option("--shear", sim.shear, "Radial shear traction amplitude in Pa")->capture_default_str();
  s->add_option("--disk-radius", sim.disk_radius, "Load disk radius in m")->capture_default_str();
  s->add_option("--r-min", sim.r_min, "First radius in m (default 0 or the design edge)");
  s->add_option("--span", sim.span, "Radial span in m")->capture_default_str();
  s->add_option("--points", sim.points, "Number of radii")->capture_default_str();
  s->add_option("--normalize-at", sim.normalize_at, "Normalize u_z at this radius (no design)");
  s->add_option("--edge-normalization", sim.edge_norm, "self or bare-skin")
      ->check(CLI::IsMember({"self", "bare-skin"}))
      ->capture_default_str();
  s->add_flag("--no-attenuation", sim.no_attenuation, "Skip the viscous attenuation factor");

  DesignEvalArgs de;
  auto* d = app.add_subcommand("design-eval", "Edge amplitude ratio against a control and the constraint report");
  add_common(d, de.common);
  add_physics(d, de.physics, true);
  d->add_option("--design", de.design, "Candidate design JSON")->required();
  d->add_option("--control", de.control, "Control design JSON (default: matched single layer)");
  d->add_option("--pairing", de.pairing, "Matched control material: layer2 or layer1")
      ->check(CLI::IsMember({"layer1", "layer2"}))
      ->capture_default_str();
  d->add_option("--r-edge", de.r_edge, "Comparison radius in m (default: design outer radius)");

  CheckArgs ck;
  auto* c = app.add_subcommand("check", "Material constraint report for a two-layer design");
  add_common(c, ck.common);
  c->add_option("--layer1", ck.layer1, "Layer 1 material name")->required();
  c->add_option("--layer2", ck.layer2, "Layer 2 material name")->required();
  c->add_option("--control", ck.control, "Control material name")->required();
  c->add_option("--d1", ck.d1, "Layer 1 thickness in m")->capture_default_str();
  c->add_option("--d2", ck.d2, "Layer 2 thickness in m")->capture_default_str();

  OptimizeArgs op;
  auto* o = app.add_subcommand("optimize", "Rank every design in the search space");
  add_common(o, op.common);
  add_physics(o, op.physics, true);
  o->add_option("--families", op.families, "Design families")
      ->delimiter(',')
      ->check(CLI::IsMember({"embedded", "encapsulating", "single-layer"}))
      ->capture_default_str();
  o->add_option("--d1", op.d1, "Layer 1 thickness grid in m")->delimiter(',');
  o->add_option("--d2", op.d2, "Layer 2 thickness grid in m")->delimiter(',');
  o->add_option("--bound", op.bound, "Total thickness bound in m")->capture_default_str();
  o->add_option("--inner-radius", op.inner_radius, "Motor cavity radius in m")->capture_default_str();
  o->add_flag("--uz-only", op.uz_only, "Objective uses the vertical ratio only");
  o->add_option("--weights", op.weights, "Objective weights w_p,w_s")->delimiter(',')->expected(2);
  o->add_flag("--maximize", op.maximize, "Rank by largest edge ratio");
  o->add_option("--pairing", op.pairing, "Matched control material: layer2 or layer1")
      ->check(CLI::IsMember({"layer1", "layer2"}))
      ->capture_default_str();
  o->add_option("--eval-radius", op.eval_radius, "Common evaluation radius in m (default: each design's edge)");
  o->add_option("--top", op.top, "Designs to print")->capture_default_str();
  o->add_flag("--refine", op.refine, "Refine the best design's thicknesses continuously");

  FitModulusArgs fm;
  auto* m = app.add_subcommand("fit-modulus", "Elastic modulus from stress-strain curves");
  add_common(m, fm.common);
  m->add_option("--curve", fm.curves, "CSV with strain,stress_pa")->required();
  m->add_option("--name", fm.names, "Material name per curve");
  m->add_option("--strain-min", fm.strain_min, "Window start")->capture_default_str();
  m->add_option("--strain-max", fm.strain_max, "Window end")->capture_default_str();
  m->add_flag("--write-catalog", fm.write_catalog, "Also write a catalog of the fitted materials");

  ProcessArgs pl;
  auto* p = app.add_subcommand("process-ldv", "Filter displacement traces into a normalized profile");
  add_common(p, pl.common);
  p->add_option("--trace", pl.traces, "Trace CSV with t_s,displacement_m")->required();
  p->add_option("--band-low", pl.band_low, "Peak search band start in Hz")->capture_default_str();
  p->add_option("--band-high", pl.band_high, "Peak search band end in Hz")->capture_default_str();
  p->add_option("--bandpass-low", pl.pipeline.bandpass_low, "Band-pass low edge in Hz")->capture_default_str();
  p->add_option("--bandpass-high", pl.pipeline.bandpass_high, "Band-pass high edge in Hz")->capture_default_str();
  p->add_option("--order", pl.pipeline.bandpass_order, "Butterworth order")->capture_default_str();
  p->add_option("--comb", pl.pipeline.comb_fundamental, "Comb fundamental in Hz, 0 disables")->capture_default_str();
  p->add_option("--notch-bw", pl.pipeline.notch_bandwidth, "Notch -3 dB width in Hz")->capture_default_str();
  p->add_option("--reference", pl.reference, "edge or motor")
      ->check(CLI::IsMember({"edge", "motor"}))
      ->capture_default_str();
  p->add_option("--motor-amp", pl.pipeline.motor_amplitude, "Motor amplitude in m")->capture_default_str();

  OverlayArgs ov;
  auto* v = app.add_subcommand("overlay", "Join simulated and measured profiles on distance from the edge");
  add_common(v, ov.common);
  v->add_option("--simulated", ov.simulated, "Simulated profile CSV")->required();
  v->add_option("--measured", ov.measured, "Measured profile CSV")->required();
  v->add_option("--edge-radius", ov.edge_radius, "Radius of distance 0 in the simulated profile, m");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? Success : Usage;
  }

  CLI::App* sub = app.get_subcommands().front();
  const Common* common = nullptr;
  for (const auto& [candidate, opts] : std::initializer_list<std::pair<CLI::App*, const Common*>>{
           {s, &sim.common}, {d, &de.common}, {c, &ck.common}, {o, &op.common},
           {m, &fm.common}, {p, &pl.common}, {v, &ov.common}}) {
    if (candidate == sub) common = opts;
  }

  const unsigned previous_threads = thread_limit();
  set_thread_limit(common->threads);
  int status = Success;
  try {
    RunRecord run(sub->get_name(), args, common->out_dir);
    if (sub == s) simulate(sim, run, out, err);
    else if (sub == d) design_eval(de, run, out, err);
    else if (sub == c) check(ck, run, out);
    else if (sub == o) optimize_cmd(op, run, out, err);
    else if (sub == m) fit_modulus_cmd(fm, run, out);
    else if (sub == p) process_ldv(pl, run, out);
    else overlay(ov, run, out, err);
    run.finish();
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    status = Usage;
  } catch (const Error& e) {
    err << e.what() << "\n";
    status = status_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    status = Numerical;
  }
  set_thread_limit(previous_threads);
  return status;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace haptic::cli
