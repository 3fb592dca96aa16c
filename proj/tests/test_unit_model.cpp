#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "haptic/error.hpp"
#include "haptic/unit_model.hpp"

using namespace haptic;

namespace {

const Material kE10("E-10", 15e3);
const Material kDS10("DS-10", 250e3);
const Material kDS30("DS-30", 355e3);
const Material kSkin("dermis", 1e6, 0.49, 1100.0, 5.0);
const double kOmega = 2 * std::numbers::pi * 125;
constexpr double kD = unit_defaults::inner_radius;
constexpr double kT = unit_defaults::layer_thickness;

HapticUnitDesign two(DesignFamily f, const Material& a, const Material& b, double d1 = kT, double d2 = kT) {
  return HapticUnitDesign::two_layer(f, {a, d1}, {b, d2}, kD);
}
HapticUnitDesign single(const Material& c, double t = 2 * kT) { return HapticUnitDesign::single_layer({c, t}, kD); }

// Independent evaluation of the attenuation exponent and interface coefficients for a path.
double oracle_factor(const std::vector<std::pair<const Material*, double>>& segs,
                     const std::vector<std::pair<double, double>>& impedances, WaveKind kind) {
  double f = 1.0;
  for (auto [m, len] : segs) {
    const double mu = m->elastic_modulus() / (2 * (1 + m->poisson_ratio()));
    const double la = m->elastic_modulus() * m->poisson_ratio() / ((1 + m->poisson_ratio()) * (1 - 2 * m->poisson_ratio()));
    const double v = std::sqrt((kind == WaveKind::Primary ? la + 2 * mu : mu) / m->density());
    f *= std::exp(-kOmega * m->viscosity() * len / (m->elastic_modulus() * v));
  }
  for (auto [z1, z2] : impedances) f *= 2 * z1 / (z1 + z2);
  return f;
}

}  // namespace

TEST_CASE("design geometry") {
  const auto d = two(DesignFamily::Encapsulating, kE10, kDS30);
  CHECK(d.outer_radius() == doctest::Approx(7e-3).epsilon(1e-14));
  CHECK(single(kDS30).outer_radius() == doctest::Approx(7e-3).epsilon(1e-14));
  CHECK_THROWS_AS(HapticUnitDesign::single_layer({kDS30, -1e-3}, kD), Error);
  CHECK_THROWS_AS(HapticUnitDesign::single_layer({kDS30, 1e-3}, 0.0), Error);
  CHECK_THROWS_AS(HapticUnitDesign::two_layer(DesignFamily::SingleLayer, {kE10, kT}, {kDS30, kT}, kD), Error);
  CHECK(d.identity() != two(DesignFamily::Embedded, kE10, kDS30).identity());
  CHECK(d.identity() == two(DesignFamily::Encapsulating, kE10, kDS30).identity());
}

TEST_CASE("transmitted factor matches an independent path evaluation") {
  const double r = 12e-3;
  const auto d = two(DesignFamily::Encapsulating, kE10, kDS30);
  for (auto kind : {WaveKind::Primary, WaveKind::Secondary}) {
    const double zs = impedance(kSkin, kind), z1 = impedance(kE10, kind), z2 = impedance(kDS30, kind);
    const double expected = oracle_factor({{&kSkin, kD}, {&kE10, kT}, {&kDS30, kT}, {&kSkin, r - 7e-3}},
                                          {{zs, z1}, {z1, z2}, {z2, zs}}, kind);
    CHECK(transmitted_amplitude_factor(d, kSkin, kOmega, r, kind) == doctest::Approx(expected).epsilon(1e-13));
    const double faithful = oracle_factor({{&kSkin, kD}, {&kE10, kT}, {&kDS30, kT}, {&kSkin, r - 7e-3}},
                                          {{z1, z2}, {z2, air::impedance(kind)}}, kind);
    CHECK(transmitted_amplitude_factor(d, kSkin, kOmega, r, kind, {OuterMedium::Air, true}) ==
          doctest::Approx(faithful).epsilon(1e-13));
  }
  CHECK_THROWS_AS(transmitted_amplitude_factor(d, kSkin, kOmega, 6e-3, WaveKind::Primary), Error);
}

TEST_CASE("interface bookkeeping uses elastic-core coefficients") {
  const auto d = two(DesignFamily::Encapsulating, kDS10, kDS30);
  const auto path = transmission_path(d, kSkin, 9e-3, WaveKind::Secondary);
  REQUIRE(path.interfaces.size() == 3);
  CHECK(path.interfaces[1].coefficients.k_t == interface_coefficients(kDS10, kDS30, WaveKind::Secondary).k_t);
  CHECK(path.interfaces[0].coefficients.k_t == interface_coefficients(kSkin, kDS10, WaveKind::Secondary).k_t);
  CHECK(path.total_length() == doctest::Approx(9e-3).epsilon(1e-14));
  CHECK(std::exp(path.log_factor(kOmega)) == doctest::Approx(path.factor(kOmega)).epsilon(1e-14));
}

TEST_CASE("embedded routes the vertical path through layer 2") {
  const auto emb = two(DesignFamily::Embedded, kE10, kDS30);
  const auto path = transmission_path(emb, kSkin, 8e-3, WaveKind::Secondary);
  REQUIRE(path.segments.size() == 3);
  CHECK(path.segments[1].material == kDS30);
  CHECK(path.segments[1].length == doctest::Approx(2 * kT));
  const auto r = compare_designs(emb, single(kDS30), kSkin, kOmega, 8e-3);
  CHECK(r.secondary == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(r.primary < 1.0);
}

TEST_CASE("coinciding materials reproduce the single layer") {
  for (const auto* m : {&kE10, &kDS10, &kDS30}) {
    for (auto f : {DesignFamily::Embedded, DesignFamily::Encapsulating}) {
      for (auto opt : {TransmissionOptions{}, TransmissionOptions{OuterMedium::Air, true}}) {
        const auto r = compare_designs(two(f, *m, *m), single(*m), kSkin, kOmega, 10e-3, opt);
        CHECK(r.primary == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(r.secondary == doctest::Approx(1.0).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("orderings of the transmitted factor") {
  for (auto opt : {TransmissionOptions{}, TransmissionOptions{OuterMedium::Air, false},
                   TransmissionOptions{OuterMedium::Skin, true}, TransmissionOptions{OuterMedium::Air, true}}) {
    for (auto kind : {WaveKind::Primary, WaveKind::Secondary}) {
      const auto enc_att = two(DesignFamily::Encapsulating, kE10, kDS30);
      CHECK(transmitted_amplitude_factor(enc_att, kSkin, kOmega, 7e-3, kind, opt) <
            transmitted_amplitude_factor(single(kDS30), kSkin, kOmega, 7e-3, kind, opt));
      const auto enc_amp = two(DesignFamily::Encapsulating, kDS30, kE10);
      CHECK(transmitted_amplitude_factor(enc_amp, kSkin, kOmega, 7e-3, kind, opt) >
            transmitted_amplitude_factor(single(kE10), kSkin, kOmega, 7e-3, kind, opt));
    }
  }
}

TEST_CASE("compare_designs") {
  const auto a = two(DesignFamily::Encapsulating, kE10, kDS10);
  const auto b = two(DesignFamily::Embedded, kDS10, kDS30);
  const auto c = single(kDS10);
  const auto self = compare_designs(a, a, kSkin, kOmega, 7e-3);
  CHECK(self.primary == 1.0);
  CHECK(self.secondary == 1.0);
  const auto ac = compare_designs(a, c, kSkin, kOmega, 7e-3);
  CHECK(ac.primary < 1.0);
  CHECK(ac.secondary < 1.0);
  const auto ab = compare_designs(a, b, kSkin, kOmega, 7e-3);
  const auto bc = compare_designs(b, c, kSkin, kOmega, 7e-3);
  CHECK(std::abs(ab.primary * bc.primary - ac.primary) <= 1e-12 * ac.primary);
  CHECK(std::abs(ab.secondary * bc.secondary - ac.secondary) <= 1e-12 * ac.secondary);
  CHECK_THROWS_AS(compare_designs(a, single(kDS10, 3e-3), kSkin, kOmega, 8e-3), Error);
  try {
    compare_designs(a, HapticUnitDesign::single_layer({kDS10, 2 * kT}, 5e-3), kSkin, kOmega, 8e-3);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IncomparableDesigns);
  }
}

TEST_CASE("constraint report") {
  const auto same = check_constraints(kDS10, kDS10, kDS10, kT, kT);
  for (const auto& e : same.entries) {
    CHECK(e.margin == 0.0);
    CHECK_FALSE(e.satisfied);
  }
  CHECK(same.verdict == Verdict::Indeterminate);

  CHECK(check_constraints(kE10, kDS10, kDS10, kT, kT).verdict == Verdict::Attenuating);
  CHECK(check_constraints(kE10, kDS30, kDS30, kT, kT).verdict == Verdict::Attenuating);
  const auto amp = check_constraints(kDS30, kE10, kE10, kT, kT);
  CHECK(amp.verdict == Verdict::Amplifying);
  CHECK(amp.entries[2].margin < 0.0);
  CHECK(amp.entries[3].margin < 0.0);
  CHECK(check_constraints(kDS10, kE10, kE10, kT, kT).verdict == Verdict::Amplifying);

  // entries evaluated exactly as typeset
  const auto rep = check_constraints(kE10, kDS30, kDS10, 1e-3, 2e-3);
  auto xs = [](const Material& m) {
    const double e = m.elastic_modulus(), nu = m.poisson_ratio();
    return m.viscosity() * std::sqrt(2 * (1 + nu) * m.density()) / (e * std::sqrt(e));
  };
  CHECK(rep.entries[1].lhs == doctest::Approx(1e-3 * xs(kE10) + 2e-3 * xs(kDS30)).epsilon(1e-14));
  CHECK(rep.entries[1].rhs == doctest::Approx(3e-3 * xs(kDS10)).epsilon(1e-14));
  CHECK(rep.entries[1].margin == doctest::Approx(rep.entries[1].lhs - rep.entries[1].rhs).epsilon(1e-12));
  const double nu = 0.49;
  CHECK(rep.entries[2].lhs == doctest::Approx(15e3 * 1070 * (1 - nu) / ((1 + nu) * (1 - 2 * nu))).epsilon(1e-14));
  CHECK(rep.entries[3].rhs == doctest::Approx(355e3 * 1070 / (1 + nu)).epsilon(1e-14));
  for (const auto& e : rep.entries) CHECK(e.satisfied == (e.margin > 0.0));
  CHECK(constraint_report_json(rep).find("\"verdict\"") != std::string::npos);
  CHECK_THROWS_AS(check_constraints(kE10, kDS30, kDS30, 0.0, kT), Error);
}

TEST_CASE("constraint consistency over random materials") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> ue(5e3, 500e3);
  int attenuating = 0;
  for (int i = 0; i < 2000; ++i) {
    const Material l1("l1", ue(rng)), l2("l2", ue(rng));
    const auto rep = check_constraints(l1, l2, l2, kT, kT);
    const auto r = compare_designs(two(DesignFamily::Encapsulating, l1, l2), single(l2), kSkin, kOmega, 7e-3);
    if (rep.verdict == Verdict::Attenuating) {
      ++attenuating;
      CHECK(r.primary < 1.0);
      CHECK(r.secondary < 1.0);
    } else if (rep.verdict == Verdict::Amplifying) {
      CHECK(r.primary > 1.0);
      CHECK(r.secondary > 1.0);
    }
  }
  CHECK(attenuating > 500);
}

TEST_CASE("monotone disparity") {
  double prev_p = 0.0, prev_s = 0.0;
  for (double e1 = 250e3; e1 >= 15e3 - 1; e1 -= 5e3) {
    const auto r = compare_designs(two(DesignFamily::Encapsulating, Material("l1", e1), kDS30), single(kDS30), kSkin,
                                   kOmega, 7e-3);
    if (prev_p > 0.0) {
      CHECK(r.primary < prev_p);
      CHECK(r.secondary < prev_s);
    }
    prev_p = r.primary;
    prev_s = r.secondary;
  }
}

TEST_CASE("factors are positive and log-additive") {
  const auto d = two(DesignFamily::Encapsulating, kDS10, kE10, 0.7e-3, 1.9e-3);
  for (auto kind : {WaveKind::Primary, WaveKind::Secondary}) {
    const auto path = transmission_path(d, kSkin, 15e-3, kind);
    double sum = 0.0;
    for (const auto& s : path.segments) sum += log_attenuation(s.material, kOmega, s.length, kind);
    for (const auto& i : path.interfaces) sum += std::log(i.coefficients.k_t);
    CHECK(path.log_factor(kOmega) == doctest::Approx(sum).epsilon(1e-14));
    CHECK(path.factor(kOmega) > 0.0);
  }
}

TEST_CASE("design file round trip") {
  const std::vector<Material> cat{kE10, kDS10, kDS30};
  const auto d = two(DesignFamily::Embedded, kDS30, kE10, 1e-3, 1.5e-3);
  const auto back = parse_design(serialize_design(d), cat);
  CHECK(back == d);
  const auto s = parse_design(R"({"family": "single-layer", "layer1": {"material": "DS-10", "d1_m": 0.0025}})", cat);
  CHECK(s.family() == DesignFamily::SingleLayer);
  CHECK(s.inner_radius() == unit_defaults::inner_radius);
  CHECK_THROWS_AS(parse_design(R"({"family": "encapsulating", "layer1": {"material": "E-10", "d1_m": 1e-3}})", cat),
                  Error);
  CHECK_THROWS_AS(parse_design(R"({"family": "weird"})", cat), Error);
}

namespace {

SkinStack forearm() { return load_stack(std::filesystem::path(HAPTIC_DATA_DIR) / "forearm_stack.json"); }

std::vector<double> radii_from(double r0, double r1, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(r0 + (r1 - r0) * i / (n - 1));
  return out;
}

}  // namespace

TEST_CASE("edge profile of an empty unit is the bare profile") {
  const auto stack = forearm();
  const LoadSpec load{1.0, 0.0, unit_defaults::motor_radius, 125.0};
  const auto empty = HapticUnitDesign::single_layer({kDS30, 0.0}, kD);
  const auto radii = radii_from(kD, kD + 10e-3, 11);
  const auto p = edge_amplitude_profile(empty, stack, load, radii);
  const auto bare = normalize_profile(surface_profile(stack, load, radii), kD);
  for (std::size_t i = 0; i < radii.size(); ++i) {
    CHECK(p.u_z[i] == doctest::Approx(bare.u_z[i]).epsilon(1e-13));
    CHECK(p.u_r[i] == doctest::Approx(bare.u_r[i]).epsilon(1e-13));
  }
}

TEST_CASE("edge profiles") {
  const auto stack = forearm();
  const LoadSpec load{1.0, 0.0, unit_defaults::motor_radius, 125.0};
  const auto radii = radii_from(7e-3, 17e-3, 50);
  const auto enc = two(DesignFamily::Encapsulating, kE10, kDS30);
  const auto ctl = single(kDS30);
  CHECK(edge_amplitude_profile(enc, stack, load, radii).u_z.front() == 1.0);
  CHECK(edge_amplitude_profile(two(DesignFamily::Embedded, kDS30, kDS10), stack, load, radii).u_z.front() == 1.0);

  const auto a = edge_amplitude_profile(enc, stack, load, radii, {}, EdgeNormalization::BareSkinEdge);
  const auto b = edge_amplitude_profile(ctl, stack, load, radii, {}, EdgeNormalization::BareSkinEdge);
  const double expected = compare_designs(enc, ctl, stack.top(), load.omega(), 7e-3).secondary;
  for (std::size_t i = 1; i < radii.size(); ++i) {
    CHECK(a.u_z[i] < b.u_z[i]);
    CHECK(a.u_z[i] / b.u_z[i] == doctest::Approx(expected).epsilon(1e-12));
  }
  CHECK_THROWS_AS(edge_amplitude_profile(enc, stack, load, radii_from(8e-3, 9e-3, 3)), Error);
}
