#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "haptic/error.hpp"
#include "haptic/io.hpp"
#include "haptic/materials.hpp"
#include "oracles.hpp"

using namespace haptic;

namespace {

std::filesystem::path temp_path(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "haptic_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an exception");
  return ErrorCode::Io;
}

// Closed-form least squares through the origin.
double origin_slope(const std::vector<StrainStress>& s) {
  double sxy = 0, sxx = 0;
  for (auto& p : s) {
    sxy += p.strain * p.stress;
    sxx += p.strain * p.strain;
  }
  return sxy / sxx;
}

}  // namespace

TEST_CASE("material invariants") {
  CHECK_NOTHROW(Material("a", 1.0, 0.0, 1.0, 0.0));
  CHECK(code_of([] { Material("a", 1.0, 0.5); }) == ErrorCode::IncompressibleMaterial);
  CHECK(code_of([] { Material("a", 0.0); }) == ErrorCode::InvalidMaterial);
  CHECK(code_of([] { Material("a", 1.0, 0.3, -1.0); }) == ErrorCode::InvalidMaterial);
  CHECK(code_of([] { Material("a", 1.0, 0.3, 1.0, -0.1); }) == ErrorCode::InvalidMaterial);
  CHECK(code_of([] { Material("a", NAN); }) == ErrorCode::InvalidMaterial);
  Material m("x", 2e5);
  CHECK(m.poisson_ratio() == 0.49);
  CHECK(m.density() == 1070.0);
  CHECK(m.viscosity() == 5.0);
}

TEST_CASE("lame constants") {
  auto a = lame_constants(1.0, 0.0);
  CHECK(a.lambda == 0.0);
  CHECK(a.mu == 0.5);
  auto b = lame_constants(15e3, 0.25);
  CHECK(b.lambda == doctest::Approx(6e3).epsilon(1e-14));
  CHECK(b.mu == doctest::Approx(6e3).epsilon(1e-14));
  auto c = lame_constants(Material("DS-10", 250e3, 0.49));
  CHECK(c.lambda == doctest::Approx(oracle::lame_lambda(250e3, 0.49)).epsilon(1e-14));
  CHECK(c.mu == doctest::Approx(oracle::lame_mu(250e3, 0.49)).epsilon(1e-14));
  CHECK(c.mu == doctest::Approx(250e3 / 2.98).epsilon(1e-14));
  CHECK(code_of([] { lame_constants(1.0, 0.5); }) == ErrorCode::IncompressibleMaterial);
}

TEST_CASE("lame round trip recovers E") {
  for (double nu = 0.0; nu <= 0.49 + 1e-12; nu += 0.01) {
    for (double e : {5e3, 15e3, 1e6, 15e9}) {
      const auto [l, mu] = lame_constants(e, nu);
      CHECK(mu * (3 * l + 2 * mu) / (l + mu) == doctest::Approx(e).epsilon(1e-12));
      CHECK(mu > 0);
      CHECK(l >= 0);
    }
  }
}

TEST_CASE("fit_modulus exact linear data") {
  std::vector<StrainStress> s;
  for (int i = 0; i <= 20; ++i) s.push_back({0.01 * i, 250e3 * 0.01 * i});
  const auto fit = fit_modulus(StressStrainCurve(s), {0.0, 0.2});
  CHECK(fit.modulus == doctest::Approx(250e3).epsilon(1e-12));
  CHECK(fit.residual_rms <= 1e-9 * 250e3);
  CHECK(fit.sample_count == 21);
}

TEST_CASE("fit_modulus with intercept window") {
  std::vector<StrainStress> s;
  for (int i = 0; i <= 30; ++i) s.push_back({0.01 * i, 100.0 + 15e3 * 0.01 * i});
  const auto fit = fit_modulus(StressStrainCurve(s), {0.05, 0.25});
  CHECK(fit.modulus == doctest::Approx(15e3).epsilon(1e-10));
  CHECK(fit.residual_rms < 1e-6);
}

TEST_CASE("fit_modulus noisy data matches closed-form least squares") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> noise(-1e3, 1e3);
  std::vector<StrainStress> s;
  for (int i = 1; i <= 50; ++i) {
    const double e = 0.3 * i / 50.0;
    s.push_back({e, 355e3 * e + noise(rng)});
  }
  const auto fit = fit_modulus(StressStrainCurve(s));
  CHECK(fit.modulus == doctest::Approx(origin_slope(s)).epsilon(1e-12));
  CHECK(std::abs(fit.modulus - 355e3) < 0.01 * 355e3);
}

TEST_CASE("fit_modulus scale equivariance") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> noise(-500, 500);
  std::vector<StrainStress> s, scaled;
  for (int i = 1; i <= 40; ++i) {
    const double e = 0.005 * i;
    const double y = 15e3 * e + noise(rng);
    s.push_back({e, y});
    scaled.push_back({e, 4.0 * y});
  }
  for (StrainWindow w : {StrainWindow{0.0, 0.3}, StrainWindow{0.02, 0.15}}) {
    const double a = fit_modulus(StressStrainCurve(s), w).modulus;
    const double b = fit_modulus(StressStrainCurve(scaled), w).modulus;
    CHECK(b == doctest::Approx(4.0 * a).epsilon(1e-14));
  }
}

TEST_CASE("fit_modulus errors") {
  std::vector<StrainStress> s{{0.0, 0.0}, {0.1, 1.0}, {0.2, 2.0}};
  CHECK(code_of([&] { fit_modulus(StressStrainCurve(s), {0.5, 0.9}); }) == ErrorCode::InvalidWindow);
  CHECK(code_of([&] { fit_modulus(StressStrainCurve(s), {0.15, 0.19}); }) == ErrorCode::InvalidWindow);
  CHECK(code_of([] { StressStrainCurve({{0.0, 0.0}, {0.2, 1.0}, {0.1, 2.0}}); }) == ErrorCode::MalformedCurve);
  CHECK(code_of([] { StressStrainCurve({{0.0, 0.0}}); }) == ErrorCode::MalformedCurve);
}

TEST_CASE("stress-strain CSV") {
  const auto p = temp_path("curve.csv");
  io::write_text_file(p, "strain,stress_pa\n0,0\n0.1,25000\n0.2,50000\n");
  const auto c = load_stress_strain_csv(p);
  REQUIRE(c.samples().size() == 3);
  CHECK(fit_modulus(c).modulus == doctest::Approx(250e3));
}

TEST_CASE("catalog loading") {
  const auto empty = temp_path("empty.json");
  io::write_text_file(empty, "");
  CHECK(load_catalog(empty).empty());

  const auto cat = load_catalog(std::filesystem::path(HAPTIC_DATA_DIR) / "catalog.json");
  REQUIRE(cat.size() == 3);
  CHECK(cat[0].name() == "E-10");
  CHECK(cat[0].elastic_modulus() == 15e3);
  CHECK(cat[1].name() == "DS-10");
  CHECK(cat[1].elastic_modulus() == 250e3);
  CHECK(cat[2].name() == "DS-30");
  CHECK(cat[2].elastic_modulus() == 355e3);
}

TEST_CASE("catalog round trip is byte identical") {
  std::vector<Material> cat{Material("a", 12345.678901234567, 0.1234567890123, 987.654321, 0.1),
                            Material("b", 1.0 / 3.0, 0.0, 1e-3, 0.0)};
  const auto p = temp_path("rt.json");
  save_catalog(cat, p);
  const auto back = load_catalog(p);
  CHECK(back == cat);
  const auto p2 = temp_path("rt2.json");
  save_catalog(back, p2);
  CHECK(io::read_text_file(p) == io::read_text_file(p2));
  CHECK(io::read_text_file(p) == serialize_catalog(cat));
}

TEST_CASE("catalog validation names the entry") {
  auto msg = [](const std::string& text) {
    try {
      parse_catalog(text);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::CatalogValidation);
      return std::string(e.what());
    }
    FAIL("expected failure");
    return std::string();
  };
  CHECK(msg(R"([{"name": "ok", "E_pa": 1}, {"name": "bad"}])").find("bad") != std::string::npos);
  CHECK(msg(R"([{"name": "soft", "E_pa": 1, "nu": 0.5}])").find("soft") != std::string::npos);
  CHECK(msg(R"([{"E_pa": 1}])").find("entry 0") != std::string::npos);
  CHECK(msg(R"([{"name": "s", "E_pa": "x"}])").find("E_pa") != std::string::npos);
  const auto defaults = parse_catalog(R"([{"name": "d", "E_pa": 2}])");
  CHECK(defaults[0].poisson_ratio() == 0.49);
  CHECK(find_material(defaults, "d").elastic_modulus() == 2.0);
  CHECK(code_of([&] { find_material(defaults, "zz"); }) == ErrorCode::CatalogValidation);
}
