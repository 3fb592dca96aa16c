#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "haptic/bessel.hpp"
#include "haptic/elastic.hpp"
#include "haptic/error.hpp"
#include "oracles.hpp"

using namespace haptic;

TEST_CASE("bessel special values") {
  CHECK(bessel_j(0, 0.0) == 1.0);
  CHECK(bessel_j(1, 0.0) == 0.0);
  CHECK(std::abs(bessel_j(0, 2.404825557695773)) < 1e-10);
  CHECK(std::abs(oracle::bessel_series(0, 2.404825557695773)) < 1e-14);
}

TEST_CASE("bessel accuracy on [0, 100]") {
  double worst = 0.0;
  for (int i = 0; i <= 20000; ++i) {
    const double x = 100.0 * i / 20000.0;
    for (int n : {0, 1}) {
      const double ref = x < 10.0 ? oracle::bessel_series(n, x) : std::cyl_bessel_j(static_cast<double>(n), x);
      worst = std::max(worst, std::abs(bessel_j(n, x) - ref));
    }
  }
  CHECK(worst < 1e-10);
  // regime boundaries from both sides
  for (double x : {8.0 - 1e-12, 8.0, 25.0 - 1e-12, 25.0}) {
    CHECK(std::abs(bessel_j(0, x) - std::cyl_bessel_j(0.0, x)) < 1e-12);
    CHECK(std::abs(bessel_j(1, x) - std::cyl_bessel_j(1.0, x)) < 1e-12);
  }
}

TEST_CASE("bessel series oracle agrees with recurrence") {
  // J2 from the series equals the three-term recurrence 2 J1 / x - J0.
  for (double x : {0.5, 1.0, 3.0, 6.0}) {
    long double j2 = 0.0L, term = 0.125L * x * x;
    for (int m = 0; m < 40; ++m) {
      j2 += term;
      term *= -0.25L * x * x / ((m + 1.0L) * (m + 3.0L));
    }
    const double rec = 2.0 * oracle::bessel_series(1, x) / x - oracle::bessel_series(0, x);
    CHECK(std::abs(static_cast<double>(j2) - rec) < 1e-13);
  }
}

TEST_CASE("bessel derivative identity") {
  const double h = 1e-5;
  for (double x = 0.1; x <= 50.0; x += 0.37) {
    const double d = (bessel_j(0, x + h) - bessel_j(0, x - h)) / (2 * h);
    CHECK(std::abs(d + bessel_j(1, x)) < 1e-6);
  }
}

TEST_CASE("bessel domain errors") {
  CHECK_THROWS_AS(bessel_j(0, -1.0), Error);
  CHECK_THROWS_AS(bessel_j(1, NAN), Error);
  CHECK_THROWS_AS(bessel_j(0, INFINITY), Error);
  CHECK_THROWS_AS(bessel_j(2, 1.0), Error);
  try {
    bessel_j(0, -1.0);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DomainError);
  }
}

TEST_CASE("complex bessel against the integral representation") {
  double worst = 0.0;
  for (double re : {0.3, 2.0, 7.5, 8.5, 15.0, 24.0, 26.0, 40.0, 70.0}) {
    for (double im : {0.05, 0.5, 1.5, 3.0}) {
      const std::complex<double> z(re, im);
      for (int n : {0, 1}) {
        const auto ref = oracle::bessel_integral(n, z);
        worst = std::max(worst, std::abs(bessel_j(n, z) - ref) / std::max(1.0, std::abs(ref)));
      }
    }
  }
  CHECK(worst < 1e-10);
  CHECK(bessel_j(0, std::complex<double>(3.0, 0.0)) == std::complex<double>(bessel_j(0, 3.0), 0.0));
}

TEST_CASE("wave speeds") {
  CHECK(wave_speed(Material("a", 2.0, 0.0, 1.0), WaveKind::Secondary) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(wave_speed(Material("a", 1.0, 0.0, 1.0), WaveKind::Primary) == doctest::Approx(1.0).epsilon(1e-15));
  const Material ds30("DS-30", 355e3);
  const double mu = oracle::lame_mu(355e3, 0.49), la = oracle::lame_lambda(355e3, 0.49);
  CHECK(wave_speed(ds30, WaveKind::Primary) == doctest::Approx(std::sqrt((la + 2 * mu) / 1070.0)).epsilon(1e-14));
  CHECK(wave_speed(ds30, WaveKind::Secondary) == doctest::Approx(std::sqrt(mu / 1070.0)).epsilon(1e-14));
  CHECK(wave_speed(ds30, WaveKind::Primary) > wave_speed(ds30, WaveKind::Secondary));
  CHECK(impedance(ds30, WaveKind::Secondary) == doctest::Approx(1070.0 * std::sqrt(mu / 1070.0)));
}

TEST_CASE("attenuation factor") {
  const Material e10("E-10", 15e3);
  CHECK(attenuation_factor(e10, 100.0, 0.0, WaveKind::Primary) == 1.0);
  CHECK(attenuation_factor(Material("inv", 15e3, 0.49, 1070, 0.0), 1e3, 1.0, WaveKind::Secondary) == 1.0);
  const double w = 2 * std::numbers::pi * 125;
  const double mu = oracle::lame_mu(15e3, 0.49), la = oracle::lame_lambda(15e3, 0.49);
  const double vp = std::sqrt((la + 2 * mu) / 1070.0);
  const double expected = std::exp(-w * 5.0 * 5e-3 / (15e3 * vp));
  CHECK(attenuation_factor(e10, w, 5e-3, WaveKind::Primary) == doctest::Approx(expected).epsilon(1e-14));
  CHECK_THROWS_AS(attenuation_factor(e10, w, -1.0, WaveKind::Primary), Error);
}

TEST_CASE("attenuation properties") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ue(5e3, 500e3), ud(0.0, 0.05), uw(1.0, 2000.0), ueta(0.1, 50);
  for (int i = 0; i < 200; ++i) {
    const Material m("m", ue(rng), 0.45, 1000, ueta(rng));
    const double w = uw(rng), d1 = ud(rng), d2 = ud(rng);
    for (auto kind : {WaveKind::Primary, WaveKind::Secondary}) {
      const double f12 = attenuation_factor(m, w, d1 + d2, kind);
      CHECK(f12 == doctest::Approx(attenuation_factor(m, w, d1, kind) * attenuation_factor(m, w, d2, kind)).epsilon(1e-14));
      const double f = attenuation_factor(m, w, d1, kind);
      CHECK(f > 0.0);
      CHECK(f <= 1.0);
      CHECK(attenuation_factor(m, w * 1.1, d1, kind) <= f);
      CHECK(attenuation_factor(m, w, d1 * 1.1, kind) <= f);
      const Material stiffer("s", m.elastic_modulus() * 1.1, 0.45, 1000, m.viscosity());
      const Material more_viscous("v", m.elastic_modulus(), 0.45, 1000, m.viscosity() * 1.1);
      CHECK(attenuation_factor(stiffer, w, d1, kind) >= f);
      CHECK(attenuation_factor(more_viscous, w, d1, kind) <= f);
    }
  }
}

TEST_CASE("interface coefficients") {
  const Material a("A", 15e3), b("B", 355e3);
  auto same = interface_coefficients(a, a, WaveKind::Primary);
  CHECK(same.k_t == 1.0);
  CHECK(same.k_r == 0.0);
  auto rigid = interface_coefficients(1.0, 1e9);
  CHECK(rigid.k_t == doctest::Approx(0.0).epsilon(1e-8));
  CHECK(std::abs(rigid.k_r + 1.0) < 1e-8);
  const double z1 = 1070.0 * std::sqrt(oracle::lame_mu(15e3, 0.49) / 1070.0);
  const double z2 = 1070.0 * std::sqrt(oracle::lame_mu(355e3, 0.49) / 1070.0);
  auto c = interface_coefficients(a, b, WaveKind::Secondary);
  CHECK(c.k_t == doctest::Approx(2 * z1 / (z1 + z2)).epsilon(1e-14));
  CHECK(c.k_r == doctest::Approx((z1 - z2) / (z1 + z2)).epsilon(1e-14));
  CHECK(c.incident_impedance == doctest::Approx(z1));
  CHECK(c.transmitted_impedance == doctest::Approx(z2));
  CHECK_THROWS_AS(interface_coefficients(0.0, 0.0), Error);
  auto to_air = interface_coefficients(z1, air::impedance(WaveKind::Secondary));
  CHECK(to_air.k_t == 2.0);
  CHECK(air::impedance(WaveKind::Primary) == doctest::Approx(1.204 * 343.0));
}

TEST_CASE("interface identities over random pairs") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ue(5e3, 500e3), unu(0.0, 0.49), urho(900, 1200);
  for (int i = 0; i < 1000; ++i) {
    const Material a("a", ue(rng), unu(rng), urho(rng)), b("b", ue(rng), unu(rng), urho(rng));
    for (auto kind : {WaveKind::Primary, WaveKind::Secondary}) {
      const auto ab = interface_coefficients(a, b, kind);
      const auto ba = interface_coefficients(b, a, kind);
      CHECK(std::abs(ab.k_t - (1.0 + ab.k_r)) <= 1e-14);
      CHECK(std::abs(ab.k_t * ba.k_t - (1.0 - ab.k_r * ab.k_r)) <= 1e-12);
      CHECK(ab.k_t > 0.0);
      CHECK(ab.k_t < 2.0);
      CHECK(std::abs(ab.k_r) < 1.0);
    }
  }
}
