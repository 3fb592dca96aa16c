#include <doctest.h>

#include <cmath>
#include <numbers>

#include "haptic/error.hpp"
#include "haptic/skin_solver.hpp"
#include "oracles.hpp"

using namespace haptic;

namespace {

const Material kTissue("tissue", 60e3, 0.45, 1050.0, 5.0);

SkinStack default_stack() { return load_stack(std::filesystem::path(HAPTIC_DATA_DIR) / "forearm_stack.json"); }

double r_squared_of_log(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double ly = std::log(y[i]) - my;
    sxy += (x[i] - mx) * ly;
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += ly * ly;
  }
  return sxy * sxy / (sxx * syy);
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(a + (b - a) * i / (n - 1));
  return out;
}

}  // namespace

TEST_CASE("stack validation") {
  CHECK_THROWS_AS(SkinStack({}, kTissue), Error);
  CHECK_THROWS_AS(SkinStack({{kTissue, 2e-3}, {kTissue, 1e-3}}, kTissue), Error);
  CHECK_THROWS_AS(SkinStack({{kTissue, 0.0}}, kTissue), Error);
  const auto s = default_stack();
  CHECK(s.layer_count() == 3);
  CHECK(s.thickness(1) == doctest::Approx(3.5e-3));
}

TEST_CASE("system size") {
  CHECK(assemble_system(default_stack(), 785.0, 100.0).rows() == 14);
  CHECK(assemble_system(default_stack(), 785.0, 100.0).cols() == 14);
  CHECK(assemble_system(SkinStack::homogeneous(kTissue, {1e-3}), 785.0, 100.0).rows() == 6);
}

TEST_CASE("homogeneous stack matches the half-space transfer") {
  const LoadSpec load{1.0, 0.0, 3.5e-3, 125.0};
  const double w = load.omega();
  const auto stack = SkinStack::homogeneous(kTissue, {1e-3, 4e-3, 9e-3});
  for (std::complex<double> k : {std::complex<double>(50.0, 0.0), {300.0, 0.0}, {2000.0, 0.0}, {40.0, 20.0},
                                 {150.0, 5.0}, {1e4, 0.0}}) {
    CAPTURE(k);
    const auto c = solve_layer_coefficients(stack, load, w, k);
    const auto top = state_at_depth(stack, c, w, 0.0);
    const auto ref = halfspace_surface_uz(kTissue, w, k, normal_traction_transform(load, k));
    CHECK(std::abs(top[1] - ref) <= 1e-8 * std::abs(ref));
    // no upgoing energy in a homogeneous medium
    for (std::size_t i = 0; i < stack.layer_count(); ++i) {
      CHECK(std::abs(c.layers[i][2]) + std::abs(c.layers[i][3]) <= 1e-8 * (std::abs(c.layers[0][0]) + std::abs(c.layers[0][1])));
    }
  }
}

TEST_CASE("static half-space transfer") {
  const double e = 60e3, nu = 0.45;
  for (double k : {1.0, 100.0, 1e4}) {
    const auto uz = halfspace_surface_uz(kTissue, 0.0, k, 1.0);
    CHECK(uz.real() == doctest::Approx(2 * (1 - nu * nu) / (e * k)).epsilon(1e-12));
    const auto stack = SkinStack::homogeneous(kTissue, {2e-3});
    const LoadSpec load{1.0, 0.0, 3.5e-3, 0.0};
    const auto c = solve_layer_coefficients(stack, load, 0.0, k);
    const auto top = state_at_depth(stack, c, 0.0, 0.0);
    const auto f = normal_traction_transform(load, k);
    CHECK(std::abs(top[1] - 2 * (1 - nu * nu) / (e * k) * f) <= 1e-9 * std::abs(f) / (e * k));
  }
}

TEST_CASE("solved systems satisfy every boundary equation") {
  const auto stack = default_stack();
  const LoadSpec load{1e3, 200.0, 3.5e-3, 125.0};
  for (double kr : {5.0, 80.0, 400.0, 3000.0, 11000.0}) {
    for (double ki : {0.0, 30.0}) {
      const auto c = solve_layer_coefficients(stack, load, load.omega(), {kr, ki});
      CHECK(boundary_residual(stack, load, load.omega(), c) < 1e-8);
      const auto top = state_at_depth(stack, c, load.omega(), 0.0);
      CHECK(std::abs(top[2] + normal_traction_transform(load, c.k)) <= 1e-8 * std::abs(normal_traction_transform(load, c.k)));
    }
  }
}

TEST_CASE("coefficients are linear in the load") {
  const auto stack = default_stack();
  const LoadSpec one{1.0, 0.0, 3.5e-3, 125.0};
  LoadSpec four = one;
  four.normal_traction = 4.0;
  LoadSpec odd = one;
  odd.normal_traction = 3.7;
  const auto a = solve_layer_coefficients(stack, one, one.omega(), 300.0);
  const auto b = solve_layer_coefficients(stack, four, one.omega(), 300.0);
  const auto c = solve_layer_coefficients(stack, odd, one.omega(), 300.0);
  for (std::size_t i = 0; i < a.layers.size(); ++i) {
    for (int q = 0; q < 4; ++q) {
      CHECK(b.layers[i][q] == 4.0 * a.layers[i][q]);
      CHECK(std::abs(c.layers[i][q] - 3.7 * a.layers[i][q]) <= 1e-12 * std::abs(c.layers[i][q]));
    }
  }
}

TEST_CASE("zero load gives zero coefficients and a zero profile") {
  const auto stack = default_stack();
  const LoadSpec zero{0.0, 0.0, 3.5e-3, 125.0};
  const auto c = solve_layer_coefficients(stack, zero, zero.omega(), 250.0);
  for (const auto& l : c.layers) {
    for (auto v : l) CHECK(v == std::complex<double>(0.0));
  }
  const auto p = surface_profile(stack, zero, {0.0, 5e-3, 1e-2});
  for (double v : p.u_z) CHECK(v == 0.0);
  for (double v : p.u_r) CHECK(v == 0.0);
}

TEST_CASE("static Boussinesq limit") {
  const double p = 1e3, a = 3.5e-3, e = 60e3, nu = 0.45;
  const auto stack = SkinStack::homogeneous(kTissue, {5e-3});
  const auto radii = linspace(0.0, 3 * a, 22);
  const auto prof = surface_profile(stack, LoadSpec{p, 0.0, a, 0.0}, radii);
  CHECK(prof.u_z[0] == doctest::Approx(2 * (1 - nu * nu) * p * a / e).epsilon(0.01));
  for (std::size_t i = 0; i < radii.size(); ++i) {
    CAPTURE(radii[i]);
    CHECK(prof.u_z[i] == doctest::Approx(oracle::boussinesq_uz(radii[i], p, a, e, nu)).epsilon(0.03));
  }
}

TEST_CASE("low-frequency dynamics approach the static limit") {
  const double a = 3.5e-3;
  const auto stack = SkinStack::homogeneous(kTissue, {5e-3});
  const std::vector<double> radii{0.0, a / 2, 2 * a};
  const auto st = surface_profile(stack, LoadSpec{1.0, 0.0, a, 0.0}, radii);
  const auto dy = surface_profile(stack, LoadSpec{1.0, 0.0, a, 0.5}, radii);
  for (std::size_t i = 0; i < radii.size(); ++i) CHECK(dy.u_z[i] == doctest::Approx(st.u_z[i]).epsilon(1e-3));
}

TEST_CASE("artificial interfaces are invisible") {
  const LoadSpec load{1.0, 0.0, 3.5e-3, 125.0};
  const auto radii = linspace(0.0, 20e-3, 21);
  const auto one = surface_field(SkinStack::homogeneous(kTissue, {1e-3}), load, radii);
  const auto three = surface_field(SkinStack::homogeneous(kTissue, {0.7e-3, 2.5e-3, 11e-3}), load, radii);
  double scale = 0, diff = 0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    scale = std::max(scale, std::abs(one.u_z[i]));
    diff = std::max({diff, std::abs(one.u_z[i] - three.u_z[i]), std::abs(one.u_r[i] - three.u_r[i])});
  }
  CHECK(diff < 1e-8 * scale);
}

TEST_CASE("profile is linear in the load") {
  const auto stack = default_stack();
  const auto radii = linspace(7e-3, 17e-3, 6);
  const auto a = surface_profile(stack, LoadSpec{1.0, 0.0, 3.5e-3, 125.0}, radii);
  const auto b = surface_profile(stack, LoadSpec{2.5, 0.0, 3.5e-3, 125.0}, radii);
  for (std::size_t i = 0; i < radii.size(); ++i) {
    CHECK(b.u_z[i] == doctest::Approx(2.5 * a.u_z[i]).epsilon(1e-10));
    CHECK(b.u_r[i] == doctest::Approx(2.5 * a.u_r[i]).epsilon(1e-10));
  }
}

TEST_CASE("viscosity never increases the amplitude") {
  std::vector<StackLayer> layers, inviscid;
  const auto s = default_stack();
  for (const auto& l : s.layers()) {
    layers.push_back(l);
    const auto& m = l.material;
    inviscid.push_back({Material(m.name(), m.elastic_modulus(), m.poisson_ratio(), m.density(), 0.0), l.bottom_depth});
  }
  const auto radii = linspace(1e-3, 17e-3, 9);
  const LoadSpec load{1.0, 0.0, 3.5e-3, 150.0};
  const auto v = surface_profile(SkinStack(layers, s.substrate()), load, radii);
  const auto iv = surface_profile(SkinStack(inviscid, s.substrate()), load, radii);
  for (std::size_t i = 0; i < radii.size(); ++i) {
    CHECK(v.u_z[i] <= iv.u_z[i]);
    CHECK(v.u_r[i] <= iv.u_r[i]);
  }
}

TEST_CASE("default stack decays quasi-exponentially") {
  const auto radii = linspace(7e-3, 17e-3, 11);
  for (double f : {100.0, 125.0, 150.0}) {
    CAPTURE(f);
    const auto p = normalize_profile(surface_profile(default_stack(), LoadSpec{1.0, 0.0, 3.5e-3, f}, radii), 7e-3);
    CHECK(r_squared_of_log(p.radii, p.u_z) >= 0.95);
    CHECK(p.u_z.back() < p.u_z.front());
  }
}

TEST_CASE("quadrature accuracy is enforced") {
  QuadratureOptions opt;
  opt.tolerance = 1e-15;
  opt.min_real_panels = 2;
  CHECK_THROWS_AS(surface_profile(default_stack(), LoadSpec{1.0, 0.0, 3.5e-3, 125.0}, {7e-3, 1e-2}, opt), Error);
  try {
    surface_profile(default_stack(), LoadSpec{1.0, 0.0, 3.5e-3, 125.0}, {7e-3, 1e-2}, opt);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::QuadratureAccuracy);
    CHECK(e.category() == ErrorCategory::Numerical);
  }
}

TEST_CASE("load and radii validation") {
  CHECK_THROWS_AS(surface_profile(default_stack(), LoadSpec{1.0, 0.0, 0.0, 125.0}, {1e-3}), Error);
  CHECK_THROWS_AS(surface_profile(default_stack(), LoadSpec{1.0, 0.0, 1e-3, -1.0}, {1e-3}), Error);
  CHECK_THROWS_AS(surface_profile(default_stack(), LoadSpec{1.0, 0.0, 1e-3, 100.0}, {2e-3, 1e-3}), Error);
}

TEST_CASE("normalize_profile") {
  AmplitudeProfile p;
  const double alpha = 150.0, r0 = 4e-3;
  p.radii = linspace(0.0, 20e-3, 41);
  for (double r : p.radii) {
    p.u_z.push_back(3e-6 * std::exp(-alpha * r));
    p.u_r.push_back(1e-6 * std::exp(-alpha * r));
  }
  const auto n = normalize_profile(p, r0);
  CHECK(n.normalized);
  CHECK(n.reference_amplitude == doctest::Approx(3e-6 * std::exp(-alpha * r0)));
  for (std::size_t i = 0; i < p.radii.size(); ++i) {
    CHECK(n.u_z[i] == doctest::Approx(std::exp(-alpha * (p.radii[i] - r0))).epsilon(1e-12));
    if (p.radii[i] == r0) CHECK(n.u_z[i] == 1.0);
  }
  const auto again = normalize_profile(n, r0);
  CHECK(again.u_z == n.u_z);
  CHECK(again.u_r == n.u_r);
  CHECK(normalize_profile(p, 0.0).u_z[0] == 1.0);

  AmplitudeProfile z{{0.0, 1.0}, {0.0, 0.0}, {0.0, 1.0}};
  try {
    normalize_profile(z, 0.0);
    FAIL("expected degenerate normalization");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateNormalization);
  }
  CHECK_THROWS_AS(normalize_profile(p, 1.0), Error);
}

TEST_CASE("stack and profile serialization round trip") {
  const auto s = default_stack();
  const auto text = serialize_stack(s);
  const auto back = parse_stack(text);
  CHECK(serialize_stack(back) == text);
  CHECK(stack_hash(back) == stack_hash(s));
  CHECK(stack_hash(s).size() == 64);
  CHECK_THROWS_AS(parse_stack(R"({"layers": [{"name": "a", "E_pa": 1}], "substrate": {"name": "b", "E_pa": 1}})"),
                  Error);

  AmplitudeProfile p{{0.0, 1e-3}, {1.5e-7, 2.25e-7}, {3.125e-6, 1e-6}, false, 1.0};
  const auto csv = format_profile_csv(p, {{"omega_rad_s", "785.398163397"}});
  CHECK(csv.rfind("# omega_rad_s=785.398163397\n", 0) == 0);
  CHECK(csv.find("r_m,u_r_m,u_z_m\n") != std::string::npos);
  const auto q = parse_profile_csv(csv);
  CHECK(q.radii == p.radii);
  CHECK(q.u_z == p.u_z);
  CHECK(q.u_r == p.u_r);
}
