#include "haptic/skin_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "haptic/bessel.hpp"
#include "haptic/elastic.hpp"
#include "haptic/error.hpp"
#include "haptic/io.hpp"
#include "haptic/parallel.hpp"
#include "haptic/simd/kernels.hpp"
#include "material_json.hpp"

namespace haptic {

namespace {

constexpr double kMaxCondition = 1e14;
constexpr double kMaxResidual = 1e-8;

struct Medium {
  double mu;
  double gamma;  // 1 / (2 (1 - nu)) = 1 - kp^2/ks^2
  double ks2;
  double kp2;
};

Medium medium(const Material& m, double omega) {
  const double vs = wave_speed(m, WaveKind::Secondary);
  const double vp = wave_speed(m, WaveKind::Primary);
  return {lame_constants(m).mu, 0.5 / (1.0 - m.poisson_ratio()), (omega / vs) * (omega / vs),
          (omega / vp) * (omega / vp)};
}

// expm1(x)/x for small complex x.
cplx phi1(cplx x) {
  cplx term = 1.0;
  cplx sum = 1.0;
  for (int n = 1; n < 25; ++n) {
    term *= x / static_cast<double>(n + 1);
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

using Column = std::array<cplx, 4>;

// Columns [u_r, u_z, sigma_zz, sigma_zr] of the P and S modes decaying away
// from one face of a layer. `dist` is the distance from that face. The S mode
// is regularized so that it stays independent of the P mode as omega -> 0.
void mode_pair(const Medium& md, cplx k, double dist, bool up, Column& p, Column& s) {
  const cplx alpha = std::sqrt(k * k - md.kp2);
  const cplx beta = std::sqrt(k * k - md.ks2);
  const cplx ea = std::exp(-alpha * dist);
  const cplx d = (alpha - beta) * dist;
  cplx e1;
  if (std::abs(d) <= 0.5) {
    e1 = ea * dist * md.gamma / (alpha + beta) * phi1(d);
  } else {
    e1 = (std::exp(-beta * dist) - ea) / md.ks2;
  }
  const double sg = up ? -1.0 : 1.0;
  const double mu = md.mu;
  const cplx two_k2_ks2 = 2.0 * k * k - md.ks2;
  p = {ea * -k, ea * (sg * -alpha), ea * mu * two_k2_ks2, ea * (sg * 2.0 * k * mu * alpha)};
  s = {sg * k * (beta * e1 - ea / (beta + k)),
       k * (k * e1 + (1.0 - md.gamma) * ea / (k + alpha)),
       sg * k * mu * (-2.0 * k * beta * e1 + (k - beta) / (k + beta) * ea),
       k * mu * (-two_k2_ks2 * e1 + (1.0 - 2.0 * k * (1.0 - md.gamma) / (k + alpha)) * ea)};
}

// Four columns of finite layer at local depth zeta in [0, h].
std::array<Column, 4> layer_columns(const Medium& md, cplx k, double zeta, double h) {
  std::array<Column, 4> c;
  mode_pair(md, k, zeta, false, c[0], c[1]);
  mode_pair(md, k, h - zeta, true, c[2], c[3]);
  return c;
}

std::array<Column, 2> substrate_columns(const Medium& md, cplx k, double zeta) {
  std::array<Column, 2> c;
  mode_pair(md, k, zeta, false, c[0], c[1]);
  return c;
}

double reference_mu(const SkinStack& stack) {
  double mu = 0.0;
  for (const auto& l : stack.layers()) mu = std::max(mu, lame_constants(l.material).mu);
  return mu;
}

struct Scaled {
  Eigen::MatrixXcd matrix;
  Eigen::VectorXd col_scale;
  Eigen::VectorXd row_scale;
};

Scaled equilibrate(Eigen::MatrixXcd m) {
  const Eigen::Index n = m.rows();
  Eigen::VectorXd cs(n), rs(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double c = m.col(j).cwiseAbs().maxCoeff();
    cs(j) = c > 0.0 ? c : 1.0;
    m.col(j) /= cs(j);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = m.row(i).cwiseAbs().maxCoeff();
    rs(i) = r > 0.0 ? r : 1.0;
    m.row(i) /= rs(i);
  }
  return {std::move(m), cs, rs};
}

std::string describe_k(cplx k, double omega) {
  std::ostringstream os;
  os << "k=(" << k.real() << "," << k.imag() << ") 1/m, omega=" << omega << " rad/s";
  return os.str();
}

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

struct Nodes {
  std::vector<cplx> contour_k;
  std::vector<cplx> contour_w;
  std::vector<double> real_k;
  std::vector<double> real_w;
};

Nodes build_nodes(const SkinStack& stack, double omega, double a, double r_max, const QuadratureOptions& opt,
                  int refinement) {
  std::vector<double> gx, gw;
  gauss_legendre(opt.gauss_points, gx, gw);
  double ks_max = 0.0;
  for (const auto& l : stack.layers()) ks_max = std::max(ks_max, omega / wave_speed(l.material, WaveKind::Secondary));
  ks_max = std::max(ks_max, omega / wave_speed(stack.substrate(), WaveKind::Secondary));

  Nodes nodes;
  const double t_end = 1.5 * ks_max;
  if (t_end > 0.0) {
    // Sine-shaped excursion into Im k > 0 keeps the path clear of the
    // surface-wave and branch-point singularities on the real axis.
    const double height = r_max > 0.0 ? std::min(0.25 * t_end, 3.0 / r_max) : 0.25 * t_end;
    const int panels = opt.contour_panels * refinement;
    for (int p = 0; p < panels; ++p) {
      const double t0 = t_end * p / panels;
      const double t1 = t_end * (p + 1) / panels;
      for (int g = 0; g < opt.gauss_points; ++g) {
        const double t = 0.5 * (gx[g] + 1.0) * (t1 - t0) + t0;
        const double arg = std::numbers::pi * t / t_end;
        nodes.contour_k.emplace_back(t, height * std::sin(arg));
        const cplx dk(1.0, height * std::numbers::pi / t_end * std::cos(arg));
        nodes.contour_w.push_back(0.5 * gw[g] * (t1 - t0) * dk);
      }
    }
  }
  const double k_max = std::max(opt.kmax_factor / a, 2.0 * t_end);
  const int min_panels = static_cast<int>(std::ceil((k_max - t_end) * (r_max + a) / std::numbers::pi));
  const int panels = std::max(opt.min_real_panels, min_panels) * refinement;
  for (int p = 0; p < panels; ++p) {
    const double t0 = t_end + (k_max - t_end) * p / panels;
    const double t1 = t_end + (k_max - t_end) * (p + 1) / panels;
    for (int g = 0; g < opt.gauss_points; ++g) {
      nodes.real_k.push_back(0.5 * (gx[g] + 1.0) * (t1 - t0) + t0);
      nodes.real_w.push_back(0.5 * gw[g] * (t1 - t0));
    }
  }
  return nodes;
}

ComplexProfile synthesize(const SkinStack& stack, const LoadSpec& load, const std::vector<double>& radii,
                          const QuadratureOptions& opt, int refinement) {
  const double omega = load.omega();
  const double r_max = radii.empty() ? 0.0 : radii.back();
  const Nodes nodes = build_nodes(stack, omega, load.disk_radius, r_max, opt, refinement);
  const std::size_t nc = nodes.contour_k.size();
  const std::size_t nr = nodes.real_k.size();

  // Per-node surface transfer times weight times k.
  std::vector<cplx> gr(nc + nr), gz(nc + nr);
  parallel_for(nc + nr, [&](std::size_t i) {
    const cplx k = i < nc ? nodes.contour_k[i] : cplx(nodes.real_k[i - nc]);
    const cplx w = i < nc ? nodes.contour_w[i] : cplx(nodes.real_w[i - nc]);
    const LayerCoefficients c = solve_layer_coefficients(stack, load, omega, k);
    const auto top = state_at_depth(stack, c, omega, 0.0);
    gr[i] = w * k * top[0];
    gz[i] = w * k * top[1];
  });

  std::vector<double> rr(nr), ri(nr), zr(nr), zi(nr);
  for (std::size_t j = 0; j < nr; ++j) {
    rr[j] = gr[nc + j].real();
    ri[j] = gr[nc + j].imag();
    zr[j] = gz[nc + j].real();
    zi[j] = gz[nc + j].imag();
  }

  ComplexProfile out;
  out.u_r.resize(radii.size());
  out.u_z.resize(radii.size());
  parallel_for(radii.size(), [&](std::size_t m) {
    const double r = radii[m];
    cplx ur = 0.0, uz = 0.0;
    for (std::size_t j = 0; j < nc; ++j) {
      const cplx kr = nodes.contour_k[j] * r;
      ur += gr[j] * bessel_j(1, kr);
      uz += gz[j] * bessel_j(0, kr);
    }
    std::vector<double> arg(nr), j0(nr), j1(nr);
    for (std::size_t j = 0; j < nr; ++j) arg[j] = nodes.real_k[j] * r;
    simd::bessel_j0(arg, j0);
    simd::bessel_j1(arg, j1);
    ur += cplx(simd::dot(rr, j1), simd::dot(ri, j1));
    uz += cplx(simd::dot(zr, j0), simd::dot(zi, j0));
    out.u_r[m] = ur;
    out.u_z[m] = uz;
  });
  return out;
}

void validate_radii(const std::vector<double>& radii) {
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!std::isfinite(radii[i]) || radii[i] < 0.0) {
      throw Error(ErrorCode::DomainError, "radii must be finite and non-negative");
    }
    if (i > 0 && !(radii[i] > radii[i - 1])) {
      throw Error(ErrorCode::DomainError, "radii must be strictly increasing");
    }
  }
}

}  // namespace

SkinStack::SkinStack(std::vector<StackLayer> layers, Material substrate)
    : layers_(std::move(layers)), substrate_(std::move(substrate)) {
  if (layers_.empty()) throw Error(ErrorCode::InvalidStack, "stack needs at least one finite layer");
  double prev = 0.0;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const double h = layers_[i].bottom_depth;
    if (!std::isfinite(h) || !(h > prev)) {
      throw Error(ErrorCode::InvalidStack,
                  "layer " + std::to_string(i) + " (" + layers_[i].material.name() +
                      "): bottom depths must be positive and strictly increasing");
    }
    prev = h;
  }
}

double SkinStack::thickness(std::size_t i) const {
  const double top = i == 0 ? 0.0 : layers_.at(i - 1).bottom_depth;
  return layers_.at(i).bottom_depth - top;
}

SkinStack SkinStack::homogeneous(const Material& m, const std::vector<double>& depths) {
  std::vector<StackLayer> layers;
  for (double d : depths) layers.push_back({m, d});
  return SkinStack(std::move(layers), m);
}

double LoadSpec::omega() const noexcept { return 2.0 * std::numbers::pi * frequency; }

void LoadSpec::validate() const {
  if (!std::isfinite(normal_traction) || !std::isfinite(tangential_traction)) {
    throw Error(ErrorCode::InvalidLoad, "tractions must be finite");
  }
  if (!std::isfinite(disk_radius) || !(disk_radius > 0.0)) {
    throw Error(ErrorCode::InvalidLoad, "disk radius must be positive");
  }
  if (!std::isfinite(frequency) || frequency < 0.0) {
    throw Error(ErrorCode::InvalidLoad, "frequency must be non-negative");
  }
}

cplx normal_traction_transform(const LoadSpec& load, cplx k) {
  return load.normal_traction * load.disk_radius * bessel_j(1, k * load.disk_radius) / k;
}

cplx tangential_traction_transform(const LoadSpec& load, cplx k) {
  if (load.tangential_traction == 0.0) return 0.0;
  static const auto rule = [] {
    std::pair<std::vector<double>, std::vector<double>> xw;
    gauss_legendre(64, xw.first, xw.second);
    return xw;
  }();
  const double a = load.disk_radius;
  cplx sum = 0.0;
  for (std::size_t i = 0; i < rule.first.size(); ++i) {
    const double r = 0.5 * a * (rule.first[i] + 1.0);
    sum += rule.second[i] * bessel_j(1, k * r) * r;
  }
  return load.tangential_traction * 0.5 * a * sum;
}

Eigen::MatrixXcd assemble_system(const SkinStack& stack, double omega, cplx k) {
  const std::size_t L = stack.layer_count();
  const Eigen::Index n = static_cast<Eigen::Index>(4 * L + 2);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  const double inv_mu = 1.0 / reference_mu(stack);
  const std::array<double, 4> row_scale{1.0, 1.0, inv_mu, inv_mu};

  std::vector<Medium> media;
  for (const auto& l : stack.layers()) media.push_back(medium(l.material, omega));
  const Medium sub = medium(stack.substrate(), omega);

  const auto top = layer_columns(media[0], k, 0.0, stack.thickness(0));
  for (int c = 0; c < 4; ++c) {
    m(0, c) = top[c][2] * inv_mu;
    m(1, c) = top[c][3] * inv_mu;
  }
  Eigen::Index row = 2;
  for (std::size_t i = 0; i < L; ++i) {
    const double h = stack.thickness(i);
    const auto above = layer_columns(media[i], k, h, h);
    const Eigen::Index col = static_cast<Eigen::Index>(4 * i);
    for (int q = 0; q < 4; ++q) {
      for (int c = 0; c < 4; ++c) m(row + q, col + c) = above[c][q] * row_scale[q];
    }
    if (i + 1 < L) {
      const auto below = layer_columns(media[i + 1], k, 0.0, stack.thickness(i + 1));
      for (int q = 0; q < 4; ++q) {
        for (int c = 0; c < 4; ++c) m(row + q, col + 4 + c) = -below[c][q] * row_scale[q];
      }
    } else {
      const auto below = substrate_columns(sub, k, 0.0);
      for (int q = 0; q < 4; ++q) {
        for (int c = 0; c < 2; ++c) m(row + q, col + 4 + c) = -below[c][q] * row_scale[q];
      }
    }
    row += 4;
  }
  return m;
}

Eigen::VectorXcd assemble_rhs(const SkinStack& stack, cplx normal, cplx tangential) {
  const Eigen::Index n = static_cast<Eigen::Index>(4 * stack.layer_count() + 2);
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);
  const double inv_mu = 1.0 / reference_mu(stack);
  // Pressure pushes into the medium: sigma_zz = -F1 with z pointing down.
  rhs(0) = -normal * inv_mu;
  rhs(1) = tangential * inv_mu;
  return rhs;
}

LayerCoefficients solve_layer_coefficients(const SkinStack& stack, const LoadSpec& load, double omega, cplx k) {
  if (!(std::abs(k) > 0.0) || !std::isfinite(k.real()) || !std::isfinite(k.imag())) {
    throw Error(ErrorCode::DomainError, "wavenumber must be finite and nonzero");
  }
  const Eigen::MatrixXcd m = assemble_system(stack, omega, k);
  if (!m.allFinite()) {
    throw Error(ErrorCode::ResonanceOrConditioning, "non-finite system at " + describe_k(k, omega));
  }
  const Eigen::VectorXcd rhs =
      assemble_rhs(stack, normal_traction_transform(load, k), tangential_traction_transform(load, k));

  const Scaled s = equilibrate(m);
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(s.matrix);
  const double rcond = lu.rcond();
  if (!(rcond * kMaxCondition > 1.0)) {
    throw Error(ErrorCode::ResonanceOrConditioning,
                "condition estimate " + io::format_number(1.0 / rcond) + " exceeds 1e14 at " + describe_k(k, omega));
  }
  const Eigen::VectorXcd y = lu.solve(rhs.cwiseQuotient(s.row_scale.cast<cplx>()));
  const Eigen::VectorXcd x = y.cwiseQuotient(s.col_scale.cast<cplx>());

  LayerCoefficients out;
  out.k = k;
  out.layers.resize(stack.layer_count());
  for (std::size_t i = 0; i < stack.layer_count(); ++i) {
    for (int c = 0; c < 4; ++c) out.layers[i][c] = x(static_cast<Eigen::Index>(4 * i + c));
  }
  const Eigen::Index base = static_cast<Eigen::Index>(4 * stack.layer_count());
  out.substrate = {x(base), x(base + 1)};

  const double res = boundary_residual(stack, load, omega, out);
  if (!(res <= kMaxResidual)) {
    throw Error(ErrorCode::ResonanceOrConditioning,
                "boundary residual " + io::format_number(res) + " exceeds 1e-8 at " + describe_k(k, omega));
  }
  return out;
}

std::array<cplx, 4> state_at_depth(const SkinStack& stack, const LayerCoefficients& c, double omega, double depth) {
  if (!std::isfinite(depth) || depth < 0.0) throw Error(ErrorCode::DomainError, "depth must be non-negative");
  std::array<cplx, 4> out{};
  double top = 0.0;
  for (std::size_t i = 0; i < stack.layer_count(); ++i) {
    const double bottom = stack.layers()[i].bottom_depth;
    if (depth <= bottom) {
      const auto cols = layer_columns(medium(stack.layers()[i].material, omega), c.k, depth - top, bottom - top);
      for (int m = 0; m < 4; ++m) {
        for (int q = 0; q < 4; ++q) out[q] += cols[m][q] * c.layers[i][m];
      }
      return out;
    }
    top = bottom;
  }
  const auto cols = substrate_columns(medium(stack.substrate(), omega), c.k, depth - top);
  for (int m = 0; m < 2; ++m) {
    for (int q = 0; q < 4; ++q) out[q] += cols[m][q] * c.substrate[m];
  }
  return out;
}

double boundary_residual(const SkinStack& stack, const LoadSpec& load, double omega, const LayerCoefficients& c) {
  const Eigen::MatrixXcd m = assemble_system(stack, omega, c.k);
  const Eigen::VectorXcd rhs =
      assemble_rhs(stack, normal_traction_transform(load, c.k), tangential_traction_transform(load, c.k));
  Eigen::VectorXcd x(m.cols());
  for (std::size_t i = 0; i < stack.layer_count(); ++i) {
    for (int q = 0; q < 4; ++q) x(static_cast<Eigen::Index>(4 * i + q)) = c.layers[i][q];
  }
  x(m.cols() - 2) = c.substrate[0];
  x(m.cols() - 1) = c.substrate[1];
  const Eigen::VectorXcd r = m * x - rhs;

  // Stress rows are in units of traction / mu_ref; displacement rows are
  // converted to traction through mu_ref * |k|.
  const double mu_ref = reference_mu(stack);
  const double kmag = std::abs(c.k);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    const bool stress_row = i < 2 || (i - 2) % 4 >= 2;
    worst = std::max(worst, std::abs(r(i)) * mu_ref * (stress_row ? 1.0 : kmag));
  }
  const double traction = std::max(std::abs(rhs(0)), std::abs(rhs(1))) * mu_ref;
  return traction > 0.0 ? worst / traction : worst;
}

cplx halfspace_surface_uz(const Material& m, double omega, cplx k, cplx normal) {
  const Medium md = medium(m, omega);
  const cplx alpha = std::sqrt(k * k - md.kp2);
  const cplx beta = std::sqrt(k * k - md.ks2);
  const cplx x = k * k;
  const double s = md.ks2;
  // Rayleigh denominator with the ks^2 factor divided out analytically so
  // the expression stays accurate down to omega = 0.
  const cplx reduced = -16.0 * md.gamma * x * x * x + (8.0 + 16.0 * md.gamma) * s * x * x - 8.0 * s * s * x + s * s * s;
  const cplx conj = (2.0 * x - s) * (2.0 * x - s) + 4.0 * x * alpha * beta;
  return -normal * alpha * conj / (md.mu * reduced);
}

void AmplitudeProfile::validate() const {
  if (u_r.size() != radii.size() || u_z.size() != radii.size()) {
    throw Error(ErrorCode::DomainError, "profile columns have unequal lengths");
  }
  validate_radii(radii);
}

ComplexProfile surface_field(const SkinStack& stack, const LoadSpec& load, const std::vector<double>& radii,
                             const QuadratureOptions& options) {
  load.validate();
  validate_radii(radii);
  ComplexProfile coarse = synthesize(stack, load, radii, options, 1);
  if (!options.check_convergence || load.is_zero()) return coarse;
  ComplexProfile fine = synthesize(stack, load, radii, options, 2);
  double scale = 0.0, change = 0.0;
  std::size_t worst = 0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    scale = std::max({scale, std::abs(fine.u_r[i]), std::abs(fine.u_z[i])});
    const double d = std::max(std::abs(fine.u_r[i] - coarse.u_r[i]), std::abs(fine.u_z[i] - coarse.u_z[i]));
    if (d > change) {
      change = d;
      worst = i;
    }
  }
  if (scale > 0.0 && change > options.tolerance * scale) {
    throw Error(ErrorCode::QuadratureAccuracy,
                "relative change " + io::format_number(change / scale) + " after grid doubling at r=" +
                    io::format_number(radii[worst]) + " m exceeds " + io::format_number(options.tolerance));
  }
  return fine;
}

AmplitudeProfile surface_profile(const SkinStack& stack, const LoadSpec& load, const std::vector<double>& radii,
                                 const QuadratureOptions& options) {
  const ComplexProfile field = surface_field(stack, load, radii, options);
  AmplitudeProfile p;
  p.radii = radii;
  p.u_r.resize(radii.size());
  p.u_z.resize(radii.size());
  const double omega = load.omega();
  for (std::size_t i = 0; i < radii.size(); ++i) {
    double fr = 1.0, fz = 1.0;
    if (options.apply_attenuation) {
      fr = attenuation_factor(stack.top(), omega, radii[i], WaveKind::Primary);
      fz = attenuation_factor(stack.top(), omega, radii[i], WaveKind::Secondary);
    }
    p.u_r[i] = std::abs(field.u_r[i]) * fr;
    p.u_z[i] = std::abs(field.u_z[i]) * fz;
  }
  return p;
}

AmplitudeProfile normalize_profile(const AmplitudeProfile& p, double reference_radius) {
  p.validate();
  if (p.radii.empty() || !(reference_radius >= p.radii.front()) || !(reference_radius <= p.radii.back())) {
    throw Error(ErrorCode::DomainError, "reference radius lies outside the profile");
  }
  const auto it = std::lower_bound(p.radii.begin(), p.radii.end(), reference_radius);
  const std::size_t j = static_cast<std::size_t>(it - p.radii.begin());
  double ref;
  if (p.radii[j] == reference_radius) {
    ref = p.u_z[j];
  } else {
    const double t = (reference_radius - p.radii[j - 1]) / (p.radii[j] - p.radii[j - 1]);
    ref = (1.0 - t) * p.u_z[j - 1] + t * p.u_z[j];
  }
  ref = std::abs(ref);
  if (!(ref > 0.0) || !std::isfinite(ref)) {
    throw Error(ErrorCode::DegenerateNormalization, "reference amplitude is zero");
  }
  AmplitudeProfile out = p;
  for (auto& v : out.u_r) v /= ref;
  for (auto& v : out.u_z) v /= ref;
  out.normalized = true;
  out.reference_amplitude = p.reference_amplitude * ref;
  return out;
}

SkinStack parse_stack(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidStack, std::string("stack does not parse: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("layers") || !doc["layers"].is_array()) {
    throw Error(ErrorCode::InvalidStack, "stack needs a 'layers' array");
  }
  if (!doc.contains("substrate")) throw Error(ErrorCode::InvalidStack, "stack needs a 'substrate' record");
  std::vector<StackLayer> layers;
  const auto& arr = doc["layers"];
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string entry = "layer " + std::to_string(i);
    Material m = material_from_record(arr[i], entry, ErrorCode::InvalidStack);
    if (!arr[i].contains("bottom_depth_m") || !arr[i]["bottom_depth_m"].is_number()) {
      throw Error(ErrorCode::InvalidStack, entry + " (" + m.name() + "): missing field 'bottom_depth_m'");
    }
    layers.push_back({std::move(m), arr[i]["bottom_depth_m"].get<double>()});
  }
  return SkinStack(std::move(layers), material_from_record(doc["substrate"], "substrate", ErrorCode::InvalidStack));
}

SkinStack load_stack(const std::filesystem::path& path) { return parse_stack(io::read_text_file(path)); }

std::string serialize_stack(const SkinStack& stack) {
  ordered_json doc;
  doc["layers"] = ordered_json::array();
  for (const auto& l : stack.layers()) {
    ordered_json rec = material_to_record(l.material);
    rec["bottom_depth_m"] = l.bottom_depth;
    doc["layers"].push_back(std::move(rec));
  }
  doc["substrate"] = material_to_record(stack.substrate());
  return doc.dump(2) + "\n";
}

std::string stack_hash(const SkinStack& stack) { return io::sha256_hex(serialize_stack(stack)); }

std::string format_profile_csv(const AmplitudeProfile& p,
                               const std::vector<std::pair<std::string, std::string>>& metadata) {
  p.validate();
  io::CsvTable t;
  t.metadata = metadata;
  t.metadata.emplace_back("normalized", p.normalized ? "true" : "false");
  t.metadata.emplace_back("reference_amplitude_m", io::format_number(p.reference_amplitude));
  t.columns = {"r_m", "u_r_m", "u_z_m"};
  for (std::size_t i = 0; i < p.radii.size(); ++i) t.rows.push_back({p.radii[i], p.u_r[i], p.u_z[i]});
  return io::format_csv(t);
}

AmplitudeProfile parse_profile_csv(const std::string& text) {
  const io::CsvTable t = io::parse_csv(text, "profile");
  AmplitudeProfile p;
  p.radii = t.column("r_m");
  p.u_r = t.column("u_r_m");
  p.u_z = t.column("u_z_m");
  if (const auto* v = t.find_metadata("normalized")) p.normalized = *v == "true";
  if (const auto* v = t.find_metadata("reference_amplitude_m")) p.reference_amplitude = std::stod(*v);
  p.validate();
  return p;
}

}  // namespace haptic
