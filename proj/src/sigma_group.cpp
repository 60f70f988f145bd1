#include "s3sigma/sigma_group.hpp"

#include "s3sigma/finite_diff.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace s3sigma {

namespace {

using cplx = std::complex<double>;

Vec4 su2_quaternion(const SigmaGroupElement& g, double radius) {
  Vec4 q;
  q << rho(g.chart(), radius), g.eps / radius;
  return q;
}

}  // namespace

// The eps sector is the quaternion product q' q; (z, nu) transforms as the
// quaternion q' (z, nu / 1) i.e. the X^L(eps') rotation plus the eps' z boost.
SigmaGroupElement compose(const SigmaGroupElement& gp, const SigmaGroupElement& g,
                          const SpaceConfig& cfg) {
  const double R = cfg.radius;
  const double m = cfg.mass;
  const Vec4 qp = su2_quaternion(gp, R);
  const Vec4 q = su2_quaternion(g, R);
  const Vec4 qq = quat_mul(qp, q).normalized();
  const double rho_p = qp(0);

  SigmaGroupElement out;
  out.eps = R * qq.tail<3>();
  out.rho_sign = qq(0) < 0.0 ? -1 : +1;
  // X^L(eps')^i_k nu^k = rho' nu^i - (1/R) eta^i_kj nu^k eps'^j = rho' nu + eps' x nu / R
  out.nu = gp.nu + rho_p * g.nu + gp.eps.cross(g.nu) / R + gp.eps * g.z / R;
  out.z = gp.z + rho_p * g.z - gp.eps.dot(g.nu) / R;
  const double cocycle = R * (rho_p - 1.0) * g.z - gp.eps.dot(g.nu);
  out.zeta = gp.zeta * g.zeta * std::exp(cplx(0.0, -m * cocycle));
  out.zeta /= std::abs(out.zeta);
  return out;
}

SigmaGroupElement inverse(const SigmaGroupElement& g, const SpaceConfig& cfg) {
  const double R = cfg.radius;
  const double m = cfg.mass;
  const double r = rho(g.chart(), R);
  SigmaGroupElement out;
  out.eps = -g.eps;
  out.rho_sign = g.rho_sign;
  out.nu = -r * g.nu + g.eps.cross(g.nu) / R + g.eps * g.z / R;
  out.z = -(r * g.z + g.eps.dot(g.nu) / R);
  out.zeta = std::conj(g.zeta) * std::exp(cplx(0.0, m * (R * (r - 1.0) * g.z + g.eps.dot(g.nu))));
  out.zeta /= std::abs(out.zeta);
  return out;
}

double element_distance(const SigmaGroupElement& a, const SigmaGroupElement& b) {
  double d = std::max({(a.eps - b.eps).cwiseAbs().maxCoeff(), (a.nu - b.nu).cwiseAbs().maxCoeff(),
                       std::abs(a.z - b.z), std::abs(a.zeta - b.zeta)});
  if (a.rho_sign != b.rho_sign) d = std::numeric_limits<double>::infinity();
  return d;
}

Vec8 coordinates(const SigmaGroupElement& g) {
  Vec8 x;
  x << g.eps, g.nu, g.z, std::arg(g.zeta);
  return x;
}

SigmaGroupElement from_coordinates(const Vec8& x, int rho_sign) {
  SigmaGroupElement g;
  g.eps = x.segment<3>(kEps);
  g.rho_sign = rho_sign;
  g.nu = x.segment<3>(kNu);
  g.z = x(kZ);
  g.zeta = std::polar(1.0, x(kPhi));
  return g;
}

Mat8 left_fields(const SigmaGroupElement& g, const SpaceConfig& cfg) {
  const double R = cfg.radius;
  const double m = cfg.mass;
  const double r = rho(g.chart(), R);
  const Mat3 zl = dual_field(g.chart(), Side::Left, R);  // zl(i, k) = Z^{Lk}_(i)
  Mat8 f = Mat8::Zero();
  for (int i = 0; i < 3; ++i) {
    // Z^L_(eps^i) = Z^{Lk}_(i) d/d eps^k
    f.block<3, 1>(kEps, kEps + i) = zl.row(i).transpose();
    // Z^L_(nu^i) = Z^{Lk}_(i) d/d nu^k - (1/R) eps_i (d/dz - m R Xi)
    f.block<3, 1>(kNu, kNu + i) = zl.row(i).transpose();
    f(kZ, kNu + i) = -g.eps(i) / R;
    f(kPhi, kNu + i) = m * g.eps(i);
  }
  // Z^L_(z) = rho d/dz + (1/R) eps^i d/d nu^i - m R (rho - 1) Xi
  f.block<3, 1>(kNu, kZ) = g.eps / R;
  f(kZ, kZ) = r;
  f(kPhi, kZ) = -m * R * (r - 1.0);
  f(kPhi, kPhi) = 1.0;
  return f;
}

Mat8 right_fields(const SigmaGroupElement& g, const SpaceConfig& cfg) {
  const double R = cfg.radius;
  const double m = cfg.mass;
  const Mat3 zr = dual_field(g.chart(), Side::Right, R);
  Mat8 f = Mat8::Zero();
  for (int i = 0; i < 3; ++i) {
    // Z^R_(eps^i) = Z^{Rk}_(i) d/d eps^k + (1/R) eta^j_ik nu^k d/d nu^j
    //              + (1/R) z d/d nu^i - (1/R) nu_i (d/dz - m R Xi)
    f.block<3, 1>(kEps, kEps + i) = zr.row(i).transpose();
    for (int j = 0; j < 3; ++j) {
      double acc = 0.0;
      for (int k = 0; k < 3; ++k) acc += levi_civita(j, i, k) * g.nu(k);
      f(kNu + j, kEps + i) = acc / R;
    }
    f(kNu + i, kEps + i) += g.z / R;
    f(kZ, kEps + i) = -g.nu(i) / R;
    f(kPhi, kEps + i) = m * g.nu(i);
    f(kNu + i, kNu + i) = 1.0;
  }
  f(kZ, kZ) = 1.0;
  f(kPhi, kPhi) = 1.0;
  return f;
}

namespace {

// Coordinates of a product with the phase unwrapped around `phase_ref`.
Vec8 product_coordinates(const SigmaGroupElement& g, double phase_ref) {
  Vec8 x = coordinates(g);
  x(kPhi) = phase_ref + std::arg(g.zeta * std::polar(1.0, -phase_ref));
  return x;
}

Mat8 fields_numeric(const SigmaGroupElement& g, const SpaceConfig& cfg, double step, bool left) {
  const double h = step > 0.0 ? step : 1e-5 * cfg.radius;
  const double phase_ref = std::arg(g.zeta);
  auto translated = [&](const Vec8& delta) -> Vec8 {
    const SigmaGroupElement d = from_coordinates(delta, +1);
    const SigmaGroupElement p = left ? compose(g, d, cfg) : compose(d, g, cfg);
    if (p.rho_sign != g.rho_sign) throw StencilError("group-law stencil crossed the chart equator");
    return product_coordinates(p, phase_ref);
  };
  return fd::jacobian(translated, Vec8(Vec8::Zero()), h);
}

}  // namespace

Mat8 left_fields_numeric(const SigmaGroupElement& g, const SpaceConfig& cfg, double step) {
  return fields_numeric(g, cfg, step, true);
}

Mat8 right_fields_numeric(const SigmaGroupElement& g, const SpaceConfig& cfg, double step) {
  return fields_numeric(g, cfg, step, false);
}

Vec8 quantization_form(const SigmaGroupElement& g, const SpaceConfig& cfg) {
  const double R = cfg.radius;
  const double m = cfg.mass;
  const double r = rho(g.chart(), R);
  Vec8 theta = Vec8::Zero();
  theta.segment<3>(kNu) = -m * g.eps;
  theta(kZ) = -m * R * (r - 1.0);
  theta(kPhi) = 1.0;
  return theta;
}

Mat8 quantization_form_differential(const SigmaGroupElement& g, const SpaceConfig& cfg) {
  const double R = cfg.radius;
  const double m = cfg.mass;
  const double r = rho(g.chart(), R);
  if (std::abs(r) < kChartSingularity) throw ChartSingularityError("dTheta needs rho != 0");
  Mat8 d = Mat8::Zero();
  for (int i = 0; i < 3; ++i) {
    // d_eps^i Theta_nu^i = -m, d_eps^i Theta_z = m eps_i / (R rho)
    d(kEps + i, kNu + i) = -m;
    d(kNu + i, kEps + i) = m;
    d(kEps + i, kZ) = m * g.eps(i) / (R * r);
    d(kZ, kEps + i) = -d(kEps + i, kZ);
  }
  return d;
}

Mat8 quantization_form_differential_numeric(const SigmaGroupElement& g, const SpaceConfig& cfg,
                                            double step) {
  const double h = step > 0.0 ? step : 1e-5 * cfg.radius;
  const int sign = g.rho_sign;
  auto theta_at = [&](const Vec8& x) -> Vec8 { return quantization_form(from_coordinates(x, sign), cfg); };
  // jac(b, a) = d_a Theta_b
  const Eigen::MatrixXd jac = fd::jacobian(theta_at, coordinates(g), h);
  return jac.transpose() - jac;
}

Eigen::Matrix<double, 7, 1> noether_invariants(const SigmaGroupElement& g, const SpaceConfig& cfg) {
  const double R = cfg.radius;
  const double m = cfg.mass;
  const double r = rho(g.chart(), R);
  const Mat3 zr = dual_field(g.chart(), Side::Right, R);
  Eigen::Matrix<double, 7, 1> out;
  out.head<3>() = m * (zr * g.nu - g.z * g.eps / R);
  out.segment<3>(3) = -m * g.eps;
  out(6) = -m * R * (r - 1.0);
  return out;
}

CharacteristicReport characteristic_check(const SigmaGroupElement& g, const SpaceConfig& cfg) {
  const Mat8 zl = left_fields(g, cfg);
  const Vec8 theta = quantization_form(g, cfg);
  const Mat8 dtheta = quantization_form_differential_numeric(g, cfg);
  auto contract2 = [&](int col) { return (zl.col(col).transpose() * dtheta).cwiseAbs().maxCoeff(); };
  CharacteristicReport rep;
  rep.z_theta = std::abs(theta.dot(zl.col(kZ)));
  rep.z_dtheta = contract2(kZ);
  rep.xi_dtheta = contract2(kPhi);
  rep.nu1_theta = std::abs(theta.dot(zl.col(kNu)));
  rep.nu1_dtheta = contract2(kNu);
  return rep;
}

CanonicalPoint quotient_point(const SigmaGroupElement& g, const SpaceConfig& cfg) {
  const double r = rho(g.chart(), cfg.radius);
  if (std::abs(r) < kChartSingularity) throw ChartSingularityError("quotient needs rho != 0");
  return {g.chart(), cfg.mass * (g.nu - g.z * g.eps / (cfg.radius * r))};
}

std::array<std::array<Vec8, 8>, 8> right_structure_constants(const SpaceConfig& cfg) {
  const double R = cfg.radius;
  const double m = cfg.mass;
  std::array<std::array<Vec8, 8>, 8> c;
  for (auto& row : c) row.fill(Vec8::Zero());
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; k < 3; ++k) {
        const double e = levi_civita(i, j, k);
        c[kEps + i][kEps + j](kEps + k) = -2.0 / R * e;
        c[kEps + i][kNu + j](kNu + k) = -1.0 / R * e;
      }
      if (i == j) {
        c[kEps + i][kNu + j](kZ) = 1.0 / R;
        c[kEps + i][kNu + j](kPhi) = -m;  // (1/R)(-m R Xi)
      }
    }
    c[kEps + i][kZ](kNu + i) = -1.0 / R;
  }
  for (int a = 0; a < 8; ++a) {
    for (int b = 0; b < a; ++b) {
      if (!c[b][a].isZero()) c[a][b] = -c[b][a];
    }
  }
  return c;
}

Vec8 field_bracket(Side side_a, int a, Side side_b, int b, const SigmaGroupElement& g,
                   const SpaceConfig& cfg, double step) {
  const double h = step > 0.0 ? step : 1e-5 * cfg.radius;
  const int sign = g.rho_sign;
  auto field = [&](Side side, int col) {
    return [&, side, col](const Vec8& x) -> Vec8 {
      const SigmaGroupElement e = from_coordinates(x, sign);
      return side == Side::Left ? Vec8(left_fields(e, cfg).col(col))
                                : Vec8(right_fields(e, cfg).col(col));
    };
  };
  return fd::vector_field_bracket(field(side_a, a), field(side_b, b), coordinates(g), h);
}

SigmaGroupElement random_element(std::mt19937_64& rng, const SpaceConfig& cfg, double max_eps,
                                 double scale) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  SigmaGroupElement g;
  Vec3 e;
  do {
    e = Vec3(unit(rng), unit(rng), unit(rng));
  } while (e.squaredNorm() > 1.0);
  g.eps = max_eps * e;
  g.rho_sign = +1;
  g.nu = scale * Vec3(unit(rng), unit(rng), unit(rng));
  g.z = scale * unit(rng);
  g.zeta = std::polar(1.0, std::numbers::pi * unit(rng));
  (void)cfg;
  return g;
}

GroupAxiomsReport check_group_axioms(int samples, const SpaceConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  std::mt19937_64 rng(seed);
  const double bound = cfg.radius * std::sin(std::numbers::pi / 8.0);
  const SigmaGroupElement e = SigmaGroupElement::identity();
  GroupAxiomsReport rep;
  rep.samples = samples;
  for (int s = 0; s < samples; ++s) {
    const SigmaGroupElement a = random_element(rng, cfg, bound);
    const SigmaGroupElement b = random_element(rng, cfg, bound);
    const SigmaGroupElement c = random_element(rng, cfg, bound);
    rep.associativity_max =
        std::max(rep.associativity_max, element_distance(compose(compose(a, b, cfg), c, cfg),
                                                         compose(a, compose(b, c, cfg), cfg)));
    const SigmaGroupElement ai = inverse(a, cfg);
    rep.inverse_max = std::max({rep.inverse_max, element_distance(compose(ai, a, cfg), e),
                                element_distance(compose(a, ai, cfg), e)});
    rep.identity_max = std::max({rep.identity_max, element_distance(compose(e, a, cfg), a),
                                 element_distance(compose(a, e, cfg), a)});
    rep.involution_max = std::max(rep.involution_max, element_distance(inverse(ai, cfg), a));
    // eps sector from the printed formula rho eps' + rho' eps + eps' x eps / R
    const double R = cfg.radius;
    const double ra = rho(a.chart(), R);
    const double rb = rho(b.chart(), R);
    const Vec3 printed = rb * a.eps + ra * b.eps + a.eps.cross(b.eps) / R;
    rep.su2_sector_max = std::max(rep.su2_sector_max,
                                  (compose(a, b, cfg).eps - printed).cwiseAbs().maxCoeff());
  }
  return rep;
}

LieAlgebraReport check_lie_algebra(int points, const SpaceConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  std::mt19937_64 rng(seed);
  const double R = cfg.radius;
  const auto expected = right_structure_constants(cfg);
  LieAlgebraReport rep;
  rep.points = points;
  rep.ee_expected = -2.0 / R;
  rep.en_nu_expected = -1.0 / R;
  rep.en_z_expected = 1.0 / R;
  rep.en_xi_expected = -cfg.mass;
  rep.ez_expected = -1.0 / R;

  static const char* names[] = {"Z_eps1", "Z_eps2", "Z_eps3", "Z_nu1", "Z_nu2",
                                "Z_nu3",  "Z_z",    "Xi"};
  for (int a = 0; a < 8; ++a) {
    for (int b = a + 1; b < 8; ++b) {
      for (int c = 0; c < 8; ++c) {
        if (expected[a][b](c) != 0.0) {
          std::ostringstream line;
          line << "[" << names[a] << ", " << names[b] << "] -> " << expected[a][b](c) << " "
               << names[c];
          rep.table.push_back(line.str());
        }
      }
    }
  }

  for (int p = 0; p < points; ++p) {
    const SigmaGroupElement g = random_element(rng, cfg, 0.6 * R);
    const Mat8 zr = right_fields(g, cfg);
    const Mat8 zl = left_fields(g, cfg);
    rep.left_fields_max =
        std::max(rep.left_fields_max, (left_fields_numeric(g, cfg) - zl).cwiseAbs().maxCoeff());
    rep.right_fields_max =
        std::max(rep.right_fields_max, (right_fields_numeric(g, cfg) - zr).cwiseAbs().maxCoeff());
    const auto solver = zr.fullPivLu();
    for (int a = 0; a < 8; ++a) {
      for (int b = 0; b < 8; ++b) {
        if (a == b) continue;
        const Vec8 coef = solver.solve(field_bracket(Side::Right, a, Side::Right, b, g, cfg));
        rep.right_table_max =
            std::max(rep.right_table_max, (coef - expected[a][b]).cwiseAbs().maxCoeff());
        if (a == kEps && b == kEps + 1) rep.ee_measured += coef(kEps + 2) / points;
        if (a == kEps && b == kNu + 1) rep.en_nu_measured += coef(kNu + 2) / points;
        if (a == kEps && b == kNu) {
          rep.en_z_measured += coef(kZ) / points;
          rep.en_xi_measured += coef(kPhi) / points;
        }
        if (a == kEps && b == kZ) rep.ez_measured += coef(kNu) / points;
      }
    }
    for (int a = 0; a < 8; ++a) {
      for (int b = 0; b < 8; ++b) {
        rep.left_right_max =
            std::max(rep.left_right_max,
                     field_bracket(Side::Left, a, Side::Right, b, g, cfg).cwiseAbs().maxCoeff());
      }
    }
  }
  return rep;
}

QuantizationFormReport check_quantization_form(int points, const SpaceConfig& cfg,
                                               std::uint64_t seed) {
  cfg.validate();
  std::mt19937_64 rng(seed);
  const double R = cfg.radius;
  const double m = cfg.mass;
  QuantizationFormReport rep;
  rep.points = points;
  rep.nu1_dtheta_min = std::numeric_limits<double>::infinity();
  for (int p = 0; p < points; ++p) {
    const SigmaGroupElement g = random_element(rng, cfg, 0.6 * R);
    const Vec8 theta = quantization_form(g, cfg);
    const Mat8 zl = left_fields(g, cfg);
    const Mat8 zr = right_fields(g, cfg);
    rep.theta_xi_max = std::max(rep.theta_xi_max, std::abs(theta.dot(zl.col(kPhi)) - 1.0));
    for (int i = 0; i < 3; ++i) {
      rep.theta_left_nu_eps_max =
          std::max({rep.theta_left_nu_eps_max, std::abs(theta.dot(zl.col(kNu + i))),
                    std::abs(theta.dot(zl.col(kEps + i)))});
    }
    const CharacteristicReport ch = characteristic_check(g, cfg);
    rep.z_theta_max = std::max(rep.z_theta_max, ch.z_theta);
    rep.z_dtheta_max = std::max(rep.z_dtheta_max, ch.z_dtheta);
    rep.xi_dtheta_max = std::max(rep.xi_dtheta_max, ch.xi_dtheta);
    rep.nu1_dtheta_min = std::min(rep.nu1_dtheta_min, ch.nu1_dtheta);
    rep.dtheta_closed_vs_numeric =
        std::max(rep.dtheta_closed_vs_numeric, (quantization_form_differential(g, cfg) -
                                                quantization_form_differential_numeric(g, cfg))
                                                   .cwiseAbs()
                                                   .maxCoeff());

    const auto inv = noether_invariants(g, cfg);
    for (int a = 0; a < 7; ++a) {
      rep.noether_contraction_max =
          std::max(rep.noether_contraction_max, std::abs(inv(a) - theta.dot(zr.col(a))));
    }
    SigmaGroupElement zstep;
    zstep.z = 0.37 * R;
    const auto moved = noether_invariants(compose(g, zstep, cfg), cfg);
    rep.noether_z_flow_max = std::max(rep.noether_z_flow_max, (moved - inv).cwiseAbs().maxCoeff());

    // quotient: (eps, vartheta) from the invariants vs the classical Darboux point
    const CanonicalPoint cp = quotient_point(g, cfg);
    const Vec3 vartheta = bracket_vartheta(cp.eps, cp.pi, cfg);
    rep.quotient_max = std::max(
        {rep.quotient_max, (-inv.segment<3>(3) / m - g.eps).cwiseAbs().maxCoeff(),
         (inv.head<3>() / m - vartheta).cwiseAbs().maxCoeff()});

    // at z = 0, dTheta restricted to (eps, nu) equals Omega = d pi ^ d eps with pi = m nu
    SigmaGroupElement g0 = g;
    g0.z = 0.0;
    const Mat8 dth = quantization_form_differential_numeric(g0, cfg);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        // Omega(d/dnu_i, d/deps_j) = m delta_ij, Omega(d/deps_j, d/dnu_i) = -m delta_ij
        const double omega = i == j ? m : 0.0;
        rep.symplectic_max = std::max({rep.symplectic_max,
                                       std::abs(dth(kNu + i, kEps + j) - omega),
                                       std::abs(dth(kEps + j, kNu + i) + omega),
                                       std::abs(dth(kNu + i, kNu + j)),
                                       std::abs(dth(kEps + i, kEps + j))});
      }
    }
  }
  return rep;
}

}  // namespace s3sigma
