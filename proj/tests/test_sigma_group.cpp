#include "doctest.h"
#include "oracles.hpp"
#include "s3sigma/sigma_group.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace s3sigma;

namespace {

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

SigmaGroupElement element(const Vec3& e, const Vec3& nu, double z, double phi) {
  SigmaGroupElement g;
  g.eps = e;
  g.nu = nu;
  g.z = z;
  g.zeta = std::polar(1.0, phi);
  return g;
}

}  // namespace

TEST_CASE("group law: identity, inverse, associativity") {
  const SpaceConfig cfg{1.3, 0.8};
  const GroupAxiomsReport rep = check_group_axioms(1000, cfg, 42);
  CHECK(rep.associativity_max < 1e-12);
  CHECK(rep.inverse_max < 1e-12);
  CHECK(rep.identity_max < 1e-14);
  CHECK(rep.involution_max < 1e-12);
  CHECK(rep.su2_sector_max < 1e-12);
}

TEST_CASE("group law components written out") {
  // oracle: SU(2) part by the Hamilton product, the rest by the printed law
  const SpaceConfig cfg{2.0, 1.5};
  const double R = cfg.radius, m = cfg.mass;
  const SigmaGroupElement a = element(Vec3(0.3, -0.2, 0.5), Vec3(0.1, 0.7, -0.4), 0.3, 0.4);
  const SigmaGroupElement b = element(Vec3(-0.6, 0.1, 0.2), Vec3(-0.5, 0.2, 0.9), -0.8, -1.1);
  const double ra = std::sqrt(1.0 - a.eps.squaredNorm() / (R * R));
  const double rb = std::sqrt(1.0 - b.eps.squaredNorm() / (R * R));
  const Vec4 q = oracle::hamilton(Vec4(ra, a.eps(0) / R, a.eps(1) / R, a.eps(2) / R),
                                  Vec4(rb, b.eps(0) / R, b.eps(1) / R, b.eps(2) / R));
  const SigmaGroupElement c = compose(a, b, cfg);
  CHECK(max_abs(c.eps - R * q.tail<3>()) < 1e-14);
  Vec3 nu = a.nu + ra * b.nu + a.eps * b.z / R;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; k < 3; ++k) nu(i) += levi_civita(i, j, k) * a.eps(j) * b.nu(k) / R;
    }
  }
  CHECK(max_abs(c.nu - nu) < 1e-14);
  CHECK(c.z == doctest::Approx(a.z + ra * b.z - a.eps.dot(b.nu) / R));
  const double phase = 0.4 - 1.1 - m * (R * (ra - 1.0) * b.z - a.eps.dot(b.nu));
  CHECK(std::abs(c.zeta - std::polar(1.0, phase)) < 1e-14);
}

TEST_CASE("invariant fields: closed forms match the group law") {
  std::mt19937_64 rng(31);
  const SpaceConfig cfg{1.5, 2.0};
  for (int s = 0; s < 10; ++s) {
    const SigmaGroupElement g = random_element(rng, cfg, 0.7 * cfg.radius);
    CHECK(max_abs(left_fields(g, cfg) - left_fields_numeric(g, cfg)) < 1e-8);
    CHECK(max_abs(right_fields(g, cfg) - right_fields_numeric(g, cfg)) < 1e-8);
  }
  // at the identity both families are the coordinate basis
  const SigmaGroupElement e;
  CHECK(max_abs(left_fields(e, cfg) - Mat8::Identity()) < 1e-15);
  CHECK(max_abs(right_fields(e, cfg) - Mat8::Identity()) < 1e-15);
}

TEST_CASE("Lie algebra of the invariant fields") {
  const SpaceConfig cfg{1.2, 1.7};
  const LieAlgebraReport rep = check_lie_algebra(4, cfg, 5);
  CHECK(rep.right_table_max < 1e-7);
  CHECK(rep.left_right_max < 1e-7);
  CHECK(rep.ee_measured == doctest::Approx(rep.ee_expected).epsilon(1e-7));
  CHECK(rep.en_nu_measured == doctest::Approx(rep.en_nu_expected).epsilon(1e-7));
  CHECK(rep.en_z_measured == doctest::Approx(rep.en_z_expected).epsilon(1e-7));
  CHECK(rep.en_xi_measured == doctest::Approx(-cfg.mass).epsilon(1e-7));
  CHECK(rep.ez_measured == doctest::Approx(rep.ez_expected).epsilon(1e-7));
  CHECK(rep.table.size() == 18);
}

TEST_CASE("quantization form, characteristic flow and Noether invariants") {
  const SpaceConfig cfg{1.4, 0.9};
  const QuantizationFormReport rep = check_quantization_form(100, cfg, 9);
  CHECK(rep.theta_xi_max < 1e-14);
  CHECK(rep.z_theta_max < 1e-12);
  CHECK(rep.z_dtheta_max < 1e-8);
  CHECK(rep.xi_dtheta_max < 1e-8);
  CHECK(rep.nu1_dtheta_min > 0.1);
  CHECK(rep.dtheta_closed_vs_numeric < 1e-8);
  CHECK(rep.noether_contraction_max < 1e-12);
  CHECK(rep.noether_z_flow_max < 1e-12);
  CHECK(rep.quotient_max < 1e-12);
  CHECK(rep.symplectic_max < 1e-8);
}

TEST_CASE("Noether invariants written out") {
  const SpaceConfig cfg{2.0, 3.0};
  const SigmaGroupElement g = element(Vec3(0.4, 0.3, -0.8), Vec3(1.0, -0.5, 0.25), 0.6, 0.0);
  const double r = std::sqrt(1.0 - g.eps.squaredNorm() / 4.0);
  const auto inv = noether_invariants(g, cfg);
  Vec3 p = r * g.nu;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; k < 3; ++k) p(i) += levi_civita(i, j, k) * g.eps(j) * g.nu(k) / cfg.radius;
    }
  }
  // Z^{Rk}_(i) nu_k = rho nu_i + (1/R) eta_ijk eps^j nu^k
  CHECK(max_abs(inv.head<3>() - cfg.mass * (p - g.z * g.eps / cfg.radius)) < 1e-14);
  CHECK(max_abs(inv.segment<3>(3) + cfg.mass * g.eps) < 1e-15);
  CHECK(inv(6) == doctest::Approx(-cfg.mass * cfg.radius * (r - 1.0)));
}
