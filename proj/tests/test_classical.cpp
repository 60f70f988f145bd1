#include "doctest.h"
#include "oracles.hpp"
#include "s3sigma/classical.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace s3sigma;

namespace {

PhaseState random_state(std::mt19937_64& rng, double R, double reach, double speed) {
  PhaseState s;
  s.point = ChartCoords{oracle::random_ball(rng, reach * R), +1};
  s.vel = oracle::random_box(rng, speed);
  return s;
}

// Great circle through the embedded state, written out directly.
Vec4 circle_point(const Vec4& x0, const Vec4& v0, double R, double t) {
  const double w = v0.norm() / R;
  return std::cos(w * t) * x0 + std::sin(w * t) / w * v0;
}

}  // namespace

TEST_CASE("Hamiltonian forms agree") {
  std::mt19937_64 rng(21);
  const SpaceConfig cfg{1.3, 2.0};
  for (int s = 0; s < 50; ++s) {
    const PhaseState st = random_state(rng, cfg.radius, 0.9, 1.0);
    const double h = hamiltonian(st, cfg);
    CHECK(lagrangian(st, cfg) == doctest::Approx(h).epsilon(1e-13));
    CHECK(hamiltonian_from_momentum(st.point, momentum(st, cfg), cfg) ==
          doctest::Approx(h).epsilon(1e-12));
    CHECK(hamiltonian_from_theta(st, cfg) == doctest::Approx(h).epsilon(1e-12));
    // embedded kinetic energy
    const EmbeddedState e = embed(st, cfg.radius);
    CHECK(0.5 * cfg.mass * e.v.squaredNorm() == doctest::Approx(h).epsilon(1e-12));
    for (Side side : {Side::Left, Side::Right}) {
      CHECK((theta_invariant(st, side, cfg.radius) - theta_invariant(e, side, cfg.radius))
                .cwiseAbs()
                .maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("Christoffel symbols of the chart metric") {
  // graph-of-sphere chart: Gamma^j_kl = eps^j g_kl / R^2
  std::mt19937_64 rng(22);
  const double R = 2.2;
  for (int s = 0; s < 20; ++s) {
    const ChartCoords c{oracle::random_ball(rng, 0.8 * R), s % 2 ? +1 : -1};
    const auto gamma = christoffel(c, R);
    const Mat3 g = oracle::pullback_metric(c.eps, R, c.rho_sign);
    for (int j = 0; j < 3; ++j) {
      CHECK((gamma[j] - c.eps(j) * g / (R * R)).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
}

TEST_CASE("geodesic frequency and the printed expression") {
  std::mt19937_64 rng(23);
  const SpaceConfig cfg{1.5, 0.7};
  for (int s = 0; s < 20; ++s) {
    const PhaseState st = random_state(rng, cfg.radius, 0.8, 1.0);
    const double w = geodesic_frequency(st, cfg.radius);
    CHECK(w == doctest::Approx(embed(st, cfg.radius).v.norm() / cfg.radius));
    CHECK(printed_frequency(st, cfg) == doctest::Approx(2.0 * w));
  }
}

TEST_CASE("closed-form geodesic is the great circle and solves the geodesic equation") {
  std::mt19937_64 rng(24);
  const SpaceConfig cfg{1.0, 1.0};
  for (int s = 0; s < 10; ++s) {
    const PhaseState st = random_state(rng, cfg.radius, 0.5, 0.8);
    const EmbeddedState e0 = embed(st, cfg.radius);
    const double w = geodesic_frequency(st, cfg.radius);
    for (int k = 0; k < 20; ++k) {
      const double t = 0.37 * k;
      const EmbeddedState e = geodesic_exact_embedded(st, t, cfg);
      CHECK((e.x - circle_point(e0.x, e0.v, cfg.radius, t)).cwiseAbs().maxCoeff() < 1e-12);
      const PhaseState p = geodesic_exact(st, t, cfg);
      if (std::abs(rho(p.point, cfg.radius)) < 0.2) continue;
      // acceleration of the eps components of the circle: -w^2 eps
      const Vec3 acc = -w * w * p.point.eps;
      CHECK(geodesic_equation_residual(p.point, p.vel, acc, cfg.radius) < 1e-7);
      // a factor-2 frequency breaks it
      CHECK(geodesic_equation_residual(p.point, p.vel, 4.0 * acc, cfg.radius) > 1e-3);
    }
  }
}

TEST_CASE("integrator conserves invariants and tracks the closed form") {
  const SpaceConfig cfg{1.0, 1.0};
  PhaseState st;
  st.point = ChartCoords{Vec3(0.3, -0.2, 0.1), +1};
  st.vel = Vec3(0.4, 0.5, -0.3);
  const double w = geodesic_frequency(st, cfg.radius);
  const Trajectory tr = geodesic_integrate(st, 20.0 / w, 2000, cfg);
  REQUIRE(tr.states.size() == 2001);
  CHECK(tr.warnings.empty());
  const InvariantSample& i0 = tr.invariants_log.front();
  double dh = 0.0, dth = 0.0;
  for (const auto& inv : tr.invariants_log) {
    dh = std::max(dh, std::abs(inv.energy - i0.energy) / i0.energy);
    dth = std::max({dth, (inv.theta_right - i0.theta_right).cwiseAbs().maxCoeff(),
                    (inv.theta_left - i0.theta_left).cwiseAbs().maxCoeff()});
  }
  CHECK(dh < 1e-8);
  CHECK(dth < 1e-8);
  const EmbeddedState exact = geodesic_exact_embedded(st, 20.0 / w, cfg);
  const PhaseState& end = tr.states.back();
  const Vec4 xe(end.point.rho_sign * std::sqrt(1.0 - end.point.eps.squaredNorm()), end.point.eps(0),
                end.point.eps(1), end.point.eps(2));
  CHECK((xe - exact.x).cwiseAbs().maxCoeff() < 1e-8);

  CHECK_THROWS_AS(geodesic_integrate(st, 1.0, 5, cfg), DomainError);
  CHECK_FALSE(geodesic_integrate(st, 100.0 / w, 10, cfg).warnings.empty());
}

TEST_CASE("Hamilton-Jacobi transform round trip") {
  std::mt19937_64 rng(25);
  const SpaceConfig cfg{2.0, 1.5};
  for (int s = 0; s < 30; ++s) {
    const PhaseState st = random_state(rng, cfg.radius, 0.7, 1.0);
    const double t = 0.9 * s;
    const SolutionPoint sp = hj_transform(st, t, cfg);
    const PhaseState back = hj_inverse(sp, t, cfg);
    CHECK(back.point.rho_sign == st.point.rho_sign);
    CHECK((back.point.eps - st.point.eps).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((back.vel - st.vel).cwiseAbs().maxCoeff() < 1e-10);
    // theta0 is the right invariant, constant along the motion
    CHECK((sp.theta0 - theta_invariant(embed(st, cfg.radius), Side::Right, cfg.radius))
              .cwiseAbs()
              .maxCoeff() < 1e-10);
    if (std::abs(rho(sp.eps0, cfg.radius)) > 1e-3) {
      CHECK((darboux_momentum(sp.eps0, sp.theta0, cfg) - sp.pi0).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("Poisson brackets of the basic functions") {
  SUBCASE("unit mass matches the displayed algebra") {
    const BasicAlgebraReport rep = verify_basic_algebra(100, SpaceConfig{1.0, 1.0}, 7, 4);
    REQUIRE(rep.families.size() == 5);
    for (std::size_t i = 0; i < rep.families.size(); ++i) {
      CHECK(rep.family_residual(i) < 1e-7);
    }
    CHECK(rep.jacobi_max < 1e-6);
    CHECK(rep.antisymmetry_max < 1e-9);
    CHECK(rep.closure_max < 1e-7);
    CHECK(rep.theta_theta_measured == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(rep.theta_rho_measured == doctest::Approx(1.0).epsilon(1e-8));
  }
  SUBCASE("general mass follows the derived coefficients") {
    const SpaceConfig cfg{1.7, 2.5};
    const BasicAlgebraReport rep = verify_basic_algebra(30, cfg, 8, 2);
    for (std::size_t i = 0; i < rep.families.size(); ++i) {
      CHECK(rep.families[i].max_residual_derived < 1e-7);
    }
    CHECK(rep.theta_theta_measured == doctest::Approx(2.0 / (cfg.mass * cfg.radius)).epsilon(1e-8));
    CHECK(rep.theta_rho_measured == doctest::Approx(1.0 / cfg.mass).epsilon(1e-8));
    CHECK(rep.families[2].max_residual_display > 1e-3);
    CHECK(rep.jacobi_max < 1e-6);
  }
  SUBCASE("canonical pair") {
    const SpaceConfig cfg{1.0, 1.0};
    const CanonicalPoint p{ChartCoords{Vec3(0.1, 0.2, -0.3), -1}, Vec3(0.5, -0.4, 0.2)};
    const PhaseFunction e1 = [](const Vec3& e, const Vec3&) { return e(0); };
    const PhaseFunction p1 = [](const Vec3&, const Vec3& q) { return q(0); };
    const PhaseFunction p2 = [](const Vec3&, const Vec3& q) { return q(1); };
    CHECK(poisson_bracket(e1, p1, p, cfg) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(poisson_bracket(e1, p2, p, cfg)) < 1e-9);
  }
}
