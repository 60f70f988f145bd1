#include "doctest.h"
#include "s3sigma/geometry.hpp"
#include "s3sigma/quadrature.hpp"
#include "s3sigma/specfun.hpp"

#include <gsl/gsl_sf_gegenbauer.h>
#include <gsl/gsl_sf_legendre.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace s3sigma;

namespace {

// Explicit series C^{(a)}_k(x) = sum_j (-1)^j Gamma(k-j+a) / (Gamma(a) j! (k-2j)!) (2x)^{k-2j}
double gegenbauer_series(double a, int k, double x) {
  double acc = 0.0;
  for (int j = 0; 2 * j <= k; ++j) {
    acc += (j % 2 ? -1.0 : 1.0) * std::tgamma(k - j + a) /
           (std::tgamma(a) * std::tgamma(j + 1.0) * std::tgamma(k - 2.0 * j + 1.0)) *
           std::pow(2.0 * x, k - 2 * j);
  }
  return acc;
}

}  // namespace

TEST_CASE("Gegenbauer recurrence against the explicit series") {
  CHECK(gegenbauer_value(2.5, 0, 0.3) == 1.0);
  for (double a : {1.0, 2.0, 3.0, 4.0}) {
    for (int k = 0; k <= 6; ++k) {
      for (double x : {-1.0, -0.75, -0.5, 0.0, 0.25, 0.5, 1.0}) {
        CHECK(gegenbauer_value(a, k, x) == doctest::Approx(gegenbauer_series(a, k, x)).epsilon(1e-13));
      }
    }
    CHECK(gegenbauer_value(a, 1, 0.375) == 2.0 * a * 0.375);
  }
  CHECK_THROWS_AS(gegenbauer(0.0, 2, 0.1), DomainError);
  CHECK_THROWS_AS(gegenbauer(1.0, 2, 1.5), DomainError);
}

TEST_CASE("Gegenbauer against GSL and its derivative identity") {
  for (double a : {0.5, 1.0, 3.0, 6.0}) {
    for (int k = 0; k <= 12; ++k) {
      for (double x : {-0.9, -0.3, 0.2, 0.7}) {
        CHECK(gegenbauer_value(a, k, x) == doctest::Approx(gsl_sf_gegenpoly_n(k, a, x)).epsilon(1e-12));
        const PolyEval p = gegenbauer(a, k, x);
        const double h = 1e-4;
        const double d1 = (-gegenbauer_value(a, k, x + 2 * h) + 8 * gegenbauer_value(a, k, x + h) -
                           8 * gegenbauer_value(a, k, x - h) + gegenbauer_value(a, k, x - 2 * h)) /
                          (12 * h);
        CHECK(p.derivative == doctest::Approx(d1).epsilon(1e-8).scale(1.0));
        const double d2 = (-gegenbauer_value(a, k, x + 2 * h) + 16 * gegenbauer_value(a, k, x + h) -
                           30 * p.value + 16 * gegenbauer_value(a, k, x - h) -
                           gegenbauer_value(a, k, x - 2 * h)) /
                          (12 * h * h);
        CHECK(p.second_derivative == doctest::Approx(d2).epsilon(1e-6).scale(1.0));
      }
    }
  }
}

TEST_CASE("Gegenbauer orthogonality under the Gegenbauer weight") {
  // x = cos t turns the weight into sin^{2a}(t) dt, a smooth periodic integrand
  std::vector<double> t, w;
  gauss_legendre(60, 0.0, std::numbers::pi, t, w);
  for (double a : {1.0, 2.0, 3.0}) {
    for (int j = 0; j <= 8; ++j) {
      for (int k = j + 1; k <= 8; ++k) {
        double acc = 0.0, nj = 0.0, nk = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i) {
          const double x = std::cos(t[i]);
          const double wt = w[i] * std::pow(std::sin(t[i]), 2.0 * a);
          const double cj = gegenbauer_value(a, j, x), ck = gegenbauer_value(a, k, x);
          acc += wt * cj * ck;
          nj += wt * cj * cj;
          nk += wt * ck * ck;
        }
        // residual relative to the norms
        CHECK(std::abs(acc) / std::sqrt(nj * nk) < 1e-10);
      }
    }
  }
}

TEST_CASE("associated Legendre and spherical harmonics") {
  for (int l = 0; l <= 8; ++l) {
    for (int m = 0; m <= l; ++m) {
      for (double x : {-1.0, -0.6, 0.0, 0.35, 0.99, 1.0}) {
        // GSL includes the Condon-Shortley phase
        const double ref = gsl_sf_legendre_Plm(l, m, x);
        CHECK(associated_legendre(l, m, x) == doctest::Approx(ref).epsilon(1e-12).scale(1.0));
      }
    }
  }
  CHECK(std::abs(spherical_harmonic(0, 0, 0.3, 1.2) - 0.5 / std::sqrt(std::numbers::pi)) < 1e-15);
  CHECK_THROWS_AS(spherical_harmonic(2, 3, 0.1, 0.1), DomainError);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> th(0.0, std::numbers::pi), ph(0.0, 2 * std::numbers::pi);
  for (int s = 0; s < 50; ++s) {
    const double t = th(rng), p = ph(rng);
    for (int l = 0; l <= 6; ++l) {
      for (int m = 1; m <= l; ++m) {
        const cplx a = spherical_harmonic(l, -m, t, p);
        const cplx b = (m % 2 ? -1.0 : 1.0) * std::conj(spherical_harmonic(l, m, t, p));
        CHECK(std::abs(a - b) < 1e-12);
      }
    }
  }
  // bounded and finite at the poles
  for (int l = 0; l <= 20; ++l) {
    for (int m = -l; m <= l; ++m) {
      for (double t : {0.0, std::numbers::pi}) {
        const cplx y = spherical_harmonic(l, m, t, 0.4);
        CHECK(std::isfinite(std::abs(y)));
        CHECK(std::abs(y) <= std::sqrt((2.0 * l + 1.0) / (4.0 * std::numbers::pi)) + 1e-12);
      }
    }
  }
}

TEST_CASE("spherical harmonics are orthonormal on S^2") {
  std::vector<double> ct, wct;
  gauss_legendre(16, -1.0, 1.0, ct, wct);
  const int nphi = 32;
  double worst = 0.0;
  for (int l = 0; l <= 6; ++l) {
    for (int m = -l; m <= l; ++m) {
      for (int l2 = 0; l2 <= 6; ++l2) {
        for (int m2 = -l2; m2 <= l2; ++m2) {
          cplx acc = 0.0;
          for (std::size_t i = 0; i < ct.size(); ++i) {
            for (int k = 0; k < nphi; ++k) {
              const double t = std::acos(ct[i]), p = 2 * std::numbers::pi * k / nphi;
              acc += wct[i] * 2 * std::numbers::pi / nphi * std::conj(spherical_harmonic(l, m, t, p)) *
                     spherical_harmonic(l2, m2, t, p);
            }
          }
          worst = std::max(worst, std::abs(acc - cplx(l == l2 && m == m2 ? 1.0 : 0.0)));
        }
      }
    }
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("solid harmonics restrict to the spherical harmonics") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> th(0.0, std::numbers::pi), ph(0.0, 2 * std::numbers::pi);
  for (int l = 0; l <= 8; ++l) {
    for (int m = -l; m <= l; ++m) {
      const Poly3 s = solid_harmonic(l, m);
      CHECK(s.degree() == l);
      for (int k = 0; k < 5; ++k) {
        const double t = th(rng), p = ph(rng), r = 0.4 + 0.3 * k;
        const Vec3 v(r * std::sin(t) * std::cos(p), r * std::sin(t) * std::sin(p), r * std::cos(t));
        CHECK(std::abs(s(v) - std::pow(r, l) * spherical_harmonic(l, m, t, p)) < 1e-11);
        // harmonic: trace of the Hessian vanishes
        const Poly3::Jet j = s.jet(v);
        CHECK(std::abs(j.hess.trace()) < 1e-10);
        CHECK(std::abs(j.value - s(v)) < 1e-13);
      }
    }
  }
}

TEST_CASE("polynomial jets against differences") {
  const Poly3 p = Poly3::monomial(3, 1, 0, cplx(2.0, -1.0)) + Poly3::monomial(0, 2, 2, 0.5) +
                  Poly3::constant(cplx(0.0, 3.0));
  const Vec3 v(0.3, -0.7, 1.1);
  const Poly3::Jet j = p.jet(v);
  const double h = 1e-5;
  for (int a = 0; a < 3; ++a) {
    Vec3 e = Vec3::Zero();
    e(a) = h;
    CHECK(std::abs(j.grad(a) - (p(v + e) - p(v - e)) / (2 * h)) < 1e-8);
    for (int b = 0; b < 3; ++b) {
      Vec3 f = Vec3::Zero();
      f(b) = h;
      const cplx mixed = (p(v + e + f) - p(v + e - f) - p(v - e + f) + p(v - e - f)) / (4 * h * h);
      CHECK(std::abs(j.hess(a, b) - mixed) < 1e-5);
    }
  }
}
