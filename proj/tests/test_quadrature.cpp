#include "doctest.h"
#include "s3sigma/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

using namespace s3sigma;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("volume of S^3") {
  for (double R : {1.0, 0.5, 3.0}) {
    const QuadGrid g = build_grid(24, 16, 32, SpaceConfig{R, 1.0});
    CHECK(g.nodes.size() == 24u * 16u * 32u);
    double vol = 0.0;
    for (const auto& n : g.nodes) {
      CHECK(n.weight > 0.0);
      vol += n.weight;
    }
    const double exact = 2 * kPi * kPi * R * R * R;
    CHECK(std::abs(vol - exact) / exact < 1e-12);
    CHECK(std::abs(integrate([&](const HypersphericalNode&) { return cplx(1.0 / exact); }, g) -
                   1.0) < 1e-12);
    CHECK(std::abs(integrate([&](const HypersphericalNode&) { return cplx(0.0); }, g)) == 0.0);
  }
}

TEST_CASE("both chi rules integrate low-order moments") {
  const SpaceConfig cfg{1.3, 1.0};
  const double vol = 2 * kPi * kPi * std::pow(cfg.radius, 3);
  for (ChiRule rule : {ChiRule::ChebyshevU, ChiRule::GaussLegendre}) {
    const QuadGrid g = build_grid(24, 16, 32, cfg, rule);
    // rho^2 averages to 1/4
    const cplx r2 = integrate(
        [&](const HypersphericalNode& n) { return cplx(std::pow(std::cos(n.chi), 2)); }, g);
    CHECK(std::abs(r2.real() - vol / 4.0) / vol < 1e-12);
    // odd under phi -> phi + pi
    const cplx odd = integrate([](const HypersphericalNode& n) { return cplx(std::cos(n.phi)); }, g);
    CHECK(std::abs(odd) < 1e-14 * vol);
    // embedded points sit on the sphere
    for (std::size_t i = 0; i < g.nodes.size(); i += 97) {
      CHECK(std::abs(g.nodes[i].x.norm() - cfg.radius) < 1e-14);
    }
  }
}

TEST_CASE("chi exactness of the Chebyshev-U rule") {
  // int_0^pi cos^k(chi) sin^2(chi) d chi = pi (k-1)!! / (k+2)!! for even k, 0 for odd
  for (int n : {4, 8, 12}) {
    const QuadGrid g = build_grid(n, 2, 4, SpaceConfig{});
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double exact = 0.0;
      if (k % 2 == 0) {
        double num = 1.0, den = 1.0;
        for (int j = k - 1; j > 0; j -= 2) num *= j;
        for (int j = k + 2; j > 0; j -= 2) den *= j;
        exact = kPi * num / den;
      }
      const cplx v = integrate_serial(
          [&](const HypersphericalNode& nd) { return cplx(std::pow(std::cos(nd.chi), k) / (4 * kPi)); }, g);
      CHECK(std::abs(v.real() - exact) < 1e-14);
    }
  }
}

TEST_CASE("volume converges under refinement") {
  const double exact = 2 * kPi * kPi;
  double prev = 1.0;
  for (int n : {2, 4, 8, 16}) {
    for (ChiRule rule : {ChiRule::ChebyshevU, ChiRule::GaussLegendre}) {
      const QuadGrid g = build_grid(n, n, 2 * n, SpaceConfig{}, rule);
      double vol = 0.0;
      for (const auto& nd : g.nodes) vol += nd.weight;
      const double err = std::abs(vol - exact) / exact;
      if (rule == ChiRule::GaussLegendre) {
        CHECK(err <= prev + 1e-15);
        prev = std::max(err, 1e-16);
      } else {
        CHECK(err < 1e-13);
      }
    }
  }
  CHECK(prev < 1e-12);
}

TEST_CASE("grid errors, non-finite integrands and CSV dump") {
  CHECK_THROWS_AS(build_grid(1, 4, 8, SpaceConfig{}), DomainError);
  CHECK_THROWS_AS(build_grid(4, 4, 3, SpaceConfig{}), DomainError);
  const QuadGrid g = build_grid(3, 2, 4, SpaceConfig{});
  try {
    integrate([](const HypersphericalNode& n) { return n.phi > 1.0 ? cplx(NAN) : cplx(1.0); }, g);
    FAIL("expected an error");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("node") != std::string::npos);
  }
  std::ostringstream csv;
  write_grid_csv(g, csv);
  const std::string s = csv.str();
  CHECK(s.rfind("chi,theta,phi,weight\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 1 + 24);
}

TEST_CASE("parallel and serial integration agree bitwise") {
  const QuadGrid g = build_grid(16, 12, 24, SpaceConfig{1.7, 1.0});
  auto f = [](const HypersphericalNode& n) {
    return cplx(std::sin(3 * n.chi) * std::cos(n.theta), std::cos(2 * n.phi) * n.chi);
  };
  CHECK(integrate(f, g) == integrate_serial(f, g));
}
