#include "s3sigma/quadrature.hpp"

#include <gsl/gsl_integration.h>

#include <cmath>
#include <exception>
#include <iomanip>
#include <memory>
#include <numbers>
#include <sstream>

namespace s3sigma {

Vec4 hyperspherical_point(double chi, double theta, double phi, double radius) {
  const double s = std::sin(chi);
  return radius * Vec4(std::cos(chi), s * std::sin(theta) * std::cos(phi),
                       s * std::sin(theta) * std::sin(phi), s * std::cos(theta));
}

void gauss_legendre(int n, double a, double b, std::vector<double>& x, std::vector<double>& w) {
  if (n < 1) throw DomainError("gauss_legendre: need at least one node");
  std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)>
      table(gsl_integration_glfixed_table_alloc(n), &gsl_integration_glfixed_table_free);
  if (!table) throw DomainError("gauss_legendre: table allocation failed");
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) gsl_integration_glfixed_point(a, b, i, &x[i], &w[i], table.get());
}

QuadGrid build_grid(int n_chi, int n_theta, int n_phi, const SpaceConfig& cfg, ChiRule rule) {
  cfg.validate();
  if (n_chi < 2 || n_theta < 2 || n_phi < 4) {
    std::ostringstream msg;
    msg << "grid orders (" << n_chi << "," << n_theta << "," << n_phi
        << ") too small: need n_chi >= 2, n_theta >= 2, n_phi >= 4";
    throw DomainError(msg.str());
  }
  const double R = cfg.radius;

  std::vector<double> chi(n_chi), wchi(n_chi);
  if (rule == ChiRule::ChebyshevU) {
    for (int k = 0; k < n_chi; ++k) {
      chi[k] = (k + 1) * std::numbers::pi / (n_chi + 1);
      const double s = std::sin(chi[k]);
      wchi[k] = std::numbers::pi / (n_chi + 1) * s * s;
    }
  } else {
    gauss_legendre(n_chi, 0.0, std::numbers::pi, chi, wchi);
    for (int k = 0; k < n_chi; ++k) wchi[k] *= std::sin(chi[k]) * std::sin(chi[k]);
  }

  // Gauss-Legendre in cos(theta): sin(theta) d theta = d(cos theta)
  std::vector<double> ct, wct;
  gauss_legendre(n_theta, -1.0, 1.0, ct, wct);

  QuadGrid g;
  g.orders = {n_chi, n_theta, n_phi};
  g.radius = R;
  g.chi_rule = rule;
  g.nodes.reserve(static_cast<std::size_t>(n_chi) * n_theta * n_phi);
  const double wphi = 2.0 * std::numbers::pi / n_phi;
  for (int a = 0; a < n_chi; ++a) {
    for (int b = 0; b < n_theta; ++b) {
      const double theta = std::acos(ct[b]);
      for (int c = 0; c < n_phi; ++c) {
        HypersphericalNode n;
        n.chi = chi[a];
        n.theta = theta;
        n.phi = c * wphi;
        n.weight = R * R * R * wchi[a] * wct[b] * wphi;
        n.x = hyperspherical_point(n.chi, n.theta, n.phi, R);
        g.nodes.push_back(n);
      }
    }
  }
  return g;
}

namespace {

[[noreturn]] void non_finite(const HypersphericalNode& n, std::size_t index) {
  std::ostringstream msg;
  msg << std::setprecision(17) << "integrand is not finite at node " << index << " (chi=" << n.chi
      << ", theta=" << n.theta << ", phi=" << n.phi << ")";
  throw DomainError(msg.str());
}

bool finite(cplx v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

}  // namespace

cplx integrate_values(const std::vector<cplx>& values, const QuadGrid& grid) {
  if (values.size() != grid.nodes.size()) throw DomainError("integrate_values: size mismatch");
  cplx acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!finite(values[i])) non_finite(grid.nodes[i], i);
    acc += values[i] * grid.nodes[i].weight;
  }
  return acc;
}

cplx integrate_serial(const NodeFunction& f, const QuadGrid& grid) {
  std::vector<cplx> values(grid.nodes.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = f(grid.nodes[i]);
  return integrate_values(values, grid);
}

cplx integrate(const NodeFunction& f, const QuadGrid& grid) {
  const long n = static_cast<long>(grid.nodes.size());
  std::vector<cplx> values(n);
  std::exception_ptr error;
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    try {
      values[i] = f(grid.nodes[i]);
    } catch (...) {
#pragma omp critical(s3sigma_integrate_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return integrate_values(values, grid);
}

void write_grid_csv(const QuadGrid& grid, std::ostream& out) {
  out << "chi,theta,phi,weight\n" << std::setprecision(17);
  for (const auto& n : grid.nodes) out << n.chi << ',' << n.theta << ',' << n.phi << ',' << n.weight << '\n';
}

}  // namespace s3sigma
