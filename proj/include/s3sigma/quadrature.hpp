#pragma once

#include "s3sigma/geometry.hpp"
#include "s3sigma/specfun.hpp"

#include <array>
#include <functional>
#include <ostream>
#include <vector>

namespace s3sigma {

/// chi = 0 is the identity (rho = 1); eps = R sin(chi) (sin t cos p, sin t sin p, cos t).
struct HypersphericalNode {
  double chi = 0.0;
  double theta = 0.0;
  double phi = 0.0;
  double weight = 0.0;  ///< includes R^3 sin^2(chi) sin(theta)
  Vec4 x = Vec4::Zero();  ///< embedded point (R rho, eps)
};

/// Rule for the chi direction.
///  ChebyshevU: Gauss rule for sqrt(1 - x^2) in x = cos(chi); exact for
///    sin^2(chi) times polynomials of degree 2n - 1 in cos(chi).
///  GaussLegendre: plain Gauss-Legendre in chi with sin^2(chi) in the weight.
enum class ChiRule { ChebyshevU, GaussLegendre };

struct QuadGrid {
  std::vector<HypersphericalNode> nodes;
  std::array<int, 3> orders{0, 0, 0};
  double radius = 1.0;
  ChiRule chi_rule = ChiRule::ChebyshevU;
};

Vec4 hyperspherical_point(double chi, double theta, double phi, double radius);

/// Gauss-Legendre nodes and weights on [a, b].
void gauss_legendre(int n, double a, double b, std::vector<double>& x, std::vector<double>& w);

QuadGrid build_grid(int n_chi, int n_theta, int n_phi, const SpaceConfig& cfg,
                    ChiRule rule = ChiRule::ChebyshevU);

using NodeFunction = std::function<cplx(const HypersphericalNode&)>;

/// Sum f(node) weight. Node values are computed in parallel and summed in
/// node order, so the result does not depend on the thread count.
cplx integrate(const NodeFunction& f, const QuadGrid& grid);
/// Single-threaded reference.
cplx integrate_serial(const NodeFunction& f, const QuadGrid& grid);
/// Weighted sum of precomputed node values (same order as grid.nodes).
cplx integrate_values(const std::vector<cplx>& values, const QuadGrid& grid);

void write_grid_csv(const QuadGrid& grid, std::ostream& out);

}  // namespace s3sigma
