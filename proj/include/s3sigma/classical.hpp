#pragma once

#include "s3sigma/geometry.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace s3sigma {

/// Evolution-space state: chart point and chart velocity eps-dot.
struct PhaseState {
  ChartCoords point;
  Vec3 vel = Vec3::Zero();
};

/// Point of the solution manifold. eps0 keeps its hemisphere sign so the
/// inverse Hamilton-Jacobi map is global.
struct SolutionPoint {
  ChartCoords eps0;
  Vec3 theta0 = Vec3::Zero();  ///< right Noether invariant theta^R(eps0) eps0-dot
  Vec3 pi0 = Vec3::Zero();     ///< Darboux momentum pi_i = m theta^{R(k)}_i theta0_k
};

struct InvariantSample {
  double energy = 0.0;
  Vec3 theta_right = Vec3::Zero();
  Vec3 theta_left = Vec3::Zero();
};

struct Trajectory {
  std::vector<double> times;
  std::vector<PhaseState> states;
  std::vector<InvariantSample> invariants_log;
  std::vector<std::string> warnings;
};

// Embedded (R^4) representation of a state: position X = (R rho, eps) and
// velocity V = (R rho-dot, eps-dot). Requires a chart-interior point.
struct EmbeddedState {
  Vec4 x = Vec4::Zero();
  Vec4 v = Vec4::Zero();
};
EmbeddedState embed(const PhaseState& s, double radius);
PhaseState project(const EmbeddedState& e, double radius);

double lagrangian(const PhaseState& s, const SpaceConfig& cfg);
Vec3 momentum(const PhaseState& s, const SpaceConfig& cfg);
double hamiltonian(const PhaseState& s, const SpaceConfig& cfg);
/// H from the momentum form (1/2m) g^{-1 ij} p_i p_j.
double hamiltonian_from_momentum(const ChartCoords& c, const Vec3& p, const SpaceConfig& cfg);
/// H from the canonical-form form (m/2) delta_ij theta^i theta^j.
double hamiltonian_from_theta(const PhaseState& s, const SpaceConfig& cfg);

/// theta^side(eps) eps-dot. Chart formula; needs rho != 0.
Vec3 theta_invariant(const PhaseState& s, Side side, double radius);
/// Same invariant from the embedded state; defined on the chart equator too.
Vec3 theta_invariant(const EmbeddedState& e, Side side, double radius);

/// Geodesic frequency omega = (1/R) sqrt(g_ij eps-dot^i eps-dot^j).
double geodesic_frequency(const PhaseState& s, double radius);
/// The alternative printed expression sqrt(8 H / (m R^2)); it is 2 omega.
double printed_frequency(const PhaseState& s, const SpaceConfig& cfg);

/// Closed-form geodesic through `init`, evaluated at time t on the embedded
/// great circle so the hemisphere sign is tracked.
PhaseState geodesic_exact(const PhaseState& init, double t, const SpaceConfig& cfg);
EmbeddedState geodesic_exact_embedded(const PhaseState& init, double t, const SpaceConfig& cfg);

/// Fourth-order Runge-Kutta integration of the constrained geodesic ODE in
/// R^4 with per-step renormalization. Samples every step (steps + 1 entries).
Trajectory geodesic_integrate(const PhaseState& init, double t_end, int steps,
                              const SpaceConfig& cfg);

/// Christoffel symbols of the chart metric, gamma[j](k, l) = Gamma^j_{kl}, by
/// central differences of the metric.
std::array<Mat3, 3> christoffel(const ChartCoords& c, double radius, double step = 0.0);
/// |eps-ddot + Gamma(eps-dot, eps-dot)|_inf.
double geodesic_equation_residual(const ChartCoords& c, const Vec3& vel, const Vec3& acc,
                                  double radius);

SolutionPoint hj_transform(const PhaseState& s, double t, const SpaceConfig& cfg);
PhaseState hj_inverse(const SolutionPoint& sp, double t, const SpaceConfig& cfg);
/// pi_i = m theta^{R(k)}_i(eps0) theta_k.
Vec3 darboux_momentum(const ChartCoords& eps0, const Vec3& theta, const SpaceConfig& cfg);

// ---- canonical coordinates on the solution manifold -----------------------

/// A point (eps, pi) in Darboux coordinates; the hemisphere sign fixes rho.
struct CanonicalPoint {
  ChartCoords eps;
  Vec3 pi = Vec3::Zero();
};
CanonicalPoint canonical_point(const SolutionPoint& sp);

/// Scalar function of (eps, pi) on the rho_sign hemisphere of `at`.
using PhaseFunction = std::function<double(const Vec3& eps, const Vec3& pi)>;

/// The seven basic functions {eps^1, eps^2, eps^3, vartheta_1..3, rho}, with
/// vartheta_j(eps, pi) = (1/m) Z^{Rk}_(j)(eps) pi_k. Index 0..2: eps, 3..5:
/// vartheta, 6: rho.
PhaseFunction basic_function(int index, int rho_sign, const SpaceConfig& cfg);
std::string basic_function_name(int index);
Vec3 bracket_vartheta(const ChartCoords& eps, const Vec3& pi, const SpaceConfig& cfg);

/// {f, g} = d_eps f . d_pi g - d_pi f . d_eps g by fourth-order central
/// differences. Default steps: 1e-5 R for eps, 1e-5 max(1, |pi|) for pi.
double poisson_bracket(const PhaseFunction& f, const PhaseFunction& g, const CanonicalPoint& at,
                       const SpaceConfig& cfg, double eps_step = 0.0, double pi_step = 0.0);

/// Nested numerical bracket {f, g} as a phase function (for Jacobi checks).
PhaseFunction bracket_function(PhaseFunction f, PhaseFunction g, int rho_sign,
                               const SpaceConfig& cfg, double eps_step, double pi_step);

struct BracketFamily {
  std::string name;
  double max_residual_display = 0.0;    ///< against the printed display
  double max_residual_derived = 0.0;  ///< against the mass-corrected values
};

struct BasicAlgebraReport {
  int samples = 0;
  std::uint64_t seed = 0;
  double radius = 1.0;
  double mass = 1.0;
  std::vector<BracketFamily> families;  ///< ee, e-theta, theta-theta, e-rho, theta-rho
  // c in {vartheta_i, vartheta_j} = c eta_ijk vartheta_k and c' in
  // {vartheta_i, rho} = c' eps_i / R^2.
  double theta_theta_measured = 0.0;
  double theta_theta_display = 0.0;
  double theta_theta_derived = 0.0;
  double theta_rho_measured = 0.0;
  double theta_rho_display = 0.0;
  double theta_rho_derived = 0.0;
  double antisymmetry_max = 0.0;
  double jacobi_max = 0.0;           ///< over all 35 basis triples
  double jacobi_e1_t2_t3_max = 0.0;  ///< the (eps^1, vartheta_2, vartheta_3) triple
  int jacobi_points = 0;
  double closure_max = 0.0;  ///< least-squares projection residual onto the 7-function span
  bool display_applies = false;  ///< mass == 1

  /// Family residual used for pass/fail: printed display when m = 1, the
  /// mass-corrected expectation otherwise.
  double family_residual(std::size_t i) const {
    return display_applies ? families[i].max_residual_display
                                 : families[i].max_residual_derived;
  }
};

BasicAlgebraReport verify_basic_algebra(int sample_count, const SpaceConfig& cfg,
                                        std::uint64_t seed, int jacobi_points = 10);

}  // namespace s3sigma
