#pragma once

#include "s3sigma/classical.hpp"
#include "s3sigma/geometry.hpp"

#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace s3sigma {

using Vec8 = Eigen::Matrix<double, 8, 1>;
using Mat8 = Eigen::Matrix<double, 8, 8>;

/// Element (eps, nu, z, zeta) of the U(1)-extended SU(2)-sigma group. The eps
/// sector is an SU(2) element in the eps chart with its hemisphere sign; nu
/// and z carry velocity units; zeta is a unit phase.
struct SigmaGroupElement {
  Vec3 eps = Vec3::Zero();
  int rho_sign = +1;
  Vec3 nu = Vec3::Zero();
  double z = 0.0;
  std::complex<double> zeta{1.0, 0.0};

  static SigmaGroupElement identity() { return {}; }
  ChartCoords chart() const { return {eps, rho_sign}; }
};

/// Tangent vector in the coordinate basis (eps^1..3, nu^1..3, z, phi), with
/// zeta = exp(i phi).
struct GroupTangent {
  Vec8 components = Vec8::Zero();
};

// Generator / coordinate slots.
inline constexpr int kEps = 0;
inline constexpr int kNu = 3;
inline constexpr int kZ = 6;
inline constexpr int kPhi = 7;

SigmaGroupElement compose(const SigmaGroupElement& gp, const SigmaGroupElement& g,
                          const SpaceConfig& cfg);
SigmaGroupElement inverse(const SigmaGroupElement& g, const SpaceConfig& cfg);

/// Max componentwise distance (eps, nu, z, |zeta - zeta'|); infinite when the
/// hemisphere signs differ away from the equator.
double element_distance(const SigmaGroupElement& a, const SigmaGroupElement& b);

/// Coordinates (eps, nu, z, phi) and back. phi is arg(zeta) in (-pi, pi].
Vec8 coordinates(const SigmaGroupElement& g);
SigmaGroupElement from_coordinates(const Vec8& x, int rho_sign);

/// Column a = generator a (eps^1..3, nu^1..3, z, Xi); row = coordinate
/// component in (eps, nu, z, phi). Closed forms of the invariant fields.
Mat8 left_fields(const SigmaGroupElement& g, const SpaceConfig& cfg);
Mat8 right_fields(const SigmaGroupElement& g, const SpaceConfig& cfg);

/// Same fields from central differences of the group law:
/// d/dt compose(g, exp(t e_a)) (left) or compose(exp(t e_a), g) (right) at 0.
Mat8 left_fields_numeric(const SigmaGroupElement& g, const SpaceConfig& cfg, double step = 0.0);
Mat8 right_fields_numeric(const SigmaGroupElement& g, const SpaceConfig& cfg, double step = 0.0);

/// Theta = -m eps_i dnu^i - m R (rho - 1) dz + dphi, as a covector.
Vec8 quantization_form(const SigmaGroupElement& g, const SpaceConfig& cfg);
/// dTheta(a, b) = d_a Theta_b - d_b Theta_a: closed form and numerical.
Mat8 quantization_form_differential(const SigmaGroupElement& g, const SpaceConfig& cfg);
Mat8 quantization_form_differential_numeric(const SigmaGroupElement& g, const SpaceConfig& cfg,
                                            double step = 0.0);

/// i_{Z^R_a} Theta for a = eps^1..3, nu^1..3, z (closed forms).
Eigen::Matrix<double, 7, 1> noether_invariants(const SigmaGroupElement& g, const SpaceConfig& cfg);

struct CharacteristicReport {
  double z_theta = 0.0;         ///< |i_{Z^L_z} Theta|
  double z_dtheta = 0.0;        ///< |i_{Z^L_z} dTheta|_inf
  double xi_dtheta = 0.0;       ///< |i_Xi dTheta|_inf
  double nu1_theta = 0.0;       ///< |i_{Z^L_nu1} Theta|
  double nu1_dtheta = 0.0;      ///< |i_{Z^L_nu1} dTheta|_inf (nonzero: nu is symplectic)
};
CharacteristicReport characteristic_check(const SigmaGroupElement& g, const SpaceConfig& cfg);

/// Quotient by the characteristic flow and U(1): the point of the solution
/// manifold in Darboux coordinates, pi = m (nu - z eps / (R rho)).
CanonicalPoint quotient_point(const SigmaGroupElement& g, const SpaceConfig& cfg);

/// Expected right-field structure constants C(a, b)[c] with
/// [Z^R_a, Z^R_b] = C^c_ab Z^R_c.
std::array<std::array<Vec8, 8>, 8> right_structure_constants(const SpaceConfig& cfg);

/// Numerical bracket of two invariant fields at g (coordinate components).
Vec8 field_bracket(Side side_a, int a, Side side_b, int b, const SigmaGroupElement& g,
                   const SpaceConfig& cfg, double step = 0.0);

/// Random element with |eps| <= max_eps, nu and z uniform in [-scale, scale],
/// uniform phase; rho_sign = +1.
SigmaGroupElement random_element(std::mt19937_64& rng, const SpaceConfig& cfg, double max_eps,
                                 double scale = 1.0);

// ---- verification suites ---------------------------------------------------

struct GroupAxiomsReport {
  int samples = 0;
  double associativity_max = 0.0;
  double inverse_max = 0.0;  ///< max over compose(g^-1, g) and compose(g, g^-1)
  double identity_max = 0.0;
  double involution_max = 0.0;
  double su2_sector_max = 0.0;  ///< eps sector vs quaternion product
};
GroupAxiomsReport check_group_axioms(int samples, const SpaceConfig& cfg, std::uint64_t seed);

struct LieAlgebraReport {
  int points = 0;
  double right_table_max = 0.0;   ///< measured vs expected right structure constants
  double left_right_max = 0.0;    ///< max |[Z^L_a, Z^R_b]| over all 64 pairs
  double left_fields_max = 0.0;   ///< closed form vs derivative of the group law
  double right_fields_max = 0.0;
  // measured coefficients (averaged over points) next to the displayed values
  double ee_measured = 0.0, ee_expected = 0.0;          ///< [Z_e1, Z_e2] . Z_e3
  double en_nu_measured = 0.0, en_nu_expected = 0.0;    ///< [Z_e1, Z_n2] . Z_n3
  double en_z_measured = 0.0, en_z_expected = 0.0;      ///< [Z_e1, Z_n1] . Z_z
  double en_xi_measured = 0.0, en_xi_expected = 0.0;    ///< [Z_e1, Z_n1] . Xi (central)
  double ez_measured = 0.0, ez_expected = 0.0;          ///< [Z_e1, Z_z] . Z_n1
  std::vector<std::string> table;  ///< human-readable nonzero entries
};
LieAlgebraReport check_lie_algebra(int points, const SpaceConfig& cfg, std::uint64_t seed);

struct QuantizationFormReport {
  int points = 0;
  double theta_xi_max = 0.0;            ///< |Theta(Xi) - 1|
  double theta_left_nu_eps_max = 0.0;   ///< |Theta(Z^L_nu)|, |Theta(Z^L_eps)|
  double z_theta_max = 0.0;
  double z_dtheta_max = 0.0;
  double xi_dtheta_max = 0.0;
  double nu1_dtheta_min = 0.0;          ///< smallest |i_{Z^L_nu1} dTheta| seen
  double dtheta_closed_vs_numeric = 0.0;
  double noether_contraction_max = 0.0; ///< closed-form invariants vs Theta(Z^R_a)
  double noether_z_flow_max = 0.0;      ///< invariance along compose(g, z-element)
  double quotient_max = 0.0;            ///< (eps, vartheta) from the invariants vs classical
  double symplectic_max = 0.0;          ///< dTheta on (eps, nu) vs Omega with pi = m nu
};
QuantizationFormReport check_quantization_form(int points, const SpaceConfig& cfg,
                                               std::uint64_t seed);

}  // namespace s3sigma
