#pragma once

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <string>

namespace s3sigma {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised where a chart formula divides by rho and |rho| is below the
/// singularity threshold. The other hemisphere (or another orthographic
/// chart) must be used there.
class ChartSingularityError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A finite-difference stencil would leave the chart interior.
class StencilError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Physical context: sphere radius and particle mass. hbar is fixed to 1.
struct SpaceConfig {
  double radius = 1.0;
  double mass = 1.0;

  void validate() const;
};

enum class Side { Left, Right };

inline constexpr double kChartSingularity = 1e-10;
inline constexpr double kUnitTolerance = 1e-12;

/// Eps chart: eps^i together with the hemisphere sign of rho.
struct ChartCoords {
  Vec3 eps = Vec3::Zero();
  int rho_sign = +1;
};

/// Point of S^3 held as a unit quaternion (q0, q1, q2, q3). The embedded point
/// in R^4 is R * q; the chart projection is eps = R * (q1, q2, q3).
struct S3Point {
  Vec4 q{1.0, 0.0, 0.0, 0.0};

  static S3Point from_chart(const ChartCoords& c, double radius);
  static S3Point from_embedded(const Vec4& x);
  ChartCoords to_chart(double radius) const;
  Vec4 embedded(double radius) const { return radius * q; }
};

// Quaternions are stored scalar-first.
Vec4 quat_mul(const Vec4& a, const Vec4& b);
Vec4 quat_conj(const Vec4& a);

double levi_civita(int i, int j, int k);
/// Cross-product matrix: skew(v) * w = v x w.
Mat3 skew(const Vec3& v);

double rho(const ChartCoords& c, double radius);
Mat3 metric(const ChartCoords& c, double radius);
Mat3 metric_inverse(const ChartCoords& c, double radius);

/// theta(i, j) = theta^{(i)}_j.
Mat3 canonical_one_form(const ChartCoords& c, Side side, double radius);

/// Z(i, k) = Z^k_(i): row i is the generator, column k its eps^k component.
Mat3 dual_field(const ChartCoords& c, Side side, double radius);

/// The invariant fields extended to linear vector fields on R^4 (tangent to
/// the sphere of radius R). Column i holds the generator Z_(i) at x, with the
/// component order (x0, x1, x2, x3) and x0 = R rho.
Eigen::Matrix<double, 4, 3> ambient_dual_field(const Vec4& x, Side side, double radius);
/// d/dx of column i of ambient_dual_field: the constant 4x4 matrix A_i with
/// Z_(i)(x) = A_i x.
Mat4 ambient_field_matrix(int i, Side side, double radius);

/// Vector field on the chart: eps -> X(eps) (components X^k).
using ChartField = std::function<Vec3(const Vec3&)>;

/// Max-norm of the Lie derivative of the metric along `field`, by fourth-order
/// central differences with step h (default 1e-5 R).
double killing_residual(const ChartCoords& c, const ChartField& field, double radius,
                        double step = 0.0);

/// Orthographic chart dropping ambient axis `axis`; coordinates are the other
/// three ambient components in increasing axis order. axis 0 is the eps chart.
struct OrthoChart {
  int axis = 0;
  int sign = +1;

  /// Chart with the largest |x_axis| at x (best conditioned).
  static OrthoChart best_for(const Vec4& x);
  Vec3 project(const Vec4& x) const;
  Vec4 lift(const Vec3& coords, double radius) const;
  /// Ambient index of chart coordinate k.
  int ambient_index(int k) const { return k < axis ? k : k + 1; }
};

}  // namespace s3sigma
