#include "s3sigma/geometry.hpp"

#include "s3sigma/finite_diff.hpp"

#include <cmath>
#include <sstream>

namespace s3sigma {

void SpaceConfig::validate() const {
  if (!(std::isfinite(radius) && radius > 0.0)) {
    throw DomainError("radius must be finite and positive");
  }
  if (!(std::isfinite(mass) && mass > 0.0)) {
    throw DomainError("mass must be finite and positive");
  }
}

S3Point S3Point::from_chart(const ChartCoords& c, double radius) {
  const double r = rho(c, radius);
  S3Point p;
  p.q << r, c.eps / radius;
  p.q.normalize();
  return p;
}

S3Point S3Point::from_embedded(const Vec4& x) {
  const double n = x.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("cannot project zero or non-finite vector onto S^3");
  return S3Point{x / n};
}

ChartCoords S3Point::to_chart(double radius) const {
  return ChartCoords{radius * q.tail<3>(), q(0) < 0.0 ? -1 : +1};
}

Vec4 quat_mul(const Vec4& a, const Vec4& b) {
  const Vec3 u = a.tail<3>();
  const Vec3 v = b.tail<3>();
  Vec4 out;
  out(0) = a(0) * b(0) - u.dot(v);
  out.tail<3>() = a(0) * v + b(0) * u + u.cross(v);
  return out;
}

Vec4 quat_conj(const Vec4& a) { return Vec4(a(0), -a(1), -a(2), -a(3)); }

double levi_civita(int i, int j, int k) {
  if (i == j || j == k || i == k) return 0.0;
  // even permutations of (0, 1, 2)
  if ((i == 0 && j == 1) || (i == 1 && j == 2) || (i == 2 && j == 0)) return 1.0;
  return -1.0;
}

Mat3 skew(const Vec3& v) {
  Mat3 s;
  s << 0.0, -v(2), v(1), v(2), 0.0, -v(0), -v(1), v(0), 0.0;
  return s;
}

double rho(const ChartCoords& c, double radius) {
  const double s = c.eps.squaredNorm() / (radius * radius);
  if (s > 1.0 + kUnitTolerance) {
    std::ostringstream msg;
    msg << "chart point outside the sphere: |eps|/R = " << std::sqrt(s);
    throw DomainError(msg.str());
  }
  return c.rho_sign * std::sqrt(std::max(0.0, 1.0 - s));
}

namespace {

double interior_rho(const ChartCoords& c, double radius) {
  const double r = rho(c, radius);
  if (std::abs(r) < kChartSingularity) {
    throw ChartSingularityError(
        "rho = 0 on the chart equator; use the other hemisphere or another orthographic chart");
  }
  return r;
}

}  // namespace

Mat3 metric(const ChartCoords& c, double radius) {
  const double r = interior_rho(c, radius);
  return Mat3::Identity() + c.eps * c.eps.transpose() / (radius * radius * r * r);
}

Mat3 metric_inverse(const ChartCoords& c, double radius) {
  (void)rho(c, radius);
  return Mat3::Identity() - c.eps * c.eps.transpose() / (radius * radius);
}

// theta^{R(i)}_j = rho d^i_j + e^i e_j / (R^2 rho) + (1/R) eta^i_{jk} e^k; the
// eta term is -skew(eps)/R as a matrix.
Mat3 canonical_one_form(const ChartCoords& c, Side side, double radius) {
  const double r = interior_rho(c, radius);
  const double s = side == Side::Right ? 1.0 : -1.0;
  return r * Mat3::Identity() + c.eps * c.eps.transpose() / (radius * radius * r) -
         s * skew(c.eps) / radius;
}

// Z^{Rk}_(i) = rho d^k_i + (1/R) eta^k_{ij} e^j; in the (i, k) layout the eta
// term is +skew(eps)/R.
Mat3 dual_field(const ChartCoords& c, Side side, double radius) {
  const double r = rho(c, radius);
  const double s = side == Side::Right ? 1.0 : -1.0;
  return r * Mat3::Identity() + s * skew(c.eps) / radius;
}

Mat4 ambient_field_matrix(int i, Side side, double radius) {
  const double s = side == Side::Right ? 1.0 : -1.0;
  Mat4 a = Mat4::Zero();
  // x0 component: -x_i / R
  a(0, 1 + i) = -1.0;
  // eps^k component: x0 d_ki + s eta_{kij} x_j
  a(1 + i, 0) = 1.0;
  for (int k = 0; k < 3; ++k) {
    for (int j = 0; j < 3; ++j) a(1 + k, 1 + j) += s * levi_civita(k, i, j);
  }
  return a / radius;
}

Eigen::Matrix<double, 4, 3> ambient_dual_field(const Vec4& x, Side side, double radius) {
  Eigen::Matrix<double, 4, 3> out;
  for (int i = 0; i < 3; ++i) out.col(i) = ambient_field_matrix(i, side, radius) * x;
  return out;
}

double killing_residual(const ChartCoords& c, const ChartField& field, double radius,
                        double step) {
  const double h = step > 0.0 ? step : 1e-5 * radius;
  // every stencil point must stay inside the open chart
  const double reach = c.eps.norm() + 2.0 * std::sqrt(3.0) * h;
  if (reach >= radius * std::sqrt(1.0 - kChartSingularity * kChartSingularity) ||
      std::abs(rho(c, radius)) < 1e-3) {
    throw StencilError("killing_residual stencil reaches the chart boundary");
  }
  const int sign = c.rho_sign;
  auto g_of = [&](const Vec3& e) -> Eigen::Matrix<double, 9, 1> {
    const Mat3 g = metric(ChartCoords{e, sign}, radius);
    return Eigen::Map<const Eigen::Matrix<double, 9, 1>>(g.data());
  };
  const Vec3 x = field(c.eps);
  const Eigen::MatrixXd dx = fd::jacobian(field, c.eps, h);  // dx(k, i) = d_i X^k
  const Mat3 g = metric(c, radius);
  Mat3 lie = Mat3::Zero();
  for (int k = 0; k < 3; ++k) {
    const Eigen::Matrix<double, 9, 1> dg = fd::derivative(g_of, c.eps, k, h);
    lie += x(k) * Eigen::Map<const Mat3>(dg.data());
  }
  // d_i X^k g_kj + d_j X^k g_ik
  lie += dx.transpose() * g + g * dx;
  return lie.cwiseAbs().maxCoeff();
}

OrthoChart OrthoChart::best_for(const Vec4& x) {
  int axis = 0;
  x.cwiseAbs().maxCoeff(&axis);
  return OrthoChart{axis, x(axis) < 0.0 ? -1 : +1};
}

Vec3 OrthoChart::project(const Vec4& x) const {
  Vec3 out;
  for (int k = 0; k < 3; ++k) out(k) = x(ambient_index(k));
  return out;
}

Vec4 OrthoChart::lift(const Vec3& coords, double radius) const {
  const double s = coords.squaredNorm();
  const double r2 = radius * radius;
  if (s > r2 * (1.0 + kUnitTolerance)) throw DomainError("orthographic chart point outside the sphere");
  Vec4 x;
  x(axis) = sign * std::sqrt(std::max(0.0, r2 - s));
  for (int k = 0; k < 3; ++k) x(ambient_index(k)) = coords(k);
  return x;
}

}  // namespace s3sigma
