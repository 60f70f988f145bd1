#pragma once

// Independent reference computations used by the unit tests. Nothing here
// calls into the library beyond the basic value types.

#include "s3sigma/geometry.hpp"

#include <cmath>
#include <random>

namespace oracle {

using s3sigma::Mat3;
using s3sigma::Vec3;
using s3sigma::Vec4;

inline Vec4 hamilton(const Vec4& a, const Vec4& b) {
  // explicit Hamilton product table
  return Vec4(a(0) * b(0) - a(1) * b(1) - a(2) * b(2) - a(3) * b(3),
              a(0) * b(1) + a(1) * b(0) + a(2) * b(3) - a(3) * b(2),
              a(0) * b(2) - a(1) * b(3) + a(2) * b(0) + a(3) * b(1),
              a(0) * b(3) + a(1) * b(2) - a(2) * b(1) + a(3) * b(0));
}

/// Pullback metric of the embedding eps -> (R sqrt(1 - |eps|^2/R^2), eps),
/// computed from the Jacobian of the embedding.
inline Mat3 pullback_metric(const Vec3& e, double R, int sign = +1) {
  const double x0 = sign * std::sqrt(R * R - e.squaredNorm());
  Eigen::Matrix<double, 4, 3> J;
  J.row(0) = -e.transpose() / x0;
  J.bottomRows<3>() = Mat3::Identity();
  return J.transpose() * J;
}

inline Vec3 random_ball(std::mt19937_64& rng, double r) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vec3 v;
  do {
    v = Vec3(u(rng), u(rng), u(rng));
  } while (v.squaredNorm() > 1.0);
  return r * v;
}

inline Vec3 random_box(std::mt19937_64& rng, double r) {
  std::uniform_real_distribution<double> u(-r, r);
  return Vec3(u(rng), u(rng), u(rng));
}

}  // namespace oracle
