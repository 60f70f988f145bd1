#pragma once

#include <Eigen/Dense>

namespace s3sigma::fd {

namespace detail {
template <class T>
auto materialize(const T& v) {
  if constexpr (requires { v.eval(); }) {
    return v.eval();
  } else {
    return v;
  }
}
}  // namespace detail

// Fourth-order central difference stencils. `f` may return a scalar (real or
// complex) or any Eigen vector type; `x` is any Eigen column vector.

template <class F, class Vec>
auto derivative(const F& f, const Vec& x, int dir, double h) {
  Vec step = Vec::Zero(x.size());
  step(dir) = h;
  const auto fp2 = detail::materialize(f(Vec(x + 2 * step)));
  const auto fp1 = detail::materialize(f(Vec(x + step)));
  const auto fm1 = detail::materialize(f(Vec(x - step)));
  const auto fm2 = detail::materialize(f(Vec(x - 2 * step)));
  return detail::materialize((-fp2 + 8.0 * fp1 - 8.0 * fm1 + fm2) / (12.0 * h));
}

template <class F, class Vec>
auto second_derivative(const F& f, const Vec& x, int dir, double h) {
  Vec step = Vec::Zero(x.size());
  step(dir) = h;
  const auto fp2 = detail::materialize(f(Vec(x + 2 * step)));
  const auto fp1 = detail::materialize(f(Vec(x + step)));
  const auto f0 = detail::materialize(f(Vec(x)));
  const auto fm1 = detail::materialize(f(Vec(x - step)));
  const auto fm2 = detail::materialize(f(Vec(x - 2 * step)));
  return detail::materialize((-fp2 + 16.0 * fp1 - 30.0 * f0 + 16.0 * fm1 - fm2) /
                             (12.0 * h * h));
}

template <class F, class Vec>
auto mixed_derivative(const F& f, const Vec& x, int a, int b, double h) {
  if (a == b) return second_derivative(f, x, a, h);
  auto inner = [&](const Vec& y) { return derivative(f, y, b, h); };
  return derivative(inner, x, a, h);
}

// Jacobian J(r, c) = d f_r / d x_c of a vector-valued map.
template <class F, class Vec>
Eigen::MatrixXd jacobian(const F& f, const Vec& x, double h) {
  const Eigen::VectorXd f0 = f(x);
  Eigen::MatrixXd jac(f0.size(), x.size());
  for (int c = 0; c < x.size(); ++c) jac.col(c) = derivative(f, x, c, h);
  return jac;
}

// Lie bracket [X, Y]^a = X^b d_b Y^a - Y^b d_b X^a of two vector fields given
// in one coordinate system.
template <class FX, class FY, class Vec>
Eigen::VectorXd vector_field_bracket(const FX& fx, const FY& fy, const Vec& x, double h) {
  const Eigen::MatrixXd jx = jacobian(fx, x, h);
  const Eigen::MatrixXd jy = jacobian(fy, x, h);
  const Eigen::VectorXd vx = fx(x);
  const Eigen::VectorXd vy = fy(x);
  return jy * vx - jx * vy;
}

}  // namespace s3sigma::fd
