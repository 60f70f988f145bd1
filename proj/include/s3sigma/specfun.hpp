#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace s3sigma {

using cplx = std::complex<double>;

struct PolyEval {
  double value = 0.0;
  double derivative = 0.0;
  double second_derivative = 0.0;
};

/// Gegenbauer polynomial C^{(alpha)}_k(x) by upward three-term recurrence,
/// with first and second derivatives from d/dx C^{(a)}_k = 2a C^{(a+1)}_{k-1}.
PolyEval gegenbauer(double alpha, int k, double x);
/// Value only.
double gegenbauer_value(double alpha, int k, double x);

/// Associated Legendre P_l^m(x), m >= 0, Condon-Shortley phase included.
double associated_legendre(int l, int m, double x);

/// Orthonormal spherical harmonic with Condon-Shortley phase.
cplx spherical_harmonic(int l, int m, double theta, double phi);

/// Complex polynomial in (x, y, z), kept as a list of monomials.
class Poly3 {
 public:
  struct Term {
    int a = 0, b = 0, c = 0;  ///< powers of x, y, z
    cplx coef;
  };

  struct Jet {
    cplx value;
    Eigen::Vector3cd grad;
    Eigen::Matrix3cd hess;
  };

  Poly3() = default;
  explicit Poly3(std::vector<Term> terms) : terms_(std::move(terms)) {}

  const std::vector<Term>& terms() const { return terms_; }
  int degree() const;

  cplx operator()(const Eigen::Vector3d& p) const;
  Jet jet(const Eigen::Vector3d& p) const;

  Poly3 operator+(const Poly3& o) const;
  Poly3 operator*(const Poly3& o) const;
  Poly3 operator*(cplx s) const;
  Poly3 conj() const;

  static Poly3 constant(cplx c);
  static Poly3 monomial(int a, int b, int c, cplx coef = 1.0);

 private:
  std::vector<Term> terms_;
  void compact();
};

/// Regular solid harmonic r^l Y_lm(theta, phi) as a polynomial in (x, y, z).
Poly3 solid_harmonic(int l, int m);

}  // namespace s3sigma
