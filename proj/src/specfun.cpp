#include "s3sigma/specfun.hpp"

#include "s3sigma/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <tuple>

namespace s3sigma {

namespace {

void check_gegenbauer_args(double alpha, int k, double x) {
  if (!(alpha > 0.0)) throw DomainError("gegenbauer: alpha must be positive");
  if (k < 0) throw DomainError("gegenbauer: degree must be non-negative");
  if (!(std::abs(x) <= 1.0 + 1e-12)) throw DomainError("gegenbauer: |x| must be <= 1");
}

}  // namespace

double gegenbauer_value(double alpha, int k, double x) {
  check_gegenbauer_args(alpha, k, x);
  if (k == 0) return 1.0;
  double prev = 1.0;
  double cur = 2.0 * alpha * x;
  for (int j = 2; j <= k; ++j) {
    const double next = (2.0 * x * (j + alpha - 1.0) * cur - (j + 2.0 * alpha - 2.0) * prev) / j;
    prev = cur;
    cur = next;
  }
  return cur;
}

PolyEval gegenbauer(double alpha, int k, double x) {
  PolyEval out;
  out.value = gegenbauer_value(alpha, k, x);
  if (k >= 1) out.derivative = 2.0 * alpha * gegenbauer_value(alpha + 1.0, k - 1, x);
  if (k >= 2) {
    out.second_derivative = 4.0 * alpha * (alpha + 1.0) * gegenbauer_value(alpha + 2.0, k - 2, x);
  }
  return out;
}

double associated_legendre(int l, int m, double x) {
  if (m < 0 || m > l) throw DomainError("associated_legendre: need 0 <= m <= l");
  if (std::abs(x) > 1.0 + 1e-12) throw DomainError("associated_legendre: |x| must be <= 1");
  x = std::clamp(x, -1.0, 1.0);
  // P_m^m = (-1)^m (2m-1)!! (1-x^2)^{m/2}
  const double s = std::sqrt(std::max(0.0, (1.0 - x) * (1.0 + x)));
  double pmm = 1.0;
  for (int j = 1; j <= m; ++j) pmm *= -(2.0 * j - 1.0) * s;
  if (l == m) return pmm;
  double pm1 = (2.0 * m + 1.0) * x * pmm;
  for (int j = m + 2; j <= l; ++j) {
    const double next = ((2.0 * j - 1.0) * x * pm1 - (j + m - 1.0) * pmm) / (j - m);
    pmm = pm1;
    pm1 = next;
  }
  return pm1;
}

namespace {

// sqrt((2l+1)/(4 pi) (l-m)!/(l+m)!) for m >= 0, via a running product
double harmonic_norm(int l, int m) {
  double ratio = 1.0;
  for (int j = l - m + 1; j <= l + m; ++j) ratio /= j;
  return std::sqrt((2.0 * l + 1.0) / (4.0 * std::numbers::pi) * ratio);
}

}  // namespace

cplx spherical_harmonic(int l, int m, double theta, double phi) {
  if (l < 0 || std::abs(m) > l) throw DomainError("spherical_harmonic: need |m| <= l");
  const int am = std::abs(m);
  const cplx y = harmonic_norm(l, am) * associated_legendre(l, am, std::cos(theta)) *
                 std::polar(1.0, am * phi);
  if (m >= 0) return y;
  return (am % 2 ? -1.0 : 1.0) * std::conj(y);
}

// ---- Poly3 ------------------------------------------------------------------

int Poly3::degree() const {
  int d = 0;
  for (const Term& t : terms_) d = std::max(d, t.a + t.b + t.c);
  return d;
}

void Poly3::compact() {
  std::map<std::tuple<int, int, int>, cplx> acc;
  for (const Term& t : terms_) acc[{t.a, t.b, t.c}] += t.coef;
  terms_.clear();
  for (const auto& [key, coef] : acc) {
    if (coef != cplx(0.0, 0.0)) terms_.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), coef});
  }
}

Poly3 Poly3::constant(cplx c) { return monomial(0, 0, 0, c); }

Poly3 Poly3::monomial(int a, int b, int c, cplx coef) {
  Poly3 p;
  p.terms_.push_back({a, b, c, coef});
  return p;
}

Poly3 Poly3::operator+(const Poly3& o) const {
  Poly3 p;
  p.terms_ = terms_;
  p.terms_.insert(p.terms_.end(), o.terms_.begin(), o.terms_.end());
  p.compact();
  return p;
}

Poly3 Poly3::operator*(const Poly3& o) const {
  Poly3 p;
  for (const Term& s : terms_) {
    for (const Term& t : o.terms_) p.terms_.push_back({s.a + t.a, s.b + t.b, s.c + t.c, s.coef * t.coef});
  }
  p.compact();
  return p;
}

Poly3 Poly3::operator*(cplx s) const {
  Poly3 p = *this;
  for (Term& t : p.terms_) t.coef *= s;
  p.compact();
  return p;
}

Poly3 Poly3::conj() const {
  Poly3 p = *this;
  for (Term& t : p.terms_) t.coef = std::conj(t.coef);
  return p;
}

namespace {

// pw[k] = v^k for k <= n
std::vector<double> powers(double v, int n) {
  std::vector<double> pw(n + 1, 1.0);
  for (int k = 1; k <= n; ++k) pw[k] = pw[k - 1] * v;
  return pw;
}

}  // namespace

cplx Poly3::operator()(const Eigen::Vector3d& p) const {
  const int d = degree();
  const auto px = powers(p(0), d), py = powers(p(1), d), pz = powers(p(2), d);
  cplx v = 0.0;
  for (const Term& t : terms_) v += t.coef * (px[t.a] * py[t.b] * pz[t.c]);
  return v;
}

Poly3::Jet Poly3::jet(const Eigen::Vector3d& p) const {
  const int d = degree();
  const std::array<std::vector<double>, 3> pw{powers(p(0), d), powers(p(1), d), powers(p(2), d)};
  // k-th derivative factor of v^e: e (e-1) ... v^{e-k}
  auto dpow = [&](int axis, int e, int k) -> double {
    if (e < k) return 0.0;
    double f = 1.0;
    for (int j = 0; j < k; ++j) f *= e - j;
    return f * pw[axis][e - k];
  };
  Jet j;
  j.value = 0.0;
  j.grad.setZero();
  j.hess.setZero();
  for (const Term& t : terms_) {
    const int e[3] = {t.a, t.b, t.c};
    double base[3][3];  // base[axis][k] = k-th derivative of the axis factor
    for (int ax = 0; ax < 3; ++ax) {
      for (int k = 0; k < 3; ++k) base[ax][k] = dpow(ax, e[ax], k);
    }
    j.value += t.coef * (base[0][0] * base[1][0] * base[2][0]);
    for (int u = 0; u < 3; ++u) {
      int ord[3] = {0, 0, 0};
      ord[u] += 1;
      j.grad(u) += t.coef * (base[0][ord[0]] * base[1][ord[1]] * base[2][ord[2]]);
      for (int v = u; v < 3; ++v) {
        int o2[3] = {ord[0], ord[1], ord[2]};
        o2[v] += 1;
        const cplx h = t.coef * (base[0][o2[0]] * base[1][o2[1]] * base[2][o2[2]]);
        j.hess(u, v) += h;
        if (v != u) j.hess(v, u) += h;
      }
    }
  }
  return j;
}

Poly3 solid_harmonic(int l, int m) {
  if (l < 0 || std::abs(m) > l) throw DomainError("solid_harmonic: need |m| <= l");
  const int am = std::abs(m);
  const Poly3 x_iy = Poly3::monomial(1, 0, 0) + Poly3::monomial(0, 1, 0, cplx(0.0, 1.0));
  const Poly3 z = Poly3::monomial(0, 0, 1);
  const Poly3 r2 = Poly3::monomial(2, 0, 0) + Poly3::monomial(0, 2, 0) + Poly3::monomial(0, 0, 2);

  // r^m P_m^m e^{i m phi} = (-1)^m (2m-1)!! (x + i y)^m
  double dfact = 1.0;
  for (int j = 1; j <= am; ++j) dfact *= 2.0 * j - 1.0;
  Poly3 cur = Poly3::constant((am % 2 ? -1.0 : 1.0) * dfact);
  for (int j = 0; j < am; ++j) cur = cur * x_iy;
  Poly3 prev;  // zero polynomial
  for (int j = am; j < l; ++j) {
    // (j - m + 1) R_{j+1} = (2j + 1) z R_j - (j + m) r^2 R_{j-1}
    Poly3 next = z * cur * cplx(2.0 * j + 1.0);
    if (!prev.terms().empty()) next = next + r2 * prev * cplx(-(j + am));
    next = next * cplx(1.0 / (j - am + 1.0));
    prev = cur;
    cur = next;
  }
  Poly3 out = cur * cplx(harmonic_norm(l, am));
  if (m < 0) out = out.conj() * cplx(am % 2 ? -1.0 : 1.0);
  return out;
}

}  // namespace s3sigma
