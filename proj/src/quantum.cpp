#include "s3sigma/quantum.hpp"

#include "s3sigma/finite_diff.hpp"
#include "s3sigma/sigma_group.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <random>
#include <sstream>

namespace s3sigma {

// ---- labels -----------------------------------------------------------------

void SpectralLabel::validate() const {
  if (n < 0 || l < 0 || l > n || std::abs(m_z) > l) {
    std::ostringstream msg;
    msg << "invalid spectral label (n=" << n << ", l=" << l << ", m_z=" << m_z
        << "): need 0 <= l <= n and |m_z| <= l";
    throw DomainError(msg.str());
  }
}

double SpectralLabel::energy(const SpaceConfig& cfg) const {
  return n * (n + 2.0) / (2.0 * cfg.mass * cfg.radius * cfg.radius);
}

std::vector<SpectralLabel> labels_up_to(int n_max) {
  if (n_max < 0) throw DomainError("labels_up_to: n_max must be non-negative");
  std::vector<SpectralLabel> out;
  for (int n = 0; n <= n_max; ++n) {
    for (int l = 0; l <= n; ++l) {
      for (int m = -l; m <= l; ++m) out.push_back({n, l, m});
    }
  }
  return out;
}

// ---- WaveFunction -----------------------------------------------------------

WaveFunction::WaveFunction(Evaluator eval, int analytic_order, std::optional<SpectralLabel> label)
    : eval_(std::make_shared<const Evaluator>(std::move(eval))),
      order_(analytic_order),
      label_(label) {}

WaveFunction WaveFunction::from_values(std::function<cplx(const Vec4&)> f) {
  return WaveFunction(
      [f = std::move(f)](const Vec4& x, int) {
        Jet4 j;
        j.value = f(x);
        return j;
      },
      0);
}

cplx WaveFunction::operator()(const Vec4& x) const { return (*eval_)(x, 0).value; }

cplx WaveFunction::at_chart(const ChartCoords& c, double radius) const {
  return (*this)(S3Point::from_chart(c, radius).embedded(radius));
}

Jet4 WaveFunction::jet(const Vec4& x, int order) const {
  if (order > order_) {
    std::ostringstream msg;
    msg << "closed-form derivatives of order " << order << " are not available (function has "
        << order_ << "); use the finite-difference backend";
    throw DomainError(msg.str());
  }
  return (*eval_)(x, order);
}

namespace {

cplx tdot(const Vec4& v, const Vec4c& g) { return (v.cast<cplx>().array() * g.array()).sum(); }

double default_step(const DerivativeOptions& opt, const SpaceConfig& cfg) {
  return opt.fd_step > 0.0 ? opt.fd_step : 1e-3 * cfg.radius;
}

struct ChartDerivatives {
  OrthoChart chart;
  Vec3 u = Vec3::Zero();
  Vec3c d1 = Vec3c::Zero();
  Mat3c d2 = Mat3c::Zero();
};

// Finite differences of f along the best orthographic chart at x.
ChartDerivatives chart_fd(const WaveFunction& f, const Vec4& x, int order, const SpaceConfig& cfg,
                          double h) {
  ChartDerivatives cd;
  cd.chart = OrthoChart::best_for(x);
  cd.u = cd.chart.project(x);
  const OrthoChart ch = cd.chart;
  const double R = cfg.radius;
  auto fu = [&](const Vec3& u) -> cplx { return f(ch.lift(u, R)); };
  for (int k = 0; k < 3; ++k) cd.d1(k) = fd::derivative(fu, cd.u, k, h);
  if (order >= 2) {
    for (int k = 0; k < 3; ++k) {
      for (int l = k; l < 3; ++l) {
        cd.d2(k, l) = fd::mixed_derivative(fu, cd.u, k, l, h);
        cd.d2(l, k) = cd.d2(k, l);
      }
    }
  }
  return cd;
}

// Chart derivatives of an ambient jet by the chain rule through the lift.
ChartDerivatives chart_from_jet(const Jet4& j, const Vec4& x, int order) {
  ChartDerivatives cd;
  cd.chart = OrthoChart::best_for(x);
  cd.u = cd.chart.project(x);
  const int a = cd.chart.axis;
  const double xa = x(a);
  Eigen::Matrix<double, 4, 3> t = Eigen::Matrix<double, 4, 3>::Zero();
  for (int k = 0; k < 3; ++k) {
    t(cd.chart.ambient_index(k), k) = 1.0;
    t(a, k) = -cd.u(k) / xa;
  }
  const Eigen::Matrix<cplx, 4, 3> tc = t.cast<cplx>();
  cd.d1 = tc.transpose() * j.grad;
  if (order >= 2) {
    cd.d2 = tc.transpose() * j.hess * tc;
    for (int k = 0; k < 3; ++k) {
      for (int l = 0; l < 3; ++l) {
        const double second = -(k == l ? 1.0 : 0.0) / xa - cd.u(k) * cd.u(l) / (xa * xa * xa);
        cd.d2(k, l) += j.grad(a) * second;
      }
    }
  }
  return cd;
}

// Extension constant along the dropped axis: grad = P^T d1, hess = P^T d2 P.
Jet4 jet_from_chart(const ChartDerivatives& cd, cplx value) {
  Eigen::Matrix<double, 3, 4> p = Eigen::Matrix<double, 3, 4>::Zero();
  for (int k = 0; k < 3; ++k) p(k, cd.chart.ambient_index(k)) = 1.0;
  const Eigen::Matrix<cplx, 3, 4> pc = p.cast<cplx>();
  Jet4 j;
  j.value = value;
  j.grad = pc.transpose() * cd.d1;
  j.hess = pc.transpose() * cd.d2 * pc;
  return j;
}

cplx lb_chart(const ChartDerivatives& cd, double R) {
  const Vec3& u = cd.u;
  cplx acc = 0.0;
  for (int k = 0; k < 3; ++k) {
    for (int m = 0; m < 3; ++m) {
      acc += ((k == m ? 1.0 : 0.0) - u(k) * u(m) / (R * R)) * cd.d2(k, m);
    }
    acc -= 3.0 / (R * R) * u(k) * cd.d1(k);
  }
  return acc;
}

void require_analytic(const WaveFunction& f, int order, const DerivativeOptions& opt) {
  if (!f.valid()) throw DomainError("operator applied to an empty wave function");
  if (opt.backend == Backend::Analytic && f.analytic_order() < order) {
    std::ostringstream msg;
    msg << "analytic backend needs derivatives of order " << order << " but the function has "
        << f.analytic_order() << "; use the finite-difference backend";
    throw DomainError(msg.str());
  }
}

// coef * (A x) . grad f, with the gradient of the result when available.
WaveFunction first_order(const Mat4& a, cplx coef, const WaveFunction& f, const SpaceConfig& cfg,
                         const DerivativeOptions& opt) {
  require_analytic(f, 1, opt);
  if (opt.backend == Backend::FiniteDifference) {
    return WaveFunction::from_values([=](const Vec4& x) {
      const Jet4 j = surface_jet(f, x, 1, cfg, opt);
      return coef * tdot(a * x, j.grad);
    });
  }
  const int out_order = std::min(1, f.analytic_order() - 1);
  const Mat4c ac = a.cast<cplx>();
  return WaveFunction(
      [=](const Vec4& x, int order) {
        Jet4 out;
        if (order == 0) {
          out.value = coef * tdot(a * x, f.jet(x, 1).grad);
          return out;
        }
        const Jet4 j = f.jet(x, 2);
        const Vec4 v = a * x;
        out.value = coef * tdot(v, j.grad);
        out.grad = coef * (ac.transpose() * j.grad + j.hess * v.cast<cplx>());
        return out;
      },
      out_order);
}

// coef * sum_i Z_i Z_i f with Z_i = A_i x.
WaveFunction second_order(std::vector<Mat4> as, cplx coef, const WaveFunction& f,
                          const SpaceConfig& cfg, const DerivativeOptions& opt) {
  require_analytic(f, 2, opt);
  return WaveFunction::from_values([=, as = std::move(as)](const Vec4& x) {
    const Jet4 j = opt.backend == Backend::Analytic ? f.jet(x, 2) : surface_jet(f, x, 2, cfg, opt);
    cplx acc = 0.0;
    for (const Mat4& a : as) {
      const Vec4 v = a * x;
      const Vec4c vc = v.cast<cplx>();
      acc += (vc.transpose() * j.hess * vc)(0, 0) + tdot(a * v, j.grad);
    }
    return coef * acc;
  });
}

Mat4 rotation_generator(int i, double radius) {
  return 0.5 * radius *
         (ambient_field_matrix(i, Side::Right, radius) - ambient_field_matrix(i, Side::Left, radius));
}

void check_axis(int i) {
  if (i < 0 || i > 2) throw DomainError("axis index must be 0, 1 or 2");
}

}  // namespace

Jet4 surface_jet(const WaveFunction& f, const Vec4& x, int order, const SpaceConfig& cfg,
                 const DerivativeOptions& opt) {
  if (opt.backend == Backend::Analytic) return f.jet(x, order);
  return jet_from_chart(chart_fd(f, x, order, cfg, default_step(opt, cfg)), f(x));
}

cplx laplace_beltrami(const WaveFunction& f, const Vec4& x, const SpaceConfig& cfg,
                      const DerivativeOptions& opt) {
  require_analytic(f, 2, opt);
  if (opt.backend == Backend::Analytic) {
    return lb_chart(chart_from_jet(f.jet(x, 2), x, 2), cfg.radius);
  }
  return lb_chart(chart_fd(f, x, 2, cfg, default_step(opt, cfg)), cfg.radius);
}

WaveFunction apply_nu(int i, const WaveFunction& f, const SpaceConfig& cfg,
                      const DerivativeOptions& opt) {
  check_axis(i);
  return first_order(ambient_field_matrix(i, Side::Right, cfg.radius), cplx(0.0, -1.0 / cfg.mass),
                     f, cfg, opt);
}

WaveFunction apply_position(int i, const WaveFunction& f, const SpaceConfig& cfg) {
  if (i < 0 || i > kRhoAxis) throw DomainError("position index must be 0..2 or kRhoAxis");
  if (!f.valid()) throw DomainError("operator applied to an empty wave function");
  Vec4 c = Vec4::Zero();
  double d = 0.0;
  if (i < 3) {
    c(1 + i) = 1.0;
  } else {
    c(0) = 1.0 / cfg.radius;
    d = -1.0;
  }
  const Vec4c cc = c.cast<cplx>();
  return WaveFunction(
      [=](const Vec4& x, int order) {
        const Jet4 j = f.jet(x, order);
        const double p = c.dot(x) + d;
        Jet4 out;
        out.value = p * j.value;
        if (order >= 1) out.grad = p * j.grad + j.value * cc;
        if (order >= 2) out.hess = p * j.hess + j.grad * cc.transpose() + cc * j.grad.transpose();
        return out;
      },
      f.analytic_order(), std::nullopt);
}

WaveFunction apply_hamiltonian(const WaveFunction& f, const SpaceConfig& cfg, HamiltonianForm form,
                               const DerivativeOptions& opt) {
  const double m = cfg.mass;
  if (form == HamiltonianForm::ViaNu) {
    // (m/2) sum (-i/m)^2 Z_i Z_i
    std::vector<Mat4> as;
    for (int i = 0; i < 3; ++i) as.push_back(ambient_field_matrix(i, Side::Right, cfg.radius));
    return second_order(std::move(as), cplx(-0.5 / m, 0.0), f, cfg, opt);
  }
  require_analytic(f, 2, opt);
  return WaveFunction::from_values(
      [=](const Vec4& x) { return -0.5 / m * laplace_beltrami(f, x, cfg, opt); });
}

WaveFunction apply_J(int i, const WaveFunction& f, const SpaceConfig& cfg,
                     const DerivativeOptions& opt) {
  check_axis(i);
  return first_order(rotation_generator(i, cfg.radius), cplx(0.0, -1.0), f, cfg, opt);
}

WaveFunction apply_J_squared(const WaveFunction& f, const SpaceConfig& cfg,
                             const DerivativeOptions& opt) {
  std::vector<Mat4> as;
  for (int i = 0; i < 3; ++i) as.push_back(rotation_generator(i, cfg.radius));
  return second_order(std::move(as), cplx(-1.0, 0.0), f, cfg, opt);
}

WaveFunction apply_J_raw(int i, const WaveFunction& f, const SpaceConfig& cfg,
                         const DerivativeOptions& opt) {
  check_axis(i);
  return first_order(rotation_generator(i, cfg.radius), cplx(1.0, 0.0), f, cfg, opt);
}

WaveFunction left_action_operator(int i, const WaveFunction& f, const SpaceConfig& cfg,
                                  const DerivativeOptions& opt) {
  check_axis(i);
  return first_order(ambient_field_matrix(i, Side::Left, cfg.radius), cplx(1.0, 0.0), f, cfg, opt);
}

WaveFunction right_action_operator(int i, const WaveFunction& f, const SpaceConfig& cfg,
                                   const DerivativeOptions& opt) {
  check_axis(i);
  return first_order(ambient_field_matrix(i, Side::Right, cfg.radius), cplx(1.0, 0.0), f, cfg,
                     opt);
}

// ---- basis ------------------------------------------------------------------

namespace {

double factorial(int k) { return std::tgamma(k + 1.0); }

}  // namespace

NormalizationInfo normalization(const SpectralLabel& label, const SpaceConfig& cfg) {
  label.validate();
  cfg.validate();
  const int n = label.n, l = label.l;
  const double R = cfg.radius;
  // int_0^pi sin^{2l+2} C^2 dchi: a polynomial of degree 2n in cos(chi) against
  // sin^2(chi), exact under the Chebyshev-U rule with n + 1 nodes
  const int nodes = n + 2;
  double integral = 0.0;
  for (int k = 1; k <= nodes; ++k) {
    const double chi = k * std::numbers::pi / (nodes + 1);
    const double s = std::sin(chi);
    const double c = gegenbauer_value(l + 1.0, n - l, std::cos(chi));
    integral += std::numbers::pi / (nodes + 1) * s * s * std::pow(s, 2 * l) * c * c;
  }
  NormalizationInfo info;
  info.quadrature = 1.0 / std::sqrt(R * R * R * integral);
  const double prefix = std::pow(2.0, l) * factorial(l);
  const double ratio = 2.0 * (n + 1) * factorial(n - l) / factorial(n + l + 1);
  info.closed_form = prefix * std::sqrt(ratio / (std::numbers::pi * R * R * R));
  info.nu_measured = prefix * prefix * ratio / (info.quadrature * info.quadrature);
  return info;
}

WaveFunction psi(const SpectralLabel& label, const SpaceConfig& cfg) {
  label.validate();
  const double R = cfg.radius;
  const int n = label.n, l = label.l;
  const double k = normalization(label, cfg).quadrature * std::pow(R, -l);
  const auto s = std::make_shared<const Poly3>(solid_harmonic(l, label.m_z));
  return WaveFunction(
      [=](const Vec4& x, int order) {
        const Vec3 e = x.tail<3>();
        const double c = std::clamp(x(0) / R, -1.0, 1.0);
        Jet4 out;
        if (order == 0) {
          out.value = k * (*s)(e) * gegenbauer_value(l + 1.0, n - l, c);
          return out;
        }
        const PolyEval g = gegenbauer(l + 1.0, n - l, c);
        const Poly3::Jet sj = s->jet(e);
        out.value = k * sj.value * g.value;
        out.grad(0) = k * sj.value * g.derivative / R;
        out.grad.tail<3>() = k * sj.grad * g.value;
        if (order >= 2) {
          out.hess(0, 0) = k * sj.value * g.second_derivative / (R * R);
          const Vec3c cross = k * sj.grad * g.derivative / R;
          out.hess.block<1, 3>(0, 1) = cross.transpose();
          out.hess.block<3, 1>(1, 0) = cross;
          out.hess.block<3, 3>(1, 1) = k * sj.hess * g.value;
        }
        return out;
      },
      2, label);
}

Basis::Basis(int n_max, const SpaceConfig& cfg) : n_max_(n_max), cfg_(cfg) {
  if (n_max < 0 || n_max > 20) throw DomainError("basis: n_max must be in [0, 20]");
  cfg.validate();
  labels_ = labels_up_to(n_max);
  functions_.reserve(labels_.size());
  for (const auto& lab : labels_) functions_.push_back(psi(lab, cfg));
}

// ---- grid kernels -----------------------------------------------------------

Eigen::MatrixXcd sample_on_grid_serial(const std::vector<WaveFunction>& fs, const QuadGrid& grid) {
  const long nn = static_cast<long>(grid.nodes.size());
  Eigen::MatrixXcd out(nn, static_cast<long>(fs.size()));
  for (long i = 0; i < nn; ++i) {
    for (std::size_t f = 0; f < fs.size(); ++f) out(i, static_cast<long>(f)) = fs[f](grid.nodes[i].x);
  }
  return out;
}

Eigen::MatrixXcd sample_on_grid(const std::vector<WaveFunction>& fs, const QuadGrid& grid) {
  const long nn = static_cast<long>(grid.nodes.size());
  Eigen::MatrixXcd out(nn, static_cast<long>(fs.size()));
  std::exception_ptr error;
#pragma omp parallel for schedule(static)
  for (long i = 0; i < nn; ++i) {
    try {
      for (std::size_t f = 0; f < fs.size(); ++f) out(i, static_cast<long>(f)) = fs[f](grid.nodes[i].x);
    } catch (...) {
#pragma omp critical(s3sigma_sample_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

namespace {

void check_gram_shapes(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, const QuadGrid& grid) {
  const auto nn = static_cast<long>(grid.nodes.size());
  if (a.rows() != nn || b.rows() != nn) throw DomainError("gram: sample rows must match the grid");
}

cplx gram_entry(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, const QuadGrid& grid, long i,
                long j) {
  cplx acc = 0.0;
  for (long k = 0; k < a.rows(); ++k) acc += std::conj(a(k, i)) * b(k, j) * grid.nodes[k].weight;
  return acc;
}

}  // namespace

Eigen::MatrixXcd gram_serial(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b,
                             const QuadGrid& grid) {
  check_gram_shapes(a, b, grid);
  Eigen::MatrixXcd g(a.cols(), b.cols());
  for (long i = 0; i < a.cols(); ++i) {
    for (long j = 0; j < b.cols(); ++j) g(i, j) = gram_entry(a, b, grid, i, j);
  }
  return g;
}

Eigen::MatrixXcd gram(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, const QuadGrid& grid) {
  check_gram_shapes(a, b, grid);
  Eigen::MatrixXcd g(a.cols(), b.cols());
  const long total = a.cols() * b.cols();
  // each entry is summed in node order by one thread
#pragma omp parallel for schedule(dynamic, 16)
  for (long t = 0; t < total; ++t) {
    const long i = t / b.cols();
    const long j = t % b.cols();
    g(i, j) = gram_entry(a, b, grid, i, j);
  }
  return g;
}

cplx inner(const WaveFunction& a, const WaveFunction& b, const QuadGrid& grid) {
  return integrate([&](const HypersphericalNode& n) { return std::conj(a(n.x)) * b(n.x); }, grid);
}

double norm(const WaveFunction& f, const QuadGrid& grid) {
  return std::sqrt(std::max(0.0, inner(f, f, grid).real()));
}

// ---- spectrum ---------------------------------------------------------------

std::vector<SpectrumRow> spectrum(int n_max, const SpaceConfig& cfg) {
  cfg.validate();
  if (n_max < 0 || n_max > 20) throw DomainError("spectrum: n_max must be in [0, 20]");
  std::vector<SpectrumRow> rows;
  for (int n = 0; n <= n_max; ++n) {
    rows.push_back({n, SpectralLabel{n, 0, 0}.energy(cfg), (n + 1) * (n + 1)});
  }
  return rows;
}

// ---- contraction ------------------------------------------------------------

TestFunction bump_function(double r0, const Vec3& center, const Vec3& wave) {
  if (!(r0 > 0.0)) throw DomainError("bump_function: radius must be positive");
  TestFunction tf;
  std::ostringstream name;
  name << "bump(r0=" << r0 << ")";
  tf.name = name.str();
  tf.support_radius = center.norm() + r0;
  tf.jet = [=](const Vec3& e) {
    ChartJet j;
    const Vec3 d = e - center;
    const double s = d.squaredNorm() / (r0 * r0);
    if (s >= 1.0) return j;
    const double q = 1.0 / (1.0 - s);
    const double b = std::exp(-q);
    const double b1 = -b * q * q;                        // db/ds
    const double b2 = b * (q * q * q * q - 2.0 * q * q * q);  // d2b/ds2
    const Vec3 ds = 2.0 * d / (r0 * r0);
    const Vec3 gb = b1 * ds;
    const Mat3 hb = b2 * ds * ds.transpose() + b1 * 2.0 / (r0 * r0) * Mat3::Identity();
    const cplx w = std::polar(1.0, wave.dot(e));
    const Vec3c gw = cplx(0.0, 1.0) * w * wave.cast<cplx>();
    const Mat3c hw = -w * (wave * wave.transpose()).cast<cplx>();
    j.value = b * w;
    j.grad = w * gb.cast<cplx>() + b * gw;
    j.hess = w * hb.cast<cplx>() + gb.cast<cplx>() * gw.transpose() +
             gw * gb.cast<cplx>().transpose() + b * hw;
    return j;
  };
  return tf;
}

WaveFunction chart_wave_function(const TestFunction& tf) {
  auto jetf = tf.jet;
  return WaveFunction(
      [jetf](const Vec4& x, int order) {
        const ChartJet c = jetf(x.tail<3>());
        Jet4 j;
        j.value = c.value;
        if (order >= 1) j.grad.tail<3>() = c.grad;
        if (order >= 2) j.hess.block<3, 3>(1, 1) = c.hess;
        return j;
      },
      2);
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("loglog_slope: need >= 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ContractionReport contraction_study(const std::vector<double>& radii,
                                    const std::vector<TestFunction>& tests, const SpaceConfig& cfg,
                                    int box_n) {
  cfg.validate();
  if (radii.size() < 2) throw DomainError("contraction_study: need at least two radii");
  if (tests.empty()) throw DomainError("contraction_study: need at least one test function");
  if (box_n < 2) throw DomainError("contraction_study: box_n must be >= 2");
  double support = 0.0;
  for (const auto& tf : tests) support = std::max(support, tf.support_radius);
  for (double R : radii) {
    if (!(R > support)) {
      std::ostringstream msg;
      msg << "test-function support " << support << " is not compact inside the chart of radius " << R;
      throw DomainError(msg.str());
    }
  }

  // fixed box of evaluation points covering the supports
  std::vector<Vec3> box;
  for (int a = 0; a < box_n; ++a) {
    for (int b = 0; b < box_n; ++b) {
      for (int c = 0; c < box_n; ++c) {
        auto coord = [&](int k) { return support * (-1.0 + 2.0 * k / (box_n - 1)); };
        box.emplace_back(coord(a), coord(b), coord(c));
      }
    }
  }

  ContractionReport rep;
  rep.support_radius = support;
  rep.box_points = static_cast<int>(box.size());
  const double m = cfg.mass;
  for (double R : radii) {
    const SpaceConfig cr{R, m};
    ContractionRow row;
    row.radius = R;
    for (const auto& tf : tests) {
      const WaveFunction wf = chart_wave_function(tf);
      std::array<WaveFunction, 3> nu, pos;
      for (int i = 0; i < 3; ++i) {
        nu[i] = apply_nu(i, wf, cr);
        pos[i] = apply_position(i, wf, cr);
      }
      const WaveFunction h = apply_hamiltonian(wf, cr, HamiltonianForm::ViaNu);
      for (const Vec3& e : box) {
        Vec4 x;
        x << R * rho(ChartCoords{e, +1}, R), e;
        const ChartJet flat = tf.jet(e);
        for (int i = 0; i < 3; ++i) {
          const cplx flat_nu = cplx(0.0, -1.0 / m) * flat.grad(i);
          row.nu_deviation = std::max(row.nu_deviation, std::abs(nu[i](x) - flat_nu));
          row.position_deviation =
              std::max(row.position_deviation, std::abs(pos[i](x) - e(i) * flat.value));
        }
        const cplx flat_h = -0.5 / m * flat.hess.trace();
        row.hamiltonian_deviation = std::max(row.hamiltonian_deviation, std::abs(h(x) - flat_h));
      }
    }
    rep.position_max = std::max(rep.position_max, row.position_deviation);
    rep.rows.push_back(row);
  }
  std::vector<double> rs, dn, dh;
  for (const auto& r : rep.rows) {
    rs.push_back(r.radius);
    dn.push_back(r.nu_deviation);
    dh.push_back(r.hamiltonian_deviation);
  }
  rep.nu_slope = loglog_slope(rs, dn);
  rep.hamiltonian_slope = loglog_slope(rs, dh);
  rep.nu_decreasing = true;
  rep.hamiltonian_decreasing = true;
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    // ordered by the given radii
    const bool up = rs[i] > rs[i - 1];
    rep.nu_decreasing = rep.nu_decreasing && up && dn[i] < dn[i - 1];
    rep.hamiltonian_decreasing = rep.hamiltonian_decreasing && up && dh[i] < dh[i - 1];
  }
  return rep;
}

// ---- polarized wavefunctions ------------------------------------------------

double polarized_reduction_residual(const WaveFunction& f, const SpaceConfig& cfg, int points,
                                    std::uint64_t seed) {
  cfg.validate();
  const double R = cfg.radius;
  const double m = cfg.mass;
  std::mt19937_64 rng(seed);
  const double h = 1e-4 * R;
  double worst = 0.0;
  for (int p = 0; p < points; ++p) {
    const SigmaGroupElement g = random_element(rng, cfg, 0.6 * R);
    const int sign = g.rho_sign;
    auto big_psi = [&](const Vec8& c) -> cplx {
      const SigmaGroupElement e = from_coordinates(c, sign);
      const double r = rho(e.chart(), R);
      const double s = -m * (e.eps.dot(e.nu) + R * (r - 1.0) * e.z);
      return e.zeta * std::polar(1.0, s) * f.at_chart(e.chart(), R);
    };
    const Vec8 x = coordinates(g);
    Eigen::Matrix<cplx, 8, 1> grad;
    for (int c = 0; c < 8; ++c) grad(c) = fd::derivative(big_psi, x, c, h);
    const Mat8 zr = right_fields(g, cfg);
    const double r = rho(g.chart(), R);
    const cplx prefactor = g.zeta * std::polar(1.0, -m * (g.eps.dot(g.nu) + R * (r - 1.0) * g.z));
    const Vec4 xe = S3Point::from_chart(g.chart(), R).embedded(R);
    const cplx fv = f(xe);
    for (int a = 0; a < 8; ++a) {
      const cplx reduced = (zr.col(a).cast<cplx>().array() * grad.array()).sum() / prefactor;
      cplx expected;
      if (a < 3) {
        const DerivativeOptions opt{f.analytic_order() >= 1 ? Backend::Analytic
                                                            : Backend::FiniteDifference};
        expected = right_action_operator(a, f, cfg, opt)(xe);
      } else if (a < 6) {
        expected = cplx(0.0, -m) * g.eps(a - 3) * fv;
      } else if (a == kZ) {
        expected = cplx(0.0, -m * R * (r - 1.0)) * fv;
      } else {
        expected = cplx(0.0, 1.0) * fv;
      }
      worst = std::max(worst, std::abs(reduced - expected));
    }
  }
  return worst;
}

}  // namespace s3sigma
