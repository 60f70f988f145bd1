#include "s3sigma/classical.hpp"

#include "s3sigma/finite_diff.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace s3sigma {

EmbeddedState embed(const PhaseState& s, double radius) {
  const double r = rho(s.point, radius);
  if (std::abs(r) < kChartSingularity) {
    throw ChartSingularityError("embedding a velocity needs rho != 0 (chart equator)");
  }
  EmbeddedState e;
  e.x << radius * r, s.point.eps;
  e.v << -s.point.eps.dot(s.vel) / (radius * r), s.vel;
  return e;
}

PhaseState project(const EmbeddedState& e, double radius) {
  // keep the state exactly on the sphere before reading the chart
  const Vec4 x = radius * e.x.normalized();
  PhaseState s;
  s.point = ChartCoords{x.tail<3>(), x(0) < 0.0 ? -1 : +1};
  s.vel = e.v.tail<3>();
  return s;
}

double lagrangian(const PhaseState& s, const SpaceConfig& cfg) {
  return 0.5 * cfg.mass * s.vel.dot(metric(s.point, cfg.radius) * s.vel);
}

Vec3 momentum(const PhaseState& s, const SpaceConfig& cfg) {
  return cfg.mass * metric(s.point, cfg.radius) * s.vel;
}

double hamiltonian(const PhaseState& s, const SpaceConfig& cfg) {
  return 0.5 * cfg.mass * s.vel.dot(metric(s.point, cfg.radius) * s.vel);
}

double hamiltonian_from_momentum(const ChartCoords& c, const Vec3& p, const SpaceConfig& cfg) {
  return p.dot(metric_inverse(c, cfg.radius) * p) / (2.0 * cfg.mass);
}

double hamiltonian_from_theta(const PhaseState& s, const SpaceConfig& cfg) {
  const Vec3 th = theta_invariant(s, Side::Right, cfg.radius);
  return 0.5 * cfg.mass * th.squaredNorm();
}

Vec3 theta_invariant(const PhaseState& s, Side side, double radius) {
  return canonical_one_form(s.point, side, radius) * s.vel;
}

// theta^R = R Vec(conj(q) q-dot), theta^L = R Vec(q-dot conj(q)) with q = X / R.
Vec3 theta_invariant(const EmbeddedState& e, Side side, double radius) {
  const Vec4 q = e.x / radius;
  const Vec4 qd = e.v / radius;
  const Vec4 w = side == Side::Right ? quat_mul(quat_conj(q), qd) : quat_mul(qd, quat_conj(q));
  return radius * w.tail<3>();
}

double geodesic_frequency(const PhaseState& s, double radius) {
  return std::sqrt(s.vel.dot(metric(s.point, radius) * s.vel)) / radius;
}

double printed_frequency(const PhaseState& s, const SpaceConfig& cfg) {
  return std::sqrt(8.0 * hamiltonian(s, cfg) / (cfg.mass * cfg.radius * cfg.radius));
}

EmbeddedState geodesic_exact_embedded(const PhaseState& init, double t, const SpaceConfig& cfg) {
  const EmbeddedState e0 = embed(init, cfg.radius);
  const double omega = e0.v.norm() / cfg.radius;
  if (omega == 0.0) return e0;
  const double c = std::cos(omega * t);
  const double s = std::sin(omega * t);
  EmbeddedState e;
  e.x = e0.x * c + e0.v * (s / omega);
  e.v = e0.v * c - e0.x * (omega * s);
  return e;
}

PhaseState geodesic_exact(const PhaseState& init, double t, const SpaceConfig& cfg) {
  const EmbeddedState e0 = embed(init, cfg.radius);
  if (e0.v.norm() == 0.0) return init;
  return project(geodesic_exact_embedded(init, t, cfg), cfg.radius);
}

namespace {

struct Derivative8 {
  Vec4 dx;
  Vec4 dv;
};

Derivative8 geodesic_rhs(const Vec4& x, const Vec4& v, double radius) {
  return {v, -(v.squaredNorm() / (radius * radius)) * x};
}

InvariantSample invariants_of(const EmbeddedState& e, const SpaceConfig& cfg) {
  return {0.5 * cfg.mass * e.v.squaredNorm(), theta_invariant(e, Side::Right, cfg.radius),
          theta_invariant(e, Side::Left, cfg.radius)};
}

}  // namespace

Trajectory geodesic_integrate(const PhaseState& init, double t_end, int steps,
                              const SpaceConfig& cfg) {
  cfg.validate();
  if (steps < 10) throw DomainError("geodesic_integrate needs at least 10 steps");
  if (!std::isfinite(t_end)) throw DomainError("t_end must be finite");
  const double radius = cfg.radius;
  EmbeddedState e = embed(init, radius);
  const double dt = t_end / steps;
  const double omega = e.v.norm() / radius;

  Trajectory traj;
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);
  traj.invariants_log.reserve(steps + 1);
  if (omega * std::abs(dt) > 0.5) {
    std::ostringstream msg;
    msg << "accuracy warning: omega*dt = " << omega * std::abs(dt) << " exceeds 0.5";
    traj.warnings.push_back(msg.str());
  }

  auto record = [&](double t) {
    traj.times.push_back(t);
    traj.states.push_back(project(e, radius));
    traj.invariants_log.push_back(invariants_of(e, cfg));
  };
  record(0.0);
  for (int n = 0; n < steps; ++n) {
    const Derivative8 k1 = geodesic_rhs(e.x, e.v, radius);
    const Derivative8 k2 = geodesic_rhs(e.x + 0.5 * dt * k1.dx, e.v + 0.5 * dt * k1.dv, radius);
    const Derivative8 k3 = geodesic_rhs(e.x + 0.5 * dt * k2.dx, e.v + 0.5 * dt * k2.dv, radius);
    const Derivative8 k4 = geodesic_rhs(e.x + dt * k3.dx, e.v + dt * k3.dv, radius);
    e.x += dt / 6.0 * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
    e.v += dt / 6.0 * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv);
    // constraint: |X| = R and V tangent
    e.x *= radius / e.x.norm();
    e.v -= (e.v.dot(e.x) / (radius * radius)) * e.x;
    record((n + 1) * dt);
  }
  return traj;
}

std::array<Mat3, 3> christoffel(const ChartCoords& c, double radius, double step) {
  const double h = step > 0.0 ? step : 1e-5 * radius;
  if (c.eps.norm() + 2.0 * std::sqrt(3.0) * h >= radius) {
    throw StencilError("christoffel stencil leaves the chart");
  }
  const int sign = c.rho_sign;
  auto g_of = [&](const Vec3& e) -> Eigen::Matrix<double, 9, 1> {
    const Mat3 g = metric(ChartCoords{e, sign}, radius);
    return Eigen::Map<const Eigen::Matrix<double, 9, 1>>(g.data());
  };
  std::array<Mat3, 3> dg;  // dg[k](m, l) = d_k g_ml
  for (int k = 0; k < 3; ++k) {
    const Eigen::Matrix<double, 9, 1> d = fd::derivative(g_of, c.eps, k, h);
    dg[k] = Eigen::Map<const Mat3>(d.data());
  }
  const Mat3 ginv = metric_inverse(c, radius);
  std::array<Mat3, 3> gamma;
  for (int j = 0; j < 3; ++j) {
    gamma[j].setZero();
    for (int k = 0; k < 3; ++k) {
      for (int l = 0; l < 3; ++l) {
        double acc = 0.0;
        for (int m = 0; m < 3; ++m) {
          acc += ginv(j, m) * (dg[k](m, l) + dg[l](m, k) - dg[m](k, l));
        }
        gamma[j](k, l) = 0.5 * acc;
      }
    }
  }
  return gamma;
}

double geodesic_equation_residual(const ChartCoords& c, const Vec3& vel, const Vec3& acc,
                                  double radius) {
  const auto gamma = christoffel(c, radius);
  Vec3 r = acc;
  for (int j = 0; j < 3; ++j) r(j) += vel.dot(gamma[j] * vel);
  return r.cwiseAbs().maxCoeff();
}

Vec3 darboux_momentum(const ChartCoords& eps0, const Vec3& theta, const SpaceConfig& cfg) {
  return cfg.mass * canonical_one_form(eps0, Side::Right, cfg.radius).transpose() * theta;
}

SolutionPoint hj_transform(const PhaseState& s, double t, const SpaceConfig& cfg) {
  const EmbeddedState e0 = geodesic_exact_embedded(s, -t, cfg);
  const PhaseState init = project(e0, cfg.radius);
  SolutionPoint sp;
  sp.eps0 = init.point;
  sp.theta0 = theta_invariant(e0, Side::Right, cfg.radius);
  sp.pi0 = momentum(init, cfg);
  return sp;
}

PhaseState hj_inverse(const SolutionPoint& sp, double t, const SpaceConfig& cfg) {
  // theta^R Z^R = 1 in the (label, component) layout, so eps-dot = Z^R theta
  const PhaseState init{sp.eps0, dual_field(sp.eps0, Side::Right, cfg.radius) * sp.theta0};
  return geodesic_exact(init, t, cfg);
}

CanonicalPoint canonical_point(const SolutionPoint& sp) { return {sp.eps0, sp.pi0}; }

Vec3 bracket_vartheta(const ChartCoords& eps, const Vec3& pi, const SpaceConfig& cfg) {
  return dual_field(eps, Side::Right, cfg.radius) * pi / cfg.mass;
}

PhaseFunction basic_function(int index, int rho_sign, const SpaceConfig& cfg) {
  if (index < 0 || index > 6) throw DomainError("basic function index must be in [0, 6]");
  if (index < 3) return [index](const Vec3& e, const Vec3&) { return e(index); };
  if (index < 6) {
    const int j = index - 3;
    return [j, rho_sign, cfg](const Vec3& e, const Vec3& p) {
      return bracket_vartheta(ChartCoords{e, rho_sign}, p, cfg)(j);
    };
  }
  return [rho_sign, cfg](const Vec3& e, const Vec3&) {
    return rho(ChartCoords{e, rho_sign}, cfg.radius);
  };
}

std::string basic_function_name(int index) {
  static const char* names[] = {"eps1",   "eps2",   "eps3", "theta1",
                                "theta2", "theta3", "rho"};
  return names[index];
}

namespace {

using Vec6 = Eigen::Matrix<double, 6, 1>;

double steps_or_default(double requested, double fallback) {
  return requested > 0.0 ? requested : fallback;
}

}  // namespace

double poisson_bracket(const PhaseFunction& f, const PhaseFunction& g, const CanonicalPoint& at,
                       const SpaceConfig& cfg, double eps_step, double pi_step) {
  const double he = steps_or_default(eps_step, 1e-5 * cfg.radius);
  const double hp = steps_or_default(pi_step, 1e-5 * std::max(1.0, at.pi.norm()));
  if (at.eps.eps.norm() + 2.0 * std::sqrt(3.0) * he >= cfg.radius) {
    throw StencilError("poisson_bracket stencil leaves the chart");
  }
  // scale the pi block so one isotropic stencil serves both blocks
  const double scale = hp / he;
  Vec6 x;
  x << at.eps.eps, at.pi / scale;
  auto lift = [&](const PhaseFunction& fn) {
    return [fp = &fn, scale](const Vec6& y) { return (*fp)(y.head<3>(), scale * y.tail<3>()); };
  };
  const auto fl = lift(f);
  const auto gl = lift(g);
  double out = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double dfe = fd::derivative(fl, x, i, he);
    const double dfp = fd::derivative(fl, x, 3 + i, he) / scale;
    const double dge = fd::derivative(gl, x, i, he);
    const double dgp = fd::derivative(gl, x, 3 + i, he) / scale;
    out += dfe * dgp - dfp * dge;
  }
  return out;
}

PhaseFunction bracket_function(PhaseFunction f, PhaseFunction g, int rho_sign,
                               const SpaceConfig& cfg, double eps_step, double pi_step) {
  return [f = std::move(f), g = std::move(g), rho_sign, cfg, eps_step, pi_step](
             const Vec3& e, const Vec3& p) {
    return poisson_bracket(f, g, CanonicalPoint{ChartCoords{e, rho_sign}, p}, cfg, eps_step,
                           pi_step);
  };
}

BasicAlgebraReport verify_basic_algebra(int sample_count, const SpaceConfig& cfg,
                                        std::uint64_t seed, int jacobi_points) {
  cfg.validate();
  if (sample_count < 1) throw DomainError("verify_basic_algebra needs at least one sample");
  const double R = cfg.radius;
  const double m = cfg.mass;

  BasicAlgebraReport rep;
  rep.samples = sample_count;
  rep.seed = seed;
  rep.radius = R;
  rep.mass = m;
  rep.display_applies = (m == 1.0);
  rep.theta_theta_display = 2.0 * m / R;
  rep.theta_theta_derived = 2.0 / (m * R);
  rep.theta_rho_display = 1.0;
  rep.theta_rho_derived = 1.0 / m;
  rep.families = {{"{eps^i, eps^j} = 0", 0, 0},
                  {"{eps^i, theta_j} = (1/R) eta^i_jk eps^k + rho delta^i_j", 0, 0},
                  {"{theta_i, theta_j} = c eta^k_ij theta_k", 0, 0},
                  {"{eps^i, rho} = 0", 0, 0},
                  {"{theta_i, rho} = c' eps_i / R^2", 0, 0}};

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  auto random_point = [&](double max_fraction) {
    Vec3 e;
    do {
      e = Vec3(unit(rng), unit(rng), unit(rng));
    } while (e.squaredNorm() > 1.0);
    CanonicalPoint p;
    p.eps = ChartCoords{max_fraction * R * e, unit(rng) < 0.0 ? -1 : +1};
    p.pi = m * Vec3(unit(rng), unit(rng), unit(rng));
    return p;
  };

  const int nfun = 7;
  // bracket values per (pair, sample) for the closure fit, and basis values
  std::vector<std::array<double, 7>> basis_values;
  std::vector<std::array<std::array<double, 7>, 7>> bracket_values;
  double tt_num = 0.0, tt_den = 0.0, tr_num = 0.0, tr_den = 0.0;

  for (int s = 0; s < sample_count; ++s) {
    const CanonicalPoint p = random_point(0.8);
    const int sign = p.eps.rho_sign;
    std::array<PhaseFunction, 7> fn;
    std::array<double, 7> val{};
    for (int a = 0; a < nfun; ++a) {
      fn[a] = basic_function(a, sign, cfg);
      val[a] = fn[a](p.eps.eps, p.pi);
    }
    std::array<std::array<double, 7>, 7> br{};
    for (int a = 0; a < nfun; ++a) {
      for (int b = 0; b < nfun; ++b) {
        br[a][b] = a == b ? 0.0 : poisson_bracket(fn[a], fn[b], p, cfg);
      }
    }
    basis_values.push_back(val);
    bracket_values.push_back(br);

    const double r = val[6];
    const Vec3 eps = p.eps.eps;
    const Vec3 th(val[3], val[4], val[5]);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        rep.families[0].max_residual_display =
            std::max(rep.families[0].max_residual_display, std::abs(br[i][j]));
        double display = (i == j ? r : 0.0);
        for (int k = 0; k < 3; ++k) display += levi_civita(i, j, k) * eps(k) / R;
        rep.families[1].max_residual_display =
            std::max(rep.families[1].max_residual_display, std::abs(br[i][3 + j] - display));
        rep.families[1].max_residual_derived =
            std::max(rep.families[1].max_residual_derived, std::abs(br[i][3 + j] - display / m));

        double eta_theta = 0.0;
        for (int k = 0; k < 3; ++k) eta_theta += levi_civita(i, j, k) * th(k);
        const double btt = br[3 + i][3 + j];
        rep.families[2].max_residual_display = std::max(
            rep.families[2].max_residual_display, std::abs(btt - rep.theta_theta_display * eta_theta));
        rep.families[2].max_residual_derived =
            std::max(rep.families[2].max_residual_derived,
                     std::abs(btt - rep.theta_theta_derived * eta_theta));
        tt_num += btt * eta_theta;
        tt_den += eta_theta * eta_theta;
        rep.antisymmetry_max = std::max(rep.antisymmetry_max, std::abs(btt + br[3 + j][3 + i]));
      }
      rep.families[3].max_residual_display =
          std::max(rep.families[3].max_residual_display, std::abs(br[i][6]));
      const double btr = br[3 + i][6];
      const double shape = eps(i) / (R * R);
      rep.families[4].max_residual_display = std::max(
          rep.families[4].max_residual_display, std::abs(btr - rep.theta_rho_display * shape));
      rep.families[4].max_residual_derived = std::max(
          rep.families[4].max_residual_derived, std::abs(btr - rep.theta_rho_derived * shape));
      tr_num += btr * shape;
      tr_den += shape * shape;
    }
  }
  rep.families[0].max_residual_derived = rep.families[0].max_residual_display;
  rep.families[3].max_residual_derived = rep.families[3].max_residual_display;
  rep.theta_theta_measured = tt_den > 0.0 ? tt_num / tt_den : 0.0;
  rep.theta_rho_measured = tr_den > 0.0 ? tr_num / tr_den : 0.0;

  // closure: each bracket column is fitted by constant coefficients over the
  // seven basis functions across all samples
  if (sample_count >= nfun) {
    Eigen::MatrixXd design(sample_count, nfun);
    for (int s = 0; s < sample_count; ++s) {
      for (int c = 0; c < nfun; ++c) design(s, c) = basis_values[s][c];
    }
    const auto qr = design.colPivHouseholderQr();
    for (int a = 0; a < nfun; ++a) {
      for (int b = a + 1; b < nfun; ++b) {
        Eigen::VectorXd rhs(sample_count);
        for (int s = 0; s < sample_count; ++s) rhs(s) = bracket_values[s][a][b];
        const Eigen::VectorXd coef = qr.solve(rhs);
        rep.closure_max = std::max(rep.closure_max, (design * coef - rhs).cwiseAbs().maxCoeff());
      }
    }
  }

  // Jacobi identity with nested brackets; a wider step keeps the nested
  // stencil above roundoff
  const double he = 1e-3 * R;
  rep.jacobi_points = jacobi_points;
  for (int s = 0; s < jacobi_points; ++s) {
    const CanonicalPoint p = random_point(0.7);
    const int sign = p.eps.rho_sign;
    const double hp = 1e-3 * std::max(1.0, p.pi.norm());
    std::array<PhaseFunction, 7> fn;
    for (int a = 0; a < nfun; ++a) fn[a] = basic_function(a, sign, cfg);
    for (int a = 0; a < nfun; ++a) {
      for (int b = a + 1; b < nfun; ++b) {
        for (int c = b + 1; c < nfun; ++c) {
          const auto bc = bracket_function(fn[b], fn[c], sign, cfg, he, hp);
          const auto ca = bracket_function(fn[c], fn[a], sign, cfg, he, hp);
          const auto ab = bracket_function(fn[a], fn[b], sign, cfg, he, hp);
          const double jac = poisson_bracket(fn[a], bc, p, cfg, he, hp) +
                             poisson_bracket(fn[b], ca, p, cfg, he, hp) +
                             poisson_bracket(fn[c], ab, p, cfg, he, hp);
          rep.jacobi_max = std::max(rep.jacobi_max, std::abs(jac));
          if (a == 0 && b == 4 && c == 5) {
            rep.jacobi_e1_t2_t3_max = std::max(rep.jacobi_e1_t2_t3_max, std::abs(jac));
          }
        }
      }
    }
  }
  return rep;
}

}  // namespace s3sigma
