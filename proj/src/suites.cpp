#include "s3sigma/suites.hpp"

#include "s3sigma/classical.hpp"
#include "s3sigma/sigma_group.hpp"

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace s3sigma {

using json = nlohmann::ordered_json;

namespace {

constexpr double kPi = std::numbers::pi;

// Fixed suite indices for seed derivation.
enum SuiteIndex {
  kGeodesicSeed = 1,
  kGroupSeed,
  kLieSeed,
  kQuantizationSeed,
  kPoissonSeed,
  kOperatorSeed,
  kHermiticitySeed,
};

json vec_json(const Vec3& v) { return json::array({v(0), v(1), v(2)}); }

Check below(std::string name, double value, double tol) {
  return {std::move(name), value, tol, Check::Rule::Below};
}

std::string label_string(const SpectralLabel& l) {
  return std::to_string(l.n) + "," + std::to_string(l.l) + "," + std::to_string(l.m_z);
}

int or_default(int v, int fallback) { return v > 0 ? v : fallback; }

QuadGrid run_grid(const RunConfig& run) {
  return build_grid(run.grid[0], run.grid[1], run.grid[2], run.space());
}

// ||lhs - e f|| / ||f|| over the grid
double eigen_residual(const WaveFunction& lhs, const WaveFunction& f, double e,
                      const QuadGrid& g) {
  const double num = integrate([&](const HypersphericalNode& n) {
                       return cplx(std::norm(lhs(n.x) - e * f(n.x)));
                     },
                     g)
                         .real();
  const double den =
      integrate([&](const HypersphericalNode& n) { return cplx(std::norm(f(n.x))); }, g).real();
  return std::sqrt(std::max(0.0, num) / den);
}

// sqrt(sum_nodes |col|^2 w) for each column
Eigen::VectorXd column_norms(const Eigen::MatrixXcd& v, const QuadGrid& g) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(v.cols());
  for (Eigen::Index c = 0; c < v.cols(); ++c) {
    double s = 0.0;
    for (Eigen::Index r = 0; r < v.rows(); ++r) s += std::norm(v(r, c)) * g.nodes[r].weight;
    out(c) = std::sqrt(s);
  }
  return out;
}

Vec4 random_sphere_point(std::mt19937_64& rng, double radius) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Vec4 x(nd(rng), nd(rng), nd(rng), nd(rng));
  return radius * x.normalized();
}

}  // namespace

// ---- RunConfig --------------------------------------------------------------

std::map<std::string, double> RunConfig::default_tolerances() {
  return {
      {"angular", 1e-7},     {"backend", 1e-6},     {"closed_form", 1e-8},
      {"commutator", 1e-6},  {"conservation", 1e-8}, {"geodesic_equation", 1e-7},
      {"gram", 1e-9},        {"group", 1e-12},      {"hermiticity", 1e-8},
      {"jacobi", 1e-6},      {"leakage", 1e-8},     {"lie", 1e-7},
      {"poisson", 1e-7},     {"polarized", 1e-7},   {"quantization", 1e-8},
      {"slope", 0.3},        {"spectrum", 1e-7},    {"spectrum_fd", 1e-4},
      {"su2", 1e-6},         {"volume", 1e-12},
  };
}

double RunConfig::tol(const std::string& name) const {
  auto it = tolerances.find(name);
  if (it == tolerances.end()) throw DomainError("unknown tolerance '" + name + "'");
  return it->second;
}

void RunConfig::validate() const {
  space().validate();
  const auto known = default_tolerances();
  for (const auto& [name, v] : tolerances) {
    if (!known.count(name)) throw DomainError("unknown tolerance '" + name + "'");
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("tolerance '" + name + "' must be > 0");
  }
  for (const auto& [name, v] : known) {
    if (!tolerances.count(name)) throw DomainError("missing tolerance '" + name + "'");
  }
  if (grid[0] < 2 || grid[1] < 2 || grid[2] < 4) {
    throw DomainError("grid orders must be at least 2,2,4");
  }
  if (samples < 0) throw DomainError("samples must be positive");
  if (n_max < 0 || n_max > 20) throw DomainError("n_max must be in [0, 20]");
  if (steps < 1) throw DomainError("steps must be positive");
  if (!(omega_t > 0.0)) throw DomainError("omega_t must be positive");
  if (!(eps0.norm() < 1.0)) throw DomainError("eps0 must lie inside the chart (|eps0| < 1)");
  if (!vel0.allFinite()) throw DomainError("vel0 must be finite");
  if (radii.size() < 2) throw DomainError("need at least two radii");
  for (double r : radii) {
    if (!(r > 0.0)) throw DomainError("radii must be positive");
  }
  label.validate();
}

json RunConfig::to_json() const {
  json t = json::object();
  for (const auto& [k, v] : tolerances) t[k] = v;
  return json{
      {"radius", radius},
      {"mass", mass},
      {"tolerances", t},
      {"grid", json::array({grid[0], grid[1], grid[2]})},
      {"seed", seed},
      {"out", out},
      {"format", format == OutputFormat::Json ? "json" : "csv"},
      {"samples", samples},
      {"n_max", n_max},
      {"steps", steps},
      {"omega_t", omega_t},
      {"eps0", vec_json(eps0)},
      {"vel0", vec_json(vel0)},
      {"radii", radii},
      {"label", json::array({label.n, label.l, label.m_z})},
  };
}

std::uint64_t suite_seed(const RunConfig& run, int suite_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(run.seed), static_cast<std::uint32_t>(run.seed >> 32),
                    static_cast<std::uint32_t>(suite_index)};
  std::mt19937_64 gen(seq);
  return gen();
}

// ---- checks, tables, reports ------------------------------------------------

bool Check::pass() const {
  switch (rule) {
    case Rule::Below: return value < tolerance;
    case Rule::AtMost: return value <= tolerance;
    case Rule::Above: return value > tolerance;
  }
  return false;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void Table::write_csv(std::ostream& out) const {
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
}

bool SuiteResult::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass(); });
}

json SuiteResult::to_json() const {
  json cs = json::array();
  for (const Check& c : checks) {
    const char* rule = c.rule == Check::Rule::Below ? "<" : c.rule == Check::Rule::AtMost ? "<=" : ">";
    cs.push_back({{"name", c.name}, {"value", c.value}, {"rule", rule}, {"tolerance", c.tolerance},
                  {"pass", c.pass()}});
  }
  return json{{"name", name}, {"passed", passed()}, {"checks", cs}, {"data", data}};
}

json make_report(const std::string& command, const RunConfig& run,
                 const std::vector<SuiteResult>& suites) {
  json arr = json::array();
  bool ok = true;
  for (const auto& s : suites) {
    arr.push_back(s.to_json());
    ok = ok && s.passed();
  }
  return json{{"suite_version", kSuiteVersion},
              {"command", command},
              {"config", run.to_json()},
              {"passed", ok},
              {"suites", arr}};
}

void write_atomic(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f << text;
    f.flush();
    if (!f) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw std::runtime_error("write to " + tmp.string() + " failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw std::runtime_error("cannot rename onto " + path);
  }
}

// ---- suites -----------------------------------------------------------------

SuiteResult suite_volume(const RunConfig& run) {
  SuiteResult r{"volume"};
  const QuadGrid g = run_grid(run);
  const double vol = integrate([](const HypersphericalNode&) { return cplx(1.0); }, g).real();
  const double exact = 2.0 * kPi * kPi * std::pow(run.radius, 3);
  r.checks.push_back(below("volume_relative_error", std::abs(vol - exact) / exact, run.tol("volume")));
  r.data = {{"volume", vol}, {"exact", exact}, {"nodes", g.nodes.size()}};
  return r;
}

SuiteResult suite_geodesic(const RunConfig& run) {
  SuiteResult r{"geodesic"};
  const SpaceConfig cfg = run.space();
  const double R = cfg.radius;
  PhaseState st;
  st.point = ChartCoords{R * run.eps0, +1};
  st.vel = R * run.vel0;

  const double w = geodesic_frequency(st, R);
  const double t_end = w > 0.0 ? run.omega_t / w : run.omega_t;
  const Trajectory tr = geodesic_integrate(st, t_end, run.steps, cfg);

  const InvariantSample& i0 = tr.invariants_log.front();
  double dh = 0.0, dth = 0.0;
  for (const auto& inv : tr.invariants_log) {
    dh = std::max(dh, std::abs(inv.energy - i0.energy));
    dth = std::max({dth, (inv.theta_right - i0.theta_right).cwiseAbs().maxCoeff(),
                    (inv.theta_left - i0.theta_left).cwiseAbs().maxCoeff()});
  }
  if (i0.energy > 0.0) dh /= i0.energy;

  const EmbeddedState exact = geodesic_exact_embedded(st, t_end, cfg);
  const PhaseState& end = tr.states.back();
  const Vec4 xe(end.point.rho_sign * std::sqrt(std::max(0.0, R * R - end.point.eps.squaredNorm())),
                end.point.eps(0), end.point.eps(1), end.point.eps(2));
  const double endpoint = (xe - exact.x).cwiseAbs().maxCoeff() / R;

  // geodesic equation along the closed form at 50 seeded times, away from the
  // chart equator; then the same with the printed frequency
  std::mt19937_64 rng(suite_seed(run, kGeodesicSeed));
  std::uniform_real_distribution<double> ut(0.0, t_end);
  const EmbeddedState e0 = embed(st, R);
  const double wp = printed_frequency(st, cfg);
  double eq_max = 0.0;
  double printed_min = std::numeric_limits<double>::infinity();
  int accepted = 0, printed_accepted = 0;
  for (int attempt = 0; attempt < 100000 && (accepted < 50 || printed_accepted < 50); ++attempt) {
    const double t = ut(rng);
    if (accepted < 50) {
      const PhaseState p = geodesic_exact(st, t, cfg);
      if (std::abs(rho(p.point, R)) >= 0.2) {
        eq_max = std::max(eq_max, geodesic_equation_residual(p.point, p.vel, -w * w * p.point.eps, R));
        ++accepted;
      }
    }
    if (printed_accepted < 50 && wp > 0.0) {
      // the closed form with the initial data kept and the frequency replaced
      const Vec4 x = e0.x * std::cos(wp * t) + e0.v / wp * std::sin(wp * t);
      const Vec4 v = -e0.x * wp * std::sin(wp * t) + e0.v * std::cos(wp * t);
      const ChartCoords c{x.tail<3>(), +1};
      if (c.eps.norm() < R && std::abs(rho(c, R)) >= 0.2) {
        printed_min = std::min(printed_min,
                               geodesic_equation_residual(c, v.tail<3>(), -wp * wp * c.eps, R));
        ++printed_accepted;
      }
    }
  }

  r.checks.push_back(below("energy_relative_drift", dh, run.tol("conservation")));
  r.checks.push_back(below("theta_drift", dth, run.tol("conservation")));
  r.checks.push_back(below("endpoint_vs_closed_form", endpoint, run.tol("closed_form")));
  r.checks.push_back(below("geodesic_equation_residual", eq_max, run.tol("geodesic_equation")));

  r.data = {
      {"omega", w},
      {"t_end", t_end},
      {"steps", run.steps},
      {"energy", i0.energy},
      {"max_energy_drift", dh},
      {"max_theta_drift", dth},
      {"closed_form_deviation", endpoint},
      {"equation_samples", accepted},
      {"equation_residual_max", eq_max},
      {"printed_frequency",
       {{"omega_printed", wp},
        {"ratio", w > 0.0 ? wp / w : 0.0},
        {"samples", printed_accepted},
        {"residual_min", printed_accepted ? printed_min : 0.0},
        {"fails_equation", printed_accepted > 0 && printed_min > run.tol("geodesic_equation")}}},
      {"warnings", tr.warnings},
  };

  r.table.header = {"t", "eps1", "eps2", "eps3", "vel1", "vel2", "vel3", "H",
                    "thetaR1", "thetaR2", "thetaR3", "thetaL1", "thetaL2", "thetaL3"};
  for (std::size_t k = 0; k < tr.states.size(); ++k) {
    const PhaseState& s = tr.states[k];
    const InvariantSample& inv = tr.invariants_log[k];
    std::vector<std::string> row{format_number(tr.times[k])};
    for (int i = 0; i < 3; ++i) row.push_back(format_number(s.point.eps(i)));
    for (int i = 0; i < 3; ++i) row.push_back(format_number(s.vel(i)));
    row.push_back(format_number(inv.energy));
    for (int i = 0; i < 3; ++i) row.push_back(format_number(inv.theta_right(i)));
    for (int i = 0; i < 3; ++i) row.push_back(format_number(inv.theta_left(i)));
    r.table.rows.push_back(std::move(row));
  }
  return r;
}

SuiteResult suite_group_axioms(const RunConfig& run) {
  SuiteResult r{"group_axioms"};
  const int samples = or_default(run.samples, 1000);
  const GroupAxiomsReport rep = check_group_axioms(samples, run.space(), suite_seed(run, kGroupSeed));
  const double tol = run.tol("group");
  r.checks.push_back(below("associativity", rep.associativity_max, tol));
  r.checks.push_back(below("inverse", rep.inverse_max, tol));
  r.checks.push_back(below("identity", rep.identity_max, tol));
  r.checks.push_back(below("inverse_involution", rep.involution_max, tol));
  r.checks.push_back(below("su2_sector_vs_quaternions", rep.su2_sector_max, tol));
  r.data = {{"samples", rep.samples}};
  return r;
}

SuiteResult suite_lie_algebra(const RunConfig& run) {
  SuiteResult r{"lie_algebra"};
  const LieAlgebraReport rep = check_lie_algebra(20, run.space(), suite_seed(run, kLieSeed));
  const double tol = run.tol("lie");
  r.checks.push_back(below("right_structure_constants", rep.right_table_max, tol));
  r.checks.push_back(below("left_right_commute", rep.left_right_max, tol));
  r.checks.push_back(below("left_fields_vs_group_law", rep.left_fields_max, tol));
  r.checks.push_back(below("right_fields_vs_group_law", rep.right_fields_max, tol));
  auto pair = [](double measured, double expected) {
    return json{{"measured", measured}, {"expected", expected}};
  };
  r.data = {
      {"points", rep.points},
      {"coefficients",
       {{"[Z_eps1, Z_eps2] on Z_eps3", pair(rep.ee_measured, rep.ee_expected)},
        {"[Z_eps1, Z_nu2] on Z_nu3", pair(rep.en_nu_measured, rep.en_nu_expected)},
        {"[Z_eps1, Z_nu1] on Z_z", pair(rep.en_z_measured, rep.en_z_expected)},
        {"[Z_eps1, Z_nu1] on Xi", pair(rep.en_xi_measured, rep.en_xi_expected)},
        {"[Z_eps1, Z_z] on Z_nu1", pair(rep.ez_measured, rep.ez_expected)}}},
      {"table", rep.table},
  };
  return r;
}

SuiteResult suite_quantization_form(const RunConfig& run) {
  SuiteResult r{"quantization_form"};
  const SpaceConfig cfg = run.space();
  const std::uint64_t seed = suite_seed(run, kQuantizationSeed);
  const QuantizationFormReport rep = check_quantization_form(100, cfg, seed);
  const double tol = run.tol("quantization");
  r.checks.push_back(below("theta_of_xi_minus_one", rep.theta_xi_max, tol));
  r.checks.push_back(below("theta_on_left_eps_nu", rep.theta_left_nu_eps_max, tol));
  r.checks.push_back(below("z_contract_theta", rep.z_theta_max, tol));
  r.checks.push_back(below("z_contract_dtheta", rep.z_dtheta_max, tol));
  r.checks.push_back(below("xi_contract_dtheta", rep.xi_dtheta_max, tol));
  r.checks.push_back({"nu1_contract_dtheta_min", rep.nu1_dtheta_min, tol, Check::Rule::Above});
  r.checks.push_back(below("dtheta_closed_vs_numeric", rep.dtheta_closed_vs_numeric, tol));
  r.checks.push_back(below("noether_table", rep.noether_contraction_max, tol));
  r.checks.push_back(below("noether_invariance_along_z", rep.noether_z_flow_max, tol));
  r.checks.push_back(below("quotient_vs_classical", rep.quotient_max, tol));
  r.checks.push_back(below("symplectic_form", rep.symplectic_max, tol));

  // the invariant table at a few seeded elements
  std::mt19937_64 rng(seed);
  json rows = json::array();
  for (int k = 0; k < 3; ++k) {
    const SigmaGroupElement g = random_element(rng, cfg, 0.9 * cfg.radius);
    const auto inv = noether_invariants(g, cfg);
    rows.push_back({{"eps", vec_json(g.eps)},
                    {"nu", vec_json(g.nu)},
                    {"z", g.z},
                    {"invariants", std::vector<double>(inv.data(), inv.data() + inv.size())}});
  }
  r.data = {
      {"points", rep.points},
      {"invariant_formulas",
       {"P_eps_i = m (rho nu_i + (eps x nu)_i / R - z eps_i / R)",
        "P_nu_i = -m eps_i", "P_z = -m R (rho - 1)"}},
      {"invariant_samples", rows},
  };
  return r;
}

SuiteResult suite_poisson(const RunConfig& run) {
  SuiteResult r{"poisson"};
  const int samples = or_default(run.samples, 100);
  const BasicAlgebraReport rep =
      verify_basic_algebra(samples, run.space(), suite_seed(run, kPoissonSeed), 10);
  static const char* keys[] = {"eps_eps", "eps_theta", "theta_theta", "eps_rho", "theta_rho"};
  const double tol = run.tol("poisson");
  for (std::size_t i = 0; i < rep.families.size(); ++i) {
    r.checks.push_back(below(std::string("family_") + keys[i], rep.family_residual(i), tol));
  }
  r.checks.push_back(below("antisymmetry", rep.antisymmetry_max, tol));
  r.checks.push_back(below("closure", rep.closure_max, tol));
  r.checks.push_back(below("jacobi", rep.jacobi_max, run.tol("jacobi")));

  json fams = json::array();
  for (std::size_t i = 0; i < rep.families.size(); ++i) {
    fams.push_back({{"family", rep.families[i].name},
                    {"residual_display", rep.families[i].max_residual_display},
                    {"residual_mass_corrected", rep.families[i].max_residual_derived}});
  }
  r.data = {
      {"samples", rep.samples},
      {"jacobi_points", rep.jacobi_points},
      {"display_applies", rep.display_applies},
      {"families", fams},
      {"theta_theta_coefficient",
       {{"measured", rep.theta_theta_measured},
        {"display", rep.theta_theta_display},
        {"mass_corrected", rep.theta_theta_derived}}},
      {"theta_rho_coefficient",
       {{"measured", rep.theta_rho_measured},
        {"display", rep.theta_rho_display},
        {"mass_corrected", rep.theta_rho_derived}}},
      {"jacobi_eps1_theta2_theta3", rep.jacobi_e1_t2_t3_max},
  };
  return r;
}

SuiteResult suite_spectrum(const RunConfig& run) {
  SuiteResult r{"spectrum"};
  const SpaceConfig cfg = run.space();
  const QuadGrid g = run_grid(run);
  const Basis basis(run.n_max, cfg);
  const DerivativeOptions fd{Backend::FiniteDifference};

  double h_max = 0.0, h_lb_max = 0.0, h_fd_max = 0.0, j2_max = 0.0, j3_max = 0.0, norm_max = 0.0;
  r.table.header = {"n", "l", "m_z", "E", "norm_residual", "H_residual", "J2_residual", "J3_residual"};
  json fd_rows = json::array();
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const SpectralLabel& lab = basis.label(i);
    const WaveFunction& f = basis.function(i);
    const double e = lab.energy(cfg);
    const double nr = std::abs(norm(f, g) - 1.0);
    const double hr = eigen_residual(apply_hamiltonian(f, cfg, HamiltonianForm::ViaNu), f, e, g);
    const double hlb =
        eigen_residual(apply_hamiltonian(f, cfg, HamiltonianForm::LaplaceBeltrami), f, e, g);
    const double hfd =
        eigen_residual(apply_hamiltonian(f, cfg, HamiltonianForm::LaplaceBeltrami, fd), f, e, g);
    const double j2 = eigen_residual(apply_J_squared(f, cfg), f, lab.l * (lab.l + 1.0), g);
    const double j3 = eigen_residual(apply_J(2, f, cfg), f, lab.m_z, g);
    norm_max = std::max(norm_max, nr);
    h_max = std::max(h_max, hr);
    h_lb_max = std::max(h_lb_max, hlb);
    h_fd_max = std::max(h_fd_max, hfd);
    j2_max = std::max(j2_max, j2);
    j3_max = std::max(j3_max, j3);
    r.table.rows.push_back({std::to_string(lab.n), std::to_string(lab.l), std::to_string(lab.m_z),
                            format_number(e), format_number(nr), format_number(hr),
                            format_number(j2), format_number(j3)});
    fd_rows.push_back({{"label", label_string(lab)}, {"H_residual_laplace_beltrami", hlb},
                       {"H_residual_finite_difference", hfd}});
  }
  r.checks.push_back(below("H_residual_analytic", h_max, run.tol("spectrum")));
  r.checks.push_back(below("H_residual_laplace_beltrami", h_lb_max, run.tol("spectrum")));
  r.checks.push_back(below("H_residual_finite_difference", h_fd_max, run.tol("spectrum_fd")));
  r.checks.push_back(below("J2_residual", j2_max, run.tol("angular")));
  r.checks.push_back(below("J3_residual", j3_max, run.tol("angular")));
  r.checks.push_back(below("norm_residual", norm_max, run.tol("gram")));

  json levels = json::array();
  for (const SpectrumRow& row : spectrum(run.n_max, cfg)) {
    levels.push_back({{"n", row.n}, {"energy", row.energy}, {"degeneracy", row.degeneracy}});
  }
  r.data = {{"n_max", run.n_max}, {"functions", basis.size()}, {"levels", levels},
            {"other_backends", fd_rows}};
  return r;
}

SuiteResult suite_operator_algebra(const RunConfig& run) {
  SuiteResult r{"operator_algebra"};
  const SpaceConfig cfg = run.space();
  const double R = cfg.radius, m = cfg.mass;
  const QuadGrid g = run_grid(run);
  const std::uint64_t seed = suite_seed(run, kOperatorSeed);
  std::mt19937_64 rng(seed);
  const DerivativeOptions fd{Backend::FiniteDifference};

  // analytic and finite-difference backends on random basis functions
  {
    const auto labels = labels_up_to(std::min(run.n_max, 5));
    std::uniform_int_distribution<std::size_t> pick(0, labels.size() - 1);
    double nu_dev = 0.0, form_dev = 0.0, h_fd_dev = 0.0;
    for (int s = 0; s < 20; ++s) {
      const WaveFunction f = psi(labels[pick(rng)], cfg);
      Vec4 x = random_sphere_point(rng, R);
      if (s % 4 == 0) x = R * Vec4(0.0, x(1), x(2), x(3)).normalized();
      for (int i = 0; i < 3; ++i) {
        nu_dev = std::max(nu_dev, std::abs(apply_nu(i, f, cfg)(x) - apply_nu(i, f, cfg, fd)(x)));
      }
      const cplx ha = apply_hamiltonian(f, cfg)(x);
      form_dev = std::max(
          form_dev, std::abs(ha - apply_hamiltonian(f, cfg, HamiltonianForm::LaplaceBeltrami)(x)));
      h_fd_dev = std::max(
          {h_fd_dev, std::abs(ha - apply_hamiltonian(f, cfg, HamiltonianForm::ViaNu, fd)(x)),
           std::abs(ha - apply_hamiltonian(f, cfg, HamiltonianForm::LaplaceBeltrami, fd)(x))});
    }
    const double tol = run.tol("backend");
    r.checks.push_back(below("nu_analytic_vs_fd", nu_dev, tol));
    r.checks.push_back(below("H_via_nu_vs_laplace_beltrami", form_dev, tol));
    r.checks.push_back(below("H_analytic_vs_fd", h_fd_dev, tol));
  }

  const int n_alg = std::min(run.n_max, 4);
  const Basis basis(n_alg, cfg);
  const auto& fs = basis.functions();
  const Eigen::MatrixXcd s = sample_on_grid(fs, g);

  // su(2) closure of the Z^R and Z^L operator matrices on the truncation
  json su2 = json::object();
  for (Side side : {Side::Right, Side::Left}) {
    std::array<Eigen::MatrixXcd, 3> mats;
    for (int i = 0; i < 3; ++i) {
      std::vector<WaveFunction> zf;
      for (const auto& f : fs) {
        zf.push_back(side == Side::Right ? right_action_operator(i, f, cfg)
                                         : left_action_operator(i, f, cfg));
      }
      mats[i] = gram(s, sample_on_grid(zf, g), g);
    }
    const double expected = side == Side::Right ? -2.0 / R : 2.0 / R;
    double coef_dev = 0.0, entry_dev = 0.0;
    json measured = json::array();
    for (int i = 0; i < 3; ++i) {
      const int j = (i + 1) % 3, k = (i + 2) % 3;
      const Eigen::MatrixXcd comm = mats[i] * mats[j] - mats[j] * mats[i];
      const cplx c = (mats[k].adjoint() * comm).trace() / mats[k].squaredNorm();
      measured.push_back(c.real());
      coef_dev = std::max(coef_dev, std::abs(c - expected));
      entry_dev = std::max(entry_dev, (comm - expected * mats[k]).cwiseAbs().maxCoeff());
    }
    const std::string tag = side == Side::Right ? "right" : "left";
    r.checks.push_back(below("su2_coefficient_" + tag, coef_dev, run.tol("su2")));
    r.checks.push_back(below("su2_matrix_" + tag, entry_dev, run.tol("su2")));
    su2[tag] = {{"expected", expected}, {"measured", measured}};
  }

  // each level is invariant under J_i, nu_i and nu_i nu_j
  double leak = 0.0;
  for (int n = 0; n <= n_alg; ++n) {
    std::vector<WaveFunction> level, images;
    for (std::size_t a = 0; a < basis.size(); ++a) {
      if (basis.label(a).n == n) level.push_back(fs[a]);
    }
    for (const auto& f : level) {
      for (int i = 0; i < 3; ++i) {
        images.push_back(apply_J(i, f, cfg));
        const WaveFunction nf = apply_nu(i, f, cfg);
        images.push_back(nf);
        for (int j = i; j < 3; ++j) images.push_back(apply_nu(j, nf, cfg));
      }
    }
    const Eigen::MatrixXcd sl = sample_on_grid(level, g);
    const Eigen::MatrixXcd si = sample_on_grid(images, g);
    const Eigen::MatrixXcd coef = gram(sl, si, g);
    leak = std::max(leak, column_norms(si - sl * coef, g).maxCoeff());
  }
  r.checks.push_back(below("level_leakage", leak, run.tol("leakage")));

  // [nu_i, eps_j] = (i/(mR)) eta_ijk eps_k - (i/m) delta_ij rho on the truncation
  {
    const cplx I(0.0, 1.0);
    double dev = 0.0;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        std::vector<WaveFunction> lhs, rhs;
        for (const auto& f : fs) {
          const WaveFunction a = apply_nu(i, apply_position(j, f, cfg), cfg);
          const WaveFunction b = apply_position(j, apply_nu(i, f, cfg), cfg);
          lhs.push_back(WaveFunction::from_values([a, b](const Vec4& x) { return a(x) - b(x); }));
          rhs.push_back(WaveFunction::from_values([=](const Vec4& x) {
            cplx v = 0.0;
            for (int k = 0; k < 3; ++k) v += levi_civita(i, j, k) * x(1 + k);
            v *= I / (m * R);
            if (i == j) v -= I / m * (x(0) / R);
            return v * f(x);
          }));
        }
        const Eigen::MatrixXcd ml = gram(s, sample_on_grid(lhs, g), g);
        const Eigen::MatrixXcd mr = gram(s, sample_on_grid(rhs, g), g);
        dev = std::max(dev, (ml - mr).cwiseAbs().maxCoeff());
      }
    }
    r.checks.push_back(below("nu_eps_commutator_matrix", dev, run.tol("commutator")));
  }

  const double pol = polarized_reduction_residual(psi(run.label, cfg), cfg, 10, seed);
  r.checks.push_back(below("polarized_reduction", pol, run.tol("polarized")));

  r.data = {{"truncation_n_max", n_alg}, {"truncation_size", basis.size()}, {"su2", su2}};
  return r;
}

SuiteResult suite_orthonormality(const RunConfig& run) {
  SuiteResult r{"orthonormality"};
  const SpaceConfig cfg = run.space();
  const QuadGrid g = run_grid(run);
  const Basis basis(run.n_max, cfg);
  const Eigen::MatrixXcd s = sample_on_grid(basis.functions(), g);
  const Eigen::MatrixXcd gm = gram(s, s, g);
  const Eigen::Index n = gm.rows();
  const Eigen::MatrixXcd dev = gm - Eigen::MatrixXcd::Identity(n, n);

  double diag = 0.0, off = 0.0;
  r.table.header = {"n", "l", "m_z", "N_quadrature", "N_closed_form", "nu_measured",
                    "diag_residual", "offdiag_max"};
  json norms = json::array();
  for (Eigen::Index a = 0; a < n; ++a) {
    double row_off = 0.0;
    for (Eigen::Index b = 0; b < n; ++b) {
      if (b != a) row_off = std::max(row_off, std::abs(dev(a, b)));
    }
    diag = std::max(diag, std::abs(dev(a, a)));
    off = std::max(off, row_off);
    const SpectralLabel& lab = basis.label(a);
    const NormalizationInfo ni = normalization(lab, cfg);
    r.table.rows.push_back({std::to_string(lab.n), std::to_string(lab.l), std::to_string(lab.m_z),
                            format_number(ni.quadrature), format_number(ni.closed_form),
                            format_number(ni.nu_measured), format_number(std::abs(dev(a, a))),
                            format_number(row_off)});
    if (lab.m_z == 0) {
      norms.push_back({{"n", lab.n}, {"l", lab.l}, {"N_quadrature", ni.quadrature},
                       {"N_closed_form", ni.closed_form}, {"nu_measured", ni.nu_measured},
                       {"nu_over_pi_R3", ni.nu_measured / (kPi * std::pow(cfg.radius, 3))}});
    }
  }
  r.checks.push_back(below("gram_minus_identity", dev.cwiseAbs().maxCoeff(), run.tol("gram")));
  r.data = {{"functions", n},      {"max_offdiagonal", off},
            {"max_diagonal", diag}, {"normalization", norms}};
  return r;
}

SuiteResult suite_hermiticity(const RunConfig& run) {
  SuiteResult r{"hermiticity"};
  const SpaceConfig cfg = run.space();
  const QuadGrid g = run_grid(run);
  const auto labels = labels_up_to(run.n_max);
  std::mt19937_64 rng(suite_seed(run, kHermiticitySeed));
  std::uniform_int_distribution<std::size_t> pick(0, labels.size() - 1);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (int k = 0; k < 50; ++k) {
    const std::size_t a = pick(rng);
    pairs.emplace_back(a, pick(rng));
  }
  std::vector<WaveFunction> fs;
  for (const auto& lab : labels) fs.push_back(psi(lab, cfg));
  const Eigen::MatrixXcd s = sample_on_grid(fs, g);

  using Op = std::function<WaveFunction(const WaveFunction&)>;
  std::vector<std::pair<std::string, Op>> ops;
  for (int i = 0; i < 3; ++i) {
    const std::string ax = std::to_string(i + 1);
    ops.emplace_back("nu" + ax, [=](const WaveFunction& f) { return apply_nu(i, f, cfg); });
    ops.emplace_back("eps" + ax, [=](const WaveFunction& f) { return apply_position(i, f, cfg); });
    ops.emplace_back("J" + ax, [=](const WaveFunction& f) { return apply_J(i, f, cfg); });
  }
  ops.emplace_back("rho", [=](const WaveFunction& f) { return apply_position(kRhoAxis, f, cfg); });
  ops.emplace_back("H", [=](const WaveFunction& f) { return apply_hamiltonian(f, cfg); });

  json per_op = json::object();
  double worst = 0.0;
  for (const auto& [name, op] : ops) {
    std::vector<WaveFunction> images;
    for (const auto& f : fs) images.push_back(op(f));
    const Eigen::MatrixXcd o = sample_on_grid(images, g);
    const Eigen::MatrixXcd g1 = gram(s, o, g);  // <a, O b>
    const Eigen::MatrixXcd g2 = gram(o, s, g);  // <O a, b>
    double dev = 0.0;
    for (const auto& [a, b] : pairs) dev = std::max(dev, std::abs(g1(a, b) - g2(a, b)));
    per_op[name] = dev;
    worst = std::max(worst, dev);
    r.checks.push_back(below("hermiticity_" + name, dev, run.tol("hermiticity")));
  }
  r.data = {{"pairs", pairs.size()}, {"max", worst}, {"per_operator", per_op}};
  return r;
}

SuiteResult suite_contraction(const RunConfig& run) {
  SuiteResult r{"contraction"};
  const double r0 = 1.0;
  const std::vector<TestFunction> tfs{bump_function(r0),
                                      bump_function(0.5 * r0, Vec3(0.2, -0.1, 0.3) * r0,
                                                    Vec3(2.0, -1.0, 0.5) / r0)};
  std::vector<double> radii;
  for (double k : run.radii) radii.push_back(k * r0);
  const ContractionReport rep = contraction_study(radii, tfs, run.space());

  double nu_ratio = 0.0, h_ratio = 0.0;
  json rows = json::array();
  for (std::size_t k = 0; k < rep.rows.size(); ++k) {
    const ContractionRow& row = rep.rows[k];
    rows.push_back({{"radius", row.radius}, {"nu_deviation", row.nu_deviation},
                    {"hamiltonian_deviation", row.hamiltonian_deviation},
                    {"position_deviation", row.position_deviation}});
    if (k > 0) {
      nu_ratio = std::max(nu_ratio, row.nu_deviation / rep.rows[k - 1].nu_deviation);
      h_ratio = std::max(h_ratio, row.hamiltonian_deviation / rep.rows[k - 1].hamiltonian_deviation);
    }
  }
  const double slope_bound = -1.0 + run.tol("slope");
  r.checks.push_back(below("nu_deviation_ratio", nu_ratio, 1.0));
  r.checks.push_back(below("hamiltonian_deviation_ratio", h_ratio, 1.0));
  r.checks.push_back({"nu_slope", rep.nu_slope, slope_bound, Check::Rule::AtMost});
  r.checks.push_back({"hamiltonian_slope", rep.hamiltonian_slope, slope_bound, Check::Rule::AtMost});
  r.checks.push_back({"position_deviation", rep.position_max, 0.0, Check::Rule::AtMost});

  r.table.header = {"radius", "nu_deviation", "hamiltonian_deviation", "position_deviation"};
  for (const auto& row : rep.rows) {
    r.table.rows.push_back({format_number(row.radius), format_number(row.nu_deviation),
                            format_number(row.hamiltonian_deviation),
                            format_number(row.position_deviation)});
  }
  r.data = {{"r0", r0},
            {"support_radius", rep.support_radius},
            {"box_points", rep.box_points},
            {"rows", rows},
            {"nu_slope", rep.nu_slope},
            {"hamiltonian_slope", rep.hamiltonian_slope}};
  return r;
}

Table wavefunction_table(const RunConfig& run) {
  const QuadGrid g = run_grid(run);
  const WaveFunction f = psi(run.label, run.space());
  Table t;
  t.header = {"chi", "theta", "phi", "weight", "re", "im"};
  for (const auto& n : g.nodes) {
    const cplx v = f(n.x);
    t.rows.push_back({format_number(n.chi), format_number(n.theta), format_number(n.phi),
                      format_number(n.weight), format_number(v.real()), format_number(v.imag())});
  }
  return t;
}

}  // namespace s3sigma
