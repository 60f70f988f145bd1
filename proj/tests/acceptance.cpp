// One line per acceptance criterion. Thresholds are fixed here rather than
// taken from the run configuration.
//
// usage: acceptance [path-to-s3verify]

#include "s3sigma/suites.hpp"

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

using namespace s3sigma;

namespace {

struct Timed {
  SuiteResult result;
  double seconds = 0.0;
};

Timed timed(const std::function<SuiteResult()>& f) {
  const auto t0 = std::chrono::steady_clock::now();
  Timed t{f()};
  t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return t;
}

double value(const SuiteResult& s, const std::string& check) {
  for (const auto& c : s.checks) {
    if (c.name == check) return c.value;
  }
  throw std::runtime_error("no check " + s.name + "." + check);
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

int failures = 0;

void report(int id, const std::string& title, bool ok, std::string detail) {
  if (!ok) ++failures;
  while (!detail.empty() && (detail.back() == ' ' || detail.back() == ';')) detail.pop_back();
  std::cout << (ok ? "PASS" : "FAIL") << "  [" << id << "] " << title << ": " << detail << std::endl;
}

// v < bound, with a short description
bool under(double v, double bound, const std::string& what, std::ostringstream& os) {
  os << what << " " << num(v) << (v < bound ? " < " : " >= ") << num(bound) << "; ";
  return v < bound;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig run;  // R = m = 1, grid (24,16,32)

  {
    const Timed t = timed([&] { return suite_volume(run); });
    std::ostringstream os;
    bool ok = under(value(t.result, "volume_relative_error"), 1e-12, "relative error", os);
    ok = under(t.seconds, 1.0, "seconds", os) && ok;
    report(1, "volume 2 pi^2 R^3", ok, os.str());
  }
  {
    const Timed t = timed([&] { return suite_spectrum(run); });
    std::ostringstream os;
    bool ok = under(value(t.result, "H_residual_analytic"), 1e-7, "H analytic", os);
    ok = under(value(t.result, "H_residual_finite_difference"), 1e-4, "H finite-difference", os) && ok;
    ok = under(value(t.result, "J2_residual"), 1e-7, "J^2", os) && ok;
    ok = under(value(t.result, "J3_residual"), 1e-7, "J_3", os) && ok;
    ok = t.result.data["functions"].get<int>() == 91 && ok;
    ok = under(t.seconds, 30.0, "seconds", os) && ok;
    report(2, "spectrum n <= 5", ok, os.str());
  }
  {
    const Timed t = timed([&] { return suite_orthonormality(run); });
    std::ostringstream os;
    bool ok = t.result.data["functions"].get<int>() == 91;
    ok = under(value(t.result, "gram_minus_identity"), 1e-9, "max |G - I|", os) && ok;
    ok = under(t.seconds, 60.0, "seconds", os) && ok;
    report(3, "Gram matrix of 91 functions", ok, os.str());
  }
  {
    RunConfig r = run;
    r.samples = 1000;
    const Timed t = timed([&] { return suite_group_axioms(r); });
    std::ostringstream os;
    bool ok = under(value(t.result, "associativity"), 1e-12, "associativity", os);
    ok = under(value(t.result, "inverse"), 1e-12, "inverse", os) && ok;
    ok = under(t.seconds, 1.0, "seconds", os) && ok;
    report(4, "group axioms, 1000 samples", ok, os.str());
  }
  {
    const Timed t = timed([&] { return suite_lie_algebra(run); });
    std::ostringstream os;
    bool ok = under(value(t.result, "right_structure_constants"), 1e-7, "right brackets", os);
    ok = under(value(t.result, "left_right_commute"), 1e-7, "[Z^L, Z^R]", os) && ok;
    const auto& xi = t.result.data["coefficients"]["[Z_eps1, Z_nu1] on Xi"];
    os << "central term " << num(xi["measured"].get<double>()) << " (expected "
       << num(xi["expected"].get<double>()) << "); ";
    ok = under(t.seconds, 5.0, "seconds", os) && ok;
    report(5, "right-field Lie algebra", ok, os.str());
  }
  {
    RunConfig r = run;
    r.samples = 100;
    const Timed t = timed([&] { return suite_poisson(r); });
    std::ostringstream os;
    bool ok = true;
    double fam = 0.0;
    for (const char* k : {"eps_eps", "eps_theta", "theta_theta", "eps_rho", "theta_rho"}) {
      fam = std::max(fam, value(t.result, std::string("family_") + k));
    }
    ok = under(fam, 1e-7, "five families", os) && ok;
    ok = under(value(t.result, "jacobi"), 1e-6, "Jacobi", os) && ok;
    const auto& d = t.result.data;
    os << "{theta,theta} coefficient " << num(d["theta_theta_coefficient"]["measured"].get<double>())
       << ", {theta,rho} coefficient " << num(d["theta_rho_coefficient"]["measured"].get<double>());
    report(6, "Poisson algebra, m = 1, 100 points", ok, os.str());
  }
  const Timed geo = timed([&] { return suite_geodesic(run); });
  {
    std::ostringstream os;
    bool ok = under(value(geo.result, "energy_relative_drift"), 1e-8, "|dH|/H", os);
    ok = under(value(geo.result, "theta_drift"), 1e-8, "theta drift", os) && ok;
    ok = under(value(geo.result, "endpoint_vs_closed_form"), 1e-8, "endpoint", os) && ok;
    ok = geo.result.data["steps"].get<int>() == 2000 && ok;
    report(7, "classical conservation, omega t = 20", ok, os.str());
  }
  {
    std::ostringstream os;
    const auto& d = geo.result.data;
    bool ok = d["equation_samples"].get<int>() == 50;
    ok = under(value(geo.result, "geodesic_equation_residual"), 1e-7, "residual (50 times)", os) && ok;
    const auto& p = d["printed_frequency"];
    const bool printed_fails = p["fails_equation"].get<bool>();
    os << "printed frequency ratio " << num(p["ratio"].get<double>()) << ", its residual >= "
       << num(p["residual_min"].get<double>()) << (printed_fails ? " (fails, as documented)" : " (does not fail)");
    report(8, "closed-form geodesic", ok && printed_fails, os.str());
  }
  {
    const Timed t = timed([&] { return suite_quantization_form(run); });
    std::ostringstream os;
    bool ok = under(value(t.result, "theta_of_xi_minus_one"), 1e-8, "|Theta(Xi) - 1|", os);
    ok = under(value(t.result, "z_contract_theta"), 1e-8, "i_Z Theta", os) && ok;
    ok = under(value(t.result, "z_contract_dtheta"), 1e-8, "i_Z dTheta", os) && ok;
    ok = under(value(t.result, "noether_table"), 1e-8, "Noether table", os) && ok;
    ok = t.result.data["points"].get<int>() == 100 && ok;
    report(9, "quantization form, 100 elements", ok, os.str());
  }
  {
    const Timed t = timed([&] { return suite_contraction(run); });
    std::ostringstream os;
    const auto& rows = t.result.data["rows"];
    bool strict = rows.size() == 3;
    for (std::size_t k = 1; k < rows.size(); ++k) {
      strict = strict && rows[k]["nu_deviation"].get<double>() < rows[k - 1]["nu_deviation"].get<double>() &&
               rows[k]["hamiltonian_deviation"].get<double>() <
                   rows[k - 1]["hamiltonian_deviation"].get<double>();
    }
    const double nu_slope = value(t.result, "nu_slope");
    const double h_slope = value(t.result, "hamiltonian_slope");
    const double pos = value(t.result, "position_deviation");
    const bool ok = strict && nu_slope <= -0.7 && h_slope <= -0.7 && pos == 0.0;
    os << (strict ? "strictly decreasing" : "not strictly decreasing") << "; slopes nu " << num(nu_slope)
       << ", H " << num(h_slope) << " (bound -1 + 0.3); position deviation " << num(pos);
    report(10, "contraction R = 10, 100, 1000 r0", ok, os.str());
  }
  {
    const Timed t = timed([&] { return suite_hermiticity(run); });
    std::ostringstream os;
    const bool ok = t.result.data["pairs"].get<int>() == 50 &&
                    under(t.result.data["max"].get<double>(), 1e-8, "max over 11 operators", os);
    report(11, "self-adjointness, 50 pairs", ok, os.str());
  }
  {
    std::ostringstream os;
    bool ok = false;
    if (argc < 2) {
      os << "no CLI path given";
    } else {
      const std::string cmd = std::string(argv[1]) + " all --out acceptance_all.json 2>/dev/null";
      const auto t0 = std::chrono::steady_clock::now();
      const int status = std::system(cmd.c_str());
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
      os << "exit code " << code << "; ";
      ok = code == 0;
      ok = under(secs, 300.0, "seconds", os) && ok;
    }
    report(12, "cli all", ok, os.str());
  }

  std::cout << (failures ? "acceptance: FAIL (" + std::to_string(failures) + " criteria)" : "acceptance: PASS")
            << std::endl;
  return failures ? 1 : 0;
}
