// Command-line front end for the verification suites.

#include "s3sigma/suites.hpp"

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

using namespace s3sigma;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

std::vector<double> parse_list(const std::string& text, std::size_t expect, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    try {
      out.push_back(std::stod(item, &used));
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) {
      throw DomainError(std::string("bad number '") + item + "' in " + what);
    }
  }
  if (expect && out.size() != expect) {
    throw DomainError(std::string(what) + " needs " + std::to_string(expect) + " comma-separated values");
  }
  return out;
}

struct RawOptions {
  double radius = 0.0, mass = 0.0, omega_t = 0.0;
  std::vector<std::string> tol;
  std::string out, format;
  std::vector<int> grid, label;
  std::vector<double> eps0, vel0, radii;
  std::uint64_t seed = 0;
  int samples = 0, n_max = 0, steps = 0;
};

void write_text(const RunConfig& run, const std::string& text) {
  if (run.out.empty()) {
    std::cout << text;
  } else {
    write_atomic(run.out, text);
  }
}

std::string csv_of(const Table& t) {
  std::ostringstream os;
  t.write_csv(os);
  return os.str();
}

Table checks_table(const std::vector<SuiteResult>& suites) {
  Table t;
  t.header = {"suite", "check", "value", "rule", "tolerance", "pass"};
  for (const auto& s : suites) {
    for (const auto& c : s.checks) {
      const char* rule = c.rule == Check::Rule::Below ? "<" : c.rule == Check::Rule::AtMost ? "<=" : ">";
      t.rows.push_back({s.name, c.name, format_number(c.value), rule, format_number(c.tolerance),
                        c.pass() ? "1" : "0"});
    }
  }
  return t;
}

void print_summary(const std::string& command, const std::vector<SuiteResult>& suites,
                   double seconds) {
  int failed = 0;
  for (const auto& s : suites) {
    for (const auto& c : s.checks) {
      if (!c.pass()) {
        ++failed;
        std::cerr << "  FAIL " << s.name << "." << c.name << " = " << format_number(c.value)
                  << " (tolerance " << format_number(c.tolerance) << ")\n";
      }
    }
  }
  std::cerr << command << ": " << (failed ? "FAIL" : "PASS");
  if (failed) std::cerr << " (" << failed << " checks failed)";
  std::cerr << " in " << seconds << " s\n";
}

int run_command(const std::string& command, const RunConfig& run) {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<SuiteResult> suites;
  const Table* csv_table = nullptr;

  if (command == "geodesic") {
    suites.push_back(suite_geodesic(run));
    csv_table = &suites.back().table;
  } else if (command == "groupcheck") {
    suites.push_back(suite_group_axioms(run));
    suites.push_back(suite_lie_algebra(run));
    suites.push_back(suite_quantization_form(run));
  } else if (command == "spectrum") {
    suites.push_back(suite_spectrum(run));
    suites.push_back(suite_operator_algebra(run));
    csv_table = &suites.front().table;
  } else if (command == "orthonormality") {
    suites.push_back(suite_volume(run));
    suites.push_back(suite_orthonormality(run));
    suites.push_back(suite_hermiticity(run));
    csv_table = &suites[1].table;
  } else if (command == "wavefn") {
    SuiteResult s("wavefn");
    s.table = wavefunction_table(run);
    json rows = json::array();
    for (const auto& r : s.table.rows) {
      json row = json::array();
      for (const auto& cell : r) row.push_back(std::stod(cell));
      rows.push_back(row);
    }
    s.data = {{"label", {run.label.n, run.label.l, run.label.m_z}},
              {"columns", s.table.header},
              {"samples", rows}};
    suites.push_back(std::move(s));
    csv_table = &suites.back().table;
  } else if (command == "contract") {
    suites.push_back(suite_contraction(run));
    csv_table = &suites.back().table;
  } else if (command == "poisson") {
    suites.push_back(suite_poisson(run));
  } else if (command == "all") {
    suites.push_back(suite_volume(run));
    suites.push_back(suite_geodesic(run));
    suites.push_back(suite_group_axioms(run));
    suites.push_back(suite_lie_algebra(run));
    suites.push_back(suite_quantization_form(run));
    suites.push_back(suite_poisson(run));
    suites.push_back(suite_spectrum(run));
    suites.push_back(suite_operator_algebra(run));
    suites.push_back(suite_orthonormality(run));
    suites.push_back(suite_hermiticity(run));
    suites.push_back(suite_contraction(run));
  }

  const json report = make_report(command, run, suites);
  if (run.format == OutputFormat::Json) {
    // the geodesic trajectory is large; JSON output keeps only the summary
    write_text(run, report.dump(2) + "\n");
  } else {
    const Table t = csv_table ? *csv_table : checks_table(suites);
    write_text(run, csv_of(t));
    if (command == "geodesic") {
      if (run.out.empty()) {
        std::cerr << report.dump(2) << "\n";
      } else {
        write_atomic(run.out + ".summary.json", report.dump(2) + "\n");
      }
    }
  }

  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  print_summary(command, suites, secs);
  return report["passed"].get<bool>() ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verification suites for a free particle on the SU(2) manifold"};
  app.set_config("--config", "", "Flat key = value file; keys are the long option names");
  app.require_subcommand(1, 1);
  app.fallthrough();

  RawOptions o;
  auto* radius = app.add_option("--radius", o.radius, "Sphere radius R (default 1)")
                     ->check(CLI::PositiveNumber);
  auto* mass = app.add_option("--mass", o.mass, "Particle mass m (default 1)")
                   ->check(CLI::PositiveNumber);
  auto* tol = app.add_option("--tol", o.tol, "Tolerance override name=value (repeatable)")
                  ->take_all()
                  ->allow_extra_args(false);
  auto* grid = app.add_option("--grid", o.grid, "Quadrature orders nchi,ntheta,nphi (default 24,16,32)")
                   ->delimiter(',')
                   ->expected(3);
  auto* seed = app.add_option("--seed", o.seed, "Random seed");
  auto* out = app.add_option("--out", o.out, "Output path (default stdout)");
  auto* format = app.add_option("--format", o.format, "Output format")
                     ->check(CLI::IsMember({"csv", "json"}));
  auto* samples = app.add_option("--samples", o.samples, "Random samples (groupcheck, poisson)")
                      ->check(CLI::PositiveNumber);
  auto* n_max = app.add_option("--n-max", o.n_max, "Largest level of the basis (default 5)")
                    ->check(CLI::Range(0, 20));
  auto* steps = app.add_option("--steps", o.steps, "Integrator steps (default 2000)")
                    ->check(CLI::PositiveNumber);
  auto* omega_t = app.add_option("--omega-t", o.omega_t, "Run length as omega t (default 20)")
                      ->check(CLI::PositiveNumber);
  auto* eps0 = app.add_option("--eps0", o.eps0, "Initial chart point / R as x,y,z")
                   ->delimiter(',')
                   ->expected(3);
  auto* vel0 = app.add_option("--vel0", o.vel0, "Initial chart velocity / R as x,y,z")
                   ->delimiter(',')
                   ->expected(3);
  auto* radii = app.add_option("--radii", o.radii, "Contraction radii / r0 (default 10,100,1000)")
                    ->delimiter(',')
                    ->expected(2, CLI::detail::expected_max_vector_size);
  auto* label = app.add_option("--label", o.label, "Basis label n,l,m_z for wavefn (default 3,1,-1)")
                    ->delimiter(',')
                    ->expected(3);

  std::string command;
  for (const char* name : {"geodesic", "groupcheck", "spectrum", "orthonormality", "wavefn",
                           "contract", "poisson", "all"}) {
    app.add_subcommand(name)->callback([&command, name] { command = name; });
  }
  app.get_subcommand("geodesic")->description("Integrate a geodesic; conservation report and trajectory");
  app.get_subcommand("groupcheck")->description("Group axioms, Lie algebra, quantization form");
  app.get_subcommand("spectrum")->description("Eigen-residuals of the basis and operator algebra");
  app.get_subcommand("orthonormality")->description("Volume, Gram matrix, hermiticity");
  app.get_subcommand("wavefn")->description("Sample a basis function on the grid");
  app.get_subcommand("contract")->description("Deviation from the flat operators as R grows");
  app.get_subcommand("poisson")->description("Poisson algebra of the basic functions");
  app.get_subcommand("all")->description("Every suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  RunConfig run;
  try {
    if (radius->count()) run.radius = o.radius;
    if (mass->count()) run.mass = o.mass;
    if (seed->count()) run.seed = o.seed;
    if (out->count()) run.out = o.out;
    if (format->count()) run.format = o.format == "csv" ? OutputFormat::Csv : OutputFormat::Json;
    if (samples->count()) run.samples = o.samples;
    if (n_max->count()) run.n_max = o.n_max;
    if (steps->count()) run.steps = o.steps;
    if (omega_t->count()) run.omega_t = o.omega_t;
    if (grid->count()) run.grid = {o.grid[0], o.grid[1], o.grid[2]};
    if (eps0->count()) run.eps0 = Vec3(o.eps0[0], o.eps0[1], o.eps0[2]);
    if (vel0->count()) run.vel0 = Vec3(o.vel0[0], o.vel0[1], o.vel0[2]);
    if (radii->count()) run.radii = o.radii;
    if (label->count()) run.label = {o.label[0], o.label[1], o.label[2]};
    if (tol->count()) {
      for (const std::string& item : o.tol) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw DomainError("--tol expects name=value, got '" + item + "'");
        const std::string name = item.substr(0, eq);
        if (!run.tolerances.count(name)) throw DomainError("unknown tolerance '" + name + "'");
        run.tolerances[name] = parse_list(item.substr(eq + 1), 1, "--tol")[0];
      }
    }
    run.validate();
  } catch (const std::exception& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    return run_command(command, run);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
