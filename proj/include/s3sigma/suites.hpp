#pragma once

#include "s3sigma/geometry.hpp"
#include "s3sigma/quantum.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace s3sigma {

inline constexpr const char* kSuiteVersion = "s3sigma-verify 1.0.0";

enum class OutputFormat { Json, Csv };

/// Everything a run depends on. Reports embed it, so equal configs give
/// byte-identical JSON.
struct RunConfig {
  double radius = 1.0;
  double mass = 1.0;
  std::map<std::string, double> tolerances = default_tolerances();
  std::array<int, 3> grid{24, 16, 32};
  std::uint64_t seed = 20240611;
  std::string out;  ///< empty: stdout
  OutputFormat format = OutputFormat::Json;

  // command parameters
  int samples = 0;  ///< 0: command default
  int n_max = 5;
  int steps = 2000;
  double omega_t = 20.0;
  Vec3 eps0{0.3, -0.2, 0.1};  ///< in units of R
  Vec3 vel0{0.4, 0.5, -0.3};
  std::vector<double> radii{10.0, 100.0, 1000.0};  ///< in units of the bump radius
  SpectralLabel label{3, 1, -1};

  static std::map<std::string, double> default_tolerances();
  SpaceConfig space() const { return {radius, mass}; }
  double tol(const std::string& name) const;
  /// Throws DomainError on a non-positive tolerance, unknown tolerance name
  /// or out-of-range parameter.
  void validate() const;
  nlohmann::ordered_json to_json() const;
};

/// Seed of one suite, drawn from the run seed and a fixed suite index.
std::uint64_t suite_seed(const RunConfig& run, int suite_index);

struct Check {
  enum class Rule { Below, AtMost, Above };
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  Rule rule = Rule::Below;

  bool pass() const;
};

/// Simple string table for CSV output.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void write_csv(std::ostream& out) const;
};

std::string format_number(double v);

struct SuiteResult {
  explicit SuiteResult(std::string n = {}) : name(std::move(n)) {}

  std::string name;
  std::vector<Check> checks;
  nlohmann::ordered_json data = nlohmann::ordered_json::object();
  Table table;  ///< optional row data; empty header when absent

  bool passed() const;
  nlohmann::ordered_json to_json() const;
};

SuiteResult suite_volume(const RunConfig& run);
SuiteResult suite_geodesic(const RunConfig& run);
SuiteResult suite_group_axioms(const RunConfig& run);
SuiteResult suite_lie_algebra(const RunConfig& run);
SuiteResult suite_quantization_form(const RunConfig& run);
SuiteResult suite_poisson(const RunConfig& run);
SuiteResult suite_spectrum(const RunConfig& run);
SuiteResult suite_operator_algebra(const RunConfig& run);
SuiteResult suite_orthonormality(const RunConfig& run);
SuiteResult suite_hermiticity(const RunConfig& run);
SuiteResult suite_contraction(const RunConfig& run);

/// Samples of psi(run.label) on the run grid: chi, theta, phi, weight, re, im.
Table wavefunction_table(const RunConfig& run);

/// Full report: version, command, config, suites and overall verdict.
nlohmann::ordered_json make_report(const std::string& command, const RunConfig& run,
                                   const std::vector<SuiteResult>& suites);

/// Writes `text` to `path` through a temporary file in the same directory and
/// a rename. Throws std::runtime_error on failure.
void write_atomic(const std::string& path, const std::string& text);

}  // namespace s3sigma
