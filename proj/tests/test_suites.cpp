#include "doctest.h"
#include "s3sigma/suites.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

using namespace s3sigma;

TEST_CASE("run configuration validation") {
  RunConfig run;
  CHECK_NOTHROW(run.validate());
  CHECK(run.tol("gram") == 1e-9);
  CHECK_THROWS_AS(run.tol("nope"), DomainError);

  RunConfig bad = run;
  bad.tolerances["gram"] = 0.0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = run;
  bad.tolerances["extra"] = 1.0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = run;
  bad.grid = {24, 1, 32};
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = run;
  bad.eps0 = Vec3(1.0, 0.0, 0.0);
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = run;
  bad.radii = {10.0};
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = run;
  bad.label = {2, 3, 0};
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = run;
  bad.mass = -1.0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("checks, numbers and tables") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK(Check{"a", 1.0, 2.0, Check::Rule::Below}.pass());
  CHECK_FALSE(Check{"a", 2.0, 2.0, Check::Rule::Below}.pass());
  CHECK(Check{"a", 0.0, 0.0, Check::Rule::AtMost}.pass());
  CHECK(Check{"a", 3.0, 2.0, Check::Rule::Above}.pass());
  CHECK_FALSE(Check{"a", nan, 2.0, Check::Rule::Below}.pass());
  CHECK_FALSE(Check{"a", nan, 2.0, Check::Rule::Above}.pass());

  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02e23}) CHECK(std::stod(format_number(v)) == v);

  Table t;
  t.header = {"x", "y"};
  t.rows = {{"1", "2"}, {"3", "4"}};
  std::ostringstream os;
  t.write_csv(os);
  CHECK(os.str() == "x,y\n1,2\n3,4\n");
}

TEST_CASE("atomic writes replace the target and leave no temporary") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "s3sigma_atomic_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string p = (dir / "out.json").string();
  write_atomic(p, "first\n");
  write_atomic(p, "second\n");
  std::ifstream f(p);
  std::string s((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  CHECK(s == "second\n");
  int entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++entries;
  CHECK(entries == 1);
  CHECK_THROWS_AS(write_atomic((dir / "missing" / "x.json").string(), "x"), std::runtime_error);
  fs::remove_all(dir);
}

TEST_CASE("reports are deterministic and embed the configuration") {
  RunConfig run;
  run.seed = 99;
  run.samples = 20;
  const auto a = make_report("groupcheck", run, {suite_group_axioms(run)}).dump(2);
  const auto b = make_report("groupcheck", run, {suite_group_axioms(run)}).dump(2);
  CHECK(a == b);
  const auto j = nlohmann::ordered_json::parse(a);
  CHECK(j["suite_version"] == kSuiteVersion);
  CHECK(j["config"]["seed"] == 99);
  CHECK(j["config"]["samples"] == 20);
  CHECK(j["config"]["tolerances"]["group"] == 1e-12);
  CHECK(j["passed"] == true);

  CHECK(suite_seed(run, 1) != suite_seed(run, 2));
  RunConfig other = run;
  other.seed = 100;
  CHECK(suite_seed(run, 1) != suite_seed(other, 1));
}

TEST_CASE("suite verdicts follow the tolerances") {
  RunConfig run;
  SuiteResult v = suite_volume(run);
  CHECK(v.passed());
  run.tolerances["volume"] = 1e-18;
  v = suite_volume(run);
  CHECK_FALSE(v.passed());
  CHECK_FALSE(make_report("volume", run, {v})["passed"].get<bool>());
}

TEST_CASE("geodesic suite: rest state and trajectory columns") {
  RunConfig run;
  run.vel0 = Vec3::Zero();
  run.steps = 50;
  const SuiteResult r = suite_geodesic(run);
  CHECK(r.passed());
  for (const auto& c : r.checks) CHECK(c.value == 0.0);
  CHECK(r.table.header.size() == 14);
  CHECK(r.table.rows.size() == 51);

  RunConfig coarse;
  coarse.steps = 10;
  coarse.omega_t = 100.0;
  const SuiteResult w = suite_geodesic(coarse);
  CHECK_FALSE(w.data["warnings"].empty());
}

TEST_CASE("spectrum suite on a small basis") {
  RunConfig run;
  run.n_max = 3;
  run.grid = {12, 8, 16};
  const SuiteResult r = suite_spectrum(run);
  CHECK(r.passed());
  const auto& levels = r.data["levels"];
  REQUIRE(levels.size() == 4);
  const double e[] = {0.0, 1.5, 4.0, 7.5};
  for (int n = 0; n < 4; ++n) {
    CHECK(levels[n]["energy"].get<double>() == doctest::Approx(e[n]));
    CHECK(levels[n]["degeneracy"].get<int>() == (n + 1) * (n + 1));
  }
  CHECK(r.table.rows.size() == 30);
  CHECK(r.table.header.size() == 8);
}
