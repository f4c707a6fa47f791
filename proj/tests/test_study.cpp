#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "cosadmit/errors.hpp"
#include "cosadmit/report_io.hpp"
#include "cosadmit/study.hpp"

using namespace cosadmit;

namespace {

StudyConfig base(const std::string& density) {
  StudyConfig c;
  c.density = density;
  c.L_values = {4.0, 8.0};
  c.N_values = {32, 128};
  c.p_values = {2.0};
  c.k_max = 256;
  c.grid_points = 201;
  return c;
}

bool has_trend(const StudyReport& r, const std::string& prefix) {
  for (const auto& a : r.trends) {
    if (a.name.rfind(prefix, 0) == 0) return true;
  }
  return false;
}

int csv_fields(const std::string& line) {
  int n = 1;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') quoted = !quoted;
    if (c == ',' && !quoted) ++n;
  }
  return n;
}

std::string message_of(const StudyConfig& c) {
  try {
    validate(c);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("config validation names the field") {
  auto c = base("normal");
  CHECK(message_of(c).empty());

  c = base("normal");
  c.L_values = {};
  CHECK(message_of(c).rfind("L_values:", 0) == 0);
  c.L_values = {4.0, 4.0};
  CHECK(message_of(c).rfind("L_values:", 0) == 0);
  c.L_values = {-1.0, 4.0};
  CHECK(message_of(c).rfind("L_values:", 0) == 0);

  c = base("normal");
  c.N_values = {64, 32};
  CHECK(message_of(c).rfind("N_values:", 0) == 0);

  c = base("student_t(nu=0.4)");
  c.p_values = {1.5, 2.0};
  const std::string m = message_of(c);
  CHECK(m.rfind("p_values:", 0) == 0);
  CHECK(m.find("p must be < 1.8") != std::string::npos);
  CHECK(m.find("2*nu+1") != std::string::npos);

  c = base("normal");
  c.p_values = {1.0};
  CHECK(message_of(c).rfind("p_values:", 0) == 0);

  c = base("weibull");
  CHECK(message_of(c).rfind("density:", 0) == 0);
  c = base("normal");
  c.parallelism = 0;
  CHECK(message_of(c).rfind("parallelism:", 0) == 0);
  c = base("normal");
  c.k_max = 4;
  CHECK(message_of(c).rfind("k_max:", 0) == 0);
  c = base("normal");
  c.tolerances["bogus"] = 1.0;
  CHECK(message_of(c).rfind("tolerances:", 0) == 0);
  c = base("normal");
  c.studies = {"plots"};
  CHECK(message_of(c).rfind("studies:", 0) == 0);

  // The convergence study alone does not need p values.
  c = base("normal");
  c.p_values = {};
  c.studies = {"convergence"};
  CHECK(message_of(c).empty());
}

TEST_CASE("config JSON reading") {
  const auto c = study_config_from_json(Json::parse(R"({"density": "normal", "L_values": [2, 4],
      "N_values": [8], "p_values": [2.0], "tolerances": {"quad_tol": 1e-10}})"));
  CHECK(c.L_values == std::vector<double>{2.0, 4.0});
  CHECK(c.tolerance("quad_tol") == 1e-10);
  CHECK(c.tolerance("slack_factor") == 10.0);
  CHECK(c.k_max == 4096);

  const auto again = study_config_from_json(to_json(c));
  CHECK(dump(to_json(again)) == dump(to_json(c)));

  CHECK_THROWS_WITH_AS(study_config_from_json(Json::parse(R"({"density": "normal", "L_values": [2], "Lvals": 1})")),
                       "Lvals: unknown config field", ValidationError);
  CHECK_THROWS_WITH_AS(study_config_from_json(Json::parse(R"({"density": "normal", "L_values": "2"})")),
                       "L_values: expected an array", ValidationError);
  CHECK_THROWS_WITH_AS(study_config_from_json(Json::parse(R"({"density": "normal", "L_values": [2], "k_max": 2.5})")),
                       "k_max: expected an integer", ValidationError);
  CHECK_THROWS_AS(study_config_from_json(Json::parse(R"({"L_values": [2]})")), ValidationError);
  CHECK_THROWS_AS(load_study_config("/nonexistent/config.json"), ValidationError);
}

TEST_CASE("normal convergence floors fall with L") {
  auto c = base("normal");
  c.studies = {"convergence"};
  const auto r = run_study(c);
  REQUIRE(r.floors.size() == 2);
  REQUIRE(r.convergence.size() == 4);
  CHECK(*r.floors[1].floor < *r.floors[0].floor);
  REQUIRE(r.trends.size() == 1);
  CHECK(r.trends[0].name == "floor_decreasing L=4->8");
  CHECK(r.trends[0].passed);
  CHECK(r.admissibility.empty());
  CHECK(r.all_passed());
}

TEST_CASE("a single L emits no trend") {
  auto c = base("uniform");
  c.L_values = {2.0};
  const auto r = run_study(c);
  CHECK(r.floors.size() == 1);
  CHECK_FALSE(has_trend(r, "floor_decreasing"));
  CHECK_FALSE(has_trend(r, "B_decreasing"));
  REQUIRE(r.rates.size() == 1);
  CHECK_FALSE(r.rates[0].fit.has_value());
  CHECK_FALSE(r.rates[0].note.empty());
}

TEST_CASE("normal admissibility at p = 2") {
  auto c = base("normal");
  c.studies = {"admissibility"};
  c.L_values = {2.0, 4.0, 8.0};
  c.k_max = 1024;
  const auto r = run_study(c);
  REQUIRE(r.admissibility.size() == 3);
  for (const auto& cell : r.admissibility) {
    REQUIRE(cell.tail.has_value());
    REQUIRE(cell.bounds.size() == 1);
    const auto& b = cell.bounds[0];
    REQUIRE(b.report.has_value());
    for (const auto& a : b.checks) {
      CAPTURE(a.name);
      CHECK(a.passed);
      CHECK(std::isfinite(a.slack));
      CHECK(a.slack >= 0.0);
      CHECK(a.lhs <= a.rhs + a.slack);
    }
    // Assertions can be recomputed from the stored values.
    const auto& dom = b.checks[0];
    CHECK(dom.name == "dominance_main");
    CHECK(dom.lhs == cell.tail->value);
    CHECK(dom.rhs == b.report->main_bound);
    CHECK(dom.slack == 10.0 * (cell.tail->quad_error + cell.tail->k_tail_estimate));
  }
  CHECK(has_trend(r, "B_decreasing"));
  CHECK(r.all_passed());
}

TEST_CASE("Student-t(0.4) admissibility rates") {
  auto c = base("student_t(nu=0.4)");
  c.studies = {"admissibility"};
  c.L_values = {4.0, 8.0, 16.0, 32.0};
  c.p_values = {1.2, 1.5};
  c.k_max = 1024;
  c.parallelism = 2;
  const auto r = run_study(c);
  REQUIRE(r.rates.size() == 2);
  for (const auto& e : r.rates) {
    CAPTURE(e.p);
    REQUIRE(e.fit.has_value());
    CHECK(e.fit->slope <= -e.p);
    CHECK(e.fit->slope >= -1.95);
    CHECK(e.fit->slope <= -1.65);
    REQUIRE(e.theoretical_slope.has_value());
    CHECK(*e.theoretical_slope == doctest::Approx(-1.8));
    for (const auto& a : e.checks) CHECK(a.passed);
  }
  CHECK(r.all_passed());
}

TEST_CASE("Cauchy dominance at p = 2.5") {
  auto c = base("cauchy");
  c.studies = {"admissibility"};
  c.L_values = {4.0, 8.0, 16.0};
  c.p_values = {2.5};
  c.k_max = 1024;
  const auto r = run_study(c);
  for (const auto& cell : r.admissibility) {
    for (const auto& b : cell.bounds) {
      for (const auto& a : b.checks) CHECK(a.passed);
    }
  }
  CHECK(r.all_passed());
}

TEST_CASE("two-dimensional part of the sweep") {
  auto c = base("cauchy");
  c.studies = {"admissibility"};
  c.p_values = {1.5, 2.5};
  c.dimension = 2;
  c.k_max_per_axis = 64;
  const auto r = run_study(c);
  REQUIRE(r.dimensional.size() == 2);
  for (const auto& cell : r.dimensional) {
    REQUIRE(cell.tail.has_value());
    // p = 1.5 <= d is skipped.
    REQUIRE(cell.checks.size() == 1);
    CHECK(cell.checks[0].name == "dominance_d p=2.5");
    CHECK(cell.checks[0].passed);
  }
  CHECK(has_trend(r, "Bd_decreasing"));
}

TEST_CASE("reports are deterministic across runs and worker counts") {
  auto c = base("laplace");
  c.L_values = {2.0, 4.0, 8.0};
  c.p_values = {1.5, 2.0};
  c.k_max = 512;
  c.parallelism = 1;
  const std::string a = dump(to_json(run_study(c)));
  const std::string b = dump(to_json(run_study(c)));
  CHECK(a == b);

  c.parallelism = 4;
  Json j4 = to_json(run_study(c));
  Json j1 = Json::parse(a);
  j4["config"].erase("parallelism");
  j1["config"].erase("parallelism");
  CHECK(j1 == j4);
}

TEST_CASE("CSV and file outputs") {
  auto c = base("normal");
  c.k_max = 128;
  const auto r = run_study(c);
  std::ostringstream os;
  write_study_csv(os, r);
  std::istringstream is(os.str());
  std::string line;
  int rows = 0;
  while (std::getline(is, line)) {
    CAPTURE(line);
    CHECK(csv_fields(line) == 18);
    ++rows;
  }
  CHECK(rows == 1 + 4 + 2);

  const auto dir = std::filesystem::temp_directory_path() / "cosadmit_test_study";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "report.json").string();
  write_study_outputs(r, path);
  CHECK(load_json_file(path) == Json::parse(dump(to_json(r))));
  CHECK(std::filesystem::exists(dir / "report.csv"));
  std::filesystem::remove_all(dir);
}
