#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "cosadmit/cli.hpp"
#include "cosadmit/report_io.hpp"

using namespace cosadmit;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "cosadmit");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  Run r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch_dir() {
  const auto d = fs::temp_directory_path() / "cosadmit_test_cli";
  fs::create_directories(d);
  return d;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

// Runs the built executable through the shell; stdout goes to a file.
int run_binary(const std::string& args, const fs::path& stdout_file) {
  const char* exe = std::getenv("COSADMIT_CLI");
  REQUIRE(exe != nullptr);
  const std::string cmd = std::string("'") + exe + "' " + args + " > '" + stdout_file.string() + "' 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kSmallConfig = R"({
  "density": "laplace",
  "L_values": [2, 4, 8],
  "N_values": [16, 64],
  "p_values": [1.5, 2],
  "k_max": 256,
  "grid_points": 101,
  "parallelism": 1
})";

}  // namespace

TEST_CASE("bounds subcommand") {
  const auto r = cli({"bounds", "--density", "normal", "--L", "4", "--p", "2"});
  CHECK(r.code == 0);
  const Json j = Json::parse(r.out);
  CHECK(std::abs(j["uniform_bound"].get<double>() - 0.0580034) < 1e-7);
  CHECK(j["density"] == "normal");

  const auto bad = cli({"bounds", "--density", "student_t(nu=0.4)", "--L", "4", "--p", "2"});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("p must be < 1.8") != std::string::npos);

  const auto low = cli({"bounds", "--density", "normal", "--L", "4", "--p", "1"});
  CHECK(low.code == 1);
  const auto d2 = cli({"bounds", "--density", "cauchy", "--L", "4", "--p", "2.5", "--dim", "2"});
  CHECK(d2.code == 0);
  CHECK(Json::parse(d2.out)["dimension"] == 2);
}

TEST_CASE("tail-energy subcommand") {
  const auto r = cli({"tail-energy", "--density", "uniform", "--L", "1.5", "--kmax", "64"});
  CHECK(r.code == 0);
  CHECK(Json::parse(r.out)["value"].get<double>() == 0.0);
  const auto d = cli({"tail-energy", "--density", "normal", "--L", "2", "--kmax", "16", "--dim", "2"});
  CHECK(d.code == 0);
  CHECK(Json::parse(d.out)["value"].get<double>() > 0.0);
  CHECK(cli({"tail-energy", "--density", "normal", "--L", "2", "--kmax", "16", "--dim", "4"}).code == 1);
}

TEST_CASE("list, coeffs and recover") {
  const auto l = cli({"list-densities"});
  CHECK(l.code == 0);
  const Json arr = Json::parse(l.out);
  REQUIRE(arr.is_array());
  CHECK(arr.size() >= 8);
  CHECK(arr[0].contains("p_max"));

  const auto c = cli({"coeffs", "--density", "normal", "--L", "8", "--N", "4"});
  CHECK(c.code == 0);
  CHECK(c.out.rfind("k,F_k\n0,0.125\n", 0) == 0);

  const auto rec = cli({"recover", "--density", "normal", "--L", "8", "--N", "128"});
  CHECK(rec.code == 0);
  const Json j = Json::parse(rec.out);
  CHECK(j["sup_error"].get<double>() <= 1e-8);
  CHECK(j["grid_points"] == 401);
}

TEST_CASE("usage errors exit with 1") {
  CHECK(cli({}).code == 1);
  CHECK(cli({"frobnicate"}).code == 1);
  CHECK(cli({"bounds", "--density", "normal", "--L", "4"}).code == 1);
  CHECK(cli({"bounds", "--density", "normal", "--L", "4", "--p", "2", "--seed", "3"}).code == 1);
  CHECK(cli({"bounds", "--density", "weibull", "--L", "4", "--p", "2"}).code == 1);
  CHECK(cli({"coeffs", "--density", "normal", "--L", "x", "--N", "4"}).code == 1);
  CHECK(cli({"recover", "--density", "normal", "--L", "8", "--N", "0"}).code == 1);
  CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("--out writes what stdout would show") {
  const auto dir = scratch_dir();
  for (const std::vector<std::string>& args :
       {std::vector<std::string>{"coeffs", "--density", "cauchy", "--L", "4", "--N", "16"},
        std::vector<std::string>{"recover", "--density", "laplace", "--L", "4", "--N", "32", "--grid", "51"},
        std::vector<std::string>{"bounds", "--density", "laplace", "--L", "4", "--p", "1.5"},
        std::vector<std::string>{"tail-energy", "--density", "cauchy", "--L", "4", "--kmax", "64"},
        std::vector<std::string>{"list-densities"}}) {
    CAPTURE(args[0]);
    const auto printed = cli(args);
    auto with_out = args;
    with_out.push_back("--out");
    with_out.push_back((dir / "out.txt").string());
    const auto written = cli(with_out);
    CHECK(printed.code == 0);
    CHECK(written.code == 0);
    CHECK(written.out.empty());
    CHECK(slurp(dir / "out.txt") == printed.out);
  }
  fs::remove_all(dir);
}

TEST_CASE("study subcommand") {
  const auto dir = scratch_dir();
  write_file(dir / "cfg.json", kSmallConfig);
  const auto a = cli({"study", "--config", (dir / "cfg.json").string()});
  const auto b = cli({"study", "--config", (dir / "cfg.json").string()});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  const Json j = Json::parse(a.out);
  CHECK(j["all_passed"] == true);
  CHECK(j["config"]["parallelism"] == 1);

  const auto w = cli({"study", "--config", (dir / "cfg.json").string(), "--out", (dir / "rep.json").string()});
  CHECK(w.code == 0);
  Json from_file = Json::parse(slurp(dir / "rep.json"));
  CHECK(from_file["config"]["output_path"] == (dir / "rep.json").string());
  from_file["config"]["output_path"] = "";
  CHECK(dump(from_file) == a.out);
  CHECK(fs::exists(dir / "rep.csv"));

  write_file(dir / "bad.json", R"({"density": "normal", "L_values": [4, 2], "N_values": [8]})");
  const auto bad = cli({"study", "--config", (dir / "bad.json").string()});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("L_values") != std::string::npos);

  write_file(dir / "unknown.json", R"({"density": "normal", "L_values": [4], "colour": 1})");
  const auto unk = cli({"study", "--config", (dir / "unknown.json").string()});
  CHECK(unk.code == 1);
  CHECK(unk.err.find("colour") != std::string::npos);

  write_file(dir / "broken.json", "{\"density\": ");
  CHECK(cli({"study", "--config", (dir / "broken.json").string()}).code == 1);

  write_file(dir / "tp.json", R"j({"density": "student_t(nu=0.4)", "L_values": [4], "N_values": [8],
      "p_values": [2]})j");
  const auto tp = cli({"study", "--config", (dir / "tp.json").string()});
  CHECK(tp.code == 1);
  CHECK(tp.err.find("p must be < 1.8") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("quadrature tolerance from the environment") {
  ::setenv("COSADMIT_QUAD_TOL", "abc", 1);
  CHECK(cli({"bounds", "--density", "normal", "--L", "4", "--p", "2"}).code == 1);
  ::setenv("COSADMIT_QUAD_TOL", "1e-9", 1);
  const auto r = cli({"bounds", "--density", "normal", "--L", "4", "--p", "2"});
  CHECK(r.code == 0);
  CHECK(std::abs(Json::parse(r.out)["uniform_bound"].get<double>() - 0.0580034) < 1e-7);
  ::unsetenv("COSADMIT_QUAD_TOL");
}

TEST_CASE("the installed executable") {
  const auto dir = scratch_dir();
  CHECK(run_binary("bounds --density normal --L 4 --p 2", dir / "a.json") == 0);
  CHECK(std::abs(Json::parse(slurp(dir / "a.json"))["uniform_bound"].get<double>() - 0.0580034) < 1e-7);
  CHECK(run_binary("bounds --density 'student_t(nu=0.4)' --L 4 --p 2", dir / "b.json") == 1);
  CHECK(run_binary("tail-energy --density uniform --L 1.5 --kmax 64", dir / "c.json") == 0);
  CHECK(Json::parse(slurp(dir / "c.json"))["value"].get<double>() == 0.0);

  write_file(dir / "cfg.json", kSmallConfig);
  CHECK(run_binary("study --config '" + (dir / "cfg.json").string() + "'", dir / "s1.json") == 0);
  CHECK(run_binary("study --config '" + (dir / "cfg.json").string() + "'", dir / "s2.json") == 0);
  CHECK(slurp(dir / "s1.json") == slurp(dir / "s2.json"));
  fs::remove_all(dir);
}
