#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

namespace {

namespace fs = std::filesystem;

const fs::path kDir = fs::temp_directory_path() / "duolind_cli_tests";

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

RunResult run(const std::string& args) {
  fs::create_directories(kDir);
  const fs::path out = kDir / "stdout.txt";
  const fs::path err = kDir / "stderr.txt";
  const std::string cmd = std::string(DUOLIND_CLI_BIN) + " " + args + " >" +
                          out.string() + " 2>" + err.string();
  const int raw = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::vector<std::vector<double>> parse_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream lines(text);
  std::string line;
  std::getline(lines, line);  // header
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) row.push_back(std::stod(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

TEST_CASE("lossless pair run reaches the interference dip") {
  const RunResult r = run(
      "solve --g 1 --gamma1 0 --gamma2 0 --nbar 0 --cutoff 4 --state 1 1 "
      "--tmax 0.7853981633974483 --steps 2");
  REQUIRE(r.code == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 2);
  const std::vector<double>& last = rows.back();
  CHECK(std::abs(last[1] - 1.0) <= 1e-10);  // trace
  CHECK(last[4] <= 1e-8);                   // coincidence at the dip
}

TEST_CASE("a single-step grid emits only the initial row") {
  const RunResult r = run("solve --cutoff 4 --steps 1");
  REQUIRE(r.code == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0][0] == 0.0);
  CHECK(std::abs(rows[0][1] - 1.0) <= 1e-12);  // trace
  CHECK(std::abs(rows[0][4] - 1.0) <= 1e-12);  // coincidence of |1,1>
}

TEST_CASE("margin violations are usage errors that name the precondition") {
  const RunResult r = run("solve --state 5 0 --cutoff 5");
  CHECK(r.code == 2);
  CHECK(r.err.find("margin") != std::string::npos);
  CHECK(r.out.empty());
}

TEST_CASE("sweep outputs are deterministic and carry a manifest") {
  const fs::path a = kDir / "sweep_a.csv";
  const fs::path b = kDir / "sweep_b.csv";
  const std::string grid =
      "hom --cutoff 4 --nbar 0 --tsteps 9 --gamma1-steps 3 --out ";
  REQUIRE(run(grid + a.string()).code == 0);
  REQUIRE(run(grid + b.string()).code == 0);
  const std::string text = slurp(a);
  CHECK(text == slurp(b));
  CHECK(text.rfind("t,gamma1_over_g,P11,valid_flag\n", 0) == 0);

  const auto manifest = nlohmann::json::parse(slurp(a.string() + ".manifest.json"));
  CHECK(manifest.at("command") == "hom");
  CHECK(manifest.at("config").at("cutoff") == 4);
  CHECK(manifest.at("grid").at("invalid_cells") == 0);
}

TEST_CASE("config files set defaults and flags override them") {
  const fs::path ini = kDir / "damped.ini";
  {
    fs::create_directories(kDir);
    std::ofstream f(ini);
    f << "[solve]\ncutoff=4\ngamma1=0.7\ntmax=0.7853981633974483\nsteps=2\n";
  }
  const RunResult damped = run("--config " + ini.string() + " solve");
  REQUIRE(damped.code == 0);
  const auto filled = parse_csv(damped.out);
  REQUIRE(filled.size() == 2);
  CHECK(filled.back()[4] > 1e-6);  // damping fills the dip

  const RunResult overridden =
      run("--config " + ini.string() + " solve --gamma1 0");
  REQUIRE(overridden.code == 0);
  CHECK(parse_csv(overridden.out).back()[4] <= 1e-8);
}

TEST_CASE("verification reruns are byte-identical under a fixed seed") {
  const RunResult a = run("verify --suite params --seed 7");
  const RunResult b = run("verify --suite params --seed 7");
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("all suites passed") != std::string::npos);
}

TEST_CASE("an impossible tolerance turns into a failing exit code") {
  const RunResult r = run("verify --suite params --tol 1e-20");
  CHECK(r.code == 1);
  CHECK(r.out.find("FAIL") != std::string::npos);
}

TEST_CASE("unknown suites are usage errors") {
  const RunResult r = run("verify --suite nosuch");
  CHECK(r.code == 2);
  CHECK(r.err.find("nosuch") != std::string::npos);
}
