#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

int run_cli(const std::string& args) {
  std::string cmd = std::string(HESSFLOW_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("hessflow_cli_test_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("simulate writes a trajectory with the expected header") {
  fs::path dir = fresh_dir("sim");
  REQUIRE(run_cli("simulate --preset classical-ha --set integrator.t_end=1 --out " +
                  dir.string()) == 0);
  std::string csv = slurp(dir / "trajectory.csv");
  CHECK(csv.rfind("t, m1, m2, m3, g1, g2, g3, F1, F2, F3, F4\n", 0) == 0);
  CHECK(slurp(dir / "run.json").find("fnv1a64:") != std::string::npos);
}

TEST_CASE("t_end zero produces exactly one sample row") {
  fs::path dir = fresh_dir("single");
  REQUIRE(run_cli("simulate --preset hess4 --set integrator.t_end=0 --out " + dir.string()) == 0);
  std::string csv = slurp(dir / "trajectory.csv");
  size_t lines = 0;
  for (char c : csv)
    if (c == '\n') ++lines;
  CHECK(lines == 2);  // header plus the initial state
}

TEST_CASE("reruns with the same seed are byte-identical") {
  fs::path d1 = fresh_dir("rerun1"), d2 = fresh_dir("rerun2");
  std::string common = "simulate --preset ndim-ha --set seed=42 --set integrator.t_end=1 --out ";
  REQUIRE(run_cli(common + d1.string()) == 0);
  REQUIRE(run_cli(common + d2.string()) == 0);
  CHECK(slurp(d1 / "trajectory.csv") == slurp(d2 / "trajectory.csv"));
}

TEST_CASE("configuration errors exit with code 2") {
  fs::path dir = fresh_dir("badcfg");
  CHECK(run_cli("simulate --preset no-such-system --out " + dir.string()) == 2);
  CHECK(run_cli("simulate --out " + dir.string()) == 2);
  CHECK(run_cli("simulate --preset classical-ha --set integrator.step=0 --out " + dir.string()) ==
        2);
  CHECK(run_cli("check --preset classical-ha --suite no-such-suite --out " + dir.string()) == 2);
  CHECK(run_cli("scan --preset hess4 --param operator.nope --values 1 --out " + dir.string()) ==
        2);
}

TEST_CASE("diagnostic suites report pass and fail through the exit code") {
  fs::path dir = fresh_dir("check");
  CHECK(run_cli("check --preset lagrange4 --suite measure --out " + dir.string()) == 0);
  CHECK(run_cli("check --preset hess4 --suite measure --out " + dir.string()) == 1);
  CHECK(run_cli("check --preset classical-ha --suite conservation --out " + dir.string()) == 0);
  CHECK(slurp(dir / "report.json").find("\"pass\"") != std::string::npos);
}

TEST_CASE("numeric blow-up exits with code 3") {
  fs::path dir = fresh_dir("blowup");
  CHECK(run_cli("simulate --preset euler-poisson-generic --set integrator.step=50"
                " --set integrator.t_end=5000 --out " +
                dir.string()) == 3);
}

TEST_CASE("scan aggregates one row per value in input order") {
  fs::path dir = fresh_dir("scan");
  int rc = run_cli("scan --preset hess4 --param operator.b1 --values 0 0.5"
                   " --set integrator.t_end=2 --out " +
                   dir.string());
  REQUIRE(rc == 1);  // the generic cross-term breaks two of the integrals
  std::string csv = slurp(dir / "scan.csv");
  std::istringstream in(csv);
  std::string header, row0, row1;
  REQUIRE(std::getline(in, header));
  REQUIRE(std::getline(in, row0));
  REQUIRE(std::getline(in, row1));
  CHECK(header.find("operator.b1") != std::string::npos);
  CHECK(row0.rfind("0,", 0) == 0);
  CHECK(row1.rfind("0.5,", 0) == 0);
}
