#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

// Drives the installed binary end to end: config parsing, report artifacts,
// exit codes and run-to-run determinism.

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

const char* cli_path() { return HARDYGEO_CLI_PATH; }

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "hardygeo_cli" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  REQUIRE(out.good());
  out << text;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

int run_cli(const std::string& args) {
  const std::string cmd =
      std::string(cli_path()) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(rc));
  return WEXITSTATUS(rc);
}

Json report_in(const fs::path& dir, const char* name = "report.json") {
  return Json::parse(slurp(dir / name));
}

const std::string kSquare64 =
    "[domain]\n"
    "kind = box\n"
    "a = 1\n"
    "b = 1\n"
    "[grid]\n"
    "resolution = 64\n"
    "[run]\n"
    "p = 2\n"
    "seed = 7\n";

}  // namespace

TEST_CASE("mu on the unit square produces a report and history") {
  const fs::path dir = fresh_dir("mu_square");
  write_file(dir / "run.ini", kSquare64);
  const int rc = run_cli("mu --config " + (dir / "run.ini").string() +
                         " --out " + dir.string());
  CHECK(rc == 0);
  REQUIRE(fs::exists(dir / "report.json"));
  REQUIRE(fs::exists(dir / "history.csv"));
  const Json j = report_in(dir);
  CHECK(j["kind"] == "mu_p");
  CHECK(j["p"] == 2.0);
  const double v = j["value"].get<double>();
  CHECK(v > 0.25);
  CHECK(v < 0.32);
  CHECK(j["domain"]["kind"] == "box");
  CHECK(j["grid_resolution"] == 64);
  CHECK(slurp(dir / "history.csv").rfind("iter,value\n", 0) == 0);
}

TEST_CASE("identical config and seed give byte-identical artifacts") {
  const fs::path a = fresh_dir("det_a");
  const fs::path b = fresh_dir("det_b");
  write_file(a / "run.ini", kSquare64);
  CHECK(run_cli("mu --config " + (a / "run.ini").string() + " --out " +
                a.string()) == 0);
  CHECK(run_cli("mu --config " + (a / "run.ini").string() + " --out " +
                b.string()) == 0);
  CHECK(slurp(a / "report.json") == slurp(b / "report.json"));
  CHECK(slurp(a / "history.csv") == slurp(b / "history.csv"));
}

TEST_CASE("config errors exit with code 1") {
  const fs::path dir = fresh_dir("errors");
  CHECK(run_cli("mu --config " + (dir / "absent.ini").string() + " --out " +
                dir.string()) == 1);

  write_file(dir / "broken.ini", "[domain\nkind = box\n");
  CHECK(run_cli("mu --config " + (dir / "broken.ini").string() + " --out " +
                dir.string()) == 1);

  write_file(dir / "levelset.ini",
             "[domain]\n"
             "kind = implicit\n"
             "levelset = hypot(x, y) -\n"
             "bbox_lo = -2 -2\n"
             "bbox_hi = 2 2\n"
             "[grid]\n"
             "resolution = 32\n");
  CHECK(run_cli("mu --config " + (dir / "levelset.ini").string() + " --out " +
                dir.string()) == 1);

  CHECK(run_cli("reproduce no-such-example --out " + dir.string()) == 1);
}

TEST_CASE("an unconverged solve exits 3 and flags the report") {
  const fs::path dir = fresh_dir("unconverged");
  write_file(dir / "run.ini",
             "[domain]\n"
             "kind = box\n"
             "a = 1\n"
             "b = 1\n"
             "[grid]\n"
             "resolution = 64\n"
             "[run]\n"
             "p = 2\n"
             "seed = 7\n"
             "max_iter = 2\n"
             "tol = 1e-30\n");
  const int rc = run_cli("mu --config " + (dir / "run.ini").string() +
                         " --out " + dir.string());
  CHECK(rc == 3);
  const Json j = report_in(dir);
  CHECK(j["unconverged"] == true);
  CHECK(j["flags"].size() > 0);
}

TEST_CASE("verify passes on the square and honors a tightened tolerance") {
  const fs::path dir = fresh_dir("verify");
  write_file(dir / "run.ini",
             "[domain]\n"
             "kind = box\n"
             "a = 1\n"
             "b = 1\n"
             "[grid]\n"
             "resolution = 96\n"
             "[run]\n"
             "p = 2\n"
             "trials = 20\n"
             "identity_trials = 5\n"
             "pairs = 20000\n");
  CHECK(run_cli("verify --config " + (dir / "run.ini").string() + " --out " +
                dir.string() + " --seed 1") == 0);
  const Json j = report_in(dir);
  CHECK(j["kind"] == "verify");
  CHECK(j["checks"]["distributional"]["pass"] == true);
  CHECK(j["checks"]["identity_L2"]["pass"] == true);
  CHECK(j["checks"]["vector_inequality"]["pass"] == true);

  // The seed is required for a randomized suite.
  CHECK(run_cli("verify --config " + (dir / "run.ini").string() + " --out " +
                dir.string()) == 1);

  // A tolerance below the measured quadrature error must fail honestly.
  write_file(dir / "tight.ini",
             "[domain]\n"
             "kind = box\n"
             "a = 1\n"
             "b = 1\n"
             "[grid]\n"
             "resolution = 96\n"
             "[run]\n"
             "p = 2\n"
             "trials = 5\n"
             "identity_trials = 5\n"
             "pairs = 1000\n"
             "identity_tol = 1e-4\n");
  CHECK(run_cli("verify --config " + (dir / "tight.ini").string() + " --out " +
                dir.string() + " --seed 1") == 2);
}

TEST_CASE("analytic lambda via the CLI matches the critical torus") {
  const fs::path dir = fresh_dir("lambda");
  write_file(dir / "run.ini",
             "[domain]\n"
             "kind = torus\n"
             "r = 1\n"
             "R = 2\n"
             "[run]\n"
             "mode = analytic\n"
             "samples = 2048\n"
             "ndelta = 2048\n");
  CHECK(run_cli("lambda --config " + (dir / "run.ini").string() + " --out " +
                dir.string()) == 0);
  const Json j = report_in(dir);
  CHECK(j["kind"] == "lambda_lower");
  CHECK(std::abs(j["value"].get<double>() - 1.0) < 1e-6);
  bool analytic_flag = false;
  for (const auto& f : j["flags"]) analytic_flag |= (f == "analytic_mode");
  CHECK(analytic_flag);
  CHECK(j["lower_bounds"]["H0"].get<double>() > -1e-6);
}

TEST_CASE("table on the disk reproduces the remainder constants") {
  const fs::path dir = fresh_dir("table");
  write_file(dir / "run.ini",
             "[domain]\n"
             "kind = ball\n"
             "radius = 1\n"
             "[grid]\n"
             "resolution = 128\n"
             "[run]\n"
             "seed = 3\n");
  CHECK(run_cli("table --config " + (dir / "run.ini").string() + " --out " +
                dir.string()) == 0);
  const Json j = report_in(dir);
  CHECK(j["kind"] == "bm_lambda");
  const Json& t = j["table"];
  CHECK(std::abs(t["lambda_BM"].get<double>() - 0.0625) < 1e-9);
  CHECK(std::abs(t["lambda_HHL"].get<double>() - 0.5) < 1e-9);
  CHECK(std::abs(t["lambda_FMT"].get<double>() - 0.75) < 1e-9);
  CHECK(std::abs(t["lambda_AW"].get<double>() - 0.8836) < 1e-9);
  CHECK(std::abs(t["lambda_EL"].get<double>() - 3.0) < 1e-9);
  CHECK(std::abs(t["lambda_paper"].get<double>() - 2.0) < 1e-5);
  CHECK(j["value"].get<double>() > 1.9);
}

TEST_CASE("reproduce reruns a pinned example") {
  const fs::path dir = fresh_dir("reproduce");
  CHECK(run_cli("reproduce critical-torus --out " + dir.string()) == 0);
  const Json j = report_in(dir, "reproduce_critical-torus.json");
  CHECK(j["pass"] == true);
  CHECK(j["quantities"].size() > 0);
}
