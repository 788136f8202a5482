// End-to-end checks of the command-line tool. The binary path comes from the
// EWJN_CLI environment variable (set by the CTest fixture); the suite is
// skipped when it is absent.

#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace {

namespace fs = std::filesystem;

const char* cli_path() { return std::getenv("EWJN_CLI"); }

int run(const std::string& args) {
  const std::string cmd = std::string(cli_path()) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

fs::path write_tmp(const std::string& name, const std::string& text) {
  const fs::path p = fs::temp_directory_path() / name;
  std::ofstream out(p);
  out << text;
  return p;
}

const char* kConfig = R"({
  "environment": { "omega": 1e10, "temperature": 0.0 },
  "objects": [
    { "type": "sphere", "center": [0, 0, 0], "radius": 1e-5,
      "length_unit": "cm",
      "conductivity": { "value": 1.6e7, "unit": "si_S_per_m" } }
  ]
})";

const char* kFailingConfig = R"({
  "environment": { "omega": 1e10, "temperature": 0.0 },
  "objects": [
    { "type": "sphere", "center": [0, 0, 0], "radius": 0.1,
      "length_unit": "cm",
      "conductivity": { "value": 1.6e7, "unit": "si_S_per_m" } }
  ]
})";

}  // namespace

TEST_CASE("command-line exit codes and artifacts") {
  if (!cli_path()) {
    SKIP("EWJN_CLI not set");
  }
  const fs::path cfg = write_tmp("ewjn_cli_cfg.json", kConfig);
  const fs::path bad = write_tmp("ewjn_cli_bad.json", "{ not json");
  const fs::path failing = write_tmp("ewjn_cli_fail.json", kFailingConfig);

  SECTION("validate: pass -> 0, regime failure -> 1, parse error -> 2") {
    CHECK(run("validate " + cfg.string()) == 0);
    CHECK(run("validate " + failing.string()) == 1);
    CHECK(run("validate " + bad.string()) == 2);
    CHECK(run("validate /nonexistent.json") == 2);
  }
  SECTION("numerical domain errors -> 3") {
    const fs::path qubits = write_tmp("ewjn_cli_qubits.txt", "0, 0, 0.5a\n");
    CHECK(run("report " + cfg.string() + " --qubits " + qubits.string()) == 3);
    fs::remove(qubits);
  }
  SECTION("map writes CSV and PGM deterministically") {
    const fs::path prefix = fs::temp_directory_path() / "ewjn_cli_map";
    const std::string args = "map " + cfg.string() +
                             " --quantity F_zz --mode nonlocal --src 0,0,2a"
                             " --engine multipole --L 3 --samples 31 --out " +
                             prefix.string();
    REQUIRE(run(args) == 0);
    std::ifstream csv(prefix.string() + ".csv", std::ios::binary);
    std::ostringstream first;
    first << csv.rdbuf();
    REQUIRE(run(args) == 0);
    std::ifstream csv2(prefix.string() + ".csv", std::ios::binary);
    std::ostringstream second;
    second << csv2.rdbuf();
    CHECK(first.str() == second.str());
    CHECK(fs::file_size(prefix.string() + ".pgm") > 0);
    fs::remove(prefix.string() + ".csv");
    fs::remove(prefix.string() + ".pgm");
  }
  SECTION("report runs end to end") {
    const fs::path qubits = write_tmp("ewjn_cli_q2.txt", "2a, 0, 0\n0, 0, 2a\n");
    const fs::path out = fs::temp_directory_path() / "ewjn_cli_report.csv";
    CHECK(run("report " + cfg.string() + " --qubits " + qubits.string() +
              " --field z --out " + out.string()) == 0);
    std::ifstream in(out);
    std::ostringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str().find("qubit,0") != std::string::npos);
    CHECK(ss.str().find("pair,0,1") != std::string::npos);
    fs::remove(qubits);
    fs::remove(out);
  }
  SECTION("compare runs end to end") {
    const fs::path pts = write_tmp("ewjn_cli_pts.txt", "0,0,2.5a,0,0,-2.5a\n");
    const fs::path out = fs::temp_directory_path() / "ewjn_cli_cmp.csv";
    CHECK(run("compare " + cfg.string() + " --points " + pts.string() +
              " --L 8 --resolution 16 --out " + out.string()) == 0);
    CHECK(fs::file_size(out) > 0);
    fs::remove(pts);
    fs::remove(out);
  }

  fs::remove(cfg);
  fs::remove(bad);
  fs::remove(failing);
}
