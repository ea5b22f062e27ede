// Copyright 2026 The pswap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Drives the installed command-line binary and checks exit codes and files.

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

fs::path workdir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("pswap_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run(const std::string& args, const fs::path& log) {
  const std::string cmd =
      std::string("\"") + PSWAP_CLI + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("gate-check succeeds on the bundled network") {
  const fs::path dir = workdir("gate");
  CHECK(run("gate-check --out " + dir.string(), dir / "log") == 0);
  const std::string csv = slurp(dir / "gate_check.csv");
  CHECK(csv.starts_with("phi,operator_distance,p_min,p_max,passed\n"));
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 21);
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["mode"] == "gate-check");
  CHECK(manifest["tool"] == "pswap");
}

TEST_CASE("exit codes") {
  const fs::path dir = workdir("codes");
  SUBCASE("usage errors") {
    CHECK(run("", dir / "log") == 2);
    CHECK(run("gate-check --bogus", dir / "log") == 2);
    CHECK(run("tomo-state --phi 0 --phi-grid 4:8", dir / "log") == 2);
    CHECK(run("tomo-state --phi banana --out " + dir.string(), dir / "log") == 2);
    CHECK(run("gate-check --net " + (dir / "missing.net").string(), dir / "log") == 2);
    CHECK(run("tomo-state --v 1.5 --out " + dir.string(), dir / "log") == 2);
  }
  SUBCASE("netlist parse error") {
    write(dir / "bad.net", "mode a, b, c, d\nbs BS1 in=a,b out=c r=0.5\n");
    CHECK(run("gate-check --out " + dir.string() + " --net " + (dir / "bad.net").string(),
              dir / "log") == 3);
    CHECK(slurp(dir / "log").find("line 2") != std::string::npos);
  }
  SUBCASE("dataset parse error") {
    write(dir / "bad.txt", "garbage\n");
    CHECK(run("tomo-state --out " + dir.string() + " --data " + (dir / "bad.txt").string(),
              dir / "log") == 3);
  }
  SUBCASE("gate assertion failure") {
    write(dir / "skew.net",
          "mode a, b, upper, lower, v3, v4, mid_u, out1, mid_l, loss4, out2, mz\n"
          "bs BS1 in=a,b out=upper,lower r=0.4\n"
          "phase PHI on=lower value=param:phi\n"
          "bs BS3 in=upper,v3 out=mid_u,out1 r=0.5\n"
          "bs BS4 in=lower,v4 out=mid_l,loss4 r=0.5\n"
          "bs BS2 in=mid_u,mid_l out=out2,mz r=0.5\n"
          "postselect coincidence out1,out2\n");
    CHECK(run("tomo-state --phi 0 --out " + dir.string() + " --net " +
                  (dir / "skew.net").string(),
              dir / "log") == 5);
    CHECK_FALSE(fs::exists(dir / "states.csv"));
  }
  SUBCASE("help and version") {
    CHECK(run("--help", dir / "log") == 0);
    CHECK(slurp(dir / "log").find("Exit codes") != std::string::npos);
    CHECK(run("--version", dir / "log") == 0);
  }
}

TEST_CASE("ef-scan analytic column") {
  const fs::path dir = workdir("ef");
  REQUIRE(run("ef-scan --exact --ideal --phi 0,pi/2 --out " + dir.string(), dir / "log") == 0);
  std::istringstream csv(slurp(dir / "ef_scan.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "phi,input,E_f_reconstructed,E_f_analytic");
  int rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    std::istringstream fields(line);
    std::string phi, input, recon, analytic;
    std::getline(fields, phi, ',');
    std::getline(fields, input, ',');
    std::getline(fields, recon, ',');
    std::getline(fields, analytic, ',');
    const double a = std::stod(analytic);
    if (input == "XX") CHECK(a == 0.0);
    if (phi != "0") {
      if (input == "YX") CHECK(a == doctest::Approx(1.0).epsilon(1e-12));
      if (input == "HX") CHECK(a == doctest::Approx(0.3546).epsilon(1e-4));
    }
    CHECK(std::abs(std::stod(recon) - a) < 1e-3);
  }
  CHECK(rows == 8);
}

TEST_CASE("simulate then re-analyse") {
  const fs::path first = workdir("sim"), second = workdir("reanalyse");
  REQUIRE(run("tomo-state --phi 3pi/4 --seed 11 --out " + first.string(), first / "log") == 0);
  REQUIRE(fs::exists(first / "dataset.txt"));
  REQUIRE(run("tomo-state --phi 3pi/4 --out " + second.string() + " --data " +
                  (first / "dataset.txt").string(),
              second / "log") == 0);
  CHECK(slurp(first / "states.csv") == slurp(second / "states.csv"));

  const fs::path again = workdir("sim_again");
  REQUIRE(run("tomo-state --phi 3pi/4 --seed 11 --out " + again.string(), again / "log") == 0);
  CHECK(slurp(first / "dataset.txt") == slurp(again / "dataset.txt"));
  CHECK(slurp(first / "states.csv") == slurp(again / "states.csv"));
}

TEST_CASE("hom-scan") {
  const fs::path dir = workdir("hom");
  REQUIRE(run("hom-scan --v 0.97 --mu 0.98 --out " + dir.string(), dir / "log") == 0);
  CHECK(slurp(dir / "hom_scan.csv").starts_with("overlap,coincidence,visibility\n"));
  CHECK(fs::exists(dir / "fringe.csv"));
}
