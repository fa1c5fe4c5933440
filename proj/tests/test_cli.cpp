// Copyright 2026 The qfid Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <string>
#include <sys/wait.h>

#include "test_helpers.hpp"

using namespace qfid;
using Catch::Matchers::WithinAbs;

namespace {

struct CliResult {
  int exit_code;
  std::string output;  // stdout and stderr combined
};

/// Runs the installed CLI with `args`, capturing combined output.
CliResult run_cli(const std::string& args, qfid_test::TempDir& dir) {
  static int run_counter = 0;
  const std::string out = dir.file("cli_out_" + std::to_string(run_counter++));
  const std::string cmd =
      std::string(QFID_CLI_PATH) + " " + args + " > " + out + " 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return CliResult{WEXITSTATUS(status), qfid_test::read_file(out)};
}

/// The diagonal worked example: rho = diag(3/4, 1/4), sigma = I/2.
void write_worked_example(qfid_test::TempDir& dir) {
  save_state(dir.file("rho.json"), qfid_test::diag_state({0.75, 0.25}));
  save_state(dir.file("sigma.json"), qfid_test::diag_state({0.5, 0.5}));
}

}  // namespace

TEST_CASE("cli reports its version") {
  qfid_test::TempDir dir;
  const CliResult r = run_cli("--version", dir);
  CHECK(r.exit_code == 0);
  CHECK(r.output == "qfid 0.1.0\n");
}

TEST_CASE("cli metrics prints the aligned human report") {
  qfid_test::TempDir dir;
  write_worked_example(dir);
  const CliResult r =
      run_cli("metrics " + dir.file("rho.json") + " " + dir.file("sigma.json"),
              dir);
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("fidelity         0.9659258262890682") !=
        std::string::npos);
  CHECK(r.output.find("trace_norm       0.5") != std::string::npos);
  CHECK(r.output.find("lambda0          1.") != std::string::npos);
  CHECK(r.output.find("fvdg_lower       0.75") != std::string::npos);
  CHECK(r.output.find("new_lower        0.8623724356957945") !=
        std::string::npos);
  CHECK(r.output.find("fvdg_saturated   false") != std::string::npos);
  CHECK(r.output.find("states_equal     false") != std::string::npos);
}

TEST_CASE("cli metrics --json emits the full report document") {
  qfid_test::TempDir dir;
  write_worked_example(dir);
  const CliResult r = run_cli("metrics " + dir.file("rho.json") + " " +
                                  dir.file("sigma.json") + " --json",
                              dir);
  REQUIRE(r.exit_code == 0);
  const nlohmann::json j = nlohmann::json::parse(r.output);
  CHECK_THAT(j.at("fidelity").get<double>(),
             WithinAbs(0.9659258262890682, 1e-12));
  CHECK_THAT(j.at("trace_norm").get<double>(), WithinAbs(0.5, 1e-12));
  CHECK_THAT(j.at("s_max").get<double>(),
             WithinAbs(0.4054651081081644, 1e-12));
  CHECK_THAT(j.at("lambda0").get<double>(), WithinAbs(1.5, 1e-12));
  CHECK_THAT(j.at("fvdg_upper").get<double>(),
             WithinAbs(0.9682458365518543, 1e-12));
  CHECK_THAT(j.at("gap_new_vs_fvdg").get<double>(),
             WithinAbs(0.1123724356957945, 1e-12));
  CHECK_FALSE(j.at("fvdg_saturated").get<bool>());
  CHECK_FALSE(j.at("s_max_infinite").get<bool>());
  CHECK_FALSE(j.at("states_equal").get<bool>());
}

TEST_CASE("cli metrics flags equal states and infinite s_max") {
  qfid_test::TempDir dir;
  save_state(dir.file("a.json"), qfid_test::ket_plus());
  save_state(dir.file("b.json"), qfid_test::ket_zero());
  const CliResult inf_pair =
      run_cli("metrics " + dir.file("a.json") + " " + dir.file("b.json"), dir);
  CHECK(inf_pair.exit_code == 0);
  CHECK(inf_pair.output.find("s_max            inf") != std::string::npos);
  CHECK(inf_pair.output.find("lambda0          inf") != std::string::npos);

  const CliResult same =
      run_cli("metrics " + dir.file("a.json") + " " + dir.file("a.json"), dir);
  CHECK(same.exit_code == 0);
  CHECK(same.output.find("trace_norm       0\n") != std::string::npos);
  CHECK(same.output.find("states_equal     true") != std::string::npos);
}

TEST_CASE("cli input failures exit with code 2") {
  qfid_test::TempDir dir;
  write_worked_example(dir);
  CHECK(run_cli("metrics " + dir.file("no_such.json") + " " +
                    dir.file("sigma.json"),
                dir)
            .exit_code == 2);

  qfid_test::write_file(dir.file("broken.json"), "{");
  CHECK(run_cli("metrics " + dir.file("broken.json") + " " +
                    dir.file("sigma.json"),
                dir)
            .exit_code == 2);

  CHECK(run_cli("verify --lambda-grid 1.5 --trials-per-cell 1", dir)
            .exit_code == 2);
  CHECK(run_cli("--no-such-flag", dir).exit_code == 2);
  CHECK(run_cli("", dir).exit_code == 2);
}

TEST_CASE("cli dimension mismatches exit with code 3") {
  qfid_test::TempDir dir;
  save_state(dir.file("d2.json"), maximally_mixed(2));
  save_state(dir.file("d3.json"), maximally_mixed(3));
  const CliResult r =
      run_cli("metrics " + dir.file("d2.json") + " " + dir.file("d3.json"),
              dir);
  CHECK(r.exit_code == 3);
}

TEST_CASE("cli verify exits with code 4 when checks genuinely fail") {
  qfid_test::TempDir dir;
  // A huge spectrum truncation floor corrupts every matrix square root, so
  // the verified inequalities really do break; the run must say so.
  qfid_test::write_file(
      dir.file("bad.json"),
      R"({"dims": [2, 3], "trials_per_cell": 5, "scalar_trials": 10,
          "classical_trials": 5, "brute_subsample": 2, "brute_resolution": 20,
          "max_dist_length": 8,
          "tolerances": {"spectrum_junk_floor": 0.5}})");
  const CliResult r =
      run_cli("verify --config " + dir.file("bad.json"), dir);
  CHECK(r.exit_code == 4);
  // Without --output the summary goes to stdout.
  const nlohmann::json summary = nlohmann::json::parse(r.output);
  CHECK(summary.at("total_violations").get<std::uint64_t>() > 0);
}

TEST_CASE("cli verify artifacts do not depend on the thread count") {
  qfid_test::TempDir dir;
  qfid_test::write_file(
      dir.file("cfg.json"),
      R"({"dims": [2, 3], "trials_per_cell": 6, "scalar_trials": 200,
          "classical_trials": 50, "brute_subsample": 5,
          "max_dist_length": 8, "seed": 11})");
  const CliResult r1 = run_cli("verify --config " + dir.file("cfg.json") +
                                   " --threads 1 --output " + dir.file("a.csv"),
                               dir);
  const CliResult r4 = run_cli("verify --config " + dir.file("cfg.json") +
                                   " --threads 4 --output " + dir.file("b.csv"),
                               dir);
  REQUIRE(r1.exit_code == 0);
  REQUIRE(r4.exit_code == 0);
  CHECK(r1.output == "wrote " + dir.file("a.csv") + " (48 rows, 0 violations)\n");
  CHECK(qfid_test::read_file(dir.file("a.csv")) ==
        qfid_test::read_file(dir.file("b.csv")));
  CHECK(qfid_test::read_file(dir.file("a.summary.json")) ==
        qfid_test::read_file(dir.file("b.summary.json")));
}

TEST_CASE("cli saturate and compare-bounds write their report contracts") {
  qfid_test::TempDir dir;
  const std::string small =
      " --dims 2 --trials-per-cell 10 --scalar-trials 10"
      " --classical-trials 5 --brute-subsample 2 --brute-resolution 20"
      " --max-dist-length 8";
  const CliResult sat = run_cli(
      "saturate" + small + " --top-k 3 --output " + dir.file("sat.csv"), dir);
  REQUIRE(sat.exit_code == 0);
  const std::string sat_body = qfid_test::read_file(dir.file("sat.csv"));
  CHECK(sat_body.rfind("source,dim,ensemble,trial,slack,", 0) == 0);
  CHECK(sat_body.find("baseline_orthogonal_pure") != std::string::npos);
  CHECK(sat_body.find("baseline_equal_states") != std::string::npos);

  const CliResult cmp = run_cli(
      "compare-bounds" + small + " --output " + dir.file("cmp.csv"), dir);
  REQUIRE(cmp.exit_code == 0);
  const std::string cmp_body = qfid_test::read_file(dir.file("cmp.csv"));
  CHECK(cmp_body.rfind(
            "dim,ensemble,trial,trace_norm,s_max,fvdg_lower,new_lower,"
            "fidelity,gap_new_vs_fvdg\n",
            0) == 0);
}
