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

// Acceptance gate: exercises every guarantee the library advertises, at the
// advertised tolerances and sample volumes, and prints one pass/fail line per
// criterion. Exits nonzero if any criterion fails. The randomized volume
// criteria reuse one full default verification campaign so that the gate
// certifies exactly what `qfid verify` certifies.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "test_helpers.hpp"

namespace {

using namespace qfid;

struct Gate {
  int failures = 0;

  void report(int n, const std::string& desc, bool ok,
              const std::string& detail) {
    std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << n << ": "
              << desc;
    if (!detail.empty()) std::cout << " (" << detail << ")";
    std::cout << "\n" << std::flush;
    if (!ok) ++failures;
  }
};

/// Finds one named check in a campaign summary; null if absent.
const nlohmann::json* find_check(const nlohmann::json& summary,
                                 const std::string& name) {
  if (!summary.contains("checks")) return nullptr;
  for (const auto& item : summary.at("checks")) {
    if (item.at("name") == name) return &item;
  }
  return nullptr;
}

/// True when the named check ran `expect_checks` times (0 = any positive
/// count), with zero violations, at exactly the advertised tolerance.
bool check_clean(const nlohmann::json& summary, const std::string& name,
                 double expect_tol, std::uint64_t expect_checks,
                 std::string& why) {
  const nlohmann::json* c = find_check(summary, name);
  if (c == nullptr) {
    why += name + " missing; ";
    return false;
  }
  bool ok = true;
  if (c->at("tolerance").get<double>() != expect_tol) {
    why += name + " tolerance drifted; ";
    ok = false;
  }
  const std::uint64_t ran = c->at("checks").get<std::uint64_t>();
  if (expect_checks > 0 ? ran != expect_checks : ran == 0) {
    why += name + " ran " + std::to_string(ran) + " times; ";
    ok = false;
  }
  const std::uint64_t bad = c->at("violations").get<std::uint64_t>();
  if (bad != 0) {
    why += name + " had " + std::to_string(bad) + " violations; ";
    ok = false;
  }
  return ok;
}

int run_cli(const std::string& args, const std::string& capture_path) {
  const std::string cmd =
      std::string(QFID_CLI_PATH) + " " + args + " > " + capture_path + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string fmt(double v) { return format_double(v); }

}  // namespace

int main() {
  Gate gate;
  qfid_test::TempDir dir;

  // One full default campaign: dims {2,3,4,6,8} x 4 ensembles x 10000 trials,
  // the 11-point lambda grid, 100000 scalar draws, 10000 distribution pairs,
  // and 100 grid-searched qubit pairs per qubit cell.
  const CampaignConfig config;
  const CampaignOutcome campaign = run_verify(config);
  const nlohmann::json& summary = campaign.summary;
  const std::uint64_t pairs = static_cast<std::uint64_t>(
      config.dims.size() * config.ensembles.size() * config.trials_per_cell);

  // Criterion 1: the sharpened lower bound sits between the generic lower
  // bound and the fidelity on every sampled pair.
  {
    std::string why;
    bool ok = check_clean(summary, "smax_lower_le_fidelity", 1e-8, pairs, why);
    ok &= check_clean(summary, "fvdg_lower_le_smax_lower", 1e-12, pairs, why);
    std::ostringstream detail;
    if (why.empty()) {
      detail << pairs << " pairs, min slack "
             << find_check(summary, "smax_lower_le_fidelity")
                    ->at("min_slack")
                    .dump();
    } else {
      detail << why;
    }
    gate.report(1, "sharpened lower bound bracketed by fidelity on all pairs",
                ok, detail.str());
  }

  // Criterion 2: the mixture bound holds across the lambda grid and its
  // endpoints collapse to the generic bound and to 1.
  {
    std::string why;
    const std::uint64_t grid_checks =
        pairs * static_cast<std::uint64_t>(config.lambda_grid.size());
    bool ok = check_clean(summary, "mixture_bound", 1e-8, grid_checks, why);
    ok &= check_clean(summary, "mixture_lambda0_matches_fvdg_lower", 1e-10,
                      pairs, why);
    ok &= check_clean(summary, "mixture_lambda1_trivial_endpoint", 1e-10,
                      pairs, why);
    std::ostringstream detail;
    if (why.empty()) {
      detail << grid_checks << " mixtures, min slack "
             << find_check(summary, "mixture_bound")->at("min_slack").dump();
    } else {
      detail << why;
    }
    gate.report(2, "mixture lower bound holds with exact endpoints", ok,
                detail.str());
  }

  // Criterion 3: the classical mixture bound holds on random distribution
  // pairs and matches the matrix bound under diagonal embedding.
  {
    std::string why;
    bool ok = check_clean(summary, "classical_mixture_bound", 1e-10,
                          config.classical_trials, why);
    ok &= check_clean(summary, "diagonal_embedding_lhs_agreement", 1e-9, 0, why);
    ok &= check_clean(summary, "diagonal_embedding_rhs_agreement", 1e-9, 0, why);
    std::ostringstream detail;
    if (why.empty()) {
      detail << config.classical_trials << " distribution pairs";
    } else {
      detail << why;
    }
    gate.report(3, "classical mixture bound and diagonal embedding agree", ok,
                detail.str());
  }

  // Criterion 4: the scalar square-root inequality and its exact difference
  // identity hold on 100000 uniform draws of (a, lambda) in [0,100] x [0,1].
  {
    Rng rng(derive_seed(2026, 0xACCE97ull));
    double min_slack = std::numeric_limits<double>::infinity();
    double max_resid = 0.0;
    std::uint64_t bad = 0;
    const std::uint64_t n = 100000;
    for (std::uint64_t i = 0; i < n; ++i) {
      const double a = rng.uniform(0.0, 100.0);
      const double lambda = rng.uniform(0.0, 1.0);
      const ScalarInequality s = scalar_mixture_inequality(a, lambda);
      const double scale = std::max(1.0, s.lhs * s.lhs);
      const double slack = (s.lhs - s.rhs) / std::max(1.0, s.lhs);
      const double root = 1.0 - std::sqrt(lambda);
      const double resid =
          std::abs(s.lhs * s.lhs - s.rhs * s.rhs - root * root * a) / scale;
      min_slack = std::min(min_slack, slack);
      max_resid = std::max(max_resid, resid);
      if (slack < -1e-12 || resid > 1e-9) ++bad;
    }
    std::ostringstream detail;
    detail << n << " draws, min slack " << fmt(min_slack) << ", max residual "
           << fmt(max_resid);
    if (bad > 0) detail << ", " << bad << " violations";
    gate.report(4, "scalar square-root inequality and identity hold", bad == 0,
                detail.str());
  }

  // Criterion 5: the optimal measurements attain their targets, and the
  // brute-force qubit grid search independently confirms both extrema.
  {
    std::string why;
    bool ok = check_clean(summary, "helstrom_attains_trace_norm", 1e-8, pairs,
                          why);
    ok &= check_clean(summary, "fuchs_caves_attains_fidelity", 1e-7, 0, why);
    ok &= check_clean(summary, "grid_l1_matches_trace_norm", 1e-3, 0, why);
    ok &= check_clean(summary, "grid_fidelity_matches_fidelity", 1e-3, 0, why);
    const nlohmann::json* grid =
        find_check(summary, "grid_fidelity_matches_fidelity");
    const std::uint64_t grid_pairs =
        grid == nullptr ? 0 : grid->at("checks").get<std::uint64_t>();
    if (grid_pairs < 100) {
      why += "only " + std::to_string(grid_pairs) + " grid pairs; ";
      ok = false;
    }
    std::ostringstream detail;
    if (why.empty()) {
      detail << pairs << " measurement pairs, " << grid_pairs
             << " grid-searched qubit pairs";
    } else {
      detail << why;
    }
    gate.report(5, "optimal measurements attain trace norm and fidelity", ok,
                detail.str());
  }

  // Criterion 6: the diagonal worked example reproduces every report field
  // and its sigma-hat decomposition.
  {
    const DensityMatrix rho = qfid_test::diag_state({0.75, 0.25});
    const DensityMatrix sigma = qfid_test::diag_state({0.5, 0.5});
    const BoundReport rep = bound_report(rho, sigma);
    std::string why;
    auto expect = [&](const char* name, double got, double want) {
      if (std::abs(got - want) > 1e-6) {
        why += std::string(name) + " = " + fmt(got) + " want " + fmt(want) +
               "; ";
      }
    };
    expect("fidelity", rep.fidelity, 0.9659258262890682);
    expect("trace_norm", rep.trace_norm, 0.5);
    expect("s_max", rep.s_max.value(), 0.4054651081081644);
    expect("lambda0", rep.lambda0.value(), 1.5);
    expect("fvdg_lower", rep.fvdg_lower, 0.75);
    expect("fvdg_upper", rep.fvdg_upper, 0.9682458365518543);
    expect("new_lower", rep.new_lower, 0.8623724356957945);
    expect("gap", rep.gap_new_vs_fvdg, 0.1123724356957945);

    const HatSigmaDecomposition hat = hat_sigma_decomposition(rho, sigma);
    expect("hat.lambda0", hat.lambda0, 1.5);
    expect("hat.weight_rho", hat.weight_rho, 2.0 / 3.0);
    ComplexMatrix excited(2);
    excited(1, 1) = cplx(1.0, 0.0);
    if (max_abs_diff(hat.sigma_hat.mat(), excited) > 1e-6) {
      why += "sigma_hat off by " +
             fmt(max_abs_diff(hat.sigma_hat.mat(), excited)) + "; ";
    }
    gate.report(6, "worked example reproduces report and decomposition",
                why.empty(), why.empty() ? "all fields within 1e-6" : why);
  }

  // Criterion 7: saturation analysis classifies the three boundary
  // geometries: orthogonal pure, identical, and infinite-divergence
  // non-saturating.
  {
    std::string why;
    const SaturationReport orth =
        saturation_report(qfid_test::ket_zero(), qfid_test::ket_one());
    if (!orth.fvdg_lower_saturated || !orth.s_max_infinite ||
        orth.states_equal || std::abs(orth.slack) > 1e-9) {
      why += "orthogonal pure misclassified; ";
    }
    const SaturationReport same =
        saturation_report(maximally_mixed(2), maximally_mixed(2));
    if (!same.fvdg_lower_saturated || !same.states_equal ||
        same.s_max_infinite || std::abs(same.slack) > 1e-9) {
      why += "equal states misclassified; ";
    }
    const SaturationReport apart =
        saturation_report(qfid_test::ket_plus(), qfid_test::ket_zero());
    if (!apart.s_max_infinite || apart.fvdg_lower_saturated) {
      why += "infinite-divergence pair misclassified; ";
    }
    if (std::abs(apart.fidelity - 0.7071067811865476) > 1e-6 ||
        std::abs((1.0 - apart.trace_norm / 2.0) - 0.2928932188134524) > 1e-6) {
      why += "infinite-divergence gap values off; ";
    }
    if (!orth.implication_holds || !same.implication_holds ||
        !apart.implication_holds) {
      why += "saturation implication broken; ";
    }
    gate.report(7, "saturation analysis classifies boundary geometries",
                why.empty(),
                why.empty() ? "slack 0 cases and strict-gap case" : why);
  }

  // Criterion 8: the orthogonal-pure witness at lambda = 1/4 meets its
  // mixture bound with equality at value 1/2.
  {
    const MixtureCase mc =
        MixtureCase::make(qfid_test::ket_zero(), qfid_test::ket_one(), 0.25);
    const double lhs = fidelity(mc.rho(), mc.mixed());
    const double rhs = mixture_bound(mc).bound;
    const bool ok = std::abs(lhs - 0.5) <= 1e-9 && std::abs(rhs - 0.5) <= 1e-9;
    gate.report(8, "orthogonal-pure mixture witness is tight at lambda 1/4",
                ok, "lhs " + fmt(lhs) + ", rhs " + fmt(rhs));
  }

  // Criterion 9: the CLI produces identical artifacts under different thread
  // counts, honors its exit-code table, and round-trips states through disk.
  {
    std::string why;
    qfid_test::write_file(
        dir.file("cfg.json"),
        R"({"dims": [2, 3], "trials_per_cell": 6, "scalar_trials": 200,
            "classical_trials": 50, "brute_subsample": 5,
            "max_dist_length": 8, "seed": 11})");
    const int d1 = run_cli("verify --config " + dir.file("cfg.json") +
                               " --threads 1 --output " + dir.file("a.csv"),
                           dir.file("log1"));
    const int d4 = run_cli("verify --config " + dir.file("cfg.json") +
                               " --threads 4 --output " + dir.file("b.csv"),
                           dir.file("log4"));
    if (d1 != 0 || d4 != 0) why += "determinism runs exited nonzero; ";
    if (qfid_test::read_file(dir.file("a.csv")) !=
        qfid_test::read_file(dir.file("b.csv"))) {
      why += "row artifacts differ across thread counts; ";
    }
    if (qfid_test::read_file(dir.file("a.summary.json")) !=
        qfid_test::read_file(dir.file("b.summary.json"))) {
      why += "summaries differ across thread counts; ";
    }

    save_state(dir.file("rho.json"), qfid_test::diag_state({0.75, 0.25}));
    save_state(dir.file("sigma.json"), qfid_test::diag_state({0.5, 0.5}));
    save_state(dir.file("d3.json"), maximally_mixed(3));
    qfid_test::write_file(
        dir.file("degraded.json"),
        R"({"dims": [2, 3], "trials_per_cell": 5, "scalar_trials": 10,
            "classical_trials": 5, "brute_subsample": 2,
            "brute_resolution": 20, "max_dist_length": 8,
            "tolerances": {"spectrum_junk_floor": 0.5}})");
    const int ok_code = run_cli(
        "metrics " + dir.file("rho.json") + " " + dir.file("sigma.json"),
        dir.file("log_ok"));
    const int input_code = run_cli(
        "metrics " + dir.file("missing.json") + " " + dir.file("sigma.json"),
        dir.file("log_in"));
    const int shape_code = run_cli(
        "metrics " + dir.file("rho.json") + " " + dir.file("d3.json"),
        dir.file("log_shape"));
    const int violation_code = run_cli(
        "verify --config " + dir.file("degraded.json"), dir.file("log_viol"));
    if (ok_code != 0 || input_code != 2 || shape_code != 3 ||
        violation_code != 4) {
      std::ostringstream got;
      got << "exit codes " << ok_code << "/" << input_code << "/" << shape_code
          << "/" << violation_code << " want 0/2/3/4; ";
      why += got.str();
    }

    const DensityMatrix state = qfid_test::random_state(EnsembleKind::bures, 3, 0);
    save_state(dir.file("round.json"), state);
    const DensityMatrix back = load_state(dir.file("round.json"));
    if (max_abs_diff(back.mat(), state.mat()) > 1e-15) {
      why += "state round-trip drifted; ";
    }
    gate.report(9, "CLI determinism, exit codes, and round-trip hold",
                why.empty(),
                why.empty() ? "threads 1 vs 4 byte-identical, codes 0/2/3/4"
                            : why);
  }

  if (gate.failures == 0) {
    std::cout << "acceptance: all 9 criteria passed\n";
    return 0;
  }
  std::cout << "acceptance: " << gate.failures << " criteria FAILED\n";
  return 1;
}
