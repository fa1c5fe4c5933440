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

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qfid/qfid.hpp"

namespace {

// Exit-code contract: 0 success, 2 input error, 3 dimension mismatch,
// 4 inequality violation.
constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitShape = 3;
constexpr int kExitViolation = 4;

struct CampaignFlags {
  std::string config_path;
  std::vector<std::size_t> dims;
  std::vector<std::string> ensembles;
  std::size_t rank = 0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::vector<double> lambda_grid;
  std::string output_path;
  std::string format;
  std::size_t scalar_trials = 0;
  std::size_t classical_trials = 0;
  std::size_t max_dist_length = 0;
  std::size_t brute_subsample = 0;
  std::size_t brute_resolution = 0;
  std::size_t threads = 0;
  std::size_t top_k = 0;

  CLI::Option* o_config = nullptr;
  CLI::Option* o_dims = nullptr;
  CLI::Option* o_ens = nullptr;
  CLI::Option* o_rank = nullptr;
  CLI::Option* o_trials = nullptr;
  CLI::Option* o_seed = nullptr;
  CLI::Option* o_lambda = nullptr;
  CLI::Option* o_output = nullptr;
  CLI::Option* o_format = nullptr;
  CLI::Option* o_scalar = nullptr;
  CLI::Option* o_classical = nullptr;
  CLI::Option* o_maxlen = nullptr;
  CLI::Option* o_bsub = nullptr;
  CLI::Option* o_bres = nullptr;
  CLI::Option* o_threads = nullptr;
  CLI::Option* o_topk = nullptr;
};

void add_campaign_options(CLI::App* cmd, CampaignFlags& f) {
  f.o_config = cmd->add_option("--config", f.config_path,
                               "JSON config file (flags override it)");
  f.o_dims = cmd->add_option("--dims", f.dims, "dimensions to sample at");
  f.o_ens = cmd->add_option(
      "--ensembles", f.ensembles,
      "ensembles: pure_haar hilbert_schmidt bures rank_deficient");
  f.o_rank = cmd->add_option("--rank-deficient-rank", f.rank,
                             "rank for rank_deficient cells (0 = ceil(dim/2))");
  f.o_trials =
      cmd->add_option("--trials-per-cell", f.trials, "pairs per (dim, ensemble)");
  f.o_seed = cmd->add_option("--seed", f.seed, "campaign seed");
  f.o_lambda =
      cmd->add_option("--lambda-grid", f.lambda_grid, "mixture weights in [0,1]");
  f.o_output = cmd->add_option("--output", f.output_path, "report path");
  f.o_format = cmd->add_option("--format", f.format, "report format: csv | json");
  f.o_scalar = cmd->add_option("--scalar-trials", f.scalar_trials,
                               "scalar inequality section trials");
  f.o_classical = cmd->add_option("--classical-trials", f.classical_trials,
                                  "classical distribution section trials");
  f.o_maxlen = cmd->add_option("--max-dist-length", f.max_dist_length,
                               "longest sampled distribution");
  f.o_bsub = cmd->add_option("--brute-subsample", f.brute_subsample,
                             "stride between grid-checked qubit trials");
  f.o_bres = cmd->add_option("--brute-resolution", f.brute_resolution,
                             "grid resolution of the qubit oracle");
  f.o_threads =
      cmd->add_option("--threads", f.threads, "worker threads (0 = hardware)");
  f.o_topk = cmd->add_option("--top-k", f.top_k, "rows kept by the ranking");
}

qfid::CampaignConfig build_config(const CampaignFlags& f) {
  qfid::CampaignConfig c;
  if (f.o_config->count() > 0) {
    std::ifstream in(f.config_path);
    if (!in) throw qfid::InputError("cannot open config file: " + f.config_path);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw qfid::ParseError("invalid JSON in " + f.config_path + ": " +
                             e.what());
    }
    c = qfid::config_from_json(j);
  }
  if (f.o_dims->count() > 0) c.dims = f.dims;
  if (f.o_ens->count() > 0) {
    c.ensembles.clear();
    for (const std::string& name : f.ensembles) {
      const auto kind = qfid::ensemble_from_name(name);
      if (!kind) throw qfid::InvalidSpec("unknown ensemble: " + name);
      c.ensembles.push_back(*kind);
    }
  }
  if (f.o_rank->count() > 0) c.rank_deficient_rank = f.rank;
  if (f.o_trials->count() > 0) c.trials_per_cell = f.trials;
  if (f.o_seed->count() > 0) c.seed = f.seed;
  if (f.o_lambda->count() > 0) c.lambda_grid = f.lambda_grid;
  if (f.o_output->count() > 0) c.output_path = f.output_path;
  if (f.o_format->count() > 0) c.format = f.format;
  if (f.o_scalar->count() > 0) c.scalar_trials = f.scalar_trials;
  if (f.o_classical->count() > 0) c.classical_trials = f.classical_trials;
  if (f.o_maxlen->count() > 0) c.max_dist_length = f.max_dist_length;
  if (f.o_bsub->count() > 0) c.brute_subsample = f.brute_subsample;
  if (f.o_bres->count() > 0) c.brute_resolution = f.brute_resolution;
  if (f.o_threads->count() > 0) c.threads = f.threads;
  if (f.o_topk->count() > 0) c.top_k = f.top_k;
  c.validate();
  return c;
}

int run_metrics(const std::string& path_a, const std::string& path_b,
                bool as_json) {
  const qfid::Tolerances tol;
  const qfid::DensityMatrix rho = qfid::load_state(path_a, tol);
  const qfid::DensityMatrix sigma = qfid::load_state(path_b, tol);
  const qfid::BoundReport rep = qfid::bound_report(rho, sigma, {}, tol);
  const qfid::SaturationReport sat = qfid::saturation_report(rho, sigma, {}, tol);

  if (as_json) {
    nlohmann::json j = qfid::detail::report_to_json(rep);
    j["fvdg_saturated"] = sat.fvdg_lower_saturated;
    j["s_max_infinite"] = sat.s_max_infinite;
    j["states_equal"] = sat.states_equal;
    std::cout << j.dump(2) << "\n";
    return kExitOk;
  }

  auto ext = [](const qfid::ExtendedReal& v) {
    return v.is_infinite() ? std::string("inf") : qfid::format_double(v.value());
  };
  std::cout << "fidelity         " << qfid::format_double(rep.fidelity) << "\n"
            << "trace_norm       " << qfid::format_double(rep.trace_norm) << "\n"
            << "s_max            " << ext(rep.s_max) << "\n"
            << "lambda0          " << ext(rep.lambda0) << "\n"
            << "fvdg_lower       " << qfid::format_double(rep.fvdg_lower) << "\n"
            << "fvdg_upper       " << qfid::format_double(rep.fvdg_upper) << "\n"
            << "new_lower        " << qfid::format_double(rep.new_lower) << "\n"
            << "gap_new_vs_fvdg  " << qfid::format_double(rep.gap_new_vs_fvdg)
            << "\n"
            << "fvdg_saturated   " << (sat.fvdg_lower_saturated ? "true" : "false")
            << "\n"
            << "s_max_infinite   " << (sat.s_max_infinite ? "true" : "false")
            << "\n"
            << "states_equal     " << (sat.states_equal ? "true" : "false")
            << "\n";
  return kExitOk;
}

int finish_campaign(const qfid::CampaignConfig& cfg,
                    const qfid::CampaignOutcome& outcome) {
  if (cfg.output_path.empty()) {
    std::cout << outcome.summary.dump(2) << "\n";
  } else {
    std::cout << "wrote " << cfg.output_path << " ("
              << outcome.summary.at("row_count").get<std::uint64_t>()
              << " rows, " << outcome.total_violations << " violations)\n";
  }
  return outcome.total_violations == 0 ? kExitOk : kExitViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"density-matrix metrics and fidelity bound verification"};
  app.set_version_flag("--version", std::string(qfid::kToolName) + " " +
                                        std::string(qfid::kVersion));
  app.require_subcommand(1);

  std::string state_a, state_b;
  bool metrics_json = false;
  CLI::App* metrics =
      app.add_subcommand("metrics", "report metrics and bounds for two states");
  metrics->add_option("state_a", state_a, "first state file")->required();
  metrics->add_option("state_b", state_b, "second state file")->required();
  metrics->add_flag("--json", metrics_json, "emit machine-readable JSON");

  CampaignFlags verify_flags, saturate_flags, compare_flags;
  CLI::App* verify = app.add_subcommand(
      "verify", "randomized verification campaign over all inequalities");
  add_campaign_options(verify, verify_flags);
  CLI::App* saturate = app.add_subcommand(
      "saturate", "rank sampled pairs by the slack of the generic lower bound");
  add_campaign_options(saturate, saturate_flags);
  CLI::App* compare = app.add_subcommand(
      "compare-bounds", "emit per-pair bound-gap rows for plotting");
  add_campaign_options(compare, compare_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (metrics->parsed()) {
      return run_metrics(state_a, state_b, metrics_json);
    }
    if (verify->parsed()) {
      const qfid::CampaignConfig cfg = build_config(verify_flags);
      return finish_campaign(cfg, qfid::run_verify(cfg));
    }
    if (saturate->parsed()) {
      const qfid::CampaignConfig cfg = build_config(saturate_flags);
      return finish_campaign(cfg, qfid::run_saturate(cfg));
    }
    if (compare->parsed()) {
      const qfid::CampaignConfig cfg = build_config(compare_flags);
      return finish_campaign(cfg, qfid::run_compare(cfg));
    }
  } catch (const qfid::ShapeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitShape;
  } catch (const qfid::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitOk;
}
