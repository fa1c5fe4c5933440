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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "qfid/bounds.hpp"
#include "qfid/errors.hpp"
#include "qfid/metrics.hpp"
#include "qfid/rng.hpp"
#include "qfid/state_io.hpp"
#include "qfid/states.hpp"
#include "qfid/tolerances.hpp"
#include "qfid/version.hpp"

namespace qfid {

/// Knobs for the randomized verification campaigns. Defaults match the
/// full verification run documented in the README; scale trials down for
/// smoke runs. `threads` and `output_path` never influence computed values,
/// so they are excluded from the config echo in reports.
struct CampaignConfig {
  std::vector<std::size_t> dims = {2, 3, 4, 6, 8};
  std::vector<EnsembleKind> ensembles = {
      EnsembleKind::pure_haar, EnsembleKind::hilbert_schmidt,
      EnsembleKind::bures, EnsembleKind::rank_deficient};
  std::size_t rank_deficient_rank = 0;  // 0 selects ceil(dim / 2) per cell
  std::size_t trials_per_cell = 10000;
  std::uint64_t seed = 1;
  std::vector<double> lambda_grid = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5,
                                     0.6, 0.7, 0.8, 0.9, 1.0};
  Tolerances tolerances{};
  std::string output_path{};
  std::string format = "csv";
  std::size_t scalar_trials = 100000;
  std::size_t classical_trials = 10000;
  std::size_t max_dist_length = 64;
  std::size_t brute_subsample = 100;  // stride between grid-checked qubit trials
  std::size_t brute_resolution = 200;
  std::size_t threads = 0;  // 0 selects the hardware concurrency
  std::size_t top_k = 10;   // retained rows in the saturation ranking

  void validate() const {
    if (dims.empty()) throw InvalidSpec("dims must be nonempty");
    for (std::size_t d : dims) {
      if (d < 1) throw InvalidSpec("dims entries must be positive");
    }
    if (ensembles.empty()) throw InvalidSpec("ensembles must be nonempty");
    if (trials_per_cell < 1) throw InvalidSpec("trials_per_cell must be >= 1");
    for (double l : lambda_grid) {
      if (!(l >= 0.0) || !(l <= 1.0)) {
        throw InvalidLambda("lambda_grid values must lie in [0, 1]");
      }
    }
    if (format != "csv" && format != "json") {
      throw InvalidSpec("format must be csv or json");
    }
    if (brute_subsample < 1) throw InvalidSpec("brute_subsample must be >= 1");
    if (brute_resolution < 2) throw InvalidSpec("brute_resolution must be >= 2");
    if (max_dist_length < 2) throw InvalidSpec("max_dist_length must be >= 2");
    if (top_k < 1) throw InvalidSpec("top_k must be >= 1");
  }

  std::size_t effective_threads() const {
    if (threads > 0) return threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
  }

  std::size_t rank_for(std::size_t dim) const {
    if (rank_deficient_rank > 0) return rank_deficient_rank;
    return (dim + 1) / 2;
  }
};

namespace detail {

inline nlohmann::json tolerances_to_json(const Tolerances& t) {
  return nlohmann::json{{"herm_tol", t.herm_tol},
                        {"psd_tol", t.psd_tol},
                        {"fn_tol", t.fn_tol},
                        {"rank_tol", t.rank_tol},
                        {"trace_tol", t.trace_tol},
                        {"recon_tol", t.recon_tol},
                        {"prob_clamp_tol", t.prob_clamp_tol},
                        {"dist_sum_tol", t.dist_sum_tol},
                        {"povm_sum_tol", t.povm_sum_tol},
                        {"unitary_tol", t.unitary_tol},
                        {"support_leak_tol", t.support_leak_tol},
                        {"deg_tol", t.deg_tol},
                        {"sat_tol", t.sat_tol},
                        {"state_eq_tol", t.state_eq_tol},
                        {"hat_sigma_psd_tol", t.hat_sigma_psd_tol},
                        {"mixture_tol", t.mixture_tol},
                        {"jacobi_sweep_budget", t.jacobi_sweep_budget},
                        {"jacobi_off_factor", t.jacobi_off_factor},
                        {"spectrum_junk_floor", t.spectrum_junk_floor}};
}

/// Accepts a JSON integer >= 0 whether the parser stored it as signed or
/// unsigned (in-memory documents built from C++ literals are signed).
inline bool nonneg_int(const nlohmann::json& v) {
  return v.is_number_unsigned() ||
         (v.is_number_integer() && v.get<long long>() >= 0);
}

inline void tolerances_from_json(const nlohmann::json& j, Tolerances& t) {
  if (!j.is_object()) throw InvalidSpec("tolerances must be an object");
  for (const auto& [key, value] : j.items()) {
    auto set = [&](double& field) {
      if (!value.is_number()) {
        throw InvalidSpec("tolerance " + key + " must be a number");
      }
      field = value.get<double>();
    };
    if (key == "herm_tol") set(t.herm_tol);
    else if (key == "psd_tol") set(t.psd_tol);
    else if (key == "fn_tol") set(t.fn_tol);
    else if (key == "rank_tol") set(t.rank_tol);
    else if (key == "trace_tol") set(t.trace_tol);
    else if (key == "recon_tol") set(t.recon_tol);
    else if (key == "prob_clamp_tol") set(t.prob_clamp_tol);
    else if (key == "dist_sum_tol") set(t.dist_sum_tol);
    else if (key == "povm_sum_tol") set(t.povm_sum_tol);
    else if (key == "unitary_tol") set(t.unitary_tol);
    else if (key == "support_leak_tol") set(t.support_leak_tol);
    else if (key == "deg_tol") set(t.deg_tol);
    else if (key == "sat_tol") set(t.sat_tol);
    else if (key == "state_eq_tol") set(t.state_eq_tol);
    else if (key == "hat_sigma_psd_tol") set(t.hat_sigma_psd_tol);
    else if (key == "mixture_tol") set(t.mixture_tol);
    else if (key == "jacobi_sweep_budget") {
      if (!nonneg_int(value)) {
        throw InvalidSpec("jacobi_sweep_budget must be a nonnegative integer");
      }
      t.jacobi_sweep_budget = value.get<int>();
    } else if (key == "jacobi_off_factor") set(t.jacobi_off_factor);
    else if (key == "spectrum_junk_floor") set(t.spectrum_junk_floor);
    else throw InvalidSpec("unknown tolerance key: " + key);
  }
}

}  // namespace detail

inline nlohmann::json config_echo(const CampaignConfig& c) {
  nlohmann::json ens = nlohmann::json::array();
  for (EnsembleKind k : c.ensembles) ens.push_back(std::string(ensemble_name(k)));
  return nlohmann::json{{"dims", c.dims},
                        {"ensembles", std::move(ens)},
                        {"rank_deficient_rank", c.rank_deficient_rank},
                        {"trials_per_cell", c.trials_per_cell},
                        {"seed", c.seed},
                        {"lambda_grid", c.lambda_grid},
                        {"tolerances", detail::tolerances_to_json(c.tolerances)},
                        {"format", c.format},
                        {"scalar_trials", c.scalar_trials},
                        {"classical_trials", c.classical_trials},
                        {"max_dist_length", c.max_dist_length},
                        {"brute_subsample", c.brute_subsample},
                        {"brute_resolution", c.brute_resolution},
                        {"top_k", c.top_k}};
}

inline CampaignConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidSpec("config root must be an object");
  CampaignConfig c;
  for (const auto& [key, value] : j.items()) {
    auto get_size = [&](std::size_t& field) {
      if (!detail::nonneg_int(value)) {
        throw InvalidSpec("config " + key + " must be a nonnegative integer");
      }
      field = value.get<std::size_t>();
    };
    if (key == "dims") {
      if (!value.is_array()) throw InvalidSpec("dims must be an array");
      c.dims.clear();
      for (const auto& v : value) {
        if (!detail::nonneg_int(v)) {
          throw InvalidSpec("dims entries must be nonnegative integers");
        }
        c.dims.push_back(v.get<std::size_t>());
      }
    } else if (key == "ensembles") {
      if (!value.is_array()) throw InvalidSpec("ensembles must be an array");
      c.ensembles.clear();
      for (const auto& v : value) {
        if (!v.is_string()) throw InvalidSpec("ensembles entries must be strings");
        const std::string name = v.get<std::string>();
        const std::optional<EnsembleKind> kind = ensemble_from_name(name);
        if (!kind) throw InvalidSpec("unknown ensemble: " + name);
        c.ensembles.push_back(*kind);
      }
    } else if (key == "rank_deficient_rank") {
      get_size(c.rank_deficient_rank);
    } else if (key == "trials_per_cell") {
      get_size(c.trials_per_cell);
    } else if (key == "seed") {
      if (!detail::nonneg_int(value)) {
        throw InvalidSpec("seed must be a nonnegative integer");
      }
      c.seed = value.get<std::uint64_t>();
    } else if (key == "lambda_grid") {
      if (!value.is_array()) throw InvalidSpec("lambda_grid must be an array");
      c.lambda_grid.clear();
      for (const auto& v : value) {
        if (!v.is_number()) throw InvalidSpec("lambda_grid entries must be numbers");
        c.lambda_grid.push_back(v.get<double>());
      }
    } else if (key == "tolerances") {
      detail::tolerances_from_json(value, c.tolerances);
    } else if (key == "output_path") {
      if (!value.is_string()) throw InvalidSpec("output_path must be a string");
      c.output_path = value.get<std::string>();
    } else if (key == "format") {
      if (!value.is_string()) throw InvalidSpec("format must be a string");
      c.format = value.get<std::string>();
    } else if (key == "scalar_trials") {
      get_size(c.scalar_trials);
    } else if (key == "classical_trials") {
      get_size(c.classical_trials);
    } else if (key == "max_dist_length") {
      get_size(c.max_dist_length);
    } else if (key == "brute_subsample") {
      get_size(c.brute_subsample);
    } else if (key == "brute_resolution") {
      get_size(c.brute_resolution);
    } else if (key == "threads") {
      get_size(c.threads);
    } else if (key == "top_k") {
      get_size(c.top_k);
    } else {
      throw InvalidSpec("unknown config key: " + key);
    }
  }
  c.validate();
  return c;
}

/// Running tally for one named check. One-sided checks track the minimum
/// slack lhs - rhs (violation when below -tolerance); equality checks track
/// the maximum |lhs - rhs| (violation when above tolerance); boolean checks
/// only count.
struct CheckStat {
  std::string name;
  std::string kind;  // one_sided | equality | boolean
  double tolerance = 0.0;
  std::uint64_t checks = 0;
  std::uint64_t violations = 0;
  double min_slack = std::numeric_limits<double>::infinity();
  double max_residual = 0.0;
};

class StatRegistry {
 public:
  std::size_t add(std::string name, std::string kind, double tolerance) {
    stats_.push_back(CheckStat{std::move(name), std::move(kind), tolerance});
    return stats_.size() - 1;
  }

  void record_one_sided(std::size_t i, double slack) {
    CheckStat& s = stats_[i];
    ++s.checks;
    if (slack < -s.tolerance) ++s.violations;
    s.min_slack = std::min(s.min_slack, slack);
  }

  void record_equality(std::size_t i, double residual) {
    CheckStat& s = stats_[i];
    const double r = std::abs(residual);
    ++s.checks;
    if (r > s.tolerance) ++s.violations;
    s.max_residual = std::max(s.max_residual, r);
  }

  void record_bool(std::size_t i, bool ok) {
    CheckStat& s = stats_[i];
    ++s.checks;
    if (!ok) ++s.violations;
  }

  /// Merging is commutative and associative, so totals do not depend on how
  /// work was partitioned across threads.
  void merge(const StatRegistry& other) {
    for (std::size_t i = 0; i < stats_.size(); ++i) {
      stats_[i].checks += other.stats_[i].checks;
      stats_[i].violations += other.stats_[i].violations;
      stats_[i].min_slack = std::min(stats_[i].min_slack, other.stats_[i].min_slack);
      stats_[i].max_residual =
          std::max(stats_[i].max_residual, other.stats_[i].max_residual);
    }
  }

  const std::vector<CheckStat>& stats() const { return stats_; }

  std::uint64_t total_violations() const {
    std::uint64_t n = 0;
    for (const CheckStat& s : stats_) n += s.violations;
    return n;
  }

  nlohmann::json to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const CheckStat& s : stats_) {
      nlohmann::json item{{"name", s.name},
                          {"kind", s.kind},
                          {"tolerance", s.tolerance},
                          {"checks", s.checks},
                          {"violations", s.violations}};
      if (s.kind == "one_sided") {
        if (std::isinf(s.min_slack)) {
          item["min_slack"] = "inf";
        } else {
          item["min_slack"] = s.min_slack;
        }
      } else if (s.kind == "equality") {
        item["max_residual"] = s.max_residual;
      }
      arr.push_back(std::move(item));
    }
    return arr;
  }

 private:
  std::vector<CheckStat> stats_;
};

namespace detail {

struct Cell {
  std::size_t dim;
  EnsembleKind kind;
  std::size_t rank;
  EnsembleSpec spec;
};

inline std::vector<Cell> make_cells(const CampaignConfig& c) {
  std::vector<Cell> cells;
  for (std::size_t d : c.dims) {
    for (EnsembleKind k : c.ensembles) {
      const std::size_t rank =
          k == EnsembleKind::rank_deficient ? std::min(c.rank_for(d), d) : 1;
      cells.push_back(Cell{d, k, rank, EnsembleSpec{k, d, c.seed, rank}});
    }
  }
  return cells;
}

/// Static partition of [0, n) into at most `threads` contiguous chunks.
/// fn(begin, end) runs on a worker thread per chunk.
template <typename Fn>
void parallel_chunks(std::size_t n, std::size_t threads, Fn&& fn) {
  const std::size_t k = std::max<std::size_t>(1, std::min(threads, n));
  if (k == 1) {
    fn(0, n, 0);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(k);
  for (std::size_t t = 0; t < k; ++t) {
    const std::size_t begin = n * t / k;
    const std::size_t end = n * (t + 1) / k;
    pool.emplace_back([&fn, begin, end, t] { fn(begin, end, t); });
  }
  for (std::thread& th : pool) th.join();
}

inline nlohmann::json extended_to_json(const ExtendedReal& v) {
  if (v.is_infinite()) return "inf";
  return v.value();
}

inline std::string extended_to_csv(const ExtendedReal& v) {
  if (v.is_infinite()) return "inf";
  return format_double(v.value());
}

inline nlohmann::json report_to_json(const BoundReport& r) {
  return nlohmann::json{{"fidelity", r.fidelity},
                        {"trace_norm", r.trace_norm},
                        {"s_max", extended_to_json(r.s_max)},
                        {"lambda0", extended_to_json(r.lambda0)},
                        {"fvdg_lower", r.fvdg_lower},
                        {"fvdg_upper", r.fvdg_upper},
                        {"new_lower", r.new_lower},
                        {"gap_new_vs_fvdg", r.gap_new_vs_fvdg}};
}

inline nlohmann::json summary_header(const CampaignConfig& c,
                                     const std::string& command) {
  return nlohmann::json{
      {"tool", {{"name", kToolName}, {"version", kVersion}}},
      {"command", command},
      {"config", config_echo(c)}};
}

inline void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open output file: " + path);
  out << body;
}

inline std::string summary_sibling_path(const std::string& output_path) {
  std::filesystem::path p(output_path);
  p.replace_extension(".summary.json");
  return p.string();
}

/// Deterministic argmax/argmin tracker; ties break toward the smaller
/// (cell, trial) so results do not depend on scan order.
struct ExtremalTracker {
  bool want_max;
  bool set = false;
  double value = 0.0;
  std::size_t cell = 0;
  std::size_t trial = 0;

  void offer(double v, std::size_t c, std::size_t t) {
    if (!set) {
      set = true;
      value = v;
      cell = c;
      trial = t;
      return;
    }
    const bool better = want_max ? v > value : v < value;
    const bool tie = v == value && (c < cell || (c == cell && t < trial));
    if (better || tie) {
      value = v;
      cell = c;
      trial = t;
    }
  }

  void merge(const ExtremalTracker& o) {
    if (o.set) offer(o.value, o.cell, o.trial);
  }
};

}  // namespace detail

/// Outcome of one campaign run: total violation count (drives the CLI exit
/// code) and the summary document (also written next to or into the report).
struct CampaignOutcome {
  std::uint64_t total_violations = 0;
  nlohmann::json summary;
};

namespace detail {

struct VerifyStatIds {
  std::size_t chain_new_le_f, chain_fvdg_le_new, chain_fvdg_le_f, chain_f_le_upper;
  std::size_t mixture, mixture_l0, mixture_l1;
  std::size_t meas_l1, meas_fid;
  std::size_t helstrom_eq, fc_eq;
  std::size_t grid_l1_le, grid_fid_ge, grid_l1_eq, grid_fid_eq;
  std::size_t saturation_impl;
  std::size_t scalar_ineq, scalar_ident;
  std::size_t classical, diag_lhs, diag_rhs;
  std::size_t reverify;
};

inline VerifyStatIds build_verify_registry(StatRegistry& reg) {
  VerifyStatIds ids;
  ids.chain_new_le_f = reg.add("smax_lower_le_fidelity", "one_sided", 1e-8);
  ids.chain_fvdg_le_new = reg.add("fvdg_lower_le_smax_lower", "one_sided", 1e-12);
  ids.chain_fvdg_le_f = reg.add("fvdg_lower_le_fidelity", "one_sided", 1e-8);
  ids.chain_f_le_upper = reg.add("fidelity_le_fvdg_upper", "one_sided", 1e-8);
  ids.mixture = reg.add("mixture_bound", "one_sided", 1e-8);
  ids.mixture_l0 = reg.add("mixture_lambda0_matches_fvdg_lower", "equality", 1e-10);
  ids.mixture_l1 = reg.add("mixture_lambda1_trivial_endpoint", "equality", 1e-10);
  ids.meas_l1 = reg.add("measured_l1_le_trace_norm", "one_sided", 1e-9);
  ids.meas_fid = reg.add("measured_fidelity_ge_fidelity", "one_sided", 1e-9);
  ids.helstrom_eq = reg.add("helstrom_attains_trace_norm", "equality", 1e-8);
  ids.fc_eq = reg.add("fuchs_caves_attains_fidelity", "equality", 1e-7);
  ids.grid_l1_le = reg.add("grid_l1_le_trace_norm", "one_sided", 1e-9);
  ids.grid_fid_ge = reg.add("grid_fidelity_ge_fidelity", "one_sided", 1e-9);
  ids.grid_l1_eq = reg.add("grid_l1_matches_trace_norm", "equality", 1e-3);
  ids.grid_fid_eq = reg.add("grid_fidelity_matches_fidelity", "equality", 1e-3);
  ids.saturation_impl = reg.add("saturation_implication", "boolean", 0.0);
  ids.scalar_ineq = reg.add("scalar_sqrt_inequality", "one_sided", 1e-12);
  ids.scalar_ident = reg.add("scalar_sqrt_identity", "equality", 1e-9);
  ids.classical = reg.add("classical_mixture_bound", "one_sided", 1e-10);
  ids.diag_lhs = reg.add("diagonal_embedding_lhs_agreement", "equality", 1e-9);
  ids.diag_rhs = reg.add("diagonal_embedding_rhs_agreement", "equality", 1e-9);
  ids.reverify = reg.add("extremal_instance_reverifies", "boolean", 0.0);
  return ids;
}

struct VerifyRow {
  std::size_t cell = 0;
  std::size_t trial = 0;
  BoundReport report{0, 0, ExtendedReal(0), ExtendedReal(1), 0, 0, 0, 0};
  bool fvdg_saturated = false;
};

/// Everything checked for one sampled pair. Pure function of (config, cell,
/// trial), so results are independent of the thread that ran it.
inline void verify_one_pair(const CampaignConfig& cfg, const Cell& cell,
                            std::size_t cell_index, std::size_t trial,
                            const VerifyStatIds& ids, StatRegistry& reg,
                            VerifyRow& row, ExtremalTracker& max_gap,
                            ExtremalTracker& min_slack) {
  const Tolerances& tol = cfg.tolerances;
  const DensityMatrix rho = sample_state(cell.spec, 2 * trial, tol);
  const DensityMatrix sigma = sample_state(cell.spec, 2 * trial + 1, tol);

  const ComplexMatrix sr_rho = matrix_sqrt(rho.mat(), tol);
  const ComplexMatrix sr_sigma = matrix_sqrt(sigma.mat(), tol);
  const double f = detail::fidelity_from_sqrts(sr_rho, sr_sigma, tol);
  const double t = trace_distance_norm(rho, sigma, tol);
  const ExtendedReal l0 = lambda_zero(rho, sigma, {}, tol);
  const ExtendedReal s =
      l0.is_infinite() ? ExtendedReal::infinity()
                       : ExtendedReal(std::log(l0.value()));
  const FvdgBounds fvdg = fvdg_bounds(t);
  const double nl = smax_lower_bound(t, s);
  const BoundReport report{f, t, s, l0, fvdg.lower, fvdg.upper, nl,
                           nl - fvdg.lower};

  reg.record_one_sided(ids.chain_new_le_f, f - nl);
  reg.record_one_sided(ids.chain_fvdg_le_new, nl - fvdg.lower);
  reg.record_one_sided(ids.chain_fvdg_le_f, f - fvdg.lower);
  reg.record_one_sided(ids.chain_f_le_upper, fvdg.upper - f);

  const double sat_slack = f - fvdg.lower;
  const bool saturated = std::abs(sat_slack) <= tol.sat_tol;
  const bool equal = max_abs_diff(rho.mat(), sigma.mat()) <= tol.state_eq_tol;
  reg.record_bool(ids.saturation_impl, !saturated || s.is_infinite() || equal);

  for (double lambda : cfg.lambda_grid) {
    // Endpoints reuse the ingredient square roots; besides saving two
    // eigendecompositions this makes the lambda in {0, 1} checks compare
    // bit-identical inputs.
    ComplexMatrix sr_tau =
        lambda == 1.0
            ? sr_rho
            : (lambda == 0.0
                   ? sr_sigma
                   : matrix_sqrt((cplx(lambda, 0.0) * rho.mat() +
                                  cplx(1.0 - lambda, 0.0) * sigma.mat())
                                     .hermitized(),
                                 tol));
    const double f_tau = detail::fidelity_from_sqrts(sr_rho, sr_tau, tol);
    const double rhs = 1.0 - 0.5 * (1.0 - std::sqrt(lambda)) * t;
    reg.record_one_sided(ids.mixture, f_tau - rhs);
    if (lambda == 0.0) {
      reg.record_equality(ids.mixture_l0, rhs - fvdg.lower);
    }
    if (lambda == 1.0) {
      reg.record_equality(ids.mixture_l1,
                          std::max(std::abs(rhs - 1.0), std::abs(f_tau - 1.0)));
    }
  }

  const MeasurementResult hm = helstrom_measurement(rho, sigma, tol);
  reg.record_one_sided(ids.meas_l1, t - hm.achieved);
  reg.record_equality(ids.helstrom_eq, hm.achieved - t);
  const double hm_fid =
      classical_fidelity(induced_distribution(rho, hm.povm, tol),
                         induced_distribution(sigma, hm.povm, tol));
  reg.record_one_sided(ids.meas_fid, hm_fid - f);

  const MeasurementResult fc = fuchs_caves_measurement(rho, sigma, {}, tol);
  reg.record_one_sided(ids.meas_fid, fc.achieved - f);
  const double fc_l1 =
      classical_l1(induced_distribution(rho, fc.povm, tol),
                   induced_distribution(sigma, fc.povm, tol));
  reg.record_one_sided(ids.meas_l1, t - fc_l1);
  // The construction is exact when the base support contains the other
  // state's support; full-rank ensembles guarantee that, so only their
  // cells assert equality. Draws whose smallest eigenvalue falls under the
  // spectrum junk floor are skipped too: there the floored fidelity and the
  // raw stored matrices legitimately disagree at the equality tolerance
  // scale, so the comparison stops being well-defined (the one-sided checks
  // above still cover such draws, since flooring can only lower f).
  if (cell.kind == EnsembleKind::hilbert_schmidt ||
      cell.kind == EnsembleKind::bures) {
    auto floor_clean = [&](const ComplexMatrix& m) {
      const std::vector<double> ev = eigh_values(m, tol);
      return ev.front() > 0.0 &&
             ev.back() >= tol.spectrum_junk_floor * ev.front();
    };
    if (floor_clean(rho.mat()) && floor_clean(sigma.mat())) {
      reg.record_equality(ids.fc_eq, fc.achieved - f);
    }
  }

  if (cell.dim == 2 && trial % cfg.brute_subsample == 0) {
    const PovmExtrema grid =
        brute_force_povm_extrema(rho, sigma, cfg.brute_resolution, tol);
    reg.record_one_sided(ids.grid_l1_le, t - grid.max_l1);
    reg.record_one_sided(ids.grid_fid_ge, grid.min_fid - f);
    reg.record_equality(ids.grid_l1_eq, grid.max_l1 - t);
    reg.record_equality(ids.grid_fid_eq, grid.min_fid - f);
  }

  row = VerifyRow{cell_index, trial, report, saturated};
  if (!s.is_infinite()) {
    max_gap.offer(report.gap_new_vs_fvdg, cell_index, trial);
  }
  min_slack.offer(f - nl, cell_index, trial);
}

inline void run_scalar_section(const CampaignConfig& cfg,
                               const VerifyStatIds& ids, StatRegistry& reg) {
  Rng rng(derive_seed(cfg.seed, 0x5ca1a7u));
  for (std::size_t i = 0; i < cfg.scalar_trials; ++i) {
    // Log-uniform magnitudes cover both a << 1 and a >> 1.
    const double a = std::exp(rng.uniform(-12.0, 12.0));
    const double lambda = rng.uniform();
    const ScalarInequality si = scalar_mixture_inequality(a, lambda);
    const double scale = std::max(1.0, si.lhs * si.lhs);
    reg.record_one_sided(ids.scalar_ineq, (si.lhs - si.rhs) / scale);
    const double sl = std::sqrt(lambda);
    const double ident =
        si.lhs * si.lhs - si.rhs * si.rhs - (1.0 - sl) * (1.0 - sl) * a;
    reg.record_equality(ids.scalar_ident, ident / scale);
  }
}

inline void run_classical_section(const CampaignConfig& cfg,
                                  const VerifyStatIds& ids, StatRegistry& reg) {
  const Tolerances& tol = cfg.tolerances;
  for (std::size_t i = 0; i < cfg.classical_trials; ++i) {
    Rng rng(derive_seed(cfg.seed, 0xc1a55u, i));
    const std::size_t n = 2 + rng.below(cfg.max_dist_length - 1);
    const ProbDist p = sample_prob_dist(rng, n, tol);
    const ProbDist q = sample_prob_dist(rng, n, tol);
    const double lambda = rng.uniform();
    const ClassicalMixtureBound cb = classical_mixture_bound(p, q, lambda, tol);
    reg.record_one_sided(ids.classical, cb.lhs - cb.rhs);

    // Small lengths embed as diagonal matrices; both sides of the bound must
    // agree with their quantum evaluation on these commuting states.
    if (n <= 12) {
      ComplexMatrix mp = ComplexMatrix::zero(n);
      ComplexMatrix mq = ComplexMatrix::zero(n);
      for (std::size_t k = 0; k < n; ++k) {
        mp(k, k) = p[k];
        mq(k, k) = q[k];
      }
      const DensityMatrix dp = DensityMatrix::from_matrix(std::move(mp), tol);
      const DensityMatrix dq = DensityMatrix::from_matrix(std::move(mq), tol);
      const MixtureCase mc = MixtureCase::make(dp, dq, lambda, tol);
      const double qf = fidelity(mc.rho(), mc.mixed(), tol);
      const MixtureBound mb = mixture_bound(mc, tol);
      reg.record_equality(ids.diag_lhs, qf - cb.lhs);
      reg.record_equality(ids.diag_rhs, mb.bound - cb.rhs);
    }
  }
}

inline nlohmann::json extremal_payload(const CampaignConfig& cfg,
                                       const std::vector<Cell>& cells,
                                       const ExtremalTracker& tracker,
                                       const VerifyStatIds& ids,
                                       StatRegistry& reg) {
  if (!tracker.set) return nullptr;
  const Tolerances& tol = cfg.tolerances;
  const Cell& cell = cells[tracker.cell];
  const DensityMatrix rho = sample_state(cell.spec, 2 * tracker.trial, tol);
  const DensityMatrix sigma = sample_state(cell.spec, 2 * tracker.trial + 1, tol);
  const BoundReport rep = bound_report(rho, sigma, {}, tol);

  // Round-trip through serialized text, reload, recompute, compare: the
  // recorded instance must stand on its own when read back from the report.
  bool ok = true;
  try {
    const DensityMatrix r2 =
        state_from_json(nlohmann::json::parse(state_to_json(rho).dump()), tol);
    const DensityMatrix s2 =
        state_from_json(nlohmann::json::parse(state_to_json(sigma).dump()), tol);
    ok = max_abs_diff(r2.mat(), rho.mat()) <= 1e-15 &&
         max_abs_diff(s2.mat(), sigma.mat()) <= 1e-15;
    if (ok) {
      const BoundReport rep2 = bound_report(r2, s2, {}, tol);
      ok = std::abs(rep2.fidelity - rep.fidelity) <= 1e-12 &&
           std::abs(rep2.trace_norm - rep.trace_norm) <= 1e-12 &&
           rep2.s_max.is_infinite() == rep.s_max.is_infinite() &&
           std::abs(rep2.new_lower - rep.new_lower) <= 1e-12;
    }
  } catch (const Error&) {
    ok = false;
  }
  reg.record_bool(ids.reverify, ok);

  return nlohmann::json{{"dim", cell.dim},
                        {"ensemble", std::string(ensemble_name(cell.kind))},
                        {"trial", tracker.trial},
                        {"value", tracker.value},
                        {"report", report_to_json(rep)},
                        {"rho", state_to_json(rho)},
                        {"sigma", state_to_json(sigma)},
                        {"reverified", ok}};
}

inline std::string verify_rows_csv(const std::vector<Cell>& cells,
                                   const std::vector<VerifyRow>& rows) {
  std::string out =
      "dim,ensemble,trial,fidelity,trace_norm,s_max,lambda0,fvdg_lower,"
      "fvdg_upper,new_lower,gap_new_vs_fvdg,fvdg_saturated\n";
  for (const VerifyRow& r : rows) {
    const Cell& cell = cells[r.cell];
    out += std::to_string(cell.dim);
    out += ',';
    out += ensemble_name(cell.kind);
    out += ',';
    out += std::to_string(r.trial);
    out += ',';
    out += format_double(r.report.fidelity);
    out += ',';
    out += format_double(r.report.trace_norm);
    out += ',';
    out += extended_to_csv(r.report.s_max);
    out += ',';
    out += extended_to_csv(r.report.lambda0);
    out += ',';
    out += format_double(r.report.fvdg_lower);
    out += ',';
    out += format_double(r.report.fvdg_upper);
    out += ',';
    out += format_double(r.report.new_lower);
    out += ',';
    out += format_double(r.report.gap_new_vs_fvdg);
    out += ',';
    out += r.fvdg_saturated ? "true" : "false";
    out += '\n';
  }
  return out;
}

inline nlohmann::json verify_rows_json(const std::vector<Cell>& cells,
                                       const std::vector<VerifyRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const VerifyRow& r : rows) {
    const Cell& cell = cells[r.cell];
    nlohmann::json item = report_to_json(r.report);
    item["dim"] = cell.dim;
    item["ensemble"] = std::string(ensemble_name(cell.kind));
    item["trial"] = r.trial;
    item["fvdg_saturated"] = r.fvdg_saturated;
    arr.push_back(std::move(item));
  }
  return arr;
}

inline void write_report(const CampaignConfig& cfg, const std::string& rows_csv,
                         const nlohmann::json& rows_json,
                         const nlohmann::json& summary) {
  if (cfg.output_path.empty()) return;
  if (cfg.format == "csv") {
    write_text_file(cfg.output_path, rows_csv);
    write_text_file(summary_sibling_path(cfg.output_path),
                    summary.dump(2) + "\n");
  } else {
    nlohmann::json doc{{"summary", summary}, {"rows", rows_json}};
    write_text_file(cfg.output_path, doc.dump(2) + "\n");
  }
}

}  // namespace detail

/// Randomized verification campaign: samples trials_per_cell pairs per
/// (dim, ensemble) cell, checks the bound chain, mixture bounds across the
/// lambda grid, measurement attainment, the qubit grid oracle on a subsample,
/// and the scalar and classical sections. Deterministic for a fixed config,
/// independent of the thread count.
inline CampaignOutcome run_verify(const CampaignConfig& cfg) {
  cfg.validate();
  const std::vector<detail::Cell> cells = detail::make_cells(cfg);
  StatRegistry master;
  const detail::VerifyStatIds ids = detail::build_verify_registry(master);

  const std::size_t total = cells.size() * cfg.trials_per_cell;
  std::vector<detail::VerifyRow> rows(total);
  const std::size_t threads = cfg.effective_threads();

  std::vector<StatRegistry> partial;
  std::vector<detail::ExtremalTracker> part_gap, part_slack;
  const std::size_t chunks = std::max<std::size_t>(1, std::min(threads, total));
  partial.resize(chunks, master);
  part_gap.resize(chunks, detail::ExtremalTracker{true});
  part_slack.resize(chunks, detail::ExtremalTracker{false});

  detail::parallel_chunks(
      total, threads, [&](std::size_t begin, std::size_t end, std::size_t t) {
        for (std::size_t i = begin; i < end; ++i) {
          const std::size_t cell_index = i / cfg.trials_per_cell;
          const std::size_t trial = i % cfg.trials_per_cell;
          detail::verify_one_pair(cfg, cells[cell_index], cell_index, trial,
                                  ids, partial[t], rows[i], part_gap[t],
                                  part_slack[t]);
        }
      });
  detail::ExtremalTracker max_gap{true}, min_slack{false};
  for (std::size_t t = 0; t < chunks; ++t) {
    master.merge(partial[t]);
    max_gap.merge(part_gap[t]);
    min_slack.merge(part_slack[t]);
  }

  detail::run_scalar_section(cfg, ids, master);
  detail::run_classical_section(cfg, ids, master);

  nlohmann::json summary = detail::summary_header(cfg, "verify");
  summary["extremal"] = nlohmann::json{
      {"max_gap_new_vs_fvdg",
       detail::extremal_payload(cfg, cells, max_gap, ids, master)},
      {"min_new_lower_slack",
       detail::extremal_payload(cfg, cells, min_slack, ids, master)}};
  summary["checks"] = master.to_json();
  summary["row_count"] = total;
  summary["total_violations"] = master.total_violations();

  detail::write_report(cfg, detail::verify_rows_csv(cells, rows),
                       detail::verify_rows_json(cells, rows), summary);
  return CampaignOutcome{master.total_violations(), std::move(summary)};
}

namespace detail {

struct SaturateRow {
  std::string source;  // baseline_orthogonal_pure | baseline_equal_states | sampled
  std::size_t dim = 0;
  std::string ensemble;
  std::size_t trial = 0;
  SaturationReport report;
};

inline SaturateRow saturate_row_for(const CampaignConfig& cfg, const Cell& cell,
                                    std::size_t trial) {
  const Tolerances& tol = cfg.tolerances;
  const DensityMatrix rho = sample_state(cell.spec, 2 * trial, tol);
  const DensityMatrix sigma = sample_state(cell.spec, 2 * trial + 1, tol);
  return SaturateRow{"sampled", cell.dim, std::string(ensemble_name(cell.kind)),
                     trial, saturation_report(rho, sigma, {}, tol)};
}

inline nlohmann::json saturate_row_json(const SaturateRow& r) {
  return nlohmann::json{{"source", r.source},
                        {"dim", r.dim},
                        {"ensemble", r.ensemble},
                        {"trial", r.trial},
                        {"slack", r.report.slack},
                        {"fidelity", r.report.fidelity},
                        {"trace_norm", r.report.trace_norm},
                        {"s_max", extended_to_json(r.report.s_max)},
                        {"fvdg_lower_saturated", r.report.fvdg_lower_saturated},
                        {"s_max_infinite", r.report.s_max_infinite},
                        {"states_equal", r.report.states_equal}};
}

inline std::string saturate_rows_csv(const std::vector<SaturateRow>& rows) {
  std::string out =
      "source,dim,ensemble,trial,slack,fidelity,trace_norm,s_max,"
      "fvdg_lower_saturated,s_max_infinite,states_equal\n";
  for (const SaturateRow& r : rows) {
    out += r.source;
    out += ',';
    out += std::to_string(r.dim);
    out += ',';
    out += r.ensemble;
    out += ',';
    out += std::to_string(r.trial);
    out += ',';
    out += format_double(r.report.slack);
    out += ',';
    out += format_double(r.report.fidelity);
    out += ',';
    out += format_double(r.report.trace_norm);
    out += ',';
    out += extended_to_csv(r.report.s_max);
    out += ',';
    out += r.report.fvdg_lower_saturated ? "true" : "false";
    out += ',';
    out += r.report.s_max_infinite ? "true" : "false";
    out += ',';
    out += r.report.states_equal ? "true" : "false";
    out += '\n';
  }
  return out;
}

}  // namespace detail

/// Saturation hunt: ranks sampled pairs by the slack F - (1 - T/2), keeps the
/// top_k smallest, and prepends two constructed baselines that saturate
/// exactly. Every pair is also checked against the saturation implication.
inline CampaignOutcome run_saturate(const CampaignConfig& cfg) {
  cfg.validate();
  const std::vector<detail::Cell> cells = detail::make_cells(cfg);
  StatRegistry master;
  const std::size_t impl_id =
      master.add("saturation_implication", "boolean", 0.0);
  const std::size_t slack_id =
      master.add("saturation_slack_nonnegative", "one_sided", 1e-9);

  struct Ranked {
    double slack;
    std::size_t cell;
    std::size_t trial;
  };
  const std::size_t total = cells.size() * cfg.trials_per_cell;
  std::vector<Ranked> ranked(total);
  const std::size_t threads = cfg.effective_threads();
  std::vector<StatRegistry> partial;
  const std::size_t chunks = std::max<std::size_t>(1, std::min(threads, total));
  partial.resize(chunks, master);

  detail::parallel_chunks(
      total, threads, [&](std::size_t begin, std::size_t end, std::size_t t) {
        for (std::size_t i = begin; i < end; ++i) {
          const std::size_t cell_index = i / cfg.trials_per_cell;
          const std::size_t trial = i % cfg.trials_per_cell;
          const detail::SaturateRow row =
              detail::saturate_row_for(cfg, cells[cell_index], trial);
          ranked[i] = Ranked{row.report.slack, cell_index, trial};
          partial[t].record_bool(impl_id, row.report.implication_holds);
          partial[t].record_one_sided(slack_id, row.report.slack);
        }
      });
  for (std::size_t t = 0; t < chunks; ++t) master.merge(partial[t]);

  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const Ranked& a, const Ranked& b) {
                     if (a.slack != b.slack) return a.slack < b.slack;
                     if (a.cell != b.cell) return a.cell < b.cell;
                     return a.trial < b.trial;
                   });

  const Tolerances& tol = cfg.tolerances;
  std::vector<detail::SaturateRow> rows;
  {
    const DensityMatrix zero = pure_state({cplx(1.0, 0.0), cplx(0.0, 0.0)}, tol);
    const DensityMatrix one = pure_state({cplx(0.0, 0.0), cplx(1.0, 0.0)}, tol);
    rows.push_back(detail::SaturateRow{"baseline_orthogonal_pure", 2,
                                       "constructed", 0,
                                       saturation_report(zero, one, {}, tol)});
    const DensityMatrix mixed = maximally_mixed(2, tol);
    rows.push_back(detail::SaturateRow{"baseline_equal_states", 2, "constructed",
                                       0,
                                       saturation_report(mixed, mixed, {}, tol)});
  }
  const std::size_t keep = std::min(cfg.top_k, ranked.size());
  for (std::size_t i = 0; i < keep; ++i) {
    rows.push_back(
        detail::saturate_row_for(cfg, cells[ranked[i].cell], ranked[i].trial));
  }

  nlohmann::json jrows = nlohmann::json::array();
  for (const detail::SaturateRow& r : rows) {
    jrows.push_back(detail::saturate_row_json(r));
  }
  nlohmann::json summary = detail::summary_header(cfg, "saturate");
  summary["checks"] = master.to_json();
  summary["row_count"] = rows.size();
  summary["sampled_pairs"] = total;
  summary["total_violations"] = master.total_violations();

  detail::write_report(cfg, detail::saturate_rows_csv(rows), jrows, summary);
  return CampaignOutcome{master.total_violations(), std::move(summary)};
}

namespace detail {

inline std::string compare_rows_csv(const std::vector<Cell>& cells,
                                    const std::vector<VerifyRow>& rows) {
  std::string out =
      "dim,ensemble,trial,trace_norm,s_max,fvdg_lower,new_lower,fidelity,"
      "gap_new_vs_fvdg\n";
  for (const VerifyRow& r : rows) {
    const Cell& cell = cells[r.cell];
    out += std::to_string(cell.dim);
    out += ',';
    out += ensemble_name(cell.kind);
    out += ',';
    out += std::to_string(r.trial);
    out += ',';
    out += format_double(r.report.trace_norm);
    out += ',';
    out += extended_to_csv(r.report.s_max);
    out += ',';
    out += format_double(r.report.fvdg_lower);
    out += ',';
    out += format_double(r.report.new_lower);
    out += ',';
    out += format_double(r.report.fidelity);
    out += ',';
    out += format_double(r.report.gap_new_vs_fvdg);
    out += '\n';
  }
  return out;
}

inline nlohmann::json compare_rows_json(const std::vector<Cell>& cells,
                                        const std::vector<VerifyRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const VerifyRow& r : rows) {
    const Cell& cell = cells[r.cell];
    arr.push_back(nlohmann::json{
        {"dim", cell.dim},
        {"ensemble", std::string(ensemble_name(cell.kind))},
        {"trial", r.trial},
        {"trace_norm", r.report.trace_norm},
        {"s_max", extended_to_json(r.report.s_max)},
        {"fvdg_lower", r.report.fvdg_lower},
        {"new_lower", r.report.new_lower},
        {"fidelity", r.report.fidelity},
        {"gap_new_vs_fvdg", r.report.gap_new_vs_fvdg}});
  }
  return arr;
}

}  // namespace detail

/// Plot-ready gap data: one row per pair with the trace norm, S_max, both
/// lower bounds, the fidelity, and the gap. A post-processing pass asserts
/// the gap is nonnegative on every row.
inline CampaignOutcome run_compare(const CampaignConfig& cfg) {
  cfg.validate();
  const std::vector<detail::Cell> cells = detail::make_cells(cfg);
  StatRegistry master;
  const std::size_t gap_id = master.add("gap_nonnegative", "one_sided", 1e-12);

  const std::size_t total = cells.size() * cfg.trials_per_cell;
  std::vector<detail::VerifyRow> rows(total);
  const std::size_t threads = cfg.effective_threads();
  std::vector<StatRegistry> partial;
  const std::size_t chunks = std::max<std::size_t>(1, std::min(threads, total));
  partial.resize(chunks, master);

  detail::parallel_chunks(
      total, threads, [&](std::size_t begin, std::size_t end, std::size_t t) {
        for (std::size_t i = begin; i < end; ++i) {
          const std::size_t cell_index = i / cfg.trials_per_cell;
          const std::size_t trial = i % cfg.trials_per_cell;
          const detail::Cell& cell = cells[cell_index];
          const Tolerances& tol = cfg.tolerances;
          const DensityMatrix rho = sample_state(cell.spec, 2 * trial, tol);
          const DensityMatrix sigma = sample_state(cell.spec, 2 * trial + 1, tol);
          const BoundReport rep = bound_report(rho, sigma, {}, tol);
          const bool saturated =
              std::abs(rep.fidelity - rep.fvdg_lower) <= tol.sat_tol;
          rows[i] = detail::VerifyRow{cell_index, trial, rep, saturated};
          partial[t].record_one_sided(gap_id, rep.gap_new_vs_fvdg);
        }
      });
  for (std::size_t t = 0; t < chunks; ++t) master.merge(partial[t]);

  nlohmann::json summary = detail::summary_header(cfg, "compare-bounds");
  summary["checks"] = master.to_json();
  summary["row_count"] = total;
  summary["total_violations"] = master.total_violations();

  detail::write_report(cfg, detail::compare_rows_csv(cells, rows),
                       detail::compare_rows_json(cells, rows), summary);
  return CampaignOutcome{master.total_violations(), std::move(summary)};
}

}  // namespace qfid
