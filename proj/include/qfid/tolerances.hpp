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

namespace qfid {

/// Central table of numerical tolerances and solver knobs. Every tolerance
/// used anywhere in the library is defined here exactly once; operations take
/// a `Tolerances` argument (defaulted to this table) so campaigns can run
/// sensitivity studies without recompiling.
struct Tolerances {
  /// Hermiticity check: max |A[j][k] - conj(A[k][j])| (absolute).
  double herm_tol = 1e-10;
  /// Positive semi-definiteness: eigenvalues >= -psd_tol; values in
  /// [-psd_tol, 0] are clamped to 0 before functional calculus.
  double psd_tol = 1e-10;
  /// Residual allowed in operator-function identities (S*S = A, P*P = P, ...).
  double fn_tol = 1e-8;
  /// Default relative rank threshold: eigenvalues <= rank_tol * lambda_max
  /// count as zero for supports and pseudo-inverses.
  double rank_tol = 1e-10;
  /// Unit-trace check for density matrices: |Tr - 1|.
  double trace_tol = 1e-10;
  /// Eigendecomposition reconstruction error, relative to max(1, ||A||_max).
  double recon_tol = 1e-9;
  /// Probabilities in [-prob_clamp_tol, 0] clamp to 0; anything more negative
  /// is treated as a logic bug, not rounding.
  double prob_clamp_tol = 1e-12;
  /// |sum of probabilities - 1| for distributions induced by measurements.
  double dist_sum_tol = 1e-9;
  /// ||sum_j M_j - I||_max for POVM completeness.
  double povm_sum_tol = 1e-9;
  /// ||U'U - I||_max for measurement bases.
  double unitary_tol = 1e-9;
  /// Support leakage ||(I-P_sigma) rho (I-P_sigma)||_max above which the
  /// max-relative entropy is reported as +infinity.
  double support_leak_tol = 1e-9;
  /// lambda0 <= 1 + deg_tol makes the residue decomposition degenerate.
  double deg_tol = 1e-9;
  /// Absolute tolerance for flagging saturation of the trace-norm lower bound.
  double sat_tol = 1e-8;
  /// Max-abs entrywise tolerance for declaring two density matrices equal.
  double state_eq_tol = 1e-10;
  /// Relaxed PSD tolerance for the residue state of the decomposition
  /// sigma = (1/lambda0) rho + (1 - 1/lambda0) sigma_hat, whose smallest
  /// eigenvalue is exactly zero in exact arithmetic.
  double hat_sigma_psd_tol = 1e-7;
  /// Entrywise tolerance for validating a supplied convex combination.
  double mixture_tol = 1e-12;

  /// Jacobi eigensolver: hard cap on full sweeps before giving up.
  int jacobi_sweep_budget = 100;
  /// Jacobi convergence: off-diagonal Frobenius norm <= factor * ||A||_F.
  double jacobi_off_factor = 1e-13;
  /// Eigenvalues of a PSD matrix below spectrum_junk_floor * lambda_max are
  /// below the solver's resolution and are treated as exact zeros wherever a
  /// square root would amplify them (sqrt turns 1e-16 of eigenvalue noise
  /// into 1e-8 of result error, visible against saturated bounds).
  double spectrum_junk_floor = 1e-13;
};

}  // namespace qfid
