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

#include <cmath>
#include <optional>
#include <utility>

#include "qfid/complex_matrix.hpp"
#include "qfid/errors.hpp"
#include "qfid/metrics.hpp"
#include "qfid/states.hpp"
#include "qfid/tolerances.hpp"

namespace qfid {

/// Lower and upper fidelity bounds from the trace norm alone:
/// 1 - T/2 <= F <= sqrt(1 - T^2/4) with T = ||rho - sigma||_1.
struct FvdgBounds {
  double lower;
  double upper;
};

inline FvdgBounds fvdg_bounds(double trace_norm) {
  if (!(trace_norm >= 0.0) || trace_norm > 2.0 + 1e-12) {
    throw NegativeInput("trace norm must lie in [0, 2]");
  }
  const double t = std::min(trace_norm, 2.0);
  const double disc = std::max(0.0, 1.0 - 0.25 * t * t);
  return FvdgBounds{1.0 - 0.5 * t, std::sqrt(disc)};
}

/// Weight x / (1 + x) with x = e^{s/2}; increases from 1/2 at s = 0 to the
/// limit 1 at s = +infinity, where the generic 1 - T/2 bound is recovered.
inline double smax_weight(const ExtendedReal& s) {
  if (s.is_infinite()) return 1.0;
  const double x = std::exp(0.5 * s.value());
  return x / (1.0 + x);
}

/// Fidelity lower bound sharpened by the max-relative entropy:
/// F >= 1 - (1/2) * (x / (1 + x)) * T with x = e^{S_max / 2}.
/// Never below the generic bound 1 - T/2, and strictly above it whenever
/// S_max is finite and T > 0.
inline double smax_lower_bound(double trace_norm, const ExtendedReal& s) {
  if (!(trace_norm >= 0.0) || trace_norm > 2.0 + 1e-12) {
    throw NegativeInput("trace norm must lie in [0, 2]");
  }
  return 1.0 - 0.5 * smax_weight(s) * std::min(trace_norm, 2.0);
}

/// All per-pair quantities relevant to the bound chain, in evaluation order:
/// fvdg_lower <= new_lower <= fidelity <= fvdg_upper.
struct BoundReport {
  double fidelity;
  double trace_norm;
  ExtendedReal s_max;
  ExtendedReal lambda0;
  double fvdg_lower;
  double fvdg_upper;
  double new_lower;
  double gap_new_vs_fvdg;
};

inline BoundReport bound_report(const DensityMatrix& rho,
                                const DensityMatrix& sigma,
                                std::optional<double> rank_tol = {},
                                const Tolerances& tol = {}) {
  const double f = fidelity(rho, sigma, tol);
  const double t = trace_distance_norm(rho, sigma, tol);
  const ExtendedReal l0 = lambda_zero(rho, sigma, rank_tol, tol);
  const ExtendedReal s =
      l0.is_infinite() ? ExtendedReal::infinity() : ExtendedReal(std::log(l0.value()));
  const FvdgBounds fvdg = fvdg_bounds(t);
  const double nl = smax_lower_bound(t, s);
  return BoundReport{f, t, s, l0, fvdg.lower, fvdg.upper, nl, nl - fvdg.lower};
}

/// A state pair of the explicit-mixture form (rho, lambda rho + (1-lambda) sigma).
/// The factory builds the mixture so the structure is true by construction.
class MixtureCase {
 public:
  static MixtureCase make(const DensityMatrix& rho, const DensityMatrix& sigma,
                          double lambda, const Tolerances& tol = {}) {
    if (rho.dim() != sigma.dim()) {
      throw DimensionMismatch("states have different dimensions");
    }
    if (!(lambda >= -tol.mixture_tol) || !(lambda <= 1.0 + tol.mixture_tol)) {
      throw InvalidLambda("lambda must lie in [0, 1]");
    }
    const double l = std::clamp(lambda, 0.0, 1.0);
    ComplexMatrix m =
        (cplx(l, 0.0) * rho.mat() + cplx(1.0 - l, 0.0) * sigma.mat()).hermitized();
    return MixtureCase(rho, sigma, DensityMatrix::from_matrix(std::move(m), tol),
                       l);
  }

  const DensityMatrix& rho() const { return rho_; }
  const DensityMatrix& sigma() const { return sigma_; }
  const DensityMatrix& mixed() const { return mixed_; }
  double lambda() const { return lambda_; }

 private:
  MixtureCase(DensityMatrix rho, DensityMatrix sigma, DensityMatrix mixed,
              double lambda)
      : rho_(std::move(rho)),
        sigma_(std::move(sigma)),
        mixed_(std::move(mixed)),
        lambda_(lambda) {}

  DensityMatrix rho_;
  DensityMatrix sigma_;
  DensityMatrix mixed_;
  double lambda_;
};

/// Lower bound specific to mixtures: with tau = lambda rho + (1-lambda) sigma,
/// F(rho, tau) >= 1 - (1/2) (1 - sqrt(lambda)) ||rho - sigma||_1.
/// The trace norm is between the two ingredients, not between rho and the
/// mixture; since ||rho - tau||_1 = (1 - lambda) ||rho - sigma||_1 the same
/// bound reads 1 - (1/2) ||rho - tau||_1 / (1 + sqrt(lambda)).
/// Equality at lambda = 1 and for orthogonal pure ingredients.
struct MixtureBound {
  double bound;
  double ingredient_trace_norm;  // ||rho - sigma||_1
};

inline MixtureBound mixture_bound(const MixtureCase& mc,
                                  const Tolerances& tol = {}) {
  const double t = trace_distance_norm(mc.rho(), mc.sigma(), tol);
  return MixtureBound{1.0 - 0.5 * (1.0 - std::sqrt(mc.lambda())) * t, t};
}

/// Weaker mixture bound obtained from joint concavity alone:
/// F(rho, tau) >= 1 - (1/2) (1 - lambda) ||rho - sigma||_1.
/// Dominated by mixture_bound since sqrt(lambda) >= lambda on [0, 1].
struct ConcavityComparison {
  double sqrt_bound;
  double concavity_bound;
  double ingredient_trace_norm;
};

inline ConcavityComparison concavity_comparison(const MixtureCase& mc,
                                                const Tolerances& tol = {}) {
  const double t = trace_distance_norm(mc.rho(), mc.sigma(), tol);
  return ConcavityComparison{1.0 - 0.5 * (1.0 - std::sqrt(mc.lambda())) * t,
                             1.0 - 0.5 * (1.0 - mc.lambda()) * t, t};
}

/// Classical counterpart of the mixture bound. For r = lambda p + (1-lambda) q:
/// sum_j sqrt(p_j r_j) >= 1 - (1/2) (1 - sqrt(lambda)) sum_j |p_j - q_j|.
/// Returns (lhs, rhs) so callers can inspect the slack.
struct ClassicalMixtureBound {
  double lhs;
  double rhs;
};

inline ClassicalMixtureBound classical_mixture_bound(const ProbDist& p,
                                                     const ProbDist& q,
                                                     double lambda,
                                                     const Tolerances& tol = {}) {
  if (p.size() != q.size()) {
    throw LengthMismatch("distributions have different lengths");
  }
  if (!(lambda >= -tol.mixture_tol) || !(lambda <= 1.0 + tol.mixture_tol)) {
    throw InvalidLambda("lambda must lie in [0, 1]");
  }
  const double l = std::clamp(lambda, 0.0, 1.0);
  double lhs = 0.0;
  double l1 = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    const double r = l * p[j] + (1.0 - l) * q[j];
    lhs += std::sqrt(p[j] * r);
    l1 += std::abs(p[j] - q[j]);
  }
  return ClassicalMixtureBound{lhs, 1.0 - 0.5 * (1.0 - std::sqrt(l)) * l1};
}

/// Scalar inequality underlying the classical bound:
/// sqrt((1 + a)(1 + lambda a)) >= 1 + sqrt(lambda) a for a >= 0,
/// lambda in [0, 1], with lhs^2 - rhs^2 == (1 - sqrt(lambda))^2 a exactly.
/// Returns (lhs, rhs).
struct ScalarInequality {
  double lhs;
  double rhs;
};

inline ScalarInequality scalar_mixture_inequality(double a, double lambda) {
  if (!(a >= 0.0)) throw NegativeInput("a must be nonnegative");
  if (!(lambda >= 0.0) || !(lambda <= 1.0)) {
    throw InvalidLambda("lambda must lie in [0, 1]");
  }
  return ScalarInequality{std::sqrt((1.0 + a) * (1.0 + lambda * a)),
                          1.0 + std::sqrt(lambda) * a};
}

/// Representation of sigma as an explicit mixture containing rho:
/// sigma = (1 / lambda0) rho + (1 - 1 / lambda0) sigma_hat, with sigma_hat a
/// state. Exists whenever lambda0 is finite; lambda0 == 1 forces rho == sigma
/// and leaves sigma_hat undefined.
struct HatSigmaDecomposition {
  double lambda0;
  double weight_rho;       // 1 / lambda0
  DensityMatrix sigma_hat;
};

inline HatSigmaDecomposition hat_sigma_decomposition(
    const DensityMatrix& rho, const DensityMatrix& sigma,
    std::optional<double> rank_tol = {}, const Tolerances& tol = {}) {
  const ExtendedReal l0 = lambda_zero(rho, sigma, rank_tol, tol);
  if (l0.is_infinite()) {
    throw InfiniteLambda0("no finite lambda0: supp(rho) leaks outside supp(sigma)");
  }
  const double v = l0.value();
  if (v <= 1.0 + tol.deg_tol) {
    throw DegenerateLambda0("lambda0 == 1 forces rho == sigma; sigma_hat undefined");
  }
  const double w = 1.0 / v;
  ComplexMatrix hat =
      (cplx(1.0 / (1.0 - w), 0.0) * (sigma.mat() - cplx(w, 0.0) * rho.mat()))
          .hermitized();
  // lambda0 is computed to finite precision, so sigma - rho / lambda0 can dip
  // slightly negative; validate sigma_hat against a loosened PSD floor.
  Tolerances relaxed = tol;
  relaxed.psd_tol = tol.hat_sigma_psd_tol;
  return HatSigmaDecomposition{
      v, w, DensityMatrix::from_matrix(std::move(hat), relaxed)};
}

/// Saturation structure of the generic lower bound F = 1 - T/2:
/// saturation implies S_max = +infinity or rho == sigma. The converse fails;
/// pairs can have infinite S_max without saturating.
struct SaturationReport {
  double fidelity;
  double trace_norm;
  ExtendedReal s_max;
  double slack;               // F - (1 - T/2) >= 0
  bool fvdg_lower_saturated;  // slack <= sat_tol
  bool s_max_infinite;
  bool states_equal;          // max entrywise difference <= state_eq_tol
  bool implication_holds;     // saturated => (infinite or equal)
};

inline SaturationReport saturation_report(const DensityMatrix& rho,
                                          const DensityMatrix& sigma,
                                          std::optional<double> rank_tol = {},
                                          const Tolerances& tol = {}) {
  const double f = fidelity(rho, sigma, tol);
  const double t = trace_distance_norm(rho, sigma, tol);
  const ExtendedReal s = s_max(rho, sigma, rank_tol, tol);
  const double slack = f - (1.0 - 0.5 * t);
  const bool saturated = std::abs(slack) <= tol.sat_tol;
  const bool infinite = s.is_infinite();
  const bool equal = max_abs_diff(rho.mat(), sigma.mat()) <= tol.state_eq_tol;
  return SaturationReport{f,        t,     s,        slack,
                          saturated, infinite, equal,
                          !saturated || infinite || equal};
}

}  // namespace qfid
