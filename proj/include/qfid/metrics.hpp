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
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "qfid/complex_matrix.hpp"
#include "qfid/eigen.hpp"
#include "qfid/errors.hpp"
#include "qfid/states.hpp"
#include "qfid/tolerances.hpp"

namespace qfid {

/// Nonnegative real extended with +infinity; the codomain of the
/// max-relative entropy and of lambda0.
class ExtendedReal {
 public:
  ExtendedReal(double v) : value_(v) {  // NOLINT: implicit by design
    if (std::isnan(v) || v < 0.0) {
      throw NegativeInput("ExtendedReal requires a nonnegative value");
    }
  }

  static ExtendedReal infinity() {
    return ExtendedReal(std::numeric_limits<double>::infinity());
  }

  bool is_infinite() const { return std::isinf(value_); }
  bool is_finite() const { return !is_infinite(); }

  /// Finite value, or +inf as a double.
  double value() const { return value_; }

  friend bool operator==(const ExtendedReal& a, const ExtendedReal& b) {
    return a.value_ == b.value_;
  }
  friend bool operator<(const ExtendedReal& a, const ExtendedReal& b) {
    return a.value_ < b.value_;
  }

 private:
  double value_;
};

namespace detail {

inline void check_same_dim(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) {
    throw DimensionMismatch("states have different dimensions");
  }
}

inline double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace detail

/// Nuclear norm (sum of singular values) of a general square matrix,
/// computed as the positive eigenvalues of the Hermitian dilation
/// [[0, B], [B', 0]], whose spectrum is {+s_i} u {-s_i}. Dilation keeps the
/// error in each singular value additive (~machine epsilon); routes through
/// eigenvalues of B'B would take square roots of near-zero values and
/// amplify solver noise to the 1e-8 scale.
inline double nuclear_norm(const ComplexMatrix& b, const Tolerances& tol = {}) {
  const std::size_t d = b.dim();
  ComplexMatrix m(2 * d);
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      m(r, d + c) = b(r, c);
      m(d + c, r) = std::conj(b(r, c));
    }
  }
  const std::vector<double> evals = eigh_values(m, tol);
  double sum = 0.0;
  for (double v : evals) {
    if (v > 0.0) sum += v;
  }
  return sum;
}

namespace detail {

/// F(rho, sigma) = || sqrt(rho) sqrt(sigma) ||_1 given both square roots.
inline double fidelity_from_sqrts(const ComplexMatrix& sqrt_rho,
                                  const ComplexMatrix& sqrt_sigma,
                                  const Tolerances& tol) {
  return clamp01(nuclear_norm(sqrt_rho * sqrt_sigma, tol));
}

}  // namespace detail

/// Uhlmann fidelity F(rho, sigma) = Tr sqrt(sqrt(rho) sigma sqrt(rho)),
/// evaluated as the trace norm || sqrt(rho) sqrt(sigma) ||_1 (the same
/// quantity: the inner matrix is B B' for B = sqrt(rho) sqrt(sigma)).
/// Symmetric in its arguments and clamped to [0, 1].
inline double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma,
                       const Tolerances& tol = {}) {
  detail::check_same_dim(rho, sigma);
  return detail::fidelity_from_sqrts(matrix_sqrt(rho.mat(), tol),
                                     matrix_sqrt(sigma.mat(), tol), tol);
}

/// Trace norm ||rho - sigma||_1 = sum |eigenvalues(rho - sigma)|, the full
/// (unhalved) 1-norm, in [0, 2].
inline double trace_distance_norm(const DensityMatrix& rho,
                                  const DensityMatrix& sigma,
                                  const Tolerances& tol = {}) {
  detail::check_same_dim(rho, sigma);
  ComplexMatrix diff = (rho.mat() - sigma.mat()).hermitized();
  double sum = 0.0;
  for (double v : eigh_values(diff, tol)) sum += std::abs(v);
  return std::clamp(sum, 0.0, 2.0);
}

/// Smallest lambda with rho <= lambda * sigma, or +infinity when the support
/// of rho leaks outside the support of sigma. Computed as the top eigenvalue
/// of B rho B with B the pseudo-inverse square root of sigma, floored at 1
/// (unit traces force lambda0 >= 1; dips below are rounding).
inline ExtendedReal lambda_zero(const DensityMatrix& rho,
                                const DensityMatrix& sigma,
                                std::optional<double> rank_tol = {},
                                const Tolerances& tol = {}) {
  detail::check_same_dim(rho, sigma);
  const ComplexMatrix p = support_projector(sigma.mat(), rank_tol, tol);
  const ComplexMatrix complement = ComplexMatrix::identity(sigma.dim()) - p;
  const ComplexMatrix leak = (complement * rho.mat() * complement).hermitized();
  if (leak.max_abs() > tol.support_leak_tol) {
    return ExtendedReal::infinity();
  }
  const ComplexMatrix b = pseudo_inv_sqrt(sigma.mat(), rank_tol, tol);
  const ComplexMatrix m = (b * rho.mat() * b).hermitized();
  return ExtendedReal(std::max(eigh_values(m, tol).front(), 1.0));
}

/// Max-relative entropy S_max(rho || sigma) = ln lambda0, >= 0, +infinity
/// exactly when lambda_zero is.
inline ExtendedReal s_max(const DensityMatrix& rho, const DensityMatrix& sigma,
                          std::optional<double> rank_tol = {},
                          const Tolerances& tol = {}) {
  const ExtendedReal l0 = lambda_zero(rho, sigma, rank_tol, tol);
  if (l0.is_infinite()) return l0;
  return ExtendedReal(std::log(l0.value()));
}

/// Classical (Bhattacharyya) fidelity sum_j sqrt(p_j q_j).
inline double classical_fidelity(const ProbDist& p, const ProbDist& q) {
  if (p.size() != q.size()) {
    throw LengthMismatch("distributions have different lengths");
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) sum += std::sqrt(p[j] * q[j]);
  return detail::clamp01(sum);
}

/// l1 distance sum_j |p_j - q_j|, in [0, 2].
inline double classical_l1(const ProbDist& p, const ProbDist& q) {
  if (p.size() != q.size()) {
    throw LengthMismatch("distributions have different lengths");
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) sum += std::abs(p[j] - q[j]);
  return std::clamp(sum, 0.0, 2.0);
}

/// A POVM together with the classical quantity it attains on the pair of
/// states it was built for.
struct MeasurementResult {
  POVM povm;
  double achieved;
};

/// Two-outcome projective measurement {P+, I - P+} onto the nonnegative
/// eigenspace of rho - sigma. Its outcome distributions realize the full
/// trace norm: achieved == ||rho - sigma||_1.
inline MeasurementResult helstrom_measurement(const DensityMatrix& rho,
                                              const DensityMatrix& sigma,
                                              const Tolerances& tol = {}) {
  detail::check_same_dim(rho, sigma);
  EigenDecomposition ed = eigh((rho.mat() - sigma.mat()).hermitized(), tol);
  const ComplexMatrix plus = ed.apply([](double x) { return x >= 0.0 ? 1.0 : 0.0; });
  std::vector<ComplexMatrix> elements;
  elements.push_back(plus);
  elements.push_back(ComplexMatrix::identity(rho.dim()) - plus);
  POVM povm(std::move(elements), tol);
  const double achieved = classical_l1(induced_distribution(rho, povm, tol),
                                       induced_distribution(sigma, povm, tol));
  return MeasurementResult{std::move(povm), achieved};
}

/// Projective measurement on the Bloch direction (theta, phi):
/// {|n><n|, I - |n><n|} with |n> = (cos(theta/2), e^{i phi} sin(theta/2)).
inline POVM bloch_projective_povm(double theta, double phi,
                                  const Tolerances& tol = {}) {
  const std::vector<cplx> n = {cplx(std::cos(theta / 2.0), 0.0),
                               std::polar(std::sin(theta / 2.0), phi)};
  ComplexMatrix proj = outer_product(n, n).hermitized();
  std::vector<ComplexMatrix> elements;
  elements.push_back(proj);
  elements.push_back(ComplexMatrix::identity(2) - proj);
  return POVM(std::move(elements), tol);
}

/// Grid-search extrema of the measured l1 distance and measured fidelity
/// over rank-1 projective qubit measurements. An independent, brute-force
/// check of the optimal-measurement constructions; qubits only.
struct PovmExtrema {
  double max_l1 = 0.0;
  double min_fid = 1.0;
  double max_l1_theta = 0.0, max_l1_phi = 0.0;
  double min_fid_theta = 0.0, min_fid_phi = 0.0;
};

inline PovmExtrema brute_force_povm_extrema(const DensityMatrix& rho,
                                            const DensityMatrix& sigma,
                                            std::size_t grid_resolution,
                                            const Tolerances& tol = {}) {
  detail::check_same_dim(rho, sigma);
  if (rho.dim() != 2) {
    throw UnsupportedDimension("brute-force POVM search supports d = 2 only");
  }
  if (grid_resolution == 0) {
    throw InvalidSpec("grid_resolution must be positive");
  }

  PovmExtrema out;
  out.max_l1 = -1.0;
  out.min_fid = 2.0;
  const double theta_step =
      grid_resolution > 1 ? std::numbers::pi / static_cast<double>(grid_resolution - 1)
                          : 0.0;
  const double phi_step =
      2.0 * std::numbers::pi / static_cast<double>(grid_resolution);
  std::vector<cplx> n(2);
  for (std::size_t i = 0; i < grid_resolution; ++i) {
    const double theta = theta_step * static_cast<double>(i);
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    for (std::size_t j = 0; j < grid_resolution; ++j) {
      const double phi = phi_step * static_cast<double>(j);
      n[0] = cplx(c, 0.0);
      n[1] = std::polar(s, phi);
      const double p1 = detail::clamp01(quadratic_form(rho.mat(), n));
      const double q1 = detail::clamp01(quadratic_form(sigma.mat(), n));
      const double p2 = 1.0 - p1;
      const double q2 = 1.0 - q1;
      const double l1 = std::abs(p1 - q1) + std::abs(p2 - q2);
      const double fid = std::sqrt(p1 * q1) + std::sqrt(p2 * q2);
      if (l1 > out.max_l1) {
        out.max_l1 = l1;
        out.max_l1_theta = theta;
        out.max_l1_phi = phi;
      }
      if (fid < out.min_fid) {
        out.min_fid = fid;
        out.min_fid_theta = theta;
        out.min_fid_phi = phi;
      }
    }
  }
  (void)tol;
  return out;
}

namespace detail {

/// Measurement basis that attains the fidelity when supp(other) is contained
/// in supp(base): eigenvectors of B (B^-1... ) -- concretely of
/// M = pinv_sqrt(base) * sqrt(sqrt(base) other sqrt(base)) * pinv_sqrt(base),
/// augmented with the projector onto the orthocomplement of supp(base).
inline ComplexMatrix fidelity_optimal_basis(const ComplexMatrix& base,
                                            const ComplexMatrix& other,
                                            std::optional<double> rank_tol,
                                            const Tolerances& tol) {
  const std::size_t d = base.dim();
  const ComplexMatrix p = support_projector(base, rank_tol, tol);
  const ComplexMatrix b = pseudo_inv_sqrt(base, rank_tol, tol);
  const ComplexMatrix sb = matrix_sqrt(base, tol);
  const ComplexMatrix inner = matrix_sqrt((sb * other * sb).hermitized(), tol);
  const ComplexMatrix m = (b * inner * b).hermitized();
  // Shift the orthocomplement of supp(base) to eigenvalue -1 so its
  // eigenvectors cannot mix with the kernel of m inside the support.
  const ComplexMatrix complement = ComplexMatrix::identity(d) - p;
  const ComplexMatrix shifted = (m - complement).hermitized();
  return eigh(shifted, tol).eigenvectors;
}

using lcplx = std::complex<long double>;

/// Minimal dense Hermitian toolkit at long double precision, used only to
/// rebuild the optimal measurement basis when the double-precision chain
/// loses too much accuracy to an ill-conditioned base state.
struct LdMatrix {
  std::size_t d = 0;
  std::vector<lcplx> a;

  explicit LdMatrix(std::size_t dim) : d(dim), a(dim * dim) {}
  explicit LdMatrix(const ComplexMatrix& m) : LdMatrix(m.dim()) {
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c)
        at(r, c) = lcplx(m(r, c).real(), m(r, c).imag());
  }

  lcplx& at(std::size_t r, std::size_t c) { return a[r * d + c]; }
  const lcplx& at(std::size_t r, std::size_t c) const { return a[r * d + c]; }

  static LdMatrix identity(std::size_t dim) {
    LdMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m.at(i, i) = 1.0L;
    return m;
  }

  LdMatrix mul(const LdMatrix& o) const {
    LdMatrix out(d);
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t k = 0; k < d; ++k) {
        const lcplx x = at(r, k);
        for (std::size_t c = 0; c < d; ++c) out.at(r, c) += x * o.at(k, c);
      }
    return out;
  }

  void hermitize() {
    for (std::size_t r = 0; r < d; ++r) {
      at(r, r) = lcplx(at(r, r).real(), 0.0L);
      for (std::size_t c = r + 1; c < d; ++c) {
        const lcplx avg = 0.5L * (at(r, c) + std::conj(at(c, r)));
        at(r, c) = avg;
        at(c, r) = std::conj(avg);
      }
    }
  }
};

struct LdEigen {
  std::vector<long double> w;
  LdMatrix v;
};

/// One cyclic Jacobi sweep at long double: the same plane rotations as the
/// double-precision eigensolver, diagonalizing `a` while accumulating the
/// rotations into `v`.
inline void ld_jacobi_sweep(LdMatrix& a, LdMatrix& v,
                            long double skip_threshold) {
  const std::size_t d = a.d;
  for (std::size_t p = 0; p + 1 < d; ++p) {
    for (std::size_t q = p + 1; q < d; ++q) {
      const lcplx apq = a.at(p, q);
      const long double mag = std::abs(apq);
      if (mag <= skip_threshold) continue;

      const lcplx phase = apq / mag;
      const long double tau =
          (a.at(p, p).real() - a.at(q, q).real()) / (2.0L * mag);
      const long double sign = tau >= 0.0L ? 1.0L : -1.0L;
      const long double t = -sign / (std::abs(tau) + std::hypot(1.0L, tau));
      const long double c = 1.0L / std::sqrt(1.0L + t * t);
      const long double s = t * c;
      const lcplx sq = s * std::conj(phase);

      for (std::size_t r = 0; r < d; ++r) {
        const lcplx arp = a.at(r, p);
        const lcplx arq = a.at(r, q);
        a.at(r, p) = c * arp - sq * arq;
        a.at(r, q) = s * arp + c * std::conj(phase) * arq;
      }
      for (std::size_t r = 0; r < d; ++r) {
        const lcplx apr = a.at(p, r);
        const lcplx aqr = a.at(q, r);
        a.at(p, r) = c * apr - s * phase * aqr;
        a.at(q, r) = s * apr + c * phase * aqr;
      }
      a.at(p, p) = lcplx(a.at(p, p).real(), 0.0L);
      a.at(q, q) = lcplx(a.at(q, q).real(), 0.0L);
      a.at(p, q) = 0.0L;
      a.at(q, p) = 0.0L;

      for (std::size_t r = 0; r < d; ++r) {
        const lcplx vrp = v.at(r, p);
        const lcplx vrq = v.at(r, q);
        v.at(r, p) = c * vrp - sq * vrq;
        v.at(r, q) = s * vrp + c * std::conj(phase) * vrq;
      }
    }
  }
}

/// Long double eigendecomposition by cyclic Jacobi. Best effort: runs until
/// the off-diagonal norm falls below 1e-18 of the Frobenius norm or the sweep
/// budget runs out (refinement callers keep the result only when it measures
/// better, so there is nothing to throw).
inline LdEigen ld_eigh(LdMatrix a) {
  const std::size_t d = a.d;
  LdMatrix v = LdMatrix::identity(d);
  long double fro = 0.0L;
  for (const lcplx& x : a.a) fro += std::norm(x);
  fro = std::sqrt(fro);
  const long double off_threshold = 1e-18L * fro;
  const long double skip_threshold =
      off_threshold / (2.0L * static_cast<long double>(d));
  auto off_norm = [&]() {
    long double s = 0.0L;
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c)
        if (r != c) s += std::norm(a.at(r, c));
    return std::sqrt(s);
  };
  for (int sweep = 0; sweep < 120 && off_norm() > off_threshold; ++sweep) {
    ld_jacobi_sweep(a, v, skip_threshold);
  }
  LdEigen out{std::vector<long double>(d), std::move(v)};
  for (std::size_t i = 0; i < d; ++i) out.w[i] = a.at(i, i).real();
  return out;
}

/// V diag(f(w)) V' at long double.
inline LdMatrix ld_apply(const LdEigen& e,
                         const std::function<long double(long double)>& f) {
  const std::size_t d = e.v.d;
  LdMatrix out(d);
  for (std::size_t k = 0; k < d; ++k) {
    const long double fk = f(e.w[k]);
    if (fk == 0.0L) continue;
    for (std::size_t r = 0; r < d; ++r) {
      const lcplx vrk = fk * e.v.at(r, k);
      for (std::size_t c = 0; c < d; ++c) {
        out.at(r, c) += vrk * std::conj(e.v.at(c, k));
      }
    }
  }
  out.hermitize();
  return out;
}

/// fidelity_optimal_basis recomputed with 64-bit mantissas. The construction
/// conjugates by pinv_sqrt(base), so its accuracy degrades with the condition
/// number of the base state; at double precision a base with eigenvalue
/// spread near the rank cutoff can leave the measured value 1e-4 off the
/// fidelity, far beyond what local descent recovers in reasonable time.
/// The rank cutoff mirrors the double path so support decisions match, but
/// the junk floor scales down with the wider mantissa: the floor guards
/// against solver noise, and the sandwich sqrt(base) other sqrt(base) has
/// genuine eigenvalues (products of two small spectra) far below the
/// double-precision floor that the basis must still resolve.
constexpr long double kLdJunkFloor = 1e-17L;

inline ComplexMatrix refined_fidelity_basis(const ComplexMatrix& base,
                                            const ComplexMatrix& other,
                                            std::optional<double> rank_tol,
                                            const Tolerances& tol) {
  const std::size_t d = base.dim();
  const long double rt = rank_tol.value_or(tol.rank_tol);

  LdMatrix base_ld(base);
  base_ld.hermitize();
  const LdEigen eb = ld_eigh(base_ld);
  long double lmax = 0.0L;
  for (const long double w : eb.w) lmax = std::max(lmax, w);
  const long double cutoff = rt * lmax;
  const long double floor = kLdJunkFloor * lmax;

  const LdMatrix sb = ld_apply(
      eb, [&](long double x) { return x > floor ? std::sqrt(x) : 0.0L; });
  const LdMatrix binv = ld_apply(eb, [&](long double x) {
    return x > cutoff ? 1.0L / std::sqrt(x) : 0.0L;
  });
  const LdMatrix complement = ld_apply(
      eb, [&](long double x) { return x > cutoff ? 0.0L : 1.0L; });

  LdMatrix other_ld(other);
  other_ld.hermitize();
  LdMatrix sandwich = sb.mul(other_ld).mul(sb);
  sandwich.hermitize();
  const LdEigen es = ld_eigh(sandwich);
  long double smax = 0.0L;
  for (const long double w : es.w) smax = std::max(smax, w);
  const long double sfloor = kLdJunkFloor * smax;
  const LdMatrix inner = ld_apply(
      es, [&](long double x) { return x > sfloor ? std::sqrt(x) : 0.0L; });

  LdMatrix m = binv.mul(inner).mul(binv);
  m.hermitize();
  for (std::size_t i = 0; i < m.a.size(); ++i) m.a[i] -= complement.a[i];
  m.hermitize();

  const LdEigen em = ld_eigh(std::move(m));
  ComplexMatrix out(d);
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      out(r, c) = cplx(static_cast<double>(em.v.at(r, c).real()),
                       static_cast<double>(em.v.at(r, c).imag()));
    }
  }
  return out;
}

/// Measured classical fidelity of the rank-1 projective measurement formed
/// by the columns of an orthonormal basis. Evaluated at long double because
/// the square root magnifies absolute rounding error of tiny outcome
/// probabilities (d sqrt(pq)/dp ~ sqrt(q/p)); at double precision that shifts
/// the sum by several 1e-9 for nearly pure states, enough to make a descent
/// stopped at the fidelity read as if it measured below it.
inline double basis_classical_fidelity(const ComplexMatrix& rho,
                                       const ComplexMatrix& sigma,
                                       const ComplexMatrix& basis) {
  const std::size_t d = basis.dim();
  const LdMatrix rho_ld(rho);
  const LdMatrix sigma_ld(sigma);
  long double sum = 0.0L;
  std::vector<lcplx> col(d);
  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t r = 0; r < d; ++r) {
      col[r] = lcplx(basis(r, k).real(), basis(r, k).imag());
    }
    long double p = 0.0L;
    long double q = 0.0L;
    for (std::size_t r = 0; r < d; ++r) {
      for (std::size_t c = 0; c < d; ++c) {
        const lcplx w = std::conj(col[r]) * col[c];
        p += (rho_ld.at(r, c) * w).real();
        q += (sigma_ld.at(r, c) * w).real();
      }
    }
    sum += std::sqrt(std::max(0.0L, p) * std::max(0.0L, q));
  }
  return static_cast<double>(sum);
}

/// The (i, j) contribution to the measured classical fidelity after rotating
/// that column pair: new_i = cos(theta) e_i + sin(theta) e^{i phase} e_j.
/// Only the two diagonal entries move, so the pair objective is closed form.
struct PairTerms {
  double p_i, p_j, q_i, q_j;  // diagonal entries of rho, sigma in the basis
  cplx zp, zq;                // off-diagonal entries P(i, j), Q(i, j)

  double value(double theta, double phase) const {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const cplx ph = std::polar(1.0, phase);
    const double wp = 2.0 * c * s * std::real(ph * zp);
    const double wq = 2.0 * c * s * std::real(ph * zq);
    const double pi2 = std::max(0.0, c * c * p_i + s * s * p_j + wp);
    const double pj2 = std::max(0.0, s * s * p_i + c * c * p_j - wp);
    const double qi2 = std::max(0.0, c * c * q_i + s * s * q_j + wq);
    const double qj2 = std::max(0.0, s * s * q_i + c * c * q_j - wq);
    return std::sqrt(pi2 * qi2) + std::sqrt(pj2 * qj2);
  }
};

/// Minimizes the pair objective over theta for a fixed phase: coarse scan to
/// bracket the global minimum of the pi/2-periodic section, then golden
/// section. Derivative-free because the objective kinks where a diagonal
/// entry crosses zero.
inline double minimize_pair_theta(const PairTerms& t, double phase,
                                  double& best_value) {
  constexpr int kScan = 16;
  const double half = std::numbers::pi / 4.0;
  double best_theta = 0.0;
  double best = t.value(0.0, phase);
  for (int k = 0; k <= kScan; ++k) {
    const double theta = -half + (2.0 * half * k) / kScan;
    const double v = t.value(theta, phase);
    if (v < best) {
      best = v;
      best_theta = theta;
    }
  }
  double lo = best_theta - 2.0 * half / kScan;
  double hi = best_theta + 2.0 * half / kScan;
  constexpr double kGolden = 0.6180339887498949;
  double x1 = hi - kGolden * (hi - lo);
  double x2 = lo + kGolden * (hi - lo);
  double f1 = t.value(x1, phase);
  double f2 = t.value(x2, phase);
  for (int it = 0; it < 40; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kGolden * (hi - lo);
      f1 = t.value(x1, phase);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kGolden * (hi - lo);
      f2 = t.value(x2, phase);
    }
  }
  for (const auto& [theta, v] :
       {std::pair{x1, f1}, std::pair{x2, f2},
        std::pair{0.5 * (lo + hi), t.value(0.5 * (lo + hi), phase)}}) {
    if (v < best) {
      best = v;
      best_theta = theta;
    }
  }
  best_value = best;
  return best_theta;
}

/// Applies the (i, j) pair rotation to the basis and to both congruence
/// images p and q (p <- R^dagger p R for the rotation R on columns i, j).
inline void rotate_pair(ComplexMatrix& basis, ComplexMatrix& p,
                        ComplexMatrix& q, std::size_t i, std::size_t j,
                        double theta, double phase) {
  const std::size_t d = basis.dim();
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const cplx ph = std::polar(1.0, phase);
  auto col_update = [&](ComplexMatrix& m) {
    for (std::size_t r = 0; r < d; ++r) {
      const cplx mi = m(r, i);
      const cplx mj = m(r, j);
      m(r, i) = c * mi + s * ph * mj;
      m(r, j) = c * mj - s * std::conj(ph) * mi;
    }
  };
  auto row_update = [&](ComplexMatrix& m) {
    for (std::size_t r = 0; r < d; ++r) {
      const cplx mi = m(i, r);
      const cplx mj = m(j, r);
      m(i, r) = c * mi + s * std::conj(ph) * mj;
      m(j, r) = c * mj - s * ph * mi;
    }
  };
  col_update(basis);
  col_update(p);
  row_update(p);
  col_update(q);
  row_update(q);
}

/// Cyclic 2x2 descent of the measured classical fidelity over orthonormal
/// bases, started from an approximate optimal basis. Every projective
/// measurement measures at least the fidelity, so descent can only tighten
/// the attainment equality that an ill-conditioned base^{-1/2} leaves loose.
/// Stops at `target`, on a stalled sweep, or on the sweep budget.
inline void polish_fidelity_basis(const ComplexMatrix& rho,
                                  const ComplexMatrix& sigma,
                                  ComplexMatrix& basis, double target) {
  const std::size_t d = basis.dim();
  if (d < 2) return;
  constexpr double kTiny = 1e-30;
  ComplexMatrix p = (basis.adjoint() * rho * basis).hermitized();
  ComplexMatrix q = (basis.adjoint() * sigma * basis).hermitized();
  auto diagonal_value = [&]() {
    double sum = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      sum += std::sqrt(std::max(0.0, p(k, k).real()) *
                       std::max(0.0, q(k, k).real()));
    }
    return sum;
  };
  double value = diagonal_value();
  constexpr int kMaxSweeps = 60;
  for (int sweep = 0; sweep < kMaxSweeps && value > target; ++sweep) {
    double improvement = 0.0;
    for (std::size_t i = 0; i + 1 < d; ++i) {
      for (std::size_t j = i + 1; j < d; ++j) {
        const PairTerms t{std::max(0.0, p(i, i).real()),
                          std::max(0.0, p(j, j).real()),
                          std::max(0.0, q(i, i).real()),
                          std::max(0.0, q(j, j).real()),
                          p(i, j),
                          q(i, j)};
        const double before = t.value(0.0, 0.0);
        // Phase candidates: the steepest-descent phase of the pair gradient
        // plus the phases aligning each off-diagonal entry alone (which
        // remain informative when a diagonal entry vanishes and the
        // gradient direction degenerates).
        const double ri = std::sqrt((t.q_i + kTiny) / (t.p_i + kTiny));
        const double rj = std::sqrt((t.q_j + kTiny) / (t.p_j + kTiny));
        const cplx grad = t.zp * (ri - rj) + t.zq * (1.0 / ri - 1.0 / rj);
        double phases[3];
        std::size_t n_phases = 0;
        if (std::abs(grad) > 0.0) {
          phases[n_phases++] = std::numbers::pi - std::arg(grad);
        }
        if (std::abs(t.zp) > 0.0) phases[n_phases++] = -std::arg(t.zp);
        if (std::abs(t.zq) > 0.0) phases[n_phases++] = -std::arg(t.zq);
        double best = before;
        double best_theta = 0.0;
        double best_phase = 0.0;
        for (std::size_t k = 0; k < n_phases; ++k) {
          double v = 0.0;
          const double theta = minimize_pair_theta(t, phases[k], v);
          if (v < best) {
            best = v;
            best_theta = theta;
            best_phase = phases[k];
          }
        }
        if (best < before) {
          rotate_pair(basis, p, q, i, j, best_theta, best_phase);
          improvement += before - best;
        }
      }
    }
    p = p.hermitized();
    q = q.hermitized();
    value = diagonal_value();
    if (improvement < 1e-15) break;
  }
}

}  // namespace detail

/// Projective measurement minimizing the classical fidelity of the induced
/// distributions. Exact (achieved == fidelity) whenever one support contains
/// the other and both spectra resolve above solver junk: when the
/// double-precision eigenbasis misses the attainment, the chain is rebuilt
/// at long double and the result polished by a local descent on the measured
/// value, so ill-conditioned full-rank states stay exact. For incomparable
/// qubit supports a brute-force grid refines the start; in higher dimensions
/// with incomparable supports the achieved value is only an upper bound on
/// the fidelity.
inline MeasurementResult fuchs_caves_measurement(const DensityMatrix& rho,
                                                 const DensityMatrix& sigma,
                                                 std::optional<double> rank_tol = {},
                                                 const Tolerances& tol = {}) {
  detail::check_same_dim(rho, sigma);
  const std::size_t d = rho.dim();
  const ComplexMatrix id = ComplexMatrix::identity(d);

  const ComplexMatrix p_sigma = support_projector(sigma.mat(), rank_tol, tol);
  const ComplexMatrix leak_rho =
      ((id - p_sigma) * rho.mat() * (id - p_sigma)).hermitized();
  const bool rho_in_sigma = leak_rho.max_abs() <= tol.support_leak_tol;

  bool sigma_in_rho = false;
  if (!rho_in_sigma) {
    const ComplexMatrix p_rho = support_projector(rho.mat(), rank_tol, tol);
    const ComplexMatrix leak_sigma =
        ((id - p_rho) * sigma.mat() * (id - p_rho)).hermitized();
    sigma_in_rho = leak_sigma.max_abs() <= tol.support_leak_tol;
  }

  ComplexMatrix basis = (rho_in_sigma || !sigma_in_rho)
                            ? detail::fidelity_optimal_basis(
                                  sigma.mat(), rho.mat(), rank_tol, tol)
                            : detail::fidelity_optimal_basis(
                                  rho.mat(), sigma.mat(), rank_tol, tol);
  double achieved =
      detail::basis_classical_fidelity(rho.mat(), sigma.mat(), basis);

  const double f = fidelity(rho, sigma, tol);
  // Repair the basis only when the spectrum junk floor is a no-op for both
  // states. In that regime f is exact, the measured value of any basis sits
  // at or above it, and descent cannot undershoot. When the floor fires
  // (numerically pure or rank-deficient states), the floored fidelity and
  // the raw stored matrices disagree at the square-root-of-floored-mass
  // scale, and descending after f would chase a target it no longer
  // represents; those bases already measure above f because fidelity is
  // operator monotone, so flooring can only lower f.
  auto floor_clean = [&](const ComplexMatrix& m) {
    const std::vector<double> ev = eigh_values(m, tol);
    return ev.front() > 0.0 &&
           ev.back() >= tol.spectrum_junk_floor * ev.front();
  };
  if (achieved - f > 1e-9 && floor_clean(rho.mat()) &&
      floor_clean(sigma.mat())) {
    // Ill-conditioned base state: rebuild the basis chain at long double,
    // keep it when it measures better, then descend on whatever is left.
    ComplexMatrix refined =
        (rho_in_sigma || !sigma_in_rho)
            ? detail::refined_fidelity_basis(sigma.mat(), rho.mat(), rank_tol,
                                             tol)
            : detail::refined_fidelity_basis(rho.mat(), sigma.mat(), rank_tol,
                                             tol);
    const double refined_value =
        detail::basis_classical_fidelity(rho.mat(), sigma.mat(), refined);
    if (refined_value < achieved) {
      basis = std::move(refined);
      achieved = refined_value;
    }
    if (achieved - f > 1e-9) {
      detail::polish_fidelity_basis(rho.mat(), sigma.mat(), basis, f + 1e-10);
      achieved =
          detail::basis_classical_fidelity(rho.mat(), sigma.mat(), basis);
    }
  }

  if (!rho_in_sigma && !sigma_in_rho && d == 2) {
    // Incomparable qubit supports: adopt the brute-force grid optimum when
    // it beats the eigenbasis start. No descent here: incomparable supports
    // imply a junk-scale smallest eigenvalue, the regime excluded above.
    const PovmExtrema grid = brute_force_povm_extrema(rho, sigma, 200, tol);
    if (grid.min_fid < achieved) {
      ComplexMatrix refined(2);
      const double half = grid.min_fid_theta / 2.0;
      refined(0, 0) = cplx(std::cos(half), 0.0);
      refined(1, 0) = std::polar(std::sin(half), grid.min_fid_phi);
      refined(0, 1) = -std::polar(std::sin(half), -grid.min_fid_phi);
      refined(1, 1) = cplx(std::cos(half), 0.0);
      const double refined_value =
          detail::basis_classical_fidelity(rho.mat(), sigma.mat(), refined);
      if (refined_value < achieved) {
        basis = std::move(refined);
        achieved = refined_value;
      }
    }
  }

  std::vector<ComplexMatrix> elements;
  elements.reserve(d);
  std::vector<cplx> col(d);
  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t r = 0; r < d; ++r) col[r] = basis(r, k);
    elements.push_back(outer_product(col, col).hermitized());
  }
  return MeasurementResult{POVM(std::move(elements), tol), achieved};
}

}  // namespace qfid
