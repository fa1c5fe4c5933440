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
#include <functional>
#include <numeric>
#include <optional>
#include <sstream>
#include <vector>

#include "qfid/complex_matrix.hpp"
#include "qfid/errors.hpp"
#include "qfid/tolerances.hpp"

namespace qfid {

/// Result of diagonalizing a Hermitian matrix: A = V diag(lambda) V' with
/// eigenvalues sorted descending and eigenvectors in the matching columns.
struct EigenDecomposition {
  std::vector<double> eigenvalues;
  ComplexMatrix eigenvectors;

  std::size_t dim() const { return eigenvectors.dim(); }

  /// V diag(f(lambda)) V' for a scalar map f.
  ComplexMatrix apply(const std::function<double(double)>& f) const {
    const std::size_t d = dim();
    ComplexMatrix out(d);
    for (std::size_t k = 0; k < d; ++k) {
      const double fk = f(eigenvalues[k]);
      if (fk == 0.0) continue;
      for (std::size_t r = 0; r < d; ++r) {
        const cplx vrk = fk * eigenvectors(r, k);
        for (std::size_t c = 0; c < d; ++c) {
          out(r, c) += vrk * std::conj(eigenvectors(c, k));
        }
      }
    }
    return out.hermitized();
  }
};

namespace detail {

inline double off_diagonal_norm(const ComplexMatrix& m) {
  double s = 0.0;
  for (std::size_t r = 0; r < m.dim(); ++r)
    for (std::size_t c = 0; c < m.dim(); ++c)
      if (r != c) s += std::norm(m(r, c));
  return std::sqrt(s);
}

// One cyclic Jacobi sweep. Each pivot (p,q) applies the plane unitary
//   U = diag(1, conj(phase)) * [[c, s], [-s, c]],   phase = A[p][q]/|A[p][q]|,
// which first rotates the off-diagonal entry onto the real axis and then
// annihilates it with a classical 2x2 rotation. The tangent t is the
// smaller-magnitude root of t^2 - 2*tau*t - 1 = 0, tau = (App - Aqq)/(2|Apq|),
// keeping rotation angles <= 45 degrees.
inline void jacobi_sweep(ComplexMatrix& a, ComplexMatrix* v,
                         double skip_threshold) {
  const std::size_t d = a.dim();
  for (std::size_t p = 0; p + 1 < d; ++p) {
    for (std::size_t q = p + 1; q < d; ++q) {
      const cplx apq = a(p, q);
      const double mag = std::abs(apq);
      if (mag <= skip_threshold) continue;

      const cplx phase = apq / mag;
      const double tau = (a(p, p).real() - a(q, q).real()) / (2.0 * mag);
      const double sign = tau >= 0.0 ? 1.0 : -1.0;
      const double t = -sign / (std::abs(tau) + std::hypot(1.0, tau));
      const double c = 1.0 / std::sqrt(1.0 + t * t);
      const double s = t * c;
      const cplx sq = s * std::conj(phase);  // lower-left factor of U

      // A <- A U (columns p, q).
      for (std::size_t r = 0; r < d; ++r) {
        const cplx arp = a(r, p);
        const cplx arq = a(r, q);
        a(r, p) = c * arp - sq * arq;
        a(r, q) = s * arp + c * std::conj(phase) * arq;
      }
      // A <- U' A (rows p, q).
      for (std::size_t r = 0; r < d; ++r) {
        const cplx apr = a(p, r);
        const cplx aqr = a(q, r);
        a(p, r) = c * apr - s * phase * aqr;
        a(q, r) = s * apr + c * phase * aqr;
      }
      // Restore exact Hermitian structure of the worked entries.
      a(p, p) = cplx(a(p, p).real(), 0.0);
      a(q, q) = cplx(a(q, q).real(), 0.0);
      a(p, q) = 0.0;
      a(q, p) = 0.0;

      if (v == nullptr) continue;
      // V <- V U.
      for (std::size_t r = 0; r < d; ++r) {
        const cplx vrp = (*v)(r, p);
        const cplx vrq = (*v)(r, q);
        (*v)(r, p) = c * vrp - sq * vrq;
        (*v)(r, q) = s * vrp + c * std::conj(phase) * vrq;
      }
    }
  }
}

/// Shared driver: diagonalizes `work` in place, optionally accumulating the
/// eigenvector matrix. Returns the unsorted diagonal.
inline std::vector<double> jacobi_eigenvalues(ComplexMatrix& work,
                                              ComplexMatrix* vecs,
                                              const Tolerances& tol) {
  const std::size_t d = work.dim();
  const double off_threshold = tol.jacobi_off_factor * work.frobenius_norm();
  // Entries below this are left alone; a full sweep of skips still implies
  // off(A) < off_threshold, so the loop below terminates.
  const double skip_threshold = off_threshold / (2.0 * static_cast<double>(d));

  int sweeps = 0;
  while (off_diagonal_norm(work) > off_threshold) {
    if (sweeps++ >= tol.jacobi_sweep_budget) {
      std::ostringstream msg;
      msg << "Jacobi eigensolver did not converge within "
          << tol.jacobi_sweep_budget << " sweeps (dim " << d << ")";
      throw NoConvergence(msg.str());
    }
    jacobi_sweep(work, vecs, skip_threshold);
  }

  std::vector<double> evals(d);
  for (std::size_t i = 0; i < d; ++i) evals[i] = work(i, i).real();
  return evals;
}

inline void require_hermitian(const ComplexMatrix& a, const Tolerances& tol) {
  const double defect = a.hermiticity_defect();
  if (defect > tol.herm_tol) {
    std::ostringstream msg;
    msg << "matrix is not Hermitian: defect " << defect << " exceeds herm_tol "
        << tol.herm_tol;
    throw NotHermitian(msg.str());
  }
}

}  // namespace detail

/// Diagonalizes a Hermitian matrix by cyclic complex Jacobi rotations.
/// Throws NotHermitian when the input defect exceeds herm_tol and
/// NoConvergence when the sweep budget is exhausted.
inline EigenDecomposition eigh(const ComplexMatrix& a,
                               const Tolerances& tol = {}) {
  detail::require_hermitian(a, tol);
  const std::size_t d = a.dim();
  ComplexMatrix work = a.hermitized();
  ComplexMatrix vecs = ComplexMatrix::identity(d);
  const std::vector<double> evals = detail::jacobi_eigenvalues(work, &vecs, tol);

  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) {
                     return evals[x] > evals[y];
                   });

  EigenDecomposition out{std::vector<double>(d), ComplexMatrix(d)};
  for (std::size_t k = 0; k < d; ++k) {
    out.eigenvalues[k] = evals[order[k]];
    for (std::size_t r = 0; r < d; ++r) {
      out.eigenvectors(r, k) = vecs(r, order[k]);
    }
  }
  return out;
}

/// Eigenvalues only, sorted descending. Same rotations as eigh without the
/// cost of accumulating eigenvectors.
inline std::vector<double> eigh_values(const ComplexMatrix& a,
                                       const Tolerances& tol = {}) {
  detail::require_hermitian(a, tol);
  ComplexMatrix work = a.hermitized();
  std::vector<double> evals = detail::jacobi_eigenvalues(work, nullptr, tol);
  std::stable_sort(evals.begin(), evals.end(), std::greater<double>());
  return evals;
}

namespace detail {

inline void require_psd(const EigenDecomposition& ed, const Tolerances& tol,
                        const char* op) {
  const double min_eig = ed.eigenvalues.empty() ? 0.0 : ed.eigenvalues.back();
  if (min_eig < -tol.psd_tol) {
    std::ostringstream msg;
    msg << op << ": matrix is not positive semi-definite (min eigenvalue "
        << min_eig << " below -psd_tol " << -tol.psd_tol << ")";
    throw NotPSD(msg.str());
  }
}

}  // namespace detail

/// Principal square root of a PSD matrix. Eigenvalues in [-psd_tol, 0] are
/// clamped to 0 first, and eigenvalues below spectrum_junk_floor * lambda_max
/// count as zeros so the square root cannot amplify solver noise.
inline ComplexMatrix matrix_sqrt(const ComplexMatrix& a,
                                 const Tolerances& tol = {}) {
  EigenDecomposition ed = eigh(a, tol);
  detail::require_psd(ed, tol, "matrix_sqrt");
  const double lambda_max = std::max(ed.eigenvalues.front(), 0.0);
  const double floor = tol.spectrum_junk_floor * lambda_max;
  return ed.apply(
      [floor](double x) { return x > floor ? std::sqrt(x) : 0.0; });
}

/// Orthogonal projector onto the span of eigenvectors with eigenvalue above
/// rank_tol * lambda_max. Returns the zero matrix when lambda_max <= rank_tol.
inline ComplexMatrix support_projector(const ComplexMatrix& a,
                                       std::optional<double> rank_tol = {},
                                       const Tolerances& tol = {}) {
  const double rt = rank_tol.value_or(tol.rank_tol);
  EigenDecomposition ed = eigh(a, tol);
  detail::require_psd(ed, tol, "support_projector");
  const double lambda_max = std::max(ed.eigenvalues.front(), 0.0);
  if (lambda_max <= rt) return ComplexMatrix::zero(a.dim());
  const double cutoff = rt * lambda_max;
  return ed.apply([cutoff](double x) { return x > cutoff ? 1.0 : 0.0; });
}

/// Square root of the Moore-Penrose pseudo-inverse: eigenvalues above the
/// rank threshold map to 1/sqrt(lambda), the rest to 0. Satisfies
/// B A B = support_projector(A).
inline ComplexMatrix pseudo_inv_sqrt(const ComplexMatrix& a,
                                     std::optional<double> rank_tol = {},
                                     const Tolerances& tol = {}) {
  const double rt = rank_tol.value_or(tol.rank_tol);
  EigenDecomposition ed = eigh(a, tol);
  detail::require_psd(ed, tol, "pseudo_inv_sqrt");
  const double lambda_max = std::max(ed.eigenvalues.front(), 0.0);
  if (lambda_max <= rt) return ComplexMatrix::zero(a.dim());
  const double cutoff = rt * lambda_max;
  return ed.apply(
      [cutoff](double x) { return x > cutoff ? 1.0 / std::sqrt(x) : 0.0; });
}

}  // namespace qfid
