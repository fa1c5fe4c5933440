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
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qfid/complex_matrix.hpp"
#include "qfid/eigen.hpp"
#include "qfid/errors.hpp"
#include "qfid/rng.hpp"
#include "qfid/tolerances.hpp"

namespace qfid {

/// Finite probability distribution: nonnegative entries summing to one.
/// Entries in [-prob_clamp_tol, 0] are clamped to zero (rounding); anything
/// more negative raises InvalidProbability so logic bugs are not silently
/// absorbed.
class ProbDist {
 public:
  explicit ProbDist(std::vector<double> probs, const Tolerances& tol = {})
      : probs_(std::move(probs)) {
    if (probs_.empty()) {
      throw InvalidProbability("probability distribution must be nonempty");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < probs_.size(); ++i) {
      double& p = probs_[i];
      if (p < 0.0) {
        if (p < -tol.prob_clamp_tol) {
          std::ostringstream msg;
          msg << "probability entry " << i << " is " << p
              << ", below the clamp window -" << tol.prob_clamp_tol;
          throw InvalidProbability(msg.str());
        }
        p = 0.0;
      } else if (p > 1.0) {
        if (p > 1.0 + tol.prob_clamp_tol) {
          std::ostringstream msg;
          msg << "probability entry " << i << " is " << p << ", above 1";
          throw InvalidProbability(msg.str());
        }
        p = 1.0;
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > tol.dist_sum_tol) {
      std::ostringstream msg;
      msg << "probabilities sum to " << sum << ", not 1 within "
          << tol.dist_sum_tol;
      throw InvalidProbability(msg.str());
    }
  }

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  const std::vector<double>& probs() const { return probs_; }

 private:
  std::vector<double> probs_;
};

/// Hermitian, positive semi-definite, unit-trace operator. Validation happens
/// on construction; afterwards instances are immutable and safe to share.
class DensityMatrix {
 public:
  static DensityMatrix from_matrix(ComplexMatrix m, const Tolerances& tol = {}) {
    const double defect = m.hermiticity_defect();
    if (defect > tol.herm_tol) {
      std::ostringstream msg;
      msg << "density matrix is not Hermitian: defect " << defect
          << " exceeds herm_tol " << tol.herm_tol;
      throw NotHermitian(msg.str());
    }
    const double tr = m.trace().real();
    if (std::abs(tr - 1.0) > tol.trace_tol) {
      std::ostringstream msg;
      msg << "density matrix trace is " << tr << ", not 1 within "
          << tol.trace_tol;
      throw InvalidSpec(msg.str());
    }
    EigenDecomposition ed = eigh(m, tol);
    const double min_eig = ed.eigenvalues.back();
    if (min_eig < -tol.psd_tol) {
      std::ostringstream msg;
      msg << "density matrix is not positive semi-definite: min eigenvalue "
          << min_eig << " below -psd_tol " << -tol.psd_tol;
      throw NotPSD(msg.str());
    }
    return DensityMatrix(std::move(m));
  }

  const ComplexMatrix& mat() const { return mat_; }
  std::size_t dim() const { return mat_.dim(); }

  friend bool operator==(const DensityMatrix& a, const DensityMatrix& b) {
    return a.mat_ == b.mat_;
  }

 private:
  explicit DensityMatrix(ComplexMatrix m) : mat_(std::move(m)) {}
  ComplexMatrix mat_;
};

/// I/d.
inline DensityMatrix maximally_mixed(std::size_t dim,
                                     const Tolerances& tol = {}) {
  ComplexMatrix m = ComplexMatrix::identity(dim);
  m *= cplx(1.0 / static_cast<double>(dim), 0.0);
  return DensityMatrix::from_matrix(std::move(m), tol);
}

/// |psi><psi| from (unnormalized) amplitudes.
inline DensityMatrix pure_state(const std::vector<cplx>& amplitudes,
                                const Tolerances& tol = {}) {
  const double n = norm2(amplitudes);
  if (n == 0.0) {
    throw InvalidSpec("pure state amplitudes must not all vanish");
  }
  std::vector<cplx> v = amplitudes;
  for (auto& z : v) z /= n;
  return DensityMatrix::from_matrix(outer_product(v, v).hermitized(), tol);
}

/// Positive operator-valued measure: PSD elements resolving the identity.
class POVM {
 public:
  explicit POVM(std::vector<ComplexMatrix> elements, const Tolerances& tol = {})
      : elements_(std::move(elements)) {
    if (elements_.empty()) {
      throw InvalidSpec("POVM must have at least one element");
    }
    const std::size_t d = elements_[0].dim();
    ComplexMatrix sum(d);
    for (std::size_t j = 0; j < elements_.size(); ++j) {
      const ComplexMatrix& e = elements_[j];
      if (e.dim() != d) {
        throw DimensionMismatch("POVM elements have mixed dimensions");
      }
      EigenDecomposition ed = eigh(e, tol);
      if (ed.eigenvalues.back() < -tol.psd_tol) {
        std::ostringstream msg;
        msg << "POVM element " << j << " is not PSD: min eigenvalue "
            << ed.eigenvalues.back();
        throw NotPSD(msg.str());
      }
      sum += e;
    }
    const double defect = max_abs_diff(sum, ComplexMatrix::identity(d));
    if (defect > tol.povm_sum_tol) {
      std::ostringstream msg;
      msg << "POVM elements sum to identity only within " << defect
          << ", allowed " << tol.povm_sum_tol;
      throw InvalidSpec(msg.str());
    }
  }

  std::size_t size() const { return elements_.size(); }
  std::size_t dim() const { return elements_[0].dim(); }
  const ComplexMatrix& operator[](std::size_t j) const { return elements_[j]; }
  const std::vector<ComplexMatrix>& elements() const { return elements_; }

 private:
  std::vector<ComplexMatrix> elements_;
};

/// Born-rule outcome distribution p(j) = Tr(M_j rho).
inline ProbDist induced_distribution(const DensityMatrix& rho, const POVM& m,
                                     const Tolerances& tol = {}) {
  if (rho.dim() != m.dim()) {
    throw DimensionMismatch("state and POVM dimensions differ");
  }
  std::vector<double> p(m.size());
  for (std::size_t j = 0; j < m.size(); ++j) {
    cplx t = 0.0;
    for (std::size_t r = 0; r < rho.dim(); ++r)
      for (std::size_t c = 0; c < rho.dim(); ++c)
        t += m[j](r, c) * rho.mat()(c, r);
    p[j] = t.real();
  }
  return ProbDist(std::move(p), tol);
}

/// Rank-1 projective POVM from the columns of a unitary.
inline POVM projective_povm(const ComplexMatrix& basis,
                            const Tolerances& tol = {}) {
  const double defect =
      max_abs_diff(basis.adjoint() * basis, ComplexMatrix::identity(basis.dim()));
  if (defect > tol.unitary_tol) {
    std::ostringstream msg;
    msg << "basis is not unitary: ||U'U - I||_max = " << defect;
    throw NotUnitary(msg.str());
  }
  std::vector<ComplexMatrix> elements;
  elements.reserve(basis.dim());
  for (std::size_t j = 0; j < basis.dim(); ++j) {
    std::vector<cplx> col(basis.dim());
    for (std::size_t r = 0; r < basis.dim(); ++r) col[r] = basis(r, j);
    elements.push_back(outer_product(col, col).hermitized());
  }
  return POVM(std::move(elements), tol);
}

// ---------------------------------------------------------------------------
// Random ensembles
// ---------------------------------------------------------------------------

enum class EnsembleKind { pure_haar, hilbert_schmidt, bures, rank_deficient };

inline std::string_view ensemble_name(EnsembleKind kind) {
  switch (kind) {
    case EnsembleKind::pure_haar: return "pure_haar";
    case EnsembleKind::hilbert_schmidt: return "hilbert_schmidt";
    case EnsembleKind::bures: return "bures";
    case EnsembleKind::rank_deficient: return "rank_deficient";
  }
  return "unknown";
}

inline std::optional<EnsembleKind> ensemble_from_name(std::string_view name) {
  if (name == "pure_haar") return EnsembleKind::pure_haar;
  if (name == "hilbert_schmidt") return EnsembleKind::hilbert_schmidt;
  if (name == "bures") return EnsembleKind::bures;
  if (name == "rank_deficient") return EnsembleKind::rank_deficient;
  return std::nullopt;
}

/// Which random-state family to draw from, at which dimension, from which
/// seed. `rank` is only meaningful for rank_deficient.
struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::hilbert_schmidt;
  std::size_t dim = 2;
  std::uint64_t seed = 0;
  std::size_t rank = 1;
};

namespace detail {

inline std::vector<cplx> gaussian_vector(Rng& rng, std::size_t n) {
  std::vector<cplx> v(n);
  for (auto& z : v) {
    const double re = rng.gaussian();
    const double im = rng.gaussian();
    z = cplx(re, im);
  }
  return v;
}

/// d x d matrix of independent complex Gaussians.
inline ComplexMatrix ginibre(Rng& rng, std::size_t d) {
  ComplexMatrix g(d);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c) {
      const double re = rng.gaussian();
      const double im = rng.gaussian();
      g(r, c) = cplx(re, im);
    }
  return g;
}

/// G G' normalized to unit trace.
inline ComplexMatrix wishart_state(const ComplexMatrix& g) {
  ComplexMatrix w = (g * g.adjoint()).hermitized();
  const double tr = w.trace().real();
  w *= cplx(1.0 / tr, 0.0);
  return w;
}

}  // namespace detail

/// Haar-random unitary: Gram-Schmidt orthonormalization (two passes) of a
/// Ginibre matrix. The positive-diagonal QR convention makes the result
/// Haar-distributed.
inline ComplexMatrix haar_unitary(Rng& rng, std::size_t d) {
  ComplexMatrix g = detail::ginibre(rng, d);
  ComplexMatrix q(d);
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<cplx> v(d);
    for (std::size_t r = 0; r < d; ++r) v[r] = g(r, j);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = 0; i < j; ++i) {
        cplx overlap = 0.0;
        for (std::size_t r = 0; r < d; ++r) overlap += std::conj(q(r, i)) * v[r];
        for (std::size_t r = 0; r < d; ++r) v[r] -= overlap * q(r, i);
      }
    }
    const double n = norm2(v);
    for (std::size_t r = 0; r < d; ++r) q(r, j) = v[r] / n;
  }
  return q;
}

/// Draws the `index`-th state of the ensemble. Pure function of
/// (spec, index): the stream seed is derive_seed(spec.seed, kind, dim, rank,
/// index), so repeated calls are bit-for-bit identical and independent of
/// call order.
inline DensityMatrix sample_state(const EnsembleSpec& spec, std::uint64_t index,
                                  const Tolerances& tol = {}) {
  if (spec.dim == 0) {
    throw InvalidSpec("ensemble dimension must be positive");
  }
  if (spec.kind == EnsembleKind::rank_deficient &&
      (spec.rank < 1 || spec.rank > spec.dim)) {
    std::ostringstream msg;
    msg << "rank_deficient rank " << spec.rank << " outside [1, " << spec.dim
        << "]";
    throw InvalidSpec(msg.str());
  }

  Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(spec.kind),
                      spec.dim, spec.rank, index));
  const std::size_t d = spec.dim;

  switch (spec.kind) {
    case EnsembleKind::pure_haar: {
      std::vector<cplx> v = detail::gaussian_vector(rng, d);
      const double n = norm2(v);
      for (auto& z : v) z /= n;
      return DensityMatrix::from_matrix(outer_product(v, v).hermitized(), tol);
    }
    case EnsembleKind::hilbert_schmidt: {
      return DensityMatrix::from_matrix(
          detail::wishart_state(detail::ginibre(rng, d)), tol);
    }
    case EnsembleKind::bures: {
      ComplexMatrix u = haar_unitary(rng, d);
      ComplexMatrix a = (ComplexMatrix::identity(d) + u) * detail::ginibre(rng, d);
      return DensityMatrix::from_matrix(detail::wishart_state(a), tol);
    }
    case EnsembleKind::rank_deficient: {
      // Hilbert-Schmidt draw on the first `rank` coordinates, zero-padded.
      ComplexMatrix small =
          detail::wishart_state(detail::ginibre(rng, spec.rank));
      ComplexMatrix m(d);
      for (std::size_t r = 0; r < spec.rank; ++r)
        for (std::size_t c = 0; c < spec.rank; ++c) m(r, c) = small(r, c);
      return DensityMatrix::from_matrix(std::move(m), tol);
    }
  }
  throw InvalidSpec("unknown ensemble kind");
}

/// Uniform (flat Dirichlet) random distribution of length n.
inline ProbDist sample_prob_dist(Rng& rng, std::size_t n,
                                 const Tolerances& tol = {}) {
  std::vector<double> e(n);
  double sum = 0.0;
  for (auto& x : e) {
    x = -std::log(1.0 - rng.uniform());
    sum += x;
  }
  for (auto& x : e) x /= sum;
  return ProbDist(std::move(e), tol);
}

}  // namespace qfid
