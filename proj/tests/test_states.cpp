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

#include <cmath>

#include "test_helpers.hpp"

using namespace qfid;
using Catch::Matchers::WithinAbs;

TEST_CASE("ProbDist validates and clamps at the documented window") {
  const ProbDist p(std::vector<double>{0.25, 0.75});
  CHECK(p.size() == 2);
  CHECK(p[1] == 0.75);

  // Entries in [-prob_clamp_tol, 0] clamp to zero.
  const ProbDist clamped(std::vector<double>{1.0, -1e-13});
  CHECK(clamped[1] == 0.0);

  CHECK_THROWS_AS(ProbDist(std::vector<double>{}), InvalidProbability);
  CHECK_THROWS_AS(ProbDist(std::vector<double>{1.0, -1e-9}),
                  InvalidProbability);
  CHECK_THROWS_AS(ProbDist(std::vector<double>{0.7, 0.7}), InvalidProbability);
}

TEST_CASE("DensityMatrix::from_matrix enforces the state invariants") {
  CHECK_NOTHROW(DensityMatrix::from_matrix(
      ComplexMatrix{{cplx(0.5, 0.0), cplx(0.0, 0.2)},
                    {cplx(0.0, -0.2), cplx(0.5, 0.0)}}));

  // Non-Hermitian.
  CHECK_THROWS_AS(DensityMatrix::from_matrix(ComplexMatrix{
                      {cplx(0.5, 0.0), cplx(0.3, 0.0)},
                      {cplx(0.0, 0.0), cplx(0.5, 0.0)}}),
                  NotHermitian);
  // Wrong trace.
  CHECK_THROWS_AS(DensityMatrix::from_matrix(ComplexMatrix{
                      {cplx(0.7, 0.0), cplx(0.0, 0.0)},
                      {cplx(0.0, 0.0), cplx(0.7, 0.0)}}),
                  InvalidSpec);
  // Not PSD (eigenvalues 1.2, -0.2).
  CHECK_THROWS_AS(DensityMatrix::from_matrix(ComplexMatrix{
                      {cplx(1.2, 0.0), cplx(0.0, 0.0)},
                      {cplx(0.0, 0.0), cplx(-0.2, 0.0)}}),
                  NotPSD);
}

TEST_CASE("pure_state normalizes amplitudes and builds a projector") {
  const DensityMatrix plus = qfid_test::ket_plus();
  CHECK_THAT(plus.mat()(0, 0).real(), WithinAbs(0.5, 1e-15));
  CHECK_THAT(plus.mat()(0, 1).real(), WithinAbs(0.5, 1e-15));
  // Projector: rho^2 == rho.
  CHECK(max_abs_diff(plus.mat() * plus.mat(), plus.mat()) < 1e-15);

  CHECK_THROWS_AS(pure_state({cplx(0.0, 0.0), cplx(0.0, 0.0)}), InvalidSpec);
}

TEST_CASE("maximally_mixed is I/d") {
  const DensityMatrix m = maximally_mixed(4);
  CHECK_THAT(m.mat()(2, 2).real(), WithinAbs(0.25, 1e-15));
  CHECK(m.mat()(0, 1) == cplx(0.0, 0.0));
}

TEST_CASE("POVM validates PSD elements resolving the identity") {
  const DensityMatrix plus = qfid_test::ket_plus();
  std::vector<ComplexMatrix> good = {
      plus.mat(), ComplexMatrix::identity(2) - plus.mat()};
  CHECK_NOTHROW(POVM(std::move(good)));

  std::vector<ComplexMatrix> not_identity = {plus.mat(), plus.mat()};
  CHECK_THROWS_AS(POVM(std::move(not_identity)), InvalidSpec);

  std::vector<ComplexMatrix> not_psd = {
      cplx(2.0, 0.0) * ComplexMatrix::identity(2),
      cplx(-1.0, 0.0) * ComplexMatrix::identity(2)};
  CHECK_THROWS_AS(POVM(std::move(not_psd)), NotPSD);

  std::vector<ComplexMatrix> mixed_dims = {ComplexMatrix::identity(2),
                                           ComplexMatrix::identity(3)};
  CHECK_THROWS_AS(POVM(std::move(mixed_dims)), DimensionMismatch);

  CHECK_THROWS_AS(POVM(std::vector<ComplexMatrix>{}), InvalidSpec);
}

TEST_CASE("induced_distribution applies the Born rule") {
  // Measuring |0> in the computational basis is deterministic.
  const POVM basis = projective_povm(ComplexMatrix::identity(2));
  const ProbDist p = induced_distribution(qfid_test::ket_zero(), basis);
  CHECK_THAT(p[0], WithinAbs(1.0, 1e-15));
  CHECK_THAT(p[1], WithinAbs(0.0, 1e-15));

  // |+> measured in the computational basis is a coin flip.
  const ProbDist q = induced_distribution(qfid_test::ket_plus(), basis);
  CHECK_THAT(q[0], WithinAbs(0.5, 1e-15));

  CHECK_THROWS_AS(induced_distribution(maximally_mixed(3), basis),
                  DimensionMismatch);
}

TEST_CASE("projective_povm requires a unitary basis") {
  ComplexMatrix shrunk = ComplexMatrix::identity(2);
  shrunk *= cplx(0.5, 0.0);
  CHECK_THROWS_AS(projective_povm(shrunk), NotUnitary);
}

TEST_CASE("haar_unitary emits unitary matrices") {
  Rng rng(3);
  for (std::size_t d : {2, 3, 6}) {
    const ComplexMatrix u = haar_unitary(rng, d);
    CHECK(max_abs_diff(u.adjoint() * u, ComplexMatrix::identity(d)) < 1e-12);
    CHECK(max_abs_diff(u * u.adjoint(), ComplexMatrix::identity(d)) < 1e-12);
  }
}

TEST_CASE("sample_state covers every ensemble with valid states") {
  for (EnsembleKind kind :
       {EnsembleKind::pure_haar, EnsembleKind::hilbert_schmidt,
        EnsembleKind::bures, EnsembleKind::rank_deficient}) {
    for (std::size_t d : {2, 3, 5}) {
      const std::size_t rank = kind == EnsembleKind::rank_deficient
                                   ? (d + 1) / 2
                                   : std::size_t{1};
      // Construction already validates Hermiticity, trace, and PSD.
      const DensityMatrix rho = qfid_test::random_state(kind, d, 0, rank);
      CHECK(rho.dim() == d);
    }
  }
}

TEST_CASE("sample_state draws are deterministic and order-free") {
  const EnsembleSpec spec{EnsembleKind::bures, 3, 99, 1};
  const DensityMatrix a_then = sample_state(spec, 5);
  const DensityMatrix b = sample_state(spec, 6);
  const DensityMatrix a_again = sample_state(spec, 5);
  CHECK(a_then == a_again);
  CHECK(max_abs_diff(a_then.mat(), b.mat()) > 1e-3);

  // Different seeds and different kinds give different streams.
  const EnsembleSpec other_seed{EnsembleKind::bures, 3, 100, 1};
  CHECK(max_abs_diff(sample_state(other_seed, 5).mat(), a_then.mat()) > 1e-3);
}

TEST_CASE("pure_haar states are rank-1 projectors") {
  for (std::uint64_t i = 0; i < 5; ++i) {
    const DensityMatrix psi =
        qfid_test::random_state(EnsembleKind::pure_haar, 4, i);
    CHECK(max_abs_diff(psi.mat() * psi.mat(), psi.mat()) < 1e-12);
  }
}

TEST_CASE("rank_deficient states have the requested rank") {
  const DensityMatrix rho =
      qfid_test::random_state(EnsembleKind::rank_deficient, 6, 1, 3);
  const std::vector<double> evals = eigh_values(rho.mat());
  // Three live eigenvalues, three zeros.
  CHECK(evals[2] > 1e-6);
  CHECK(std::abs(evals[3]) < 1e-12);

  EnsembleSpec bad{EnsembleKind::rank_deficient, 4, 0, 9};
  CHECK_THROWS_AS(sample_state(bad, 0), InvalidSpec);
}

TEST_CASE("sample_prob_dist draws normalized distributions") {
  Rng rng(17);
  for (std::size_t n : {2, 7, 64}) {
    const ProbDist p = sample_prob_dist(rng, n);
    CHECK(p.size() == n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(p[i] >= 0.0);
      sum += p[i];
    }
    CHECK_THAT(sum, WithinAbs(1.0, 1e-12));
  }
}

TEST_CASE("ensemble names round-trip") {
  for (EnsembleKind kind :
       {EnsembleKind::pure_haar, EnsembleKind::hilbert_schmidt,
        EnsembleKind::bures, EnsembleKind::rank_deficient}) {
    CHECK(ensemble_from_name(ensemble_name(kind)) == kind);
  }
  CHECK_FALSE(ensemble_from_name("negative_temperature").has_value());
}

TEST_CASE("derive_seed separates labeled streams") {
  CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 2));
  CHECK(derive_seed(1, 2) != derive_seed(2, 2));
  // Uniform stays inside [0, 1).
  Rng rng(123);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}
