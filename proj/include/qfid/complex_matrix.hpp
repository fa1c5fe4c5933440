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
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace qfid {

using cplx = std::complex<double>;

/// Dense d x d complex matrix, row-major, value semantics. The substrate for
/// every operator in the library; semantic refinements (density matrices,
/// POVM elements, projectors) wrap or validate instances of this type.
class ComplexMatrix {
 public:
  explicit ComplexMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {
    if (dim == 0) {
      throw std::invalid_argument("matrix dimension must be positive");
    }
  }

  ComplexMatrix(std::size_t dim, std::vector<cplx> entries)
      : dim_(dim), data_(std::move(entries)) {
    if (dim == 0) {
      throw std::invalid_argument("matrix dimension must be positive");
    }
    if (data_.size() != dim * dim) {
      throw std::invalid_argument("entry count does not match dim*dim");
    }
  }

  /// Row-major brace construction: {{a, b}, {c, d}}.
  ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows)
      : dim_(rows.size()) {
    if (dim_ == 0) {
      throw std::invalid_argument("matrix dimension must be positive");
    }
    data_.reserve(dim_ * dim_);
    for (const auto& row : rows) {
      if (row.size() != dim_) {
        throw std::invalid_argument("rows must all have length dim");
      }
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  static ComplexMatrix zero(std::size_t dim) { return ComplexMatrix(dim); }

  static ComplexMatrix identity(std::size_t dim) {
    ComplexMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t dim() const { return dim_; }

  cplx& operator()(std::size_t r, std::size_t c) { return data_[r * dim_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const {
    return data_[r * dim_ + c];
  }

  const std::vector<cplx>& data() const { return data_; }

  ComplexMatrix adjoint() const {
    ComplexMatrix out(dim_);
    for (std::size_t r = 0; r < dim_; ++r)
      for (std::size_t c = 0; c < dim_; ++c)
        out(c, r) = std::conj((*this)(r, c));
    return out;
  }

  /// Exact Hermitian part (A + A')/2.
  ComplexMatrix hermitized() const {
    ComplexMatrix out(dim_);
    for (std::size_t r = 0; r < dim_; ++r) {
      out(r, r) = cplx((*this)(r, r).real(), 0.0);
      for (std::size_t c = r + 1; c < dim_; ++c) {
        cplx avg = 0.5 * ((*this)(r, c) + std::conj((*this)(c, r)));
        out(r, c) = avg;
        out(c, r) = std::conj(avg);
      }
    }
    return out;
  }

  cplx trace() const {
    cplx t = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
  }

  /// max_{jk} |A[j][k]|
  double max_abs() const {
    double m = 0.0;
    for (const auto& v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (const auto& v : data_) s += std::norm(v);
    return std::sqrt(s);
  }

  /// max_{jk} |A[j][k] - conj(A[k][j])|
  double hermiticity_defect() const {
    double m = 0.0;
    for (std::size_t r = 0; r < dim_; ++r)
      for (std::size_t c = r; c < dim_; ++c)
        m = std::max(m, std::abs((*this)(r, c) - std::conj((*this)(c, r))));
    return m;
  }

  bool is_hermitian(double tol) const { return hermiticity_defect() <= tol; }

  ComplexMatrix& operator+=(const ComplexMatrix& other) {
    check_same_dim(other);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
  }

  ComplexMatrix& operator-=(const ComplexMatrix& other) {
    check_same_dim(other);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
  }

  ComplexMatrix& operator*=(cplx scalar) {
    for (auto& v : data_) v *= scalar;
    return *this;
  }

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) {
    a += b;
    return a;
  }

  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) {
    a -= b;
    return a;
  }

  friend ComplexMatrix operator*(cplx s, ComplexMatrix a) {
    a *= s;
    return a;
  }

  friend ComplexMatrix operator*(ComplexMatrix a, cplx s) {
    a *= s;
    return a;
  }

  friend ComplexMatrix operator*(const ComplexMatrix& a,
                                 const ComplexMatrix& b) {
    a.check_same_dim(b);
    const std::size_t d = a.dim_;
    ComplexMatrix out(d);
    for (std::size_t r = 0; r < d; ++r) {
      for (std::size_t k = 0; k < d; ++k) {
        const cplx ark = a(r, k);
        if (ark == cplx{}) continue;
        for (std::size_t c = 0; c < d; ++c) out(r, c) += ark * b(k, c);
      }
    }
    return out;
  }

  friend bool operator==(const ComplexMatrix& a, const ComplexMatrix& b) {
    return a.dim_ == b.dim_ && a.data_ == b.data_;
  }

 private:
  void check_same_dim(const ComplexMatrix& other) const {
    if (dim_ != other.dim_) {
      throw std::invalid_argument("matrix dimensions differ");
    }
  }

  std::size_t dim_;
  std::vector<cplx> data_;
};

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("matrix dimensions differ");
  }
  double m = 0.0;
  for (std::size_t r = 0; r < a.dim(); ++r)
    for (std::size_t c = 0; c < a.dim(); ++c)
      m = std::max(m, std::abs(a(r, c) - b(r, c)));
  return m;
}

/// |v><w| for column vectors v, w of equal length.
inline ComplexMatrix outer_product(const std::vector<cplx>& v,
                                   const std::vector<cplx>& w) {
  if (v.size() != w.size() || v.empty()) {
    throw std::invalid_argument("outer product needs equal nonzero lengths");
  }
  ComplexMatrix out(v.size());
  for (std::size_t r = 0; r < v.size(); ++r)
    for (std::size_t c = 0; c < w.size(); ++c)
      out(r, c) = v[r] * std::conj(w[c]);
  return out;
}

/// <v| M |v>, real part (exact for Hermitian M).
inline double quadratic_form(const ComplexMatrix& m,
                             const std::vector<cplx>& v) {
  if (v.size() != m.dim()) {
    throw std::invalid_argument("vector length does not match matrix dim");
  }
  cplx acc = 0.0;
  for (std::size_t r = 0; r < v.size(); ++r) {
    cplx row = 0.0;
    for (std::size_t c = 0; c < v.size(); ++c) row += m(r, c) * v[c];
    acc += std::conj(v[r]) * row;
  }
  return acc.real();
}

inline double norm2(const std::vector<cplx>& v) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return std::sqrt(s);
}

}  // namespace qfid
