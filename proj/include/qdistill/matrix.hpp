// Copyright (c) 2026 qdistill developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qdistill {

using Complex = std::complex<double>;

/// Dense square complex matrix, row-major. The workhorse for density
/// matrices, Kraus operators and process matrices; dimensions in this
/// library are 2 or 4 (16x16 is the contractual ceiling).
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  explicit ComplexMatrix(std::size_t dim) : dim_(dim), entries_(dim * dim) {}

  static ComplexMatrix zero(std::size_t dim) { return ComplexMatrix(dim); }

  static ComplexMatrix identity(std::size_t dim) {
    ComplexMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }

  static ComplexMatrix diagonal(const std::vector<Complex>& d) {
    ComplexMatrix m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  static ComplexMatrix from_rows(
      std::initializer_list<std::initializer_list<Complex>> rows) {
    ComplexMatrix m(rows.size());
    std::size_t i = 0;
    for (const auto& row : rows) {
      if (row.size() != m.dim_)
        throw std::invalid_argument("from_rows: ragged row in matrix literal");
      std::size_t j = 0;
      for (const auto& v : row) m(i, j++) = v;
      ++i;
    }
    return m;
  }

  std::size_t dim() const { return dim_; }

  Complex& operator()(std::size_t i, std::size_t j) {
    return entries_[i * dim_ + j];
  }
  const Complex& operator()(std::size_t i, std::size_t j) const {
    return entries_[i * dim_ + j];
  }

  const std::vector<Complex>& entries() const { return entries_; }

  ComplexMatrix& operator+=(const ComplexMatrix& o) {
    check_same_dim(o, "operator+=");
    for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k] += o.entries_[k];
    return *this;
  }
  ComplexMatrix& operator-=(const ComplexMatrix& o) {
    check_same_dim(o, "operator-=");
    for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k] -= o.entries_[k];
    return *this;
  }
  ComplexMatrix& operator*=(Complex s) {
    for (auto& e : entries_) e *= s;
    return *this;
  }

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) {
    return a += b;
  }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) {
    return a -= b;
  }
  friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
  friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }

  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    a.check_same_dim(b, "operator*");
    const std::size_t n = a.dim_;
    ComplexMatrix c(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) {
        const Complex aik = a(i, k);
        if (aik == Complex{}) continue;
        for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  ComplexMatrix adjoint() const {
    ComplexMatrix m(dim_);
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j) m(j, i) = std::conj((*this)(i, j));
    return m;
  }

  ComplexMatrix conjugate() const {
    ComplexMatrix m(dim_);
    for (std::size_t k = 0; k < entries_.size(); ++k)
      m.entries_[k] = std::conj(entries_[k]);
    return m;
  }

  Complex trace() const {
    Complex t{};
    for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (const auto& e : entries_) s += std::norm(e);
    return std::sqrt(s);
  }

  /// max_ij |M[i][j] - conj(M[j][i])|, the Hermiticity diagnostic.
  double max_asymmetry() const {
    double m = 0.0;
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = i; j < dim_; ++j)
        m = std::max(m, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
    return m;
  }

  bool is_hermitian(double tol = 1e-10) const { return max_asymmetry() <= tol; }

  /// (M + M^dagger)/2; after this the matrix is Hermitian exactly.
  ComplexMatrix hermitized() const {
    ComplexMatrix m(dim_);
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j)
        m(i, j) = 0.5 * ((*this)(i, j) + std::conj((*this)(j, i)));
    return m;
  }

 private:
  void check_same_dim(const ComplexMatrix& o, const char* op) const {
    if (dim_ != o.dim_) {
      std::ostringstream ss;
      ss << op << ": dimension mismatch (" << dim_ << " vs " << o.dim_ << ")";
      throw std::invalid_argument(ss.str());
    }
  }

  std::size_t dim_ = 0;
  std::vector<Complex> entries_;
};

inline double frobenius_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a - b).frobenius_norm();
}

/// Kronecker product: (A kron B)[i*dB+k][j*dB+l] = A[i][j] * B[k][l].
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const std::size_t da = a.dim(), db = b.dim();
  ComplexMatrix c(da * db);
  for (std::size_t i = 0; i < da; ++i)
    for (std::size_t j = 0; j < da; ++j) {
      const Complex aij = a(i, j);
      if (aij == Complex{}) continue;
      for (std::size_t k = 0; k < db; ++k)
        for (std::size_t l = 0; l < db; ++l)
          c(i * db + k, j * db + l) = aij * b(k, l);
    }
  return c;
}

struct EigenSystem {
  std::vector<double> values;  // descending
  ComplexMatrix vectors;       // columns match values
};

/// Hermitian eigendecomposition by cyclic Jacobi rotations.
///
/// Matrices here are at most 16x16 (in practice 2x2 and 4x4), so a fixed
/// deterministic sweep order converges in a handful of sweeps and gives the
/// same result on every platform. Convergence: off-diagonal Frobenius mass
/// below 1e-14 (relative to the matrix scale).
inline EigenSystem herm_eig(const ComplexMatrix& m_in, double herm_tol = 1e-10) {
  const double asym = m_in.max_asymmetry();
  if (asym > herm_tol) {
    std::ostringstream ss;
    ss << "herm_eig: matrix is not Hermitian (max asymmetry " << asym << ")";
    throw std::invalid_argument(ss.str());
  }

  const std::size_t n = m_in.dim();
  ComplexMatrix a = m_in.hermitized();
  ComplexMatrix v = ComplexMatrix::identity(n);

  const double scale = std::max(1.0, a.frobenius_norm());
  const double tol = 1e-14 * scale;

  auto off_mass = [&]() {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * std::norm(a(i, j));
    return std::sqrt(s);
  };

  for (int sweep = 0; sweep < 100 && off_mass() > tol; ++sweep) {
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex beta = a(p, q);
        const double ab = std::abs(beta);
        if (ab <= tol / (10.0 * static_cast<double>(n))) continue;

        // Phase away the complex part, then a real 2x2 Jacobi rotation.
        const Complex phase = std::conj(beta) / ab;  // a(p,q)*phase = |beta|
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double theta = (aqq - app) / (2.0 * ab);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(1.0 + theta * theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        // Unitary on the (p,q) plane: V = diag(1, phase) * [[c, s], [-s, c]],
        // so column p -> c*col_p - s*phase*col_q and column q ->
        // s*col_p + c*phase*col_q; rows pick up the conjugate.
        const Complex cq = std::conj(phase);
        for (std::size_t k = 0; k < n; ++k) {
          const Complex akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * phase * akq;
          a(k, q) = s * akp + c * phase * akq;
          const Complex vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * phase * vkq;
          v(k, q) = s * vkp + c * phase * vkq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const Complex apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * cq * aqk;
          a(q, k) = s * apk + c * cq * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = Complex(a(p, p).real(), 0.0);
        a(q, q) = Complex(a(q, q).real(), 0.0);
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return a(i, i).real() > a(j, j).real();
  });

  EigenSystem es;
  es.values.resize(n);
  es.vectors = ComplexMatrix(n);
  for (std::size_t col = 0; col < n; ++col) {
    es.values[col] = a(order[col], order[col]).real();
    for (std::size_t row = 0; row < n; ++row)
      es.vectors(row, col) = v(row, order[col]);
  }
  return es;
}

/// Principal square root of a Hermitian PSD matrix. Eigenvalues in
/// [-1e-9, 0) are clipped to zero; anything more negative is rejected.
/// The square root turns eigenvalue noise delta into sqrt(delta), so
/// values within 1e-14 of the leading one are also flushed to zero.
inline ComplexMatrix psd_sqrt(const ComplexMatrix& m, double neg_tol = 1e-9) {
  EigenSystem es = herm_eig(m);
  const double floor =
      es.values.empty() ? 0.0 : 1e-14 * std::max(es.values.front(), 0.0);
  for (double& w : es.values) {
    if (w < -neg_tol) {
      std::ostringstream ss;
      ss << "psd_sqrt: matrix is not PSD (eigenvalue " << w << ")";
      throw std::invalid_argument(ss.str());
    }
    w = w < floor ? 0.0 : w;
  }
  const std::size_t n = m.dim();
  ComplexMatrix r(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Complex s{};
      for (std::size_t k = 0; k < n; ++k)
        s += es.vectors(i, k) * std::sqrt(es.values[k]) *
             std::conj(es.vectors(j, k));
      r(i, j) = s;
    }
  return r.hermitized();
}

/// Solves A x = b by Gaussian elimination with partial pivoting.
/// Intended for the small tomography systems (up to 16x16).
inline std::vector<Complex> solve_linear(ComplexMatrix a, std::vector<Complex> b) {
  const std::size_t n = a.dim();
  if (b.size() != n)
    throw std::invalid_argument("solve_linear: rhs length does not match matrix");
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    double best = std::abs(a(col, col));
    for (std::size_t r = col + 1; r < n; ++r) {
      const double v = std::abs(a(r, col));
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best < 1e-13)
      throw std::invalid_argument("solve_linear: singular system");
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(col, j), a(piv, j));
      std::swap(b[col], b[piv]);
    }
    const Complex d = a(col, col);
    for (std::size_t r = col + 1; r < n; ++r) {
      const Complex f = a(r, col) / d;
      if (f == Complex{}) continue;
      for (std::size_t j = col; j < n; ++j) a(r, j) -= f * a(col, j);
      b[r] -= f * b[col];
    }
  }
  std::vector<Complex> x(n);
  for (std::size_t i = n; i-- > 0;) {
    Complex s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
    x[i] = s / a(i, i);
  }
  return x;
}

}  // namespace qdistill
