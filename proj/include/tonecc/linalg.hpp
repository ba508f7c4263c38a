// Copyright 2026 The tonecc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "tonecc/error.hpp"

namespace tonecc::linalg {

/// Small dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  const std::vector<double>& data() const noexcept { return data_; }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "matrix product shape mismatch");
  }
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

/// A * A^t, exploiting symmetry.
inline Matrix gram_rows(const Matrix& a) {
  Matrix g(a.rows(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto ri = a.row(i);
    for (std::size_t j = i; j < a.rows(); ++j) {
      const auto rj = a.row(j);
      const double v = std::inner_product(ri.begin(), ri.end(), rj.begin(), 0.0);
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return g;
}

struct SymmetricEigen {
  std::vector<double> values;  // descending
  Matrix vectors;              // column k pairs with values[k]
  int sweeps = 0;
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Iterates until
/// the off-diagonal Frobenius norm is at most `tolerance` times the
/// Frobenius norm of the input. Eigenpairs come back sorted by descending
/// eigenvalue (stable on ties).
inline SymmetricEigen jacobi_eigen(Matrix a, double tolerance = 1e-12,
                                   int max_sweeps = 100) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw Error(ErrorCode::kDimensionMismatch, "matrix not square");
  Matrix v = Matrix::identity(n);

  double total = 0.0;
  for (double x : a.data()) total += x * x;
  const double target = tolerance * std::sqrt(total);

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    if (off_norm() <= target) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        // Skip rotations that can no longer change the diagonal.
        if (std::abs(apq) < 1e-18 * (std::abs(app) + std::abs(aqq)) ) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

  SymmetricEigen out;
  out.sweeps = sweep;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

namespace detail {

// Replaces a (n x l, l > n) by an n x n lower-triangular b with
// b b^t == a a^t, using Householder reflections applied from the right.
inline Matrix shrink_columns(const Matrix& a) {
  const std::size_t n = a.rows(), l = a.cols();
  Matrix w = a;
  std::vector<double> v(l);
  for (std::size_t j = 0; j < n; ++j) {
    auto rj = w.row(j);
    double norm = 0.0;
    for (std::size_t k = j; k < l; ++k) norm += rj[k] * rj[k];
    norm = std::sqrt(norm);
    if (norm == 0.0) continue;
    const double alpha = rj[j] > 0.0 ? -norm : norm;
    for (std::size_t k = j; k < l; ++k) v[k] = rj[k];
    v[j] -= alpha;
    double vv = 0.0;
    for (std::size_t k = j; k < l; ++k) vv += v[k] * v[k];
    if (vv == 0.0) continue;
    for (std::size_t i = j; i < n; ++i) {
      auto ri = w.row(i);
      double d = 0.0;
      for (std::size_t k = j; k < l; ++k) d += ri[k] * v[k];
      const double f = 2.0 * d / vv;
      for (std::size_t k = j; k < l; ++k) ri[k] -= f * v[k];
    }
  }
  Matrix b(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k <= i; ++k) b(i, k) = w(i, k);
  return b;
}

}  // namespace detail

/// Eigendecomposition of A A^t without forming the product: one-sided
/// (Hestenes) Jacobi rotates pairs of rows of A until every pair is
/// orthogonal to within `tolerance` relative to the row norms. The
/// accumulated rotations are the eigenvectors and the squared row norms
/// the eigenvalues, so small eigenvalues keep relative accuracy that the
/// explicit product would lose. Rows whose norm drops below 1e-15 of the
/// Frobenius norm are treated as exact zeros.
inline SymmetricEigen gram_rows_eigen(const Matrix& a, double tolerance = 1e-12,
                                      int max_sweeps = 100) {
  const std::size_t n = a.rows();
  Matrix w = a.cols() > n ? detail::shrink_columns(a) : a;
  Matrix vt = Matrix::identity(n);  // row k holds eigenvector k

  double total = 0.0;
  for (double x : w.data()) total += x * x;
  const double floor = 1e-30 * total;
  std::vector<double> sq(n);
  auto refresh = [&](std::size_t i) {
    const auto r = w.row(i);
    sq[i] = std::inner_product(r.begin(), r.end(), r.begin(), 0.0);
  };
  for (std::size_t i = 0; i < n; ++i) refresh(i);

  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double alpha = sq[p], beta = sq[q];
        if (alpha <= floor || beta <= floor) continue;
        const auto rp = w.row(p);
        const auto rq = w.row(q);
        const double gamma = std::inner_product(rp.begin(), rp.end(), rq.begin(), 0.0);
        if (std::abs(gamma) <= tolerance * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(zeta) + std::sqrt(zeta * zeta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < rp.size(); ++k) {
          const double x = rp[k], y = rq[k];
          rp[k] = c * x - s * y;
          rq[k] = s * x + c * y;
        }
        const auto vp = vt.row(p);
        const auto vq = vt.row(q);
        for (std::size_t k = 0; k < n; ++k) {
          const double x = vp[k], y = vq[k];
          vp[k] = c * x - s * y;
          vq[k] = s * x + c * y;
        }
        refresh(p);
        refresh(q);
      }
    }
    if (!rotated) break;
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (sq[i] <= floor) sq[i] = 0.0;
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return sq[i] > sq[j]; });

  SymmetricEigen out;
  out.sweeps = sweep;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = sq[order[k]];
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = vt(order[k], i);
  }
  return out;
}

/// Minimum-norm least-squares solution of A x = b for symmetric A, via the
/// eigendecomposition. Eigenvalues below rel_tol * max|lambda| are dropped.
inline std::vector<double> symmetric_pinv_solve(const Matrix& a, std::span<const double> b,
                                                double rel_tol = 1e-12) {
  const std::size_t n = a.rows();
  if (b.size() != n) throw Error(ErrorCode::kDimensionMismatch, "rhs length mismatch");
  const auto eig = jacobi_eigen(a, 1e-15);
  double scale = 0.0;
  for (double l : eig.values) scale = std::max(scale, std::abs(l));
  std::vector<double> x(n, 0.0);
  if (scale == 0.0) return x;
  for (std::size_t k = 0; k < n; ++k) {
    const double lambda = eig.values[k];
    if (std::abs(lambda) <= rel_tol * scale) continue;
    double proj = 0.0;
    for (std::size_t i = 0; i < n; ++i) proj += eig.vectors(i, k) * b[i];
    proj /= lambda;
    for (std::size_t i = 0; i < n; ++i) x[i] += proj * eig.vectors(i, k);
  }
  return x;
}

/// Moore-Penrose pseudo-inverse of a symmetric matrix.
inline Matrix symmetric_pinv(const Matrix& a, double rel_tol = 1e-12) {
  const std::size_t n = a.rows();
  const auto eig = jacobi_eigen(a, 1e-15);
  double scale = 0.0;
  for (double l : eig.values) scale = std::max(scale, std::abs(l));
  Matrix out(n, n);
  if (scale == 0.0) return out;
  for (std::size_t k = 0; k < n; ++k) {
    const double lambda = eig.values[k];
    if (std::abs(lambda) <= rel_tol * scale) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const double vi = eig.vectors(i, k) / lambda;
      if (vi == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) out(i, j) += vi * eig.vectors(j, k);
    }
  }
  return out;
}

}  // namespace tonecc::linalg
