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

#include <gtest/gtest.h>

#include <cmath>

#include "support/brute_force.hpp"
#include "tonecc/linalg.hpp"

namespace tonecc::linalg {
namespace {

Matrix random_matrix(synth::Rng& rng, std::size_t r, std::size_t c) {
  Matrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = rng.uniform(-3.0, 3.0);
  return m;
}

void expect_eigenpairs(const Matrix& g, const SymmetricEigen& e, double tol) {
  const std::size_t n = g.rows();
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      double gv = 0.0;
      for (std::size_t j = 0; j < n; ++j) gv += g(i, j) * e.vectors(j, k);
      EXPECT_NEAR(gv, e.values[k] * e.vectors(i, k), tol);
    }
    for (std::size_t l = 0; l < n; ++l) {
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) dot += e.vectors(i, k) * e.vectors(i, l);
      EXPECT_NEAR(dot, k == l ? 1.0 : 0.0, 1e-10);
    }
    if (k > 0) {
      EXPECT_LE(e.values[k], e.values[k - 1]);
    }
  }
}

TEST(JacobiEigen, Diagonal) {
  Matrix a(3, 3);
  a(0, 0) = 1.0;
  a(1, 1) = 5.0;
  a(2, 2) = 3.0;
  const auto e = jacobi_eigen(a);
  EXPECT_EQ(e.values, (std::vector<double>{5.0, 3.0, 1.0}));
  EXPECT_EQ(e.vectors(1, 0), 1.0);
}

TEST(JacobiEigen, RandomSymmetric) {
  synth::Rng rng(31);
  const auto b = random_matrix(rng, 7, 7);
  Matrix a(7, 7);
  for (std::size_t i = 0; i < 7; ++i)
    for (std::size_t j = 0; j < 7; ++j) a(i, j) = b(i, j) + b(j, i);
  expect_eigenpairs(a, jacobi_eigen(a), 1e-10);
}

TEST(GramRowsEigen, WideAndTallInputs) {
  synth::Rng rng(32);
  for (auto [r, c] : {std::pair<std::size_t, std::size_t>{6, 3}, {6, 6}, {5, 40}}) {
    const auto a = random_matrix(rng, r, c);
    const auto g = gram_rows(a);
    const auto e = gram_rows_eigen(a);
    expect_eigenpairs(g, e, 1e-9);
    const auto ref = jacobi_eigen(g);
    for (std::size_t k = 0; k < r; ++k) EXPECT_NEAR(e.values[k], ref.values[k], 1e-9);
  }
}

TEST(GramRowsEigen, ZeroMatrix) {
  const auto e = gram_rows_eigen(Matrix(4, 2));
  for (double v : e.values) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(e.vectors, Matrix::identity(4));
}

TEST(SymmetricPinv, SolvesRegularSystem) {
  Matrix a(2, 2);
  a(0, 0) = 4.0;
  a(0, 1) = a(1, 0) = 1.0;
  a(1, 1) = 3.0;
  const std::vector<double> b{1.0, 2.0};
  const auto x = symmetric_pinv_solve(a, b);
  EXPECT_NEAR(4.0 * x[0] + x[1], 1.0, 1e-12);
  EXPECT_NEAR(x[0] + 3.0 * x[1], 2.0, 1e-12);
}

TEST(SymmetricPinv, MinimumNormOnSingular) {
  Matrix a(2, 2, 1.0);  // rank one, range spanned by (1, 1)
  const std::vector<double> b{2.0, 2.0};
  const auto x = symmetric_pinv_solve(a, b);
  EXPECT_NEAR(x[0], 1.0, 1e-12);
  EXPECT_NEAR(x[1], 1.0, 1e-12);
  const auto p = symmetric_pinv(a);
  EXPECT_NEAR(p(0, 0), 0.25, 1e-12);
  EXPECT_NEAR(p(0, 1), 0.25, 1e-12);
}

TEST(Matrix, ProductShapeMismatch) { EXPECT_THROW(Matrix(2, 3) * Matrix(2, 3), Error); }

}  // namespace
}  // namespace tonecc::linalg
