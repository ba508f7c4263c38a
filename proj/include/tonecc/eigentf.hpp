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
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

#include "tonecc/error.hpp"
#include "tonecc/linalg.hpp"
#include "tonecc/transform.hpp"

namespace tonecc {

/// Number of eigen tone curves used unless configured otherwise.
inline constexpr std::size_t kDefaultBasisRank = 10;

/// Columns are tone curves; stored as a 256 x L matrix.
class CurveCorpus {
 public:
  CurveCorpus() = default;
  explicit CurveCorpus(std::vector<ToneCurve> curves) : curves_(std::move(curves)) {}

  void add(const ToneCurve& tc) { curves_.push_back(tc); }
  std::size_t size() const noexcept { return curves_.size(); }
  bool empty() const noexcept { return curves_.empty(); }
  const std::vector<ToneCurve>& curves() const noexcept { return curves_; }

  linalg::Matrix matrix() const {
    linalg::Matrix x(kLevels, curves_.size());
    for (std::size_t c = 0; c < curves_.size(); ++c)
      for (std::size_t k = 0; k < kLevels; ++k) x(k, c) = curves_[c][k];
    return x;
  }

 private:
  std::vector<ToneCurve> curves_;
};

using CoeffVector = std::vector<double>;
using RawCurve = std::array<double, kLevels>;

/// Top-M left singular vectors of the curve matrix ("eigen tone curves")
/// with their singular values.
struct EigenBasis {
  std::vector<RawCurve> u;     // M columns
  std::vector<double> sigma;   // nonincreasing

  std::size_t rank() const noexcept { return u.size(); }

  /// 64-bit FNV-1a over the raw bits of sigma and u; profiles use it to
  /// reference the basis they were fitted against.
  std::uint64_t fingerprint() const {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&](double v) {
      std::uint64_t bits = 0;
      std::memcpy(&bits, &v, sizeof bits);
      for (int b = 0; b < 8; ++b) {
        h ^= (bits >> (8 * b)) & 0xffU;
        h *= 1099511628211ULL;
      }
    };
    mix(double(u.size()));
    for (double s : sigma) mix(s);
    for (const auto& col : u)
      for (double v : col) mix(v);
    return h;
  }

  friend bool operator==(const EigenBasis&, const EigenBasis&) = default;
};

namespace detail {

inline linalg::SymmetricEigen corpus_eigen(const CurveCorpus& corpus) {
  if (corpus.empty()) throw Error(ErrorCode::kInvalidArgument, "curve corpus is empty");
  return linalg::gram_rows_eigen(corpus.matrix(), 1e-12);
}

// Largest-magnitude entry positive; ties go to the lowest index.
inline void fix_sign(RawCurve& col) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < col.size(); ++i) {
    if (std::abs(col[i]) > std::abs(col[best])) best = i;
  }
  if (col[best] < 0.0) {
    for (auto& v : col) v = -v;
  }
}

}  // namespace detail

/// Singular values of the curve matrix (all 256 of them, nonincreasing).
inline std::vector<double> corpus_spectrum(const CurveCorpus& corpus) {
  const auto eig = detail::corpus_eigen(corpus);
  std::vector<double> sigma;
  sigma.reserve(eig.values.size());
  for (double l : eig.values) sigma.push_back(std::sqrt(std::max(l, 0.0)));
  return sigma;
}

/// SVD of X through the symmetric eigenproblem of X X^t, solved by
/// one-sided Jacobi on the rows of X. Requires 1 <= m <= min(256, L).
inline EigenBasis build_basis(const CurveCorpus& corpus, std::size_t m) {
  if (corpus.empty()) throw Error(ErrorCode::kInvalidArgument, "curve corpus is empty");
  if (m < 1 || m > std::min(kLevels, corpus.size())) {
    throw Error(ErrorCode::kInvalidArgument,
                "basis rank " + std::to_string(m) + " outside [1, " +
                    std::to_string(std::min(kLevels, corpus.size())) + "]");
  }
  const auto eig = detail::corpus_eigen(corpus);
  EigenBasis basis;
  basis.u.resize(m);
  basis.sigma.resize(m);
  for (std::size_t c = 0; c < m; ++c) {
    for (std::size_t k = 0; k < kLevels; ++k) basis.u[c][k] = eig.vectors(k, c);
    detail::fix_sign(basis.u[c]);
    basis.sigma[c] = std::sqrt(std::max(eig.values[c], 0.0));
  }
  return basis;
}

/// c = U_M^t x.
inline CoeffVector project(const EigenBasis& basis, std::span<const double, kLevels> x) {
  CoeffVector c(basis.rank(), 0.0);
  for (std::size_t m = 0; m < basis.rank(); ++m) {
    double acc = 0.0;
    for (std::size_t k = 0; k < kLevels; ++k) acc += basis.u[m][k] * x[k];
    c[m] = acc;
  }
  return c;
}

inline CoeffVector project(const EigenBasis& basis, const ToneCurve& x) {
  return project(basis, std::span<const double, kLevels>(x.values));
}

/// x~ = U_M c. The result is a raw curve and must be monotonized before use.
inline RawCurve reconstruct(const EigenBasis& basis, std::span<const double> c) {
  if (c.size() != basis.rank()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "coefficient count " + std::to_string(c.size()) + " != basis rank " +
                    std::to_string(basis.rank()));
  }
  RawCurve x{};
  for (std::size_t m = 0; m < basis.rank(); ++m) {
    const double cm = c[m];
    for (std::size_t k = 0; k < kLevels; ++k) x[k] += cm * basis.u[m][k];
  }
  return x;
}

struct RankError {
  std::size_t m = 0;
  double mean_rmse = 0.0;
};

/// Mean per-curve RMSE of the rank-m reconstruction for m = 1..m_max.
inline std::vector<RankError> rank_error_curve(const CurveCorpus& corpus, std::size_t m_max) {
  const auto full = build_basis(corpus, m_max);
  // Residual after m terms is |x|^2 - sum_{j<=m} c_j^2; computed directly
  // from running reconstructions to avoid cancellation.
  std::vector<RankError> out(m_max);
  for (std::size_t m = 0; m < m_max; ++m) out[m].m = m + 1;
  for (const auto& curve : corpus.curves()) {
    const auto c = project(full, curve);
    RawCurve approx{};
    for (std::size_t m = 0; m < m_max; ++m) {
      for (std::size_t k = 0; k < kLevels; ++k) approx[k] += c[m] * full.u[m][k];
      double sq = 0.0;
      for (std::size_t k = 0; k < kLevels; ++k) {
        const double d = curve[k] - approx[k];
        sq += d * d;
      }
      out[m].mean_rmse += std::sqrt(sq / double(kLevels));
    }
  }
  for (auto& e : out) e.mean_rmse /= double(corpus.size());
  return out;
}

}  // namespace tonecc
