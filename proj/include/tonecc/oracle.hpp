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

#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <vector>

#include "tonecc/error.hpp"
#include "tonecc/image.hpp"
#include "tonecc/linalg.hpp"
#include "tonecc/transform.hpp"

namespace tonecc {

// ---------------------------------------------------------------------------
// Optimal tone curve
// ---------------------------------------------------------------------------

/// Sufficient statistics of ||A x - y_gt||^2: per input-intensity bin, the
/// pixel count and the sum of GT intensities. Sums are kept (rather than
/// means) so partial statistics merge exactly.
struct BinStats {
  std::array<std::uint64_t, kLevels> count{};
  std::array<double, kLevels> target_sum{};

  double target(std::size_t k) const { return target_sum[k] / double(count[k]); }

  std::uint64_t total() const {
    std::uint64_t n = 0;
    for (auto c : count) n += c;
    return n;
  }

  std::size_t populated() const {
    std::size_t n = 0;
    for (auto c : count) n += c > 0;
    return n;
  }

  BinStats& operator+=(const BinStats& other) {
    for (std::size_t k = 0; k < kLevels; ++k) {
      count[k] += other.count[k];
      target_sum[k] += other.target_sum[k];
    }
    return *this;
  }
};

inline BinStats bin_stats(const Image8& input, const Image8& gt) {
  require_same_size(input, gt);
  BinStats s;
  for (std::size_t i = 0; i < input.size(); ++i) {
    const auto k = std::size_t(intensity_of(input[i]));
    s.count[k] += 1;
    s.target_sum[k] += intensity_of(gt[i]);
  }
  return s;
}

/// Weighted least-squares objective sum_k w_k (x_k - t_k)^2 over populated
/// bins. Equals ||A x - y_gt||^2 up to an x-independent constant.
inline double tone_objective(const BinStats& s, const ToneCurve& x) {
  double f = 0.0;
  for (std::size_t k = 0; k < kLevels; ++k) {
    if (s.count[k] == 0) continue;
    const double d = x[k] - s.target(k);
    f += double(s.count[k]) * d * d;
  }
  return f;
}

namespace detail {

struct PavaBlock {
  double weight;
  double mean;
  std::size_t length;
};

/// Weighted isotonic (nondecreasing) regression by pool-adjacent-violators.
inline std::vector<double> pava(const std::vector<double>& y, const std::vector<double>& w) {
  std::vector<PavaBlock> blocks;
  blocks.reserve(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    blocks.push_back({w[i], y[i], 1});
    while (blocks.size() > 1 && blocks[blocks.size() - 2].mean >= blocks.back().mean) {
      const PavaBlock top = blocks.back();
      blocks.pop_back();
      PavaBlock& prev = blocks.back();
      const double wsum = prev.weight + top.weight;
      prev.mean = (prev.weight * prev.mean + top.weight * top.mean) / wsum;
      prev.weight = wsum;
      prev.length += top.length;
    }
  }
  std::vector<double> out;
  out.reserve(y.size());
  for (const auto& b : blocks) out.insert(out.end(), b.length, b.mean);
  return out;
}

}  // namespace detail

/// Exact minimiser of sum_k w_k (x_k - t_k)^2 subject to
/// 0 <= x_0 <= ... <= x_255 <= 255. Isotonic regression on the populated
/// bins followed by a clamp to the box (the clamp of an isotonic L2 fit is
/// the box-constrained fit). Empty bins are linearly interpolated between
/// populated neighbours and held flat past the ends.
inline ToneCurve optimal_tone_curve(const BinStats& stats) {
  std::vector<std::size_t> bins;
  std::vector<double> targets;
  std::vector<double> weights;
  for (std::size_t k = 0; k < kLevels; ++k) {
    if (stats.count[k] == 0) continue;
    bins.push_back(k);
    targets.push_back(stats.target(k));
    weights.push_back(double(stats.count[k]));
  }
  if (bins.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "optimal_tone_curve: no populated bins");
  }
  auto fit = detail::pava(targets, weights);
  for (auto& v : fit) v = std::clamp(v, 0.0, 255.0);

  ToneCurve tc;
  for (std::size_t k = 0; k <= bins.front(); ++k) tc[k] = fit.front();
  for (std::size_t k = bins.back(); k < kLevels; ++k) tc[k] = fit.back();
  for (std::size_t b = 0; b + 1 < bins.size(); ++b) {
    const std::size_t lo = bins[b];
    const std::size_t hi = bins[b + 1];
    tc[lo] = fit[b];
    for (std::size_t k = lo + 1; k < hi; ++k) {
      const double t = double(k - lo) / double(hi - lo);
      tc[k] = fit[b] + t * (fit[b + 1] - fit[b]);
    }
  }
  tc[bins.back()] = fit.back();
  return tc;
}

// ---------------------------------------------------------------------------
// Optimal color matrix
// ---------------------------------------------------------------------------

/// Normal-equation accumulators of ||B kappa - z_gt||^2. B is block
/// diagonal per output channel, so everything reduces to the 3x3 Gram
/// matrix of intermediate pixels plus a 3x3 cross term.
struct CcmDesign {
  std::array<std::array<double, 3>, 3> gram{};   // G_jk = sum p_j p_k
  std::array<std::array<double, 3>, 3> cross{};  // C_ij = sum z_i p_j
  double target_energy = 0.0;                    // sum |z|^2
  std::uint64_t pixels = 0;

  CcmDesign& operator+=(const CcmDesign& o) {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        gram[i][j] += o.gram[i][j];
        cross[i][j] += o.cross[i][j];
      }
    target_energy += o.target_energy;
    pixels += o.pixels;
    return *this;
  }

  void add(const RgbF& p, const Rgb8& z) {
    const double pv[3] = {p.r, p.g, p.b};
    const double zv[3] = {double(z.r), double(z.g), double(z.b)};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        gram[i][j] += pv[i] * pv[j];
        cross[i][j] += zv[i] * pv[j];
      }
    target_energy += zv[0] * zv[0] + zv[1] * zv[1] + zv[2] * zv[2];
    ++pixels;
  }
};

inline CcmDesign ccm_design(const ImageF& mid, const Image8& gt) {
  require_same_size(mid, gt);
  CcmDesign d;
  for (std::size_t i = 0; i < mid.size(); ++i) d.add(mid[i], gt[i]);
  return d;
}

/// ||B kappa - z||^2 evaluated from the accumulators.
inline double ccm_objective(const CcmDesign& d, const ColorMatrix& k) {
  double f = d.target_energy;
  for (int i = 0; i < 3; ++i) {
    const auto& row = k.m[i];
    for (int a = 0; a < 3; ++a) {
      f -= 2.0 * d.cross[i][a] * row[a];
      for (int b = 0; b < 3; ++b) f += row[a] * d.gram[a][b] * row[b];
    }
  }
  return f;
}

struct CcmRowSolution {
  std::array<double, 3> row{};
  double multiplier = 0.0;
};

/// Solves min k^t G k - 2 c^t k s.t. 1^t k = 1 for output channel `i`
/// through the bordered KKT system. The system is written in the deviation
/// d = k - e_i and solved with a pseudo-inverse, so when G is singular the
/// minimiser closest to the identity row is returned.
inline CcmRowSolution solve_ccm_row(const CcmDesign& d, int i) {
  const double scale = (d.gram[0][0] + d.gram[1][1] + d.gram[2][2]) / 3.0;
  const double s = scale > 0.0 ? scale : 1.0;

  linalg::Matrix kkt(4, 4);
  std::array<double, 4> rhs{};
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) kkt(a, b) = d.gram[a][b] / s;
    kkt(a, 3) = 1.0;
    kkt(3, a) = 1.0;
    rhs[a] = (d.cross[i][a] - d.gram[a][i]) / s;
  }
  const auto sol = linalg::symmetric_pinv_solve(kkt, rhs, 1e-12);

  CcmRowSolution out;
  for (int a = 0; a < 3; ++a) out.row[a] = sol[a] + (a == i ? 1.0 : 0.0);
  // Stationarity reads G k + mu 1 = c in the unscaled problem.
  out.multiplier = sol[3] * s;
  return out;
}

inline ColorMatrix optimal_ccm(const CcmDesign& d) {
  ColorMatrix k;
  for (int i = 0; i < 3; ++i) k.m[i] = solve_ccm_row(d, i).row;
  return k;
}

// ---------------------------------------------------------------------------
// Upper bound pipeline
// ---------------------------------------------------------------------------

struct UpperBoundReport {
  ToneCurve tf;
  ColorMatrix ccm;
  double psnr_in = 0.0;
  double psnr_mid = 0.0;
  double psnr_out = 0.0;
  double millis = 0.0;
  Image8 output;
};

inline UpperBoundReport upper_bound(const Image8& input, const Image8& gt) {
  require_same_size(input, gt);
  const auto start = std::chrono::steady_clock::now();

  UpperBoundReport r;
  r.tf = optimal_tone_curve(bin_stats(input, gt));
  const ImageF mid = apply_tone_curve(input, r.tf);
  r.ccm = optimal_ccm(ccm_design(mid, gt));
  r.output = quantize(apply_color_matrix(mid, r.ccm));

  r.psnr_in = psnr(input, gt);
  r.psnr_mid = psnr(quantize(mid), gt);
  r.psnr_out = psnr(r.output, gt);
  r.millis = std::chrono::duration<double, std::milli>(
                 std::chrono::steady_clock::now() - start)
                 .count();
  return r;
}

}  // namespace tonecc
