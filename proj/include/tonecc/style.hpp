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
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "tonecc/eigentf.hpp"
#include "tonecc/error.hpp"
#include "tonecc/image.hpp"
#include "tonecc/linalg.hpp"
#include "tonecc/oracle.hpp"
#include "tonecc/transform.hpp"

namespace tonecc {

// A style profile is a lightweight stand-in for a learned style token: a
// ridge regressor from global image statistics to eigen-curve coefficients
// and the six free color-matrix entries.

inline constexpr std::size_t kHistogramBins = 32;
inline constexpr std::size_t kFeatureCount = 48;
inline constexpr std::size_t kCcmParams = 6;
inline constexpr double kDefaultRidge = 1e-3;

/// Layout: [0,32) intensity histogram, [32,35) channel means,
/// [35,38) channel std devs, [38,41) 5th percentiles, [41,44) 95th
/// percentiles, [44,48) reserved zeros.
using FeatureVector = std::array<double, kFeatureCount>;

namespace detail {

// Nearest-rank percentile from a 256-bin channel histogram.
inline double nearest_rank(const std::array<std::uint64_t, 256>& hist, std::uint64_t n,
                           unsigned percent) {
  std::uint64_t rank = (std::uint64_t(percent) * n + 99) / 100;
  if (rank == 0) rank = 1;
  std::uint64_t cum = 0;
  for (int v = 0; v < 256; ++v) {
    cum += hist[v];
    if (cum >= rank) return v;
  }
  return 255;
}

}  // namespace detail

inline FeatureVector features(const Image8& img) {
  FeatureVector f{};
  if (img.empty()) return f;
  const double n = double(img.size());

  std::array<std::array<std::uint64_t, 256>, 3> channel_hist{};
  std::array<double, 3> sum{};
  std::array<double, 3> sum_sq{};
  for (const auto& p : img) {
    f[std::size_t(intensity_of(p)) >> 3] += 1.0;
    const int c[3] = {p.r, p.g, p.b};
    for (int ch = 0; ch < 3; ++ch) {
      ++channel_hist[ch][c[ch]];
      sum[ch] += c[ch];
      sum_sq[ch] += double(c[ch]) * c[ch];
    }
  }
  for (std::size_t b = 0; b < kHistogramBins; ++b) f[b] /= n;
  for (int ch = 0; ch < 3; ++ch) {
    const double mean = sum[ch] / n;
    f[32 + ch] = mean;
    f[35 + ch] = std::sqrt(std::max(sum_sq[ch] / n - mean * mean, 0.0));
    f[38 + ch] = detail::nearest_rank(channel_hist[ch], img.size(), 5);
    f[41 + ch] = detail::nearest_rank(channel_hist[ch], img.size(), 95);
  }
  return f;
}

struct TrainingMeta {
  std::size_t pairs = 0;
  double ridge = 0.0;
  double fit_rmse = 0.0;
};

struct StyleProfile {
  std::string name;
  std::shared_ptr<const EigenBasis> basis;
  // (kFeatureCount + 1) rows, bias last; columns are outputs.
  linalg::Matrix w_coeff;
  linalg::Matrix w_ccm;
  TrainingMeta meta;

  std::uint64_t basis_id() const { return basis ? basis->fingerprint() : 0; }
};

struct StyleParameters {
  CoeffVector coeffs;                 // raw regressor output
  std::array<double, kCcmParams> ccm_offdiag{};
};

struct StylePrediction {
  ToneCurve tf;
  ColorMatrix ccm;
};

namespace detail {

inline std::vector<double> regress(const linalg::Matrix& w, const FeatureVector& f) {
  std::vector<double> out(w.cols(), 0.0);
  for (std::size_t j = 0; j < w.cols(); ++j) {
    double acc = w(kFeatureCount, j);
    for (std::size_t i = 0; i < kFeatureCount; ++i) acc += w(i, j) * f[i];
    out[j] = acc;
  }
  return out;
}

/// Ridge least squares with an unpenalised bias. Features are centred and
/// scaled to unit variance for the solve; the returned weights act on raw
/// features. lambda == 0 gives the minimum-norm least-squares fit.
inline linalg::Matrix ridge_fit(const std::vector<FeatureVector>& x,
                                const linalg::Matrix& targets, double lambda) {
  const std::size_t n = x.size();
  const std::size_t d = kFeatureCount;
  const std::size_t outputs = targets.cols();

  std::array<double, kFeatureCount> mean{};
  std::array<double, kFeatureCount> scale{};
  for (const auto& f : x)
    for (std::size_t i = 0; i < d; ++i) mean[i] += f[i];
  for (auto& m : mean) m /= double(n);
  for (const auto& f : x)
    for (std::size_t i = 0; i < d; ++i) scale[i] += (f[i] - mean[i]) * (f[i] - mean[i]);
  for (auto& s : scale) {
    s = std::sqrt(s / double(n));
    if (!(s > 1e-12)) s = 0.0;  // constant feature: excluded from the fit
  }

  std::vector<double> target_mean(outputs, 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t j = 0; j < outputs; ++j) target_mean[j] += targets(r, j);
  for (auto& m : target_mean) m /= double(n);

  linalg::Matrix z(n, d);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t i = 0; i < d; ++i)
      z(r, i) = scale[i] > 0.0 ? (x[r][i] - mean[i]) / scale[i] : 0.0;

  linalg::Matrix normal = z.transpose() * z;
  for (std::size_t i = 0; i < d; ++i) normal(i, i) += lambda;
  const linalg::Matrix inv = linalg::symmetric_pinv(normal, 1e-12);

  linalg::Matrix zt_t(d, outputs);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < outputs; ++j)
        zt_t(i, j) += z(r, i) * (targets(r, j) - target_mean[j]);
  const linalg::Matrix w_std = inv * zt_t;

  linalg::Matrix w(d + 1, outputs);
  for (std::size_t j = 0; j < outputs; ++j) {
    double bias = target_mean[j];
    for (std::size_t i = 0; i < d; ++i) {
      if (scale[i] == 0.0) continue;
      w(i, j) = w_std(i, j) / scale[i];
      bias -= w(i, j) * mean[i];
    }
    w(d, j) = bias;
  }
  return w;
}

}  // namespace detail

struct TrainingPair {
  Image8 input;
  Image8 gt;
};

/// Regression targets of one pair: eigen coefficients of the optimal curve
/// and off-diagonals of the optimal color matrix.
struct StyleTargets {
  CoeffVector coeffs;
  std::array<double, kCcmParams> ccm_offdiag{};
};

inline StyleTargets style_targets(const Image8& input, const Image8& gt,
                                  const EigenBasis& basis) {
  const auto ub = upper_bound(input, gt);
  return {project(basis, ub.tf), ub.ccm.off_diagonal()};
}

inline StyleParameters predict_parameters(const StyleProfile& profile, const Image8& img) {
  const auto f = features(img);
  StyleParameters p;
  p.coeffs = detail::regress(profile.w_coeff, f);
  const auto k = detail::regress(profile.w_ccm, f);
  std::copy(k.begin(), k.end(), p.ccm_offdiag.begin());
  return p;
}

inline StylePrediction predict(const StyleProfile& profile, const Image8& img) {
  if (!profile.basis) throw Error(ErrorCode::kInvalidArgument, "style profile has no basis");
  const auto p = predict_parameters(profile, img);
  return {monotonize(reconstruct(*profile.basis, p.coeffs)),
          ColorMatrix::from_off_diagonal(p.ccm_offdiag)};
}

inline StyleProfile fit_style_from_targets(std::string name,
                                           std::shared_ptr<const EigenBasis> basis,
                                           const std::vector<FeatureVector>& feats,
                                           const std::vector<StyleTargets>& targets,
                                           double ridge) {
  if (feats.empty()) throw Error(ErrorCode::kEmptyDataset, "fit_style: no training pairs");
  if (ridge < 0.0) throw Error(ErrorCode::kInvalidArgument, "ridge must be >= 0");
  const std::size_t n = feats.size();
  const std::size_t m = basis->rank();

  linalg::Matrix tc(n, m);
  linalg::Matrix tk(n, kCcmParams);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t j = 0; j < m; ++j) tc(r, j) = targets[r].coeffs[j];
    for (std::size_t j = 0; j < kCcmParams; ++j) tk(r, j) = targets[r].ccm_offdiag[j];
  }

  StyleProfile prof;
  prof.name = std::move(name);
  prof.basis = std::move(basis);
  prof.w_coeff = detail::ridge_fit(feats, tc, ridge);
  prof.w_ccm = detail::ridge_fit(feats, tk, ridge);

  double sq = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const auto pc = detail::regress(prof.w_coeff, feats[r]);
    const auto pk = detail::regress(prof.w_ccm, feats[r]);
    for (std::size_t j = 0; j < m; ++j) sq += (pc[j] - tc(r, j)) * (pc[j] - tc(r, j));
    for (std::size_t j = 0; j < kCcmParams; ++j)
      sq += (pk[j] - tk(r, j)) * (pk[j] - tk(r, j));
  }
  prof.meta = {n, ridge, std::sqrt(sq / double(n * (m + kCcmParams)))};
  return prof;
}

inline StyleProfile fit_style(std::string name, const std::vector<TrainingPair>& pairs,
                              std::shared_ptr<const EigenBasis> basis,
                              double ridge = kDefaultRidge) {
  if (pairs.empty()) throw Error(ErrorCode::kEmptyDataset, "fit_style: no training pairs");
  if (!basis) throw Error(ErrorCode::kInvalidArgument, "fit_style: missing basis");
  std::vector<FeatureVector> feats;
  std::vector<StyleTargets> targets;
  for (const auto& p : pairs) {
    feats.push_back(features(p.input));
    targets.push_back(style_targets(p.input, p.gt, *basis));
  }
  return fit_style_from_targets(std::move(name), std::move(basis), feats, targets, ridge);
}

/// Profile that predicts the identity curve and matrix for every image.
/// The curve is reproduced exactly only when it lies in the span of the
/// basis, e.g. when the identity was part of the basis corpus.
inline StyleProfile identity_style(std::string name, std::shared_ptr<const EigenBasis> basis) {
  if (!basis) throw Error(ErrorCode::kInvalidArgument, "identity_style: missing basis");
  StyleProfile prof;
  prof.name = std::move(name);
  prof.w_coeff = linalg::Matrix(kFeatureCount + 1, basis->rank());
  prof.w_ccm = linalg::Matrix(kFeatureCount + 1, kCcmParams);
  const auto c = project(*basis, ToneCurve::identity());
  for (std::size_t m = 0; m < c.size(); ++m) prof.w_coeff(kFeatureCount, m) = c[m];
  prof.basis = std::move(basis);
  return prof;
}

inline Image8 enhance_with_style(const Image8& img, const StyleProfile& profile) {
  const auto p = predict(profile, img);
  return enhance(img, p.tf, p.ccm);
}

/// Weight-space blend (1-t) a + t b; the result behaves like a single mixed
/// style for every image.
inline StyleProfile interpolate_styles(const StyleProfile& a, const StyleProfile& b, double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "interpolation t must lie in [0,1]");
  }
  if (!a.basis || !b.basis || a.basis_id() != b.basis_id()) {
    throw Error(ErrorCode::kBasisMismatch,
                "cannot interpolate '" + a.name + "' and '" + b.name +
                    "': different eigen bases");
  }
  auto blend = [t](const linalg::Matrix& x, const linalg::Matrix& y) {
    linalg::Matrix out(x.rows(), x.cols());
    for (std::size_t r = 0; r < x.rows(); ++r)
      for (std::size_t c = 0; c < x.cols(); ++c) out(r, c) = (1.0 - t) * x(r, c) + t * y(r, c);
    return out;
  };
  StyleProfile out;
  out.name = a.name + "~" + b.name;
  out.basis = a.basis;
  out.w_coeff = blend(a.w_coeff, b.w_coeff);
  out.w_ccm = blend(a.w_ccm, b.w_ccm);
  out.meta = {0, 0.0, 0.0};
  return out;
}

inline Image8 chain_styles(const Image8& img, std::span<const StyleProfile> profiles) {
  if (profiles.empty()) throw Error(ErrorCode::kInvalidArgument, "style chain is empty");
  Image8 cur = img;
  for (const auto& p : profiles) cur = enhance_with_style(cur, p);
  return cur;
}

/// K named profiles sharing one basis.
class StyleSet {
 public:
  explicit StyleSet(std::shared_ptr<const EigenBasis> basis) : basis_(std::move(basis)) {}

  const std::shared_ptr<const EigenBasis>& basis() const noexcept { return basis_; }

  void add(StyleProfile profile) {
    if (!profile.basis || profile.basis_id() != basis_->fingerprint()) {
      throw Error(ErrorCode::kBasisMismatch,
                  "profile '" + profile.name + "' was fitted against another basis");
    }
    profile.basis = basis_;
    const auto key = profile.name;
    profiles_.insert_or_assign(key, std::move(profile));
  }

  const StyleProfile& at(const std::string& name) const {
    const auto it = profiles_.find(name);
    if (it == profiles_.end()) {
      throw Error(ErrorCode::kNotFound, "unknown style '" + name + "'");
    }
    return it->second;
  }

  bool contains(const std::string& name) const { return profiles_.count(name) > 0; }
  std::size_t size() const noexcept { return profiles_.size(); }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& [name, _] : profiles_) out.push_back(name);
    return out;
  }

  const std::map<std::string, StyleProfile>& profiles() const noexcept { return profiles_; }

 private:
  std::shared_ptr<const EigenBasis> basis_;
  std::map<std::string, StyleProfile> profiles_;
};

}  // namespace tonecc
