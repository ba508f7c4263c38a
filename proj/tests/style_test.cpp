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

#include <algorithm>
#include <cmath>

#include "support/brute_force.hpp"
#include "tonecc/serialize.hpp"
#include "tonecc/style.hpp"

namespace tonecc {
namespace {

std::vector<TrainingPair> style_pairs(synth::Rng& rng, const synth::Style& style, std::size_t n,
                                      std::size_t size = 64) {
  std::vector<TrainingPair> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    auto in = synth::random_image(rng, {size, size});
    auto gt = enhance(in, style.tf, style.ccm);
    pairs.push_back({std::move(in), std::move(gt)});
  }
  return pairs;
}

std::vector<TrainingPair> identity_pairs(synth::Rng& rng, std::size_t n) {
  std::vector<TrainingPair> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    auto in = synth::random_image(rng, {64, 64});
    pairs.push_back({in, in});
  }
  return pairs;
}

std::shared_ptr<const EigenBasis> basis_for(const std::vector<std::vector<TrainingPair>>& sets,
                                            std::size_t m = kDefaultBasisRank) {
  CurveCorpus corpus;
  for (const auto& s : sets)
    for (const auto& p : s) corpus.add(upper_bound(p.input, p.gt).tf);
  return std::make_shared<const EigenBasis>(build_basis(corpus, std::min(m, corpus.size())));
}

double mean_intensity(const Image8& img) {
  double s = 0.0;
  for (const auto& p : img) s += intensity_of(p);
  return s / double(img.size());
}

// Two fitted styles plus an identity style on a shared basis.
class StyleFixture : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    synth::Rng rng(41);
    const auto sa = synth::random_style(rng);
    const auto sb = synth::random_style(rng);
    auto pa = style_pairs(rng, sa, 16);
    auto pb = style_pairs(rng, sb, 16);
    auto pi = identity_pairs(rng, 8);
    basis_ = new std::shared_ptr<const EigenBasis>(basis_for({pa, pb, pi}));
    a_ = new StyleProfile(fit_style("a", pa, *basis_));
    b_ = new StyleProfile(fit_style("b", pb, *basis_));
    id_ = new StyleProfile(fit_style("id", pi, *basis_));
    pairs_a_ = new std::vector<TrainingPair>(std::move(pa));
    probe_ = new Image8(synth::random_image(rng, {64, 64}));
  }
  static void TearDownTestSuite() {
    delete basis_;
    delete a_;
    delete b_;
    delete id_;
    delete pairs_a_;
    delete probe_;
  }
  static std::shared_ptr<const EigenBasis>* basis_;
  static StyleProfile *a_, *b_, *id_;
  static std::vector<TrainingPair>* pairs_a_;
  static Image8* probe_;
};
std::shared_ptr<const EigenBasis>* StyleFixture::basis_ = nullptr;
StyleProfile* StyleFixture::a_ = nullptr;
StyleProfile* StyleFixture::b_ = nullptr;
StyleProfile* StyleFixture::id_ = nullptr;
std::vector<TrainingPair>* StyleFixture::pairs_a_ = nullptr;
Image8* StyleFixture::probe_ = nullptr;

// --- features ----------------------------------------------------------------

TEST(Features, AllBlack) {
  const auto f = features(Image8(8, 8));
  EXPECT_EQ(f[0], 1.0);
  for (std::size_t i = 1; i < kFeatureCount; ++i) EXPECT_EQ(f[i], 0.0) << i;
}

TEST(Features, AllWhite) {
  const auto f = features(Image8(8, 8, Rgb8{255, 255, 255}));
  EXPECT_EQ(f[31], 1.0);
  for (std::size_t ch = 0; ch < 3; ++ch) {
    EXPECT_EQ(f[32 + ch], 255.0);
    EXPECT_EQ(f[35 + ch], 0.0);
    EXPECT_EQ(f[38 + ch], 255.0);
    EXPECT_EQ(f[41 + ch], 255.0);
  }
}

TEST(Features, TwoGrayPopulations) {
  Image8 img(10, 2, Rgb8{64, 64, 64});
  for (std::size_t x = 0; x < 10; ++x) img(x, 1) = {192, 192, 192};
  const auto f = features(img);
  EXPECT_DOUBLE_EQ(f[8], 0.5);
  EXPECT_DOUBLE_EQ(f[24], 0.5);
  EXPECT_DOUBLE_EQ(f[32], 128.0);
  EXPECT_DOUBLE_EQ(f[35], 64.0);
  EXPECT_EQ(f[38], 64.0);
  EXPECT_EQ(f[41], 192.0);
}

TEST(Features, NearestRankPercentiles) {
  // channel values 1..100: nearest-rank p5 is the 5th value, p95 the 95th
  Image8 img(100, 1);
  for (std::size_t i = 0; i < 100; ++i) img[i] = {std::uint8_t(i + 1), 0, 0};
  const auto f = features(img);
  EXPECT_EQ(f[38], 5.0);
  EXPECT_EQ(f[41], 95.0);
}

TEST(Features, HistogramNormalized) {
  synth::Rng rng(42);
  const auto f = features(testing::random_image8(rng, 33, 17));
  double s = 0.0;
  for (std::size_t i = 0; i < kHistogramBins; ++i) s += f[i];
  EXPECT_NEAR(s, 1.0, 1e-9);
  for (std::size_t i = 44; i < kFeatureCount; ++i) EXPECT_EQ(f[i], 0.0);
  for (double v : f) EXPECT_TRUE(std::isfinite(v));
}

// --- fit_style ---------------------------------------------------------------

TEST(FitStyle, ConsistentStyleReproducesTargets) {
  synth::Rng rng(43);
  const auto pairs = style_pairs(rng, synth::random_style(rng), 8);
  const auto basis = basis_for({pairs}, 8);
  const auto prof = fit_style("s", pairs, basis, 1e-6);
  EXPECT_LE(prof.meta.fit_rmse, 1e-3);
  EXPECT_EQ(prof.meta.pairs, 8u);
  EXPECT_EQ(prof.w_coeff.rows(), kFeatureCount + 1);
  EXPECT_EQ(prof.w_coeff.cols(), basis->rank());
  EXPECT_EQ(prof.w_ccm.cols(), kCcmParams);
}

TEST(FitStyle, SinglePairInterpolatedExactly) {
  synth::Rng rng(44);
  const auto pairs = style_pairs(rng, synth::random_style(rng), 1);
  const auto basis = basis_for({style_pairs(rng, synth::random_style(rng), 12)});
  const auto prof = fit_style("one", pairs, basis, 0.0);
  const auto target = style_targets(pairs[0].input, pairs[0].gt, *basis);
  const auto p = predict_parameters(prof, pairs[0].input);
  for (std::size_t m = 0; m < target.coeffs.size(); ++m)
    EXPECT_NEAR(p.coeffs[m], target.coeffs[m], 1e-6 * (1.0 + std::abs(target.coeffs[m])));
  for (std::size_t j = 0; j < kCcmParams; ++j)
    EXPECT_NEAR(p.ccm_offdiag[j], target.ccm_offdiag[j], 1e-9);
}

TEST(FitStyle, HugeRidgePredictsMeanTarget) {
  synth::Rng rng(45);
  const auto pairs = style_pairs(rng, synth::random_style(rng), 6);
  const auto basis = basis_for({pairs}, 6);
  const auto prof = fit_style("flat", pairs, basis, 1e12);
  CoeffVector mean(basis->rank(), 0.0);
  for (const auto& p : pairs) {
    const auto t = style_targets(p.input, p.gt, *basis);
    for (std::size_t m = 0; m < mean.size(); ++m) mean[m] += t.coeffs[m] / double(pairs.size());
  }
  for (const auto& img : {pairs[0].input, synth::random_image(rng, {32, 32})}) {
    const auto p = predict_parameters(prof, img);
    for (std::size_t m = 0; m < mean.size(); ++m)
      EXPECT_NEAR(p.coeffs[m], mean[m], 1e-6 * (1.0 + std::abs(mean[m])));
  }
}

TEST(FitStyle, Errors) {
  synth::Rng rng(46);
  auto basis = basis_for({identity_pairs(rng, 3)}, 2);
  try {
    fit_style("x", {}, basis);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyDataset);
  }
  EXPECT_THROW(fit_style("x", identity_pairs(rng, 1), basis, -1.0), Error);
}

TEST_F(StyleFixture, DeterministicAndOrderInvariant) {
  const auto again = fit_style("a", *pairs_a_, *basis_);
  EXPECT_EQ(again.w_coeff, a_->w_coeff);
  EXPECT_EQ(again.w_ccm, a_->w_ccm);
  auto reversed = *pairs_a_;
  std::reverse(reversed.begin(), reversed.end());
  const auto r = fit_style("a", reversed, *basis_);
  for (std::size_t i = 0; i < r.w_coeff.rows(); ++i) {
    for (std::size_t j = 0; j < r.w_coeff.cols(); ++j)
      EXPECT_NEAR(r.w_coeff(i, j), a_->w_coeff(i, j), 1e-6 * (1.0 + std::abs(a_->w_coeff(i, j))));
    for (std::size_t j = 0; j < kCcmParams; ++j)
      EXPECT_NEAR(r.w_ccm(i, j), a_->w_ccm(i, j), 1e-6 * (1.0 + std::abs(a_->w_ccm(i, j))));
  }
}

// --- predict / enhance_with_style ----------------------------------------------

TEST_F(StyleFixture, PredictionsAreFeasible) {
  synth::Rng rng(47);
  for (int i = 0; i < 10; ++i) {
    const auto img = testing::random_image8(rng, 24, 24);
    for (const auto* prof : {a_, b_, id_}) {
      const auto p = predict(*prof, img);
      EXPECT_TRUE(p.tf.is_feasible());
      for (int r = 0; r < 3; ++r) EXPECT_NEAR(p.ccm.row_sum(r), 1.0, 1e-12);
    }
  }
}

TEST_F(StyleFixture, IdentityStyleIsNearIdentity) {
  synth::Rng rng(48);
  for (int i = 0; i < 5; ++i) {
    const auto img = synth::random_image(rng, {64, 64});
    EXPECT_GE(psnr(enhance_with_style(img, *id_), img), 40.0);
  }
}

TEST_F(StyleFixture, EnhanceIsDeterministic) {
  EXPECT_EQ(enhance_with_style(*probe_, *a_), enhance_with_style(*probe_, *a_));
}

TEST(EnhanceWithStyle, IdentityStyleIsExactWhenBasisSpansIdentity) {
  synth::Rng rng(54);
  CurveCorpus corpus;
  corpus.add(ToneCurve::identity());
  for (int i = 0; i < 5; ++i) corpus.add(synth::random_tone_curve(rng));
  const auto basis = std::make_shared<const EigenBasis>(build_basis(corpus, 6));
  const auto prof = identity_style("id", basis);
  for (int i = 0; i < 5; ++i) {
    const auto img = testing::random_image8(rng, 32, 32);
    EXPECT_EQ(enhance_with_style(img, prof), img);
  }
  EXPECT_EQ(predict(prof, Image8(2, 2)).ccm, ColorMatrix::identity());
}

TEST(EnhanceWithStyle, BrighteningStyleBrightens) {
  synth::Rng rng(49);
  std::vector<TrainingPair> pairs;
  for (int i = 0; i < 12; ++i) {
    auto in = synth::random_image(rng, {48, 48});
    auto gt = gamma_bt709(in, GammaDirection::kEncode);
    pairs.push_back({std::move(in), std::move(gt)});
  }
  const auto prof = fit_style("bright", pairs, basis_for({pairs}));
  const auto img = synth::random_image(rng, {48, 48});
  EXPECT_GT(mean_intensity(enhance_with_style(img, prof)), mean_intensity(img));
}

// --- interpolate_styles ------------------------------------------------------

TEST_F(StyleFixture, InterpolationEndpointsBitIdentical) {
  EXPECT_EQ(enhance_with_style(*probe_, interpolate_styles(*a_, *b_, 0.0)),
            enhance_with_style(*probe_, *a_));
  EXPECT_EQ(enhance_with_style(*probe_, interpolate_styles(*a_, *b_, 1.0)),
            enhance_with_style(*probe_, *b_));
  const auto p0 = predict_parameters(interpolate_styles(*a_, *b_, 0.0), *probe_);
  const auto pa = predict_parameters(*a_, *probe_);
  EXPECT_EQ(p0.coeffs, pa.coeffs);
  EXPECT_EQ(p0.ccm_offdiag, pa.ccm_offdiag);
}

TEST_F(StyleFixture, InterpolationMidpointIsMean) {
  const auto mid = interpolate_styles(*a_, *b_, 0.5);
  EXPECT_EQ(mid.name, "a~b");
  const auto pm = predict_parameters(mid, *probe_);
  const auto pa = predict_parameters(*a_, *probe_);
  const auto pb = predict_parameters(*b_, *probe_);
  for (std::size_t m = 0; m < pm.coeffs.size(); ++m) {
    const double mean = 0.5 * (pa.coeffs[m] + pb.coeffs[m]);
    EXPECT_NEAR(pm.coeffs[m], mean, 1e-9 * (1.0 + std::abs(mean)));
  }
  for (std::size_t j = 0; j < kCcmParams; ++j)
    EXPECT_NEAR(pm.ccm_offdiag[j], 0.5 * (pa.ccm_offdiag[j] + pb.ccm_offdiag[j]), 1e-12);
}

TEST_F(StyleFixture, InterpolationErrors) {
  try {
    interpolate_styles(*a_, *b_, 1.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
  synth::Rng rng(50);
  const auto other = fit_style("o", identity_pairs(rng, 3), basis_for({identity_pairs(rng, 3)}, 2));
  try {
    interpolate_styles(*a_, other, 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBasisMismatch);
  }
}

// --- chain_styles --------------------------------------------------------------

TEST_F(StyleFixture, SingleChainEqualsEnhance) {
  const std::vector<StyleProfile> one{*a_};
  EXPECT_EQ(chain_styles(*probe_, one), enhance_with_style(*probe_, *a_));
}

TEST_F(StyleFixture, ChainOfIdentitiesIsNearIdentity) {
  const std::vector<StyleProfile> two{*id_, *id_};
  EXPECT_GE(psnr(chain_styles(*probe_, two), *probe_), 35.0);
}

TEST_F(StyleFixture, ChainOrderMatters) {
  const std::vector<StyleProfile> ab{*a_, *b_};
  const std::vector<StyleProfile> ba{*b_, *a_};
  EXPECT_NE(chain_styles(*probe_, ab), chain_styles(*probe_, ba));
}

TEST_F(StyleFixture, EmptyChainRejected) {
  EXPECT_THROW(chain_styles(*probe_, std::span<const StyleProfile>{}), Error);
}

// --- StyleSet and serialization -------------------------------------------------

TEST_F(StyleFixture, StyleSetLookup) {
  StyleSet set(*basis_);
  set.add(*a_);
  set.add(*b_);
  EXPECT_EQ(set.names(), (std::vector<std::string>{"a", "b"}));
  EXPECT_TRUE(set.contains("a"));
  try {
    set.at("nope");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotFound);
  }
  synth::Rng rng(51);
  const auto other = fit_style("o", identity_pairs(rng, 3), basis_for({identity_pairs(rng, 3)}, 2));
  try {
    set.add(other);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBasisMismatch);
  }
}

TEST_F(StyleFixture, BasisJsonRoundTripIsExact) {
  const auto j = Json::parse(to_json(**basis_).dump());
  const auto back = basis_from_json(j);
  EXPECT_EQ(back, **basis_);
  EXPECT_EQ(back.fingerprint(), (*basis_)->fingerprint());
}

TEST_F(StyleFixture, StyleSetJsonRoundTrip) {
  StyleSet set(*basis_);
  set.add(*a_);
  set.add(*b_);
  const auto text = to_json(set).dump();
  const auto back = style_set_from_json(Json::parse(text), *basis_);
  EXPECT_EQ(back.names(), set.names());
  EXPECT_EQ(back.at("a").w_coeff, a_->w_coeff);
  EXPECT_EQ(back.at("b").meta.pairs, b_->meta.pairs);
  EXPECT_EQ(enhance_with_style(*probe_, back.at("b")), enhance_with_style(*probe_, *b_));

  synth::Rng rng(52);
  const auto other = basis_for({identity_pairs(rng, 3)}, 2);
  try {
    style_set_from_json(Json::parse(text), other);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBasisMismatch);
  }
  auto dup = Json::parse(text);
  dup["profiles"].push_back(dup["profiles"][0]);
  EXPECT_THROW(style_set_from_json(dup, *basis_), Error);
}

TEST(Serialize, PsnrInfinityIsNull) {
  EXPECT_TRUE(psnr_json(INFINITY).is_null());
  EXPECT_TRUE(std::isinf(psnr_from_json(Json(nullptr))));
  EXPECT_EQ(psnr_from_json(psnr_json(31.25)), 31.25);
}

TEST(Serialize, CurveAndMatrixRoundTrip) {
  synth::Rng rng(53);
  const auto tf = synth::random_tone_curve(rng);
  const auto k = synth::random_color_matrix(rng);
  EXPECT_EQ(tone_curve_from_json(Json::parse(to_json(tf).dump())), tf);
  EXPECT_EQ(color_matrix_from_json(Json::parse(to_json(k).dump())), k);
  EXPECT_THROW(tone_curve_from_json(Json::array({1, 2, 3})), Error);
}

}  // namespace
}  // namespace tonecc
