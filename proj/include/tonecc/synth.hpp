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
#include <numbers>
#include <random>

#include "tonecc/image.hpp"
#include "tonecc/transform.hpp"

namespace tonecc::synth {

// Synthetic paired data: random smooth color images, and random feasible
// (tone curve, color matrix) "styles" that turn inputs into ground truth.
// Uniform variates are derived from raw mt19937_64 output so that a seed
// reproduces the same data on every platform.

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

struct ImageOptions {
  std::size_t width = 128;
  std::size_t height = 128;
  double max_chroma = 30.0;  // peak channel offset from the pixel's gray level
  double noise = 2.0;        // uniform per-channel jitter amplitude
};

/// Smooth random image. Luminance is a normalised sum of random plane
/// waves plus a gradient, stretched to a random [lo, hi] range; chroma is
/// a zero-sum channel offset that shrinks near black and white.
inline Image8 random_image(Rng& rng, const ImageOptions& opt = {}) {
  constexpr int kWaves = 4;
  struct Wave {
    double fx, fy, phase, amp;
  };
  auto make_waves = [&] {
    std::array<Wave, kWaves> w{};
    for (auto& v : w) {
      v = {rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0),
           rng.uniform(0.0, 2.0 * std::numbers::pi), rng.uniform(0.3, 1.0)};
    }
    return w;
  };
  const auto lum = make_waves();
  const auto chroma_a = make_waves();
  const auto chroma_b = make_waves();
  const double gx = rng.uniform(-1.0, 1.0);
  const double gy = rng.uniform(-1.0, 1.0);
  const double lo = rng.uniform(0.0, 4.0);
  const double hi = rng.uniform(251.0, 255.0);
  const double amp_a = rng.uniform(0.0, opt.max_chroma);
  const double amp_b = rng.uniform(0.0, opt.max_chroma);

  auto eval = [](const std::array<Wave, kWaves>& w, double u, double v) {
    double s = 0.0, norm = 0.0;
    for (const auto& wv : w) {
      s += wv.amp * std::sin(2.0 * std::numbers::pi * (wv.fx * u + wv.fy * v) + wv.phase);
      norm += wv.amp;
    }
    return s / norm;
  };

  const std::size_t w = opt.width, h = opt.height;
  std::vector<double> field(w * h);
  double fmin = 1e300, fmax = -1e300;
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x) {
      const double u = (x + 0.5) / double(w), v = (y + 0.5) / double(h);
      const double f = eval(lum, u, v) + gx * u + gy * v;
      field[y * w + x] = f;
      fmin = std::min(fmin, f);
      fmax = std::max(fmax, f);
    }
  const double span = fmax > fmin ? fmax - fmin : 1.0;

  Image8 img(w, h);
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x) {
      const double u = (x + 0.5) / double(w), v = (y + 0.5) / double(h);
      const double gray = lo + (hi - lo) * (field[y * w + x] - fmin) / span;
      const double room = std::min(gray, 255.0 - gray) / 127.5;
      const double a = amp_a * room * eval(chroma_a, u, v);
      const double b = amp_b * room * eval(chroma_b, u, v);
      auto jitter = [&] { return opt.noise * rng.uniform(-1.0, 1.0); };
      img(x, y) = {quantize_channel(gray + a + jitter()),
                   quantize_channel(gray - 0.5 * a + b + jitter()),
                   quantize_channel(gray - 0.5 * a - b + jitter())};
    }
  return img;
}

/// Strictly increasing curve: a power law blended with a logistic S-curve,
/// mapped onto a random [black, white] output range.
inline ToneCurve random_tone_curve(Rng& rng) {
  const double gamma = rng.uniform(0.5, 1.6);
  const double blend = rng.uniform(0.0, 0.5);
  const double steep = rng.uniform(4.0, 10.0);
  const double mid = rng.uniform(0.35, 0.65);
  const double black = rng.uniform(0.0, 20.0);
  const double white = rng.uniform(225.0, 255.0);
  auto logistic = [&](double u) { return 1.0 / (1.0 + std::exp(-steep * (u - mid))); };
  const double l0 = logistic(0.0), l1 = logistic(1.0);
  ToneCurve tc;
  for (std::size_t k = 0; k < kLevels; ++k) {
    const double u = double(k) / 255.0;
    const double s = (logistic(u) - l0) / (l1 - l0);
    const double f = (1.0 - blend) * std::pow(u, gamma) + blend * s;
    tc[k] = black + (white - black) * f;
  }
  return tc;
}

/// Random color matrix with unit row sums; off-diagonals in [-spread, spread].
inline ColorMatrix random_color_matrix(Rng& rng, double spread = 0.1) {
  std::array<double, 6> p{};
  for (auto& v : p) v = rng.uniform(-spread, spread);
  return ColorMatrix::from_off_diagonal(p);
}

struct Style {
  ToneCurve tf;
  ColorMatrix ccm;
};

inline Style random_style(Rng& rng) {
  Style s;
  s.tf = random_tone_curve(rng);
  s.ccm = random_color_matrix(rng);
  return s;
}

}  // namespace tonecc::synth
