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
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "tonecc/error.hpp"

namespace tonecc {

struct Rgb8 {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb8&, const Rgb8&) = default;
};

struct RgbF {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;

  friend bool operator==(const RgbF&, const RgbF&) = default;
};

/// Row-major image of pixels. Image8 is the 8-bit I/O unit, ImageF holds
/// unclamped intermediate values.
template <typename Pixel>
class Image {
 public:
  Image() = default;
  Image(std::size_t width, std::size_t height, Pixel fill = {})
      : width_(width), height_(height), pixels_(width * height, fill) {}
  Image(std::size_t width, std::size_t height, std::vector<Pixel> pixels)
      : width_(width), height_(height), pixels_(std::move(pixels)) {
    if (pixels_.size() != width_ * height_) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "pixel count " + std::to_string(pixels_.size()) +
                      " does not match " + std::to_string(width_) + "x" +
                      std::to_string(height_));
    }
  }

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return pixels_.size(); }
  bool empty() const noexcept { return pixels_.empty(); }

  Pixel& operator()(std::size_t x, std::size_t y) { return pixels_[y * width_ + x]; }
  const Pixel& operator()(std::size_t x, std::size_t y) const {
    return pixels_[y * width_ + x];
  }
  Pixel& operator[](std::size_t i) { return pixels_[i]; }
  const Pixel& operator[](std::size_t i) const { return pixels_[i]; }

  std::vector<Pixel>& pixels() noexcept { return pixels_; }
  const std::vector<Pixel>& pixels() const noexcept { return pixels_; }

  auto begin() noexcept { return pixels_.begin(); }
  auto end() noexcept { return pixels_.end(); }
  auto begin() const noexcept { return pixels_.begin(); }
  auto end() const noexcept { return pixels_.end(); }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<Pixel> pixels_;
};

using Image8 = Image<Rgb8>;
using ImageF = Image<RgbF>;

template <typename A, typename B>
void require_same_size(const Image<A>& a, const Image<B>& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "image sizes differ: " + std::to_string(a.width()) + "x" +
                    std::to_string(a.height()) + " vs " +
                    std::to_string(b.width()) + "x" + std::to_string(b.height()));
  }
}

/// Round half away from zero, then clamp to [0,255]. The single float to
/// 8-bit rule used everywhere.
inline std::uint8_t quantize_channel(double v) {
  if (std::isnan(v)) return 0;
  const double r = std::round(v);
  if (r <= 0.0) return 0;
  if (r >= 255.0) return 255;
  return static_cast<std::uint8_t>(r);
}

/// round((r+g+b)/3). The sum is never a half-multiple of 3, so integer
/// (s+1)/3 is exact rounding.
constexpr int intensity_of(Rgb8 p) noexcept {
  const int s = int{p.r} + int{p.g} + int{p.b};
  return (s + 1) / 3;
}

using IntensityVector = std::vector<std::uint8_t>;

inline IntensityVector intensities(const Image8& img) {
  IntensityVector out;
  out.reserve(img.size());
  for (const auto& p : img) out.push_back(static_cast<std::uint8_t>(intensity_of(p)));
  return out;
}

inline ImageF to_float(const Image8& img) {
  ImageF out(img.width(), img.height());
  for (std::size_t i = 0; i < img.size(); ++i) {
    out[i] = {double(img[i].r), double(img[i].g), double(img[i].b)};
  }
  return out;
}

enum class GammaDirection { kEncode, kDecode };

namespace bt709 {
inline constexpr double kThreshold = 0.018;
inline constexpr double kGain = 4.5;
inline constexpr double kExponent = 0.45;
inline constexpr double kScale = 1.099;
inline constexpr double kOffset = 0.099;

inline double encode(double linear) {
  if (linear < kThreshold) return kGain * linear;
  return kScale * std::pow(linear, kExponent) - kOffset;
}

// Inverse of encode; the breakpoint in the encoded domain is gain * threshold.
inline double decode(double v) {
  if (v < kGain * kThreshold) return v / kGain;
  return std::pow((v + kOffset) / kScale, 1.0 / kExponent);
}
}  // namespace bt709

inline Image8 gamma_bt709(const Image8& img, GammaDirection direction) {
  std::array<std::uint8_t, 256> lut{};
  for (int v = 0; v < 256; ++v) {
    const double x = v / 255.0;
    const double y = direction == GammaDirection::kEncode ? bt709::encode(x)
                                                          : bt709::decode(x);
    lut[v] = quantize_channel(y * 255.0);
  }
  Image8 out(img.width(), img.height());
  for (std::size_t i = 0; i < img.size(); ++i) {
    out[i] = {lut[img[i].r], lut[img[i].g], lut[img[i].b]};
  }
  return out;
}

inline double mse(const Image8& a, const Image8& b) {
  require_same_size(a, b);
  if (a.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double dr = double(a[i].r) - b[i].r;
    const double dg = double(a[i].g) - b[i].g;
    const double db = double(a[i].b) - b[i].b;
    acc += dr * dr + dg * dg + db * db;
  }
  return acc / (3.0 * double(a.size()));
}

/// PSNR in dB over all channels; +infinity when the images are identical.
inline double psnr(const Image8& a, const Image8& b) {
  const double m = mse(a, b);
  if (m == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / m);
}

}  // namespace tonecc
