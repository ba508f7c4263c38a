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
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "tonecc/error.hpp"
#include "tonecc/image.hpp"

namespace tonecc {

inline constexpr std::size_t kLevels = 256;

/// 256 curve values indexed by input intensity. Curves produced by the
/// solvers and by monotonize() are nondecreasing inside [0,255]; a raw
/// reconstruction may not be, and must go through monotonize() first.
struct ToneCurve {
  std::array<double, kLevels> values{};

  static ToneCurve identity() {
    ToneCurve tc;
    for (std::size_t k = 0; k < kLevels; ++k) tc.values[k] = double(k);
    return tc;
  }

  double operator[](std::size_t k) const { return values[k]; }
  double& operator[](std::size_t k) { return values[k]; }

  bool is_feasible() const {
    for (std::size_t k = 0; k < kLevels; ++k) {
      if (!(values[k] >= 0.0 && values[k] <= 255.0)) return false;
      if (k > 0 && values[k] < values[k - 1]) return false;
    }
    return true;
  }

  friend bool operator==(const ToneCurve&, const ToneCurve&) = default;
};

/// 3x3 color correction matrix. Rows sum to one, so grays stay gray; only
/// the six off-diagonal entries are free.
struct ColorMatrix {
  std::array<std::array<double, 3>, 3> m{};

  static ColorMatrix identity() {
    ColorMatrix c;
    for (int i = 0; i < 3; ++i) c.m[i][i] = 1.0;
    return c;
  }

  /// Off-diagonals in row-major order (k12, k13, k21, k23, k31, k32); the
  /// diagonal is filled in so each row sums to one.
  static ColorMatrix from_off_diagonal(const std::array<double, 6>& p) {
    ColorMatrix c;
    std::size_t n = 0;
    for (int i = 0; i < 3; ++i) {
      double off = 0.0;
      for (int j = 0; j < 3; ++j) {
        if (i == j) continue;
        c.m[i][j] = p[n++];
        off += c.m[i][j];
      }
      c.m[i][i] = 1.0 - off;
    }
    return c;
  }

  std::array<double, 6> off_diagonal() const {
    std::array<double, 6> p{};
    std::size_t n = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (i != j) p[n++] = m[i][j];
    return p;
  }

  std::array<double, 9> row_major() const {
    return {m[0][0], m[0][1], m[0][2], m[1][0], m[1][1],
            m[1][2], m[2][0], m[2][1], m[2][2]};
  }

  static ColorMatrix from_row_major(const std::array<double, 9>& v) {
    ColorMatrix c;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) c.m[i][j] = v[3 * i + j];
    return c;
  }

  double row_sum(int i) const { return m[i][0] + m[i][1] + m[i][2]; }

  RgbF operator*(const RgbF& p) const {
    return {m[0][0] * p.r + m[0][1] * p.g + m[0][2] * p.b,
            m[1][0] * p.r + m[1][1] * p.g + m[1][2] * p.b,
            m[2][0] * p.r + m[2][1] * p.g + m[2][2] * p.b};
  }

  friend bool operator==(const ColorMatrix&, const ColorMatrix&) = default;
};

/// Forward sweep: any value below its left neighbour is raised to it, then
/// everything is clamped to [0,255].
inline ToneCurve monotonize(const std::array<double, kLevels>& raw) {
  ToneCurve tc;
  tc.values = raw;
  for (std::size_t k = 1; k < kLevels; ++k) {
    if (tc.values[k] < tc.values[k - 1]) tc.values[k] = tc.values[k - 1];
  }
  for (auto& v : tc.values) v = std::clamp(v, 0.0, 255.0);
  return tc;
}

inline ToneCurve monotonize(const ToneCurve& tc) { return monotonize(tc.values); }

/// Intensity enhancement with channel-ratio scaling. The ratio is undefined
/// at intensity 0; those pixels are offset by x0 instead, so pure black maps
/// to (x0, x0, x0) and the identity curve leaves (0,0,1) alone. No clamping.
inline ImageF apply_tone_curve(const Image8& img, const ToneCurve& tf) {
  ImageF out(img.width(), img.height());
  for (std::size_t i = 0; i < img.size(); ++i) {
    const Rgb8 p = img[i];
    const int y = intensity_of(p);
    if (y == 0) {
      out[i] = {tf[0] + p.r, tf[0] + p.g, tf[0] + p.b};
    } else {
      const double ratio = tf[std::size_t(y)] / double(y);
      out[i] = {ratio * p.r, ratio * p.g, ratio * p.b};
    }
  }
  return out;
}

inline ImageF apply_color_matrix(const ImageF& img, const ColorMatrix& ccm) {
  ImageF out(img.width(), img.height());
  for (std::size_t i = 0; i < img.size(); ++i) out[i] = ccm * img[i];
  return out;
}

inline Image8 quantize(const ImageF& img) {
  Image8 out(img.width(), img.height());
  for (std::size_t i = 0; i < img.size(); ++i) {
    out[i] = {quantize_channel(img[i].r), quantize_channel(img[i].g),
              quantize_channel(img[i].b)};
  }
  return out;
}

inline Image8 enhance(const Image8& img, const ToneCurve& tf, const ColorMatrix& ccm) {
  return quantize(apply_color_matrix(apply_tone_curve(img, monotonize(tf)), ccm));
}

// Text forms: 256 whitespace-separated reals for a curve, 9 row-major
// reals for a matrix. 17 significant digits round-trip doubles exactly.

inline std::string format_reals(const double* v, std::size_t n, std::size_t per_line) {
  std::ostringstream os;
  os << std::setprecision(17);
  for (std::size_t i = 0; i < n; ++i) {
    os << v[i];
    os << ((i + 1) % per_line == 0 || i + 1 == n ? '\n' : ' ');
  }
  return os.str();
}

inline std::vector<double> parse_reals(const std::string& text) {
  std::istringstream is(text);
  std::vector<double> out;
  std::string token;
  while (is >> token) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size() || !std::isfinite(v)) {
      throw Error(ErrorCode::kMalformedFile, "not a finite real: '" + token + "'");
    }
    out.push_back(v);
  }
  return out;
}

inline std::string to_text(const ToneCurve& tc) {
  return format_reals(tc.values.data(), kLevels, 8);
}

inline std::string to_text(const ColorMatrix& ccm) {
  const auto v = ccm.row_major();
  return format_reals(v.data(), 9, 3);
}

inline ToneCurve tone_curve_from_text(const std::string& text) {
  const auto v = parse_reals(text);
  if (v.size() != kLevels) {
    throw Error(ErrorCode::kMalformedFile,
                "tone curve needs 256 values, got " + std::to_string(v.size()));
  }
  ToneCurve tc;
  std::copy(v.begin(), v.end(), tc.values.begin());
  return tc;
}

inline ColorMatrix color_matrix_from_text(const std::string& text) {
  const auto v = parse_reals(text);
  if (v.size() != 9) {
    throw Error(ErrorCode::kMalformedFile,
                "color matrix needs 9 values, got " + std::to_string(v.size()));
  }
  std::array<double, 9> a{};
  std::copy(v.begin(), v.end(), a.begin());
  return ColorMatrix::from_row_major(a);
}

}  // namespace tonecc
