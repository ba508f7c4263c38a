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

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>
#include <string>

#include "json.hpp"

#include "tonecc/eigentf.hpp"
#include "tonecc/error.hpp"
#include "tonecc/oracle.hpp"
#include "tonecc/style.hpp"
#include "tonecc/transform.hpp"

namespace tonecc {

using Json = nlohmann::json;

// nlohmann/json prints doubles in shortest round-trip form, so every real
// written here reads back bit-exactly.

/// JSON has no infinity; an infinite PSNR (identical images) is null.
inline Json psnr_json(double v) { return std::isinf(v) ? Json(nullptr) : Json(v); }

inline double psnr_from_json(const Json& j) {
  return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

inline std::string fingerprint_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline Json to_json(const ToneCurve& tc) { return Json(tc.values); }
inline Json to_json(const ColorMatrix& ccm) { return Json(ccm.row_major()); }

inline ToneCurve tone_curve_from_json(const Json& j) {
  if (!j.is_array() || j.size() != kLevels) {
    throw Error(ErrorCode::kMalformedFile, "tone curve must be an array of 256 reals");
  }
  ToneCurve tc;
  for (std::size_t k = 0; k < kLevels; ++k) tc[k] = j[k].get<double>();
  return tc;
}

inline ColorMatrix color_matrix_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 9) {
    throw Error(ErrorCode::kMalformedFile, "color matrix must be an array of 9 reals");
  }
  return ColorMatrix::from_row_major(j.get<std::array<double, 9>>());
}

/// {psnr_in, psnr_mid, psnr_out, tf, ccm, millis}; millis is dropped when
/// `with_meta` is false so repeated runs compare byte-for-byte.
inline Json to_json(const UpperBoundReport& r, bool with_meta = true) {
  Json j;
  j["psnr_in"] = psnr_json(r.psnr_in);
  j["psnr_mid"] = psnr_json(r.psnr_mid);
  j["psnr_out"] = psnr_json(r.psnr_out);
  j["tf"] = to_json(r.tf);
  j["ccm"] = to_json(r.ccm);
  if (with_meta) j["millis"] = r.millis;
  return j;
}

// --- eigen basis: {"m": M, "sigma": [M], "u": [M x 256]} --------------------

inline Json to_json(const EigenBasis& b) {
  Json j;
  j["m"] = b.rank();
  j["sigma"] = b.sigma;
  Json u = Json::array();
  for (const auto& col : b.u) u.push_back(col);
  j["u"] = std::move(u);
  return j;
}

inline EigenBasis basis_from_json(const Json& j) {
  try {
    EigenBasis b;
    const auto m = j.at("m").get<std::size_t>();
    b.sigma = j.at("sigma").get<std::vector<double>>();
    const auto& u = j.at("u");
    if (m == 0 || m > kLevels || b.sigma.size() != m || !u.is_array() || u.size() != m) {
      throw Error(ErrorCode::kMalformedFile, "basis: inconsistent rank");
    }
    for (const auto& col : u) {
      if (!col.is_array() || col.size() != kLevels) {
        throw Error(ErrorCode::kMalformedFile, "basis: columns must have 256 entries");
      }
      b.u.push_back(col.get<RawCurve>());
    }
    return b;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kMalformedFile, std::string("basis: ") + e.what());
  }
}

// --- style set ---------------------------------------------------------------

inline Json matrix_json(const linalg::Matrix& m) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return rows;
}

inline linalg::Matrix matrix_from_json(const Json& j, std::size_t rows, std::size_t cols) {
  if (!j.is_array() || j.size() != rows) {
    throw Error(ErrorCode::kMalformedFile, "weights: expected " + std::to_string(rows) + " rows");
  }
  linalg::Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) {
      throw Error(ErrorCode::kMalformedFile,
                  "weights: expected " + std::to_string(cols) + " columns");
    }
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

inline Json to_json(const StyleProfile& p) {
  Json j;
  j["name"] = p.name;
  j["basis_id"] = fingerprint_hex(p.basis_id());
  j["w_coeff"] = matrix_json(p.w_coeff);
  j["w_ccm"] = matrix_json(p.w_ccm);
  j["meta"] = {{"pairs", p.meta.pairs}, {"ridge", p.meta.ridge}, {"fit_rmse", p.meta.fit_rmse}};
  return j;
}

inline StyleProfile profile_from_json(const Json& j, std::shared_ptr<const EigenBasis> basis) {
  try {
    StyleProfile p;
    p.name = j.at("name").get<std::string>();
    if (j.at("basis_id").get<std::string>() != fingerprint_hex(basis->fingerprint())) {
      throw Error(ErrorCode::kBasisMismatch,
                  "profile '" + p.name + "' references a different basis");
    }
    p.basis = std::move(basis);
    p.w_coeff = matrix_from_json(j.at("w_coeff"), kFeatureCount + 1, p.basis->rank());
    p.w_ccm = matrix_from_json(j.at("w_ccm"), kFeatureCount + 1, kCcmParams);
    const auto& meta = j.at("meta");
    p.meta = {meta.at("pairs").get<std::size_t>(), meta.at("ridge").get<double>(),
              meta.at("fit_rmse").get<double>()};
    return p;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kMalformedFile, std::string("style profile: ") + e.what());
  }
}

/// {"basis_id": hex, "profiles": [...]}, profiles sorted by name.
inline Json to_json(const StyleSet& set) {
  Json j;
  j["basis_id"] = fingerprint_hex(set.basis()->fingerprint());
  Json profiles = Json::array();
  for (const auto& [name, p] : set.profiles()) profiles.push_back(to_json(p));
  j["profiles"] = std::move(profiles);
  return j;
}

inline StyleSet style_set_from_json(const Json& j, std::shared_ptr<const EigenBasis> basis) {
  try {
    if (j.at("basis_id").get<std::string>() != fingerprint_hex(basis->fingerprint())) {
      throw Error(ErrorCode::kBasisMismatch, "style set was fitted against a different basis");
    }
    StyleSet set(basis);
    for (const auto& pj : j.at("profiles")) {
      auto p = profile_from_json(pj, basis);
      if (set.contains(p.name)) {
        throw Error(ErrorCode::kMalformedFile, "duplicate style name '" + p.name + "'");
      }
      set.add(std::move(p));
    }
    return set;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kMalformedFile, std::string("style set: ") + e.what());
  }
}

// --- files ------------------------------------------------------------------

inline std::string read_text(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::kMissingFile, "no such file: " + path.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot create " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIoFailure, "write failed: " + path.string());
}

inline Json read_json(const std::filesystem::path& path) {
  const auto text = read_text(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kMalformedFile, path.string() + ": " + e.what());
  }
}

inline std::shared_ptr<const EigenBasis> load_basis(const std::filesystem::path& path) {
  return std::make_shared<const EigenBasis>(basis_from_json(read_json(path)));
}

inline StyleSet load_style_set(const std::filesystem::path& path,
                               std::shared_ptr<const EigenBasis> basis) {
  return style_set_from_json(read_json(path), std::move(basis));
}

}  // namespace tonecc
