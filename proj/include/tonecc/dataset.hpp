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
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "tonecc/error.hpp"
#include "tonecc/io.hpp"
#include "tonecc/oracle.hpp"
#include "tonecc/serialize.hpp"
#include "tonecc/style.hpp"

namespace tonecc {

struct PairPaths {
  std::filesystem::path input;
  std::filesystem::path gt;
};

struct PairedDataset {
  std::string name;
  std::vector<PairPaths> pairs;
};

namespace detail {

inline bool is_image_file(const std::filesystem::path& p) {
  auto ext = p.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext == ".ppm" || ext == ".png";
}

// Every pair must decode and agree in size.
inline void validate_pairs(PairedDataset& ds) {
  if (ds.pairs.empty()) {
    throw Error(ErrorCode::kEmptyDataset, "dataset '" + ds.name + "' has no pairs");
  }
  std::sort(ds.pairs.begin(), ds.pairs.end(),
            [](const PairPaths& a, const PairPaths& b) { return a.input < b.input; });
  for (const auto& p : ds.pairs) {
    for (const auto* path : {&p.input, &p.gt}) {
      if (!std::filesystem::exists(*path)) {
        throw Error(ErrorCode::kMissingFile, "missing file: " + path->string());
      }
    }
    const auto a = read_image(p.input);
    const auto b = read_image(p.gt);
    if (a.width() != b.width() || a.height() != b.height()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "size mismatch between " + p.input.string() + " and " + p.gt.string());
    }
  }
}

}  // namespace detail

/// Pairs files of the same name in two directories.
inline PairedDataset load_dataset(const std::filesystem::path& input_dir,
                                  const std::filesystem::path& gt_dir) {
  for (const auto* dir : {&input_dir, &gt_dir}) {
    if (!std::filesystem::is_directory(*dir)) {
      throw Error(ErrorCode::kMissingFile, "not a directory: " + dir->string());
    }
  }
  PairedDataset ds;
  ds.name = input_dir.parent_path().filename().string();
  if (ds.name.empty()) ds.name = input_dir.filename().string();
  for (const auto& entry : std::filesystem::directory_iterator(input_dir)) {
    if (!entry.is_regular_file() || !detail::is_image_file(entry.path())) continue;
    const auto gt = gt_dir / entry.path().filename();
    if (!std::filesystem::exists(gt)) {
      throw Error(ErrorCode::kMissingFile, "missing ground truth: " + gt.string());
    }
    ds.pairs.push_back({entry.path(), gt});
  }
  detail::validate_pairs(ds);
  return ds;
}

/// JSON-lines manifest of {"input": path, "gt": path}; relative paths are
/// resolved against the manifest's directory.
inline PairedDataset load_manifest(const std::filesystem::path& manifest) {
  const auto text = read_text(manifest);
  const auto base = manifest.parent_path();
  PairedDataset ds;
  ds.name = manifest.stem().string();
  std::istringstream lines(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = Json::parse(line);
      auto resolve = [&](const std::string& s) {
        std::filesystem::path p(s);
        return p.is_relative() ? base / p : p;
      };
      ds.pairs.push_back({resolve(j.at("input").get<std::string>()),
                          resolve(j.at("gt").get<std::string>())});
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::kMalformedFile,
                  manifest.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  detail::validate_pairs(ds);
  return ds;
}

/// A manifest file, or a directory holding input/ and gt/.
inline PairedDataset load_dataset(const std::filesystem::path& location) {
  if (std::filesystem::is_directory(location)) {
    auto ds = load_dataset(location / "input", location / "gt");
    ds.name = location.filename().string();
    return ds;
  }
  return load_manifest(location);
}

// ---------------------------------------------------------------------------

struct EvalEntry {
  std::string name;
  double psnr_in = 0.0;   // identity baseline
  double psnr_mid = std::numeric_limits<double>::quiet_NaN();
  double psnr_out = 0.0;
};

struct PsnrSummary {
  double mean = std::numeric_limits<double>::quiet_NaN();
  double min = std::numeric_limits<double>::quiet_NaN();
  double max = std::numeric_limits<double>::quiet_NaN();
  std::size_t finite = 0;
  std::size_t infinite = 0;
};

/// Infinite values (identical pairs) are counted but left out of the mean,
/// min and max.
inline PsnrSummary summarize(const std::vector<double>& values) {
  PsnrSummary s;
  double sum = 0.0;
  for (double v : values) {
    if (std::isinf(v)) {
      ++s.infinite;
      continue;
    }
    sum += v;
    s.min = s.finite == 0 ? v : std::min(s.min, v);
    s.max = s.finite == 0 ? v : std::max(s.max, v);
    ++s.finite;
  }
  if (s.finite > 0) s.mean = sum / double(s.finite);
  return s;
}

struct EvalReport {
  std::string dataset;
  std::string kind;   // "upper" or "style"
  std::string style;  // profile name for style runs
  std::vector<EvalEntry> entries;
  double millis = 0.0;

  PsnrSummary out_summary() const {
    std::vector<double> v;
    for (const auto& e : entries) v.push_back(e.psnr_out);
    return summarize(v);
  }
  PsnrSummary in_summary() const {
    std::vector<double> v;
    for (const auto& e : entries) v.push_back(e.psnr_in);
    return summarize(v);
  }
};

/// Runs fn(i) for i in [0, n) on a small thread pool. fn writes only its
/// own slot, so results do not depend on scheduling.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn, unsigned threads = 0) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

inline EvalReport eval_upper_bound(const PairedDataset& ds, unsigned threads = 0) {
  if (ds.pairs.empty()) throw Error(ErrorCode::kEmptyDataset, "empty dataset");
  const auto start = std::chrono::steady_clock::now();
  EvalReport rep;
  rep.dataset = ds.name;
  rep.kind = "upper";
  rep.entries.resize(ds.pairs.size());
  parallel_for(
      ds.pairs.size(),
      [&](std::size_t i) {
        const auto in = read_image(ds.pairs[i].input);
        const auto gt = read_image(ds.pairs[i].gt);
        const auto r = upper_bound(in, gt);
        rep.entries[i] = {ds.pairs[i].input.filename().string(), r.psnr_in, r.psnr_mid,
                          r.psnr_out};
      },
      threads);
  rep.millis = std::chrono::duration<double, std::milli>(
                   std::chrono::steady_clock::now() - start)
                   .count();
  return rep;
}

inline EvalReport eval_style(const PairedDataset& ds, const StyleProfile& profile,
                             unsigned threads = 0) {
  if (ds.pairs.empty()) throw Error(ErrorCode::kEmptyDataset, "empty dataset");
  const auto start = std::chrono::steady_clock::now();
  EvalReport rep;
  rep.dataset = ds.name;
  rep.kind = "style";
  rep.style = profile.name;
  rep.entries.resize(ds.pairs.size());
  parallel_for(
      ds.pairs.size(),
      [&](std::size_t i) {
        const auto in = read_image(ds.pairs[i].input);
        const auto gt = read_image(ds.pairs[i].gt);
        EvalEntry e;
        e.name = ds.pairs[i].input.filename().string();
        e.psnr_in = psnr(in, gt);
        e.psnr_out = psnr(enhance_with_style(in, profile), gt);
        rep.entries[i] = e;
      },
      threads);
  rep.millis = std::chrono::duration<double, std::milli>(
                   std::chrono::steady_clock::now() - start)
                   .count();
  return rep;
}

inline Json to_json(const PsnrSummary& s) {
  auto nan_null = [](double v) { return std::isnan(v) ? Json(nullptr) : Json(v); };
  return {{"mean", nan_null(s.mean)},
          {"min", nan_null(s.min)},
          {"max", nan_null(s.max)},
          {"finite", s.finite},
          {"infinite", s.infinite}};
}

inline Json to_json(const EvalReport& rep, bool with_meta = true) {
  Json j;
  j["dataset"] = rep.dataset;
  j["kind"] = rep.kind;
  if (!rep.style.empty()) j["style"] = rep.style;
  Json pairs = Json::array();
  for (const auto& e : rep.entries) {
    Json p;
    p["name"] = e.name;
    p["psnr_in"] = psnr_json(e.psnr_in);
    if (!std::isnan(e.psnr_mid)) p["psnr_mid"] = psnr_json(e.psnr_mid);
    p["psnr_out"] = psnr_json(e.psnr_out);
    pairs.push_back(std::move(p));
  }
  j["pairs"] = std::move(pairs);
  j["summary"] = {{"out", to_json(rep.out_summary())}, {"in", to_json(rep.in_summary())}};
  if (with_meta) j["millis"] = rep.millis;
  return j;
}

inline std::string format_psnr(double v) {
  if (std::isinf(v)) return "inf";
  if (std::isnan(v)) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string to_table(const EvalReport& rep) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%-32s %10s %10s %10s\n", "image", "in", "mid", "out");
  out += line;
  for (const auto& e : rep.entries) {
    std::snprintf(line, sizeof line, "%-32s %10s %10s %10s\n", e.name.c_str(),
                  format_psnr(e.psnr_in).c_str(), format_psnr(e.psnr_mid).c_str(),
                  format_psnr(e.psnr_out).c_str());
    out += line;
  }
  const auto s = rep.out_summary();
  const auto b = rep.in_summary();
  std::snprintf(line, sizeof line,
                "mean out %s dB (min %s, max %s, %zu infinite) | baseline %s dB\n",
                format_psnr(s.mean).c_str(), format_psnr(s.min).c_str(),
                format_psnr(s.max).c_str(), s.infinite, format_psnr(b.mean).c_str());
  out += line;
  return out;
}

}  // namespace tonecc
