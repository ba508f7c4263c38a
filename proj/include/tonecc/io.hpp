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

#include <png.h>

#include <cctype>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <vector>

#include "tonecc/error.hpp"
#include "tonecc/image.hpp"

namespace tonecc {

namespace detail {

inline std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::kIoFailure, "read failed: " + path.string());
  return bytes;
}

inline void write_bytes(const std::filesystem::path& path,
                        std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIoFailure, "write failed: " + path.string());
}

// Reads one whitespace-delimited header token, skipping '#' comments.
class PnmHeaderReader {
 public:
  explicit PnmHeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  long number() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
      throw Error(ErrorCode::kMalformedFile, "PPM header: expected a number");
    }
    long v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_++] - '0');
      if (v > 1'000'000'000L) {
        throw Error(ErrorCode::kMalformedFile, "PPM header: number too large");
      }
    }
    return v;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t raster_offset() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw Error(ErrorCode::kMalformedFile, "PPM header: missing raster separator");
    }
    return pos_ + 1;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 2;
};

}  // namespace detail

inline Image8 decode_ppm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '6') {
    throw Error(ErrorCode::kMalformedFile, "not a binary PPM (P6) stream");
  }
  detail::PnmHeaderReader header(bytes);
  const long width = header.number();
  const long height = header.number();
  const long maxval = header.number();
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::kMalformedFile, "PPM dimensions must be positive");
  }
  if (maxval <= 0 || maxval > 65535) {
    throw Error(ErrorCode::kMalformedFile, "PPM maxval out of range");
  }
  if (maxval != 255) {
    throw Error(ErrorCode::kUnsupportedDepth,
                "PPM maxval " + std::to_string(maxval) + " unsupported (need 255)");
  }
  const std::size_t offset = header.raster_offset();
  const std::size_t count = std::size_t(width) * std::size_t(height);
  if (bytes.size() - offset < count * 3) {
    throw Error(ErrorCode::kMalformedFile, "PPM raster truncated");
  }
  std::vector<Rgb8> pixels(count);
  const std::uint8_t* src = bytes.data() + offset;
  for (std::size_t i = 0; i < count; ++i, src += 3) pixels[i] = {src[0], src[1], src[2]};
  return Image8(std::size_t(width), std::size_t(height), std::move(pixels));
}

inline std::vector<std::uint8_t> encode_ppm(const Image8& img) {
  const std::string header = "P6\n" + std::to_string(img.width()) + " " +
                             std::to_string(img.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(header.size() + img.size() * 3);
  for (const auto& p : img) {
    out.push_back(p.r);
    out.push_back(p.g);
    out.push_back(p.b);
  }
  return out;
}

inline Image8 decode_png(std::span<const std::uint8_t> bytes) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw Error(ErrorCode::kMalformedFile, "PNG decode: " + msg);
  }
  if (image.format & PNG_FORMAT_FLAG_ALPHA) {
    png_image_free(&image);
    throw Error(ErrorCode::kUnsupportedFormat, "PNG with alpha channel is not supported");
  }
  if (image.format & PNG_FORMAT_FLAG_LINEAR) {
    png_image_free(&image);
    throw Error(ErrorCode::kUnsupportedDepth, "16-bit PNG is not supported");
  }
  image.format = PNG_FORMAT_RGB;
  const std::size_t width = image.width;
  const std::size_t height = image.height;
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw Error(ErrorCode::kMalformedFile, "PNG decode: " + msg);
  }
  std::vector<Rgb8> pixels(width * height);
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    pixels[i] = {buffer[3 * i], buffer[3 * i + 1], buffer[3 * i + 2]};
  }
  return Image8(width, height, std::move(pixels));
}

inline std::vector<std::uint8_t> encode_png(const Image8& img) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  image.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> raw;
  raw.reserve(img.size() * 3);
  for (const auto& p : img) {
    raw.push_back(p.r);
    raw.push_back(p.g);
    raw.push_back(p.b);
  }
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, raw.data(), 0, nullptr)) {
    throw Error(ErrorCode::kIoFailure, std::string("PNG encode: ") + image.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, raw.data(), 0, nullptr)) {
    throw Error(ErrorCode::kIoFailure, std::string("PNG encode: ") + image.message);
  }
  out.resize(size);
  return out;
}

/// Sniffs the magic bytes; PPM (P6) and PNG are recognised.
inline Image8 decode_image(std::span<const std::uint8_t> bytes) {
  static constexpr std::uint8_t kPngMagic[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (bytes.size() >= 8 && std::memcmp(bytes.data(), kPngMagic, 8) == 0) {
    return decode_png(bytes);
  }
  if (bytes.size() >= 2 && bytes[0] == 'P') return decode_ppm(bytes);
  throw Error(ErrorCode::kMalformedFile, "unrecognised image format");
}

inline Image8 read_image(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::kMissingFile, "no such file: " + path.string());
  }
  const auto bytes = detail::read_bytes(path);
  try {
    return decode_image(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

/// Format follows the extension: ".png" writes PNG, anything else PPM.
inline void write_image(const Image8& img, const std::filesystem::path& path) {
  auto ext = path.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  const auto bytes = ext == ".png" ? encode_png(img) : encode_ppm(img);
  detail::write_bytes(path, bytes);
}

}  // namespace tonecc
