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

#include <png.h>

#include <cstring>
#include <filesystem>
#include <string>

#include "support/brute_force.hpp"
#include "tonecc/io.hpp"

namespace tonecc {
namespace {

namespace fs = std::filesystem;

class IoTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("tonecc_io_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
            "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  ErrorCode decode_error(const std::vector<std::uint8_t>& bytes) {
    try {
      decode_image(bytes);
    } catch (const Error& e) {
      return e.code();
    }
    ADD_FAILURE() << "expected an error";
    return ErrorCode::kInvalidArgument;
  }

  fs::path dir_;
};

std::vector<std::uint8_t> bytes_of(const std::string& s) { return {s.begin(), s.end()}; }

TEST_F(IoTest, PpmRoundTrip) {
  const Image8 img(2, 2, {{1, 2, 3}, {255, 0, 128}, {9, 9, 9}, {0, 0, 0}});
  write_image(img, dir_ / "a.ppm");
  EXPECT_EQ(read_image(dir_ / "a.ppm"), img);
}

TEST_F(IoTest, HandBuiltPpmFixture) {
  auto bytes = bytes_of("P6\n2 1\n255\n");
  for (std::uint8_t b : {10, 20, 30, 40, 50, 60}) bytes.push_back(b);
  const auto img = decode_image(bytes);
  ASSERT_EQ(img.width(), 2u);
  ASSERT_EQ(img.height(), 1u);
  EXPECT_EQ(img[0], (Rgb8{10, 20, 30}));
  EXPECT_EQ(img[1], (Rgb8{40, 50, 60}));
}

TEST_F(IoTest, PpmHeaderComments) {
  auto bytes = bytes_of("P6 # made by hand\n1 # width\n1\n255\n");
  for (std::uint8_t b : {7, 8, 9}) bytes.push_back(b);
  EXPECT_EQ(decode_image(bytes)[0], (Rgb8{7, 8, 9}));
}

TEST_F(IoTest, PpmErrors) {
  auto wide = bytes_of("P6\n1 1\n65535\n");
  wide.resize(wide.size() + 6, 0);
  EXPECT_EQ(decode_error(wide), ErrorCode::kUnsupportedDepth);
  EXPECT_EQ(decode_error(bytes_of("P6\n2 2\n255\nabc")), ErrorCode::kMalformedFile);
  EXPECT_EQ(decode_error(bytes_of("P3\n1 1\n255\n1 2 3\n")), ErrorCode::kMalformedFile);
  EXPECT_EQ(decode_error(bytes_of("P6\n0 1\n255\n")), ErrorCode::kMalformedFile);
  EXPECT_EQ(decode_error(bytes_of("hello")), ErrorCode::kMalformedFile);
}

TEST_F(IoTest, MissingFile) {
  try {
    read_image(dir_ / "nope.ppm");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingFile);
  }
}

TEST_F(IoTest, WriteFailureIsIoError) {
  try {
    write_image(Image8(1, 1), dir_ / "no_such_dir" / "x.ppm");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIoFailure);
  }
}

TEST_F(IoTest, RandomImagesRoundTripThroughBothFormats) {
  synth::Rng rng(5);
  for (int i = 0; i < 20; ++i) {
    const auto img = testing::random_image8(rng, 1 + rng.next() % 40, 1 + rng.next() % 40);
    write_image(img, dir_ / "r.ppm");
    write_image(img, dir_ / "r.png");
    EXPECT_EQ(read_image(dir_ / "r.ppm"), img);
    EXPECT_EQ(read_image(dir_ / "r.png"), img);
  }
}

std::vector<std::uint8_t> png_with_format(png_uint_32 format) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = 2;
  image.height = 2;
  image.format = format;
  std::vector<std::uint8_t> raw(PNG_IMAGE_SIZE(image), 0x7f);
  png_alloc_size_t size = 0;
  png_image_write_to_memory(&image, nullptr, &size, 0, raw.data(), 0, nullptr);
  std::vector<std::uint8_t> out(size);
  png_image_write_to_memory(&image, out.data(), &size, 0, raw.data(), 0, nullptr);
  out.resize(size);
  return out;
}

TEST_F(IoTest, PngAlphaRejected) {
  EXPECT_EQ(decode_error(png_with_format(PNG_FORMAT_RGBA)), ErrorCode::kUnsupportedFormat);
}

TEST_F(IoTest, Png16BitRejected) {
  EXPECT_EQ(decode_error(png_with_format(PNG_FORMAT_LINEAR_RGB)),
            ErrorCode::kUnsupportedDepth);
}

TEST_F(IoTest, PngGrayIsExpanded) {
  const auto img = decode_image(png_with_format(PNG_FORMAT_GRAY));
  ASSERT_EQ(img.size(), 4u);
  EXPECT_EQ(img[0].r, img[0].g);
  EXPECT_EQ(img[0].g, img[0].b);
}

TEST_F(IoTest, CorruptPng) {
  auto bytes = encode_png(Image8(3, 3, Rgb8{1, 2, 3}));
  bytes.resize(bytes.size() / 2);
  EXPECT_EQ(decode_error(bytes), ErrorCode::kMalformedFile);
}

}  // namespace
}  // namespace tonecc
