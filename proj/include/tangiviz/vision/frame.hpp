// Copyright 2026 The Tangiviz Authors
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

#ifndef TANGIVIZ_VISION_FRAME_HPP_
#define TANGIVIZ_VISION_FRAME_HPP_

#include <cstdint>
#include <utility>
#include <vector>

#include "tangiviz/error.hpp"
#include "tangiviz/image.hpp"

namespace tangiviz::vision {

inline constexpr int kMinFrameSide = 16;

/// Grayscale camera frame with mirror-parity correction already applied.
class Frame {
 public:
  explicit Frame(Image gray, bool flip_h = false, bool flip_v = false)
      : image_(std::move(gray)), flip_h_(flip_h), flip_v_(flip_v) {
    if (image_.channels() != 1) throw Error(ErrorCode::UnsupportedImage, "frame must be grayscale");
    if (image_.width() < kMinFrameSide || image_.height() < kMinFrameSide) {
      throw Error(ErrorCode::UnsupportedImage, "frame must be at least 16x16");
    }
  }

  int width() const noexcept { return image_.width(); }
  int height() const noexcept { return image_.height(); }
  std::uint8_t at(int x, int y) const { return image_.at(x, y); }
  const Image& image() const noexcept { return image_; }
  bool flip_h() const noexcept { return flip_h_; }
  bool flip_v() const noexcept { return flip_v_; }

 private:
  Image image_;
  bool flip_h_ = false;
  bool flip_v_ = false;
};

/// Foreground (1) marks dark pixels for marker detection.
struct BinaryImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  BinaryImage() = default;
  BinaryImage(int w, int h) : width(w), height(h), bits(static_cast<std::size_t>(w) * h, 0) {}

  std::uint8_t at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t& at(int x, int y) { return bits[static_cast<std::size_t>(y) * width + x]; }
  bool contains(int x, int y) const noexcept { return x >= 0 && y >= 0 && x < width && y < height; }
};

/// BT.601 luma with integer rounding.
inline std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  return static_cast<std::uint8_t>((299u * r + 587u * g + 114u * b + 500u) / 1000u);
}

inline Image to_gray(const Image& raw) {
  if (raw.channels() == 1) return raw;
  Image gray(raw.width(), raw.height(), 1);
  for (int y = 0; y < raw.height(); ++y) {
    for (int x = 0; x < raw.width(); ++x) gray.at(x, y) = luma(raw.at(x, y, 0), raw.at(x, y, 1), raw.at(x, y, 2));
  }
  return gray;
}

inline Image flipped(const Image& src, bool flip_h, bool flip_v) {
  if (!flip_h && !flip_v) return src;
  Image out(src.width(), src.height(), src.channels());
  for (int y = 0; y < src.height(); ++y) {
    const int sy = flip_v ? src.height() - 1 - y : y;
    for (int x = 0; x < src.width(); ++x) {
      const int sx = flip_h ? src.width() - 1 - x : x;
      for (int c = 0; c < src.channels(); ++c) out.at(x, y, c) = src.at(sx, sy, c);
    }
  }
  return out;
}

inline Frame preprocess(const Image& raw, bool flip_h = false, bool flip_v = false) {
  if (raw.channels() != 1 && raw.channels() != 3) {
    throw Error(ErrorCode::UnsupportedImage, "expected 8-bit gray or RGB");
  }
  return Frame(flipped(to_gray(raw), flip_h, flip_v), flip_h, flip_v);
}

}  // namespace tangiviz::vision

#endif  // TANGIVIZ_VISION_FRAME_HPP_
