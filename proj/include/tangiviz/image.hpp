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

#ifndef TANGIVIZ_IMAGE_HPP_
#define TANGIVIZ_IMAGE_HPP_

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "tangiviz/error.hpp"

namespace tangiviz {

/// Continuous image coordinates. Pixel (i, j) has its center at (i, j).
struct Point2d {
  double x = 0.0;
  double y = 0.0;

  friend Point2d operator+(Point2d a, Point2d b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2d operator-(Point2d a, Point2d b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2d operator*(double s, Point2d p) { return {s * p.x, s * p.y}; }
  friend bool operator==(const Point2d&, const Point2d&) = default;
};

/// Row-major 8-bit raster with 1 (gray) or 3 (RGB) interleaved channels.
class Image {
 public:
  Image() = default;
  Image(int width, int height, int channels = 1, std::uint8_t fill = 0)
      : width_(width), height_(height), channels_(channels) {
    if (width < 0 || height < 0 || (channels != 1 && channels != 3)) {
      throw Error(ErrorCode::UnsupportedImage, "bad image geometry");
    }
    data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
  }
  Image(int width, int height, int channels, std::vector<std::uint8_t> data)
      : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
    if (width < 0 || height < 0 || (channels != 1 && channels != 3) ||
        data_.size() != static_cast<std::size_t>(width) * height * channels) {
      throw Error(ErrorCode::UnsupportedImage, "pixel buffer does not match geometry");
    }
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  bool empty() const noexcept { return data_.empty(); }
  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  std::uint8_t& at(int x, int y, int c = 0) {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }
  std::uint8_t at(int x, int y, int c = 0) const {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }

  std::span<std::uint8_t> pixels() noexcept { return data_; }
  std::span<const std::uint8_t> pixels() const noexcept { return data_; }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 1;
  std::vector<std::uint8_t> data_;
};

/// Copy of the half-open rectangle [x0, x1) x [y0, y1).
inline Image crop(const Image& src, int x0, int y0, int x1, int y1) {
  if (x0 < 0 || y0 < 0 || x1 > src.width() || y1 > src.height() || x1 < x0 || y1 < y0) {
    throw Error(ErrorCode::OutOfBounds, "crop rectangle outside image");
  }
  Image out(x1 - x0, y1 - y0, src.channels());
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) {
      for (int c = 0; c < src.channels(); ++c) out.at(x - x0, y - y0, c) = src.at(x, y, c);
    }
  }
  return out;
}

}  // namespace tangiviz

#endif  // TANGIVIZ_IMAGE_HPP_
