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

#ifndef TANGIVIZ_VISION_WARP_HPP_
#define TANGIVIZ_VISION_WARP_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "tangiviz/image.hpp"
#include "tangiviz/vision/homography.hpp"

namespace tangiviz::vision {

inline std::uint8_t sample_bilinear(const Image& img, Point2d p, int channel = 0) {
  const double x = std::clamp(p.x, 0.0, static_cast<double>(img.width() - 1));
  const double y = std::clamp(p.y, 0.0, static_cast<double>(img.height() - 1));
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const int x1 = std::min(x0 + 1, img.width() - 1);
  const int y1 = std::min(y0 + 1, img.height() - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  const double top = (1 - fx) * img.at(x0, y0, channel) + fx * img.at(x1, y0, channel);
  const double bottom = (1 - fx) * img.at(x0, y1, channel) + fx * img.at(x1, y1, channel);
  return static_cast<std::uint8_t>(std::lround(std::clamp((1 - fy) * top + fy * bottom, 0.0, 255.0)));
}

/// Output pixel (u, v) takes the source value at dst_to_src((u, v)), with
/// bilinear interpolation and edge clamping.
inline Image warp_perspective(const Image& src, const Homography& dst_to_src, int width, int height) {
  Image out(width, height, src.channels());
  for (int v = 0; v < height; ++v) {
    for (int u = 0; u < width; ++u) {
      const Point2d p = dst_to_src.apply({static_cast<double>(u), static_cast<double>(v)});
      for (int c = 0; c < src.channels(); ++c) out.at(u, v, c) = sample_bilinear(src, p, c);
    }
  }
  return out;
}

}  // namespace tangiviz::vision

#endif  // TANGIVIZ_VISION_WARP_HPP_
