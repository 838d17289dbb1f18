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

#ifndef TANGIVIZ_VISION_THRESHOLD_HPP_
#define TANGIVIZ_VISION_THRESHOLD_HPP_

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "tangiviz/error.hpp"
#include "tangiviz/vision/frame.hpp"

namespace tangiviz::vision {

/// Marks a pixel dark when it is strictly below the mean of its
/// (2r+1)^2 window (clipped at the borders) minus c. Exact integer math.
inline BinaryImage adaptive_threshold(const Image& gray, int radius, int c) {
  if (radius < 1) throw Error(ErrorCode::InvalidArgument, "threshold radius must be >= 1");
  const int w = gray.width();
  const int h = gray.height();
  const std::size_t stride = static_cast<std::size_t>(w) + 1;
  std::vector<std::int64_t> integral(stride * (h + 1), 0);
  for (int y = 0; y < h; ++y) {
    std::int64_t row = 0;
    for (int x = 0; x < w; ++x) {
      row += gray.at(x, y);
      integral[(y + 1) * stride + x + 1] = integral[y * stride + x + 1] + row;
    }
  }

  BinaryImage out(w, h);
  for (int y = 0; y < h; ++y) {
    const int y0 = std::max(0, y - radius);
    const int y1 = std::min(h, y + radius + 1);
    for (int x = 0; x < w; ++x) {
      const int x0 = std::max(0, x - radius);
      const int x1 = std::min(w, x + radius + 1);
      const std::int64_t sum = integral[y1 * stride + x1] - integral[y0 * stride + x1] -
                               integral[y1 * stride + x0] + integral[y0 * stride + x0];
      const std::int64_t count = static_cast<std::int64_t>(x1 - x0) * (y1 - y0);
      // I < sum/count - c  <=>  I*count < sum - c*count
      out.at(x, y) = static_cast<std::int64_t>(gray.at(x, y)) * count < sum - c * count ? 1 : 0;
    }
  }
  return out;
}

inline BinaryImage adaptive_threshold(const Frame& frame, int radius, int c) {
  return adaptive_threshold(frame.image(), radius, c);
}

/// Otsu's method. Returns the largest intensity of the dark class, or -1
/// when the samples contain a single intensity and no split exists.
inline int otsu_threshold(std::span<const std::uint8_t> samples) {
  std::array<std::int64_t, 256> hist{};
  for (auto v : samples) ++hist[v];
  const auto total = static_cast<double>(samples.size());
  if (samples.empty()) return -1;

  double sum_all = 0.0;
  for (int i = 0; i < 256; ++i) sum_all += i * static_cast<double>(hist[i]);

  double weight_dark = 0.0;
  double sum_dark = 0.0;
  double best = 0.0;
  int best_t = -1;
  for (int t = 0; t < 255; ++t) {
    weight_dark += static_cast<double>(hist[t]);
    sum_dark += t * static_cast<double>(hist[t]);
    const double weight_light = total - weight_dark;
    if (weight_dark == 0.0 || weight_light == 0.0) continue;
    const double mean_dark = sum_dark / weight_dark;
    const double mean_light = (sum_all - sum_dark) / weight_light;
    const double between = weight_dark * weight_light * (mean_dark - mean_light) * (mean_dark - mean_light);
    if (between > best) {
      best = between;
      best_t = t;
    }
  }
  return best_t;
}

}  // namespace tangiviz::vision

#endif  // TANGIVIZ_VISION_THRESHOLD_HPP_
