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

#ifndef TANGIVIZ_VISION_CONTOURS_HPP_
#define TANGIVIZ_VISION_CONTOURS_HPP_

#include <array>
#include <cstdint>
#include <vector>

#include "tangiviz/vision/frame.hpp"

namespace tangiviz::vision {

struct PixelPoint {
  int x = 0;
  int y = 0;
  friend bool operator==(const PixelPoint&, const PixelPoint&) = default;
};

/// Closed loop of boundary pixels, clockwise in image coordinates.
using Contour = std::vector<PixelPoint>;

inline constexpr int kDefaultMinContourPoints = 20;

namespace detail {

// Clockwise as displayed (y grows downward), starting east.
inline constexpr std::array<PixelPoint, 8> kRing = {
    PixelPoint{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}};

inline int direction_of(int dx, int dy) {
  for (int d = 0; d < 8; ++d) {
    if (kRing[d].x == dx && kRing[d].y == dy) return d;
  }
  return -1;
}

// Moore-neighbour tracing of the outer boundary of the component whose
// raster-first pixel is `start`.
inline Contour trace_outer(const BinaryImage& bin, PixelPoint start, std::size_t max_steps) {
  auto fg = [&](int x, int y) { return bin.contains(x, y) && bin.at(x, y) != 0; };

  Contour loop{start};
  // The west neighbour of a raster-first pixel is always background.
  int backtrack = 4;
  PixelPoint p = start;
  PixelPoint first_move{};
  bool have_first = false;

  for (std::size_t step = 0; step < max_steps; ++step) {
    int found = -1;
    for (int k = 1; k <= 8; ++k) {
      const int d = (backtrack + k) % 8;
      if (fg(p.x + kRing[d].x, p.y + kRing[d].y)) {
        found = d;
        break;
      }
    }
    if (found < 0) return loop;  // isolated pixel

    const PixelPoint next{p.x + kRing[found].x, p.y + kRing[found].y};
    if (have_first && p == start && next == first_move) break;
    if (!have_first) {
      first_move = next;
      have_first = true;
    }
    // Last background pixel examined before `next`, re-expressed relative to `next`.
    const int prev = (found + 7) % 8;
    const PixelPoint back{p.x + kRing[prev].x, p.y + kRing[prev].y};
    backtrack = direction_of(back.x - next.x, back.y - next.y);
    p = next;
    loop.push_back(p);
  }
  if (loop.size() > 1 && loop.back() == start) loop.pop_back();
  return loop;
}

}  // namespace detail

/// External boundaries of the 8-connected foreground regions. Loops with
/// fewer than `min_points` pixels are dropped.
inline std::vector<Contour> trace_contours(const BinaryImage& bin, int min_points = kDefaultMinContourPoints) {
  std::vector<Contour> contours;
  std::vector<std::uint8_t> seen(bin.bits.size(), 0);
  std::vector<PixelPoint> stack;

  for (int y = 0; y < bin.height; ++y) {
    for (int x = 0; x < bin.width; ++x) {
      const std::size_t idx = static_cast<std::size_t>(y) * bin.width + x;
      if (!bin.bits[idx] || seen[idx]) continue;

      std::size_t area = 0;
      seen[idx] = 1;
      stack.push_back({x, y});
      while (!stack.empty()) {
        const PixelPoint q = stack.back();
        stack.pop_back();
        ++area;
        for (const auto& d : detail::kRing) {
          const int nx = q.x + d.x;
          const int ny = q.y + d.y;
          if (!bin.contains(nx, ny)) continue;
          const std::size_t nidx = static_cast<std::size_t>(ny) * bin.width + nx;
          if (bin.bits[nidx] && !seen[nidx]) {
            seen[nidx] = 1;
            stack.push_back({nx, ny});
          }
        }
      }
      Contour c = detail::trace_outer(bin, {x, y}, 4 * area + 16);
      if (static_cast<int>(c.size()) >= min_points) contours.push_back(std::move(c));
    }
  }
  return contours;
}

}  // namespace tangiviz::vision

#endif  // TANGIVIZ_VISION_CONTOURS_HPP_
