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

#ifndef TANGIVIZ_VISION_QUADS_HPP_
#define TANGIVIZ_VISION_QUADS_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "tangiviz/image.hpp"
#include "tangiviz/vision/contours.hpp"

namespace tangiviz::vision {

inline constexpr double kDefaultMinPerimeterPx = 80.0;
inline constexpr double kDefaultEpsilonRatio = 0.05;

/// Four corners, clockwise as displayed (y down).
struct Quad {
  std::array<Point2d, 4> corners{};

  double perimeter() const {
    double p = 0.0;
    for (int i = 0; i < 4; ++i) {
      const Point2d d = corners[(i + 1) % 4] - corners[i];
      p += std::hypot(d.x, d.y);
    }
    return p;
  }

  /// Shoelace area; positive for clockwise-as-displayed order.
  double signed_area() const {
    double a = 0.0;
    for (int i = 0; i < 4; ++i) {
      const Point2d& p = corners[i];
      const Point2d& q = corners[(i + 1) % 4];
      a += p.x * q.y - q.x * p.y;
    }
    return 0.5 * a;
  }

  Point2d centroid() const {
    Point2d c{};
    for (const auto& p : corners) c = c + 0.25 * p;
    return c;
  }

  bool is_convex() const {
    int sign = 0;
    for (int i = 0; i < 4; ++i) {
      const Point2d a = corners[(i + 1) % 4] - corners[i];
      const Point2d b = corners[(i + 2) % 4] - corners[(i + 1) % 4];
      const double cross = a.x * b.y - a.y * b.x;
      if (cross == 0.0) return false;
      const int s = cross > 0 ? 1 : -1;
      if (sign != 0 && s != sign) return false;
      sign = s;
    }
    return true;
  }

  /// Cyclic shift so that corner `start` becomes index 0.
  Quad rotated_start(int start) const {
    Quad q;
    for (int i = 0; i < 4; ++i) q.corners[i] = corners[(start + i) % 4];
    return q;
  }
};

namespace detail {

inline double distance_to_line(Point2d p, Point2d a, Point2d b) {
  const Point2d ab = b - a;
  const double len = std::hypot(ab.x, ab.y);
  if (len == 0.0) return std::hypot(p.x - a.x, p.y - a.y);
  return std::abs(ab.x * (p.y - a.y) - ab.y * (p.x - a.x)) / len;
}

inline Point2d to_point(PixelPoint p) { return {static_cast<double>(p.x), static_cast<double>(p.y)}; }

// Ramer-Douglas-Peucker over chain[first..last] (inclusive); appends kept
// interior indices in order.
inline void rdp(std::span<const Point2d> chain, std::size_t first, std::size_t last, double epsilon,
                std::vector<std::size_t>& keep) {
  if (last <= first + 1) return;
  double worst = -1.0;
  std::size_t worst_idx = first;
  for (std::size_t i = first + 1; i < last; ++i) {
    const double d = distance_to_line(chain[i], chain[first], chain[last]);
    if (d > worst) {
      worst = d;
      worst_idx = i;
    }
  }
  if (worst > epsilon) {
    rdp(chain, first, worst_idx, epsilon, keep);
    keep.push_back(worst_idx);
    rdp(chain, worst_idx, last, epsilon, keep);
  }
}

}  // namespace detail

/// Simplifies a closed contour. The loop is split at two mutually far
/// points so both anchors land on extreme vertices of the shape.
inline std::vector<Point2d> simplify_closed(const Contour& contour, double epsilon) {
  const std::size_t n = contour.size();
  if (n < 3) {
    std::vector<Point2d> out;
    for (const auto& p : contour) out.push_back(detail::to_point(p));
    return out;
  }
  auto farthest_from = [&](std::size_t from) {
    std::size_t best = from;
    long best_d = -1;
    for (std::size_t i = 0; i < n; ++i) {
      const long dx = contour[i].x - contour[from].x;
      const long dy = contour[i].y - contour[from].y;
      if (dx * dx + dy * dy > best_d) {
        best_d = dx * dx + dy * dy;
        best = i;
      }
    }
    return best;
  };
  const std::size_t a = farthest_from(0);
  const std::size_t b = farthest_from(a);

  // Re-index the loop to start at a; b sits at offset k.
  std::vector<Point2d> chain;
  chain.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i) chain.push_back(detail::to_point(contour[(a + i) % n]));
  const std::size_t k = (b + n - a) % n;

  std::vector<std::size_t> keep{0};
  detail::rdp(chain, 0, k, epsilon, keep);
  keep.push_back(k);
  detail::rdp(chain, k, n, epsilon, keep);

  std::vector<Point2d> out;
  out.reserve(keep.size());
  for (auto idx : keep) out.push_back(chain[idx]);
  return out;
}

/// Clockwise order starting from the topmost (then leftmost) corner.
inline Quad canonical_order(Quad q) {
  if (q.signed_area() < 0) std::swap(q.corners[1], q.corners[3]);
  int start = 0;
  for (int i = 1; i < 4; ++i) {
    const auto& c = q.corners[i];
    const auto& s = q.corners[start];
    if (c.y < s.y || (c.y == s.y && c.x < s.x)) start = i;
  }
  return q.rotated_start(start);
}

/// Contours whose simplification (epsilon = ratio x contour length in
/// points) is a convex quadrilateral with perimeter >= min_perimeter_px.
inline std::vector<Quad> approx_quads(std::span<const Contour> contours,
                                      double min_perimeter_px = kDefaultMinPerimeterPx,
                                      double epsilon_ratio = kDefaultEpsilonRatio) {
  std::vector<Quad> quads;
  for (const auto& contour : contours) {
    const double epsilon = epsilon_ratio * static_cast<double>(contour.size());
    const auto poly = simplify_closed(contour, epsilon);
    if (poly.size() != 4) continue;
    Quad q;
    std::copy(poly.begin(), poly.end(), q.corners.begin());
    if (!q.is_convex() || q.perimeter() < min_perimeter_px) continue;
    quads.push_back(canonical_order(q));
  }
  return quads;
}

}  // namespace tangiviz::vision

#endif  // TANGIVIZ_VISION_QUADS_HPP_
