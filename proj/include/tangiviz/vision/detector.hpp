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

#ifndef TANGIVIZ_VISION_DETECTOR_HPP_
#define TANGIVIZ_VISION_DETECTOR_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <vector>

#include "tangiviz/error.hpp"
#include "tangiviz/marker_codec.hpp"
#include "tangiviz/vision/contours.hpp"
#include "tangiviz/vision/frame.hpp"
#include "tangiviz/vision/homography.hpp"
#include "tangiviz/vision/quads.hpp"
#include "tangiviz/vision/threshold.hpp"

namespace tangiviz::vision {

inline constexpr int kCellPatchPx = 7;
inline constexpr int kPatchPx = kMarkerCells * kCellPatchPx;  // 49

struct DetectConfig {
  int threshold_radius = 7;
  int threshold_c = 7;
  int min_contour_points = kDefaultMinContourPoints;
  double min_perimeter_px = kDefaultMinPerimeterPx;
  double epsilon_ratio = kDefaultEpsilonRatio;
  int tolerance = 0;
};

struct MarkerObservation {
  MarkerId id;
  /// Index 0 is the marker's canonical top-left corner, then clockwise.
  Quad corners;
  Point2d center;
  /// Direction of top-left -> top-right, counterclockwise from +x, in [0, 360).
  double orientation_deg = 0.0;
  int bit_errors = 0;
};

inline double normalize_degrees(double deg) {
  double d = std::fmod(deg, 360.0);
  if (d < 0) d += 360.0;
  if (d >= 360.0) d -= 360.0;
  return d + 0.0;  // folds -0.0 into +0.0
}

/// Counterclockwise as displayed, so image y is negated.
inline double orientation_of(Point2d top_left, Point2d top_right) {
  const Point2d v = top_right - top_left;
  return normalize_degrees(std::atan2(-v.y, v.x) * 180.0 / std::numbers::pi);
}

/// Warps the quad to a 49x49 patch (nearest neighbour) and classifies each
/// 7x7 cell by majority of its central 5x5 pixels against the patch's Otsu
/// threshold.
inline BitGrid sample_bits(const Frame& frame, const Quad& quad) {
  const Homography h = homography_from_quad(quad.corners);
  std::array<std::uint8_t, kPatchPx * kPatchPx> patch{};
  for (int v = 0; v < kPatchPx; ++v) {
    for (int u = 0; u < kPatchPx; ++u) {
      const Point2d p = h.apply({(u + 0.5) / kPatchPx, (v + 0.5) / kPatchPx});
      const int x = std::clamp(static_cast<int>(std::lround(p.x)), 0, frame.width() - 1);
      const int y = std::clamp(static_cast<int>(std::lround(p.y)), 0, frame.height() - 1);
      patch[v * kPatchPx + u] = frame.at(x, y);
    }
  }
  const int threshold = otsu_threshold(patch);

  BitGrid grid;
  for (int row = 0; row < kMarkerCells; ++row) {
    for (int col = 0; col < kMarkerCells; ++col) {
      int dark = 0;
      for (int dy = 1; dy <= 5; ++dy) {
        for (int dx = 1; dx <= 5; ++dx) {
          const int u = col * kCellPatchPx + dx;
          const int v = row * kCellPatchPx + dy;
          if (patch[v * kPatchPx + u] <= threshold) ++dark;
        }
      }
      grid.set(row, col, dark >= 13);
    }
  }
  return grid;
}

/// Non-throwing decode used on the hot path.
inline std::optional<DecodeResult> try_decode(const BitGrid& grid, int tolerance) {
  if (!grid.border_is_black()) return std::nullopt;
  try {
    return decode_grid(grid, tolerance);
  } catch (const Error&) {
    return std::nullopt;
  }
}

inline std::vector<Quad> candidate_quads(const Frame& frame, const DetectConfig& config) {
  const BinaryImage bin = adaptive_threshold(frame, config.threshold_radius, config.threshold_c);
  const auto contours = trace_contours(bin, config.min_contour_points);
  return approx_quads(contours, config.min_perimeter_px, config.epsilon_ratio);
}

inline bool quad_contains(const Quad& q, Point2d p) {
  int sign = 0;
  for (int i = 0; i < 4; ++i) {
    const Point2d a = q.corners[(i + 1) % 4] - q.corners[i];
    const Point2d b = p - q.corners[i];
    const double cross = a.x * b.y - a.y * b.x;
    const int s = cross > 0 ? 1 : (cross < 0 ? -1 : 0);
    if (s == 0) continue;
    if (sign != 0 && s != sign) return false;
    sign = s;
  }
  return true;
}

/// threshold -> contours -> quads -> sample -> decode. Sorted by center x.
///
/// A decoded candidate nested inside a larger decoded quad is a blob of
/// data cells, never a separate marker, and is dropped.
inline std::vector<MarkerObservation> detect_markers(const Frame& frame, const DetectConfig& config = {}) {
  struct Candidate {
    MarkerObservation obs;
    double perimeter;
    double area;
  };
  std::vector<Candidate> decoded_all;
  for (const Quad& quad : candidate_quads(frame, config)) {
    BitGrid grid;
    try {
      grid = sample_bits(frame, quad);
    } catch (const Error&) {
      continue;  // degenerate quad
    }
    const auto decoded = try_decode(grid, config.tolerance);
    if (!decoded) continue;

    MarkerObservation obs;
    obs.id = decoded->id;
    obs.bit_errors = decoded->bit_errors;
    const int r = decoded->rotation.quarter_turns;
    for (int j = 0; j < 4; ++j) obs.corners.corners[j] = quad.corners[(j - r + 4) % 4];
    obs.center = obs.corners.centroid();
    obs.orientation_deg = orientation_of(obs.corners.corners[0], obs.corners.corners[1]);
    decoded_all.push_back({obs, quad.perimeter(), std::abs(quad.signed_area())});
  }

  std::map<int, Candidate> best;
  for (const auto& c : decoded_all) {
    const bool nested = std::any_of(decoded_all.begin(), decoded_all.end(), [&](const Candidate& outer) {
      return outer.area > c.area && quad_contains(outer.obs.corners, c.obs.center);
    });
    if (nested) continue;
    auto it = best.find(c.obs.id.value());
    if (it == best.end()) {
      best.emplace(c.obs.id.value(), c);
    } else if (c.obs.bit_errors < it->second.obs.bit_errors ||
               (c.obs.bit_errors == it->second.obs.bit_errors && c.perimeter > it->second.perimeter)) {
      it->second = c;
    }
  }

  std::vector<MarkerObservation> out;
  out.reserve(best.size());
  for (auto& [id, c] : best) out.push_back(c.obs);
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.center.x != b.center.x) return a.center.x < b.center.x;
    return a.center.y < b.center.y;
  });
  return out;
}

}  // namespace tangiviz::vision

#endif  // TANGIVIZ_VISION_DETECTOR_HPP_
