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

#ifndef TANGIVIZ_VISION_HOMOGRAPHY_HPP_
#define TANGIVIZ_VISION_HOMOGRAPHY_HPP_

#include <array>
#include <cmath>
#include <utility>

#include "tangiviz/error.hpp"
#include "tangiviz/image.hpp"

namespace tangiviz::vision {

inline constexpr double kPivotEpsilon = 1e-12;
inline constexpr double kDeterminantEpsilon = 1e-9;

/// Projective map, row-major, normalized so that m[8] == 1.
class Homography {
 public:
  Homography() = default;
  explicit Homography(const std::array<double, 9>& m) : m_(m) {
    if (std::abs(m_[8]) < kPivotEpsilon) throw Error(ErrorCode::DegenerateQuad, "homography at infinity");
    for (auto& v : m_) v /= m[8];
  }

  static Homography identity() { return Homography(); }

  Point2d apply(Point2d p) const {
    const double w = m_[6] * p.x + m_[7] * p.y + m_[8];
    return {(m_[0] * p.x + m_[1] * p.y + m_[2]) / w, (m_[3] * p.x + m_[4] * p.y + m_[5]) / w};
  }

  double determinant() const {
    return m_[0] * (m_[4] * m_[8] - m_[5] * m_[7]) - m_[1] * (m_[3] * m_[8] - m_[5] * m_[6]) +
           m_[2] * (m_[3] * m_[7] - m_[4] * m_[6]);
  }

  Homography inverse() const {
    const double det = determinant();
    if (std::abs(det) < kPivotEpsilon) throw Error(ErrorCode::DegenerateQuad, "singular homography");
    const auto& a = m_;
    std::array<double, 9> inv = {
        (a[4] * a[8] - a[5] * a[7]) / det, (a[2] * a[7] - a[1] * a[8]) / det, (a[1] * a[5] - a[2] * a[4]) / det,
        (a[5] * a[6] - a[3] * a[8]) / det, (a[0] * a[8] - a[2] * a[6]) / det, (a[2] * a[3] - a[0] * a[5]) / det,
        (a[3] * a[7] - a[4] * a[6]) / det, (a[1] * a[6] - a[0] * a[7]) / det, (a[0] * a[4] - a[1] * a[3]) / det};
    return Homography(inv);
  }

  /// this ∘ other
  Homography operator*(const Homography& other) const {
    std::array<double, 9> out{};
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        for (int k = 0; k < 3; ++k) out[r * 3 + c] += m_[r * 3 + k] * other.m_[k * 3 + c];
      }
    }
    return Homography(out);
  }

  double operator()(int row, int col) const { return m_[row * 3 + col]; }
  const std::array<double, 9>& matrix() const noexcept { return m_; }

 private:
  std::array<double, 9> m_{1, 0, 0, 0, 1, 0, 0, 0, 1};
};

namespace detail {

// Similarity that moves the centroid to the origin and the mean distance to sqrt(2).
inline Homography normalizing_transform(const std::array<Point2d, 4>& pts) {
  Point2d c{};
  for (const auto& p : pts) c = c + 0.25 * p;
  double mean = 0.0;
  for (const auto& p : pts) mean += 0.25 * std::hypot(p.x - c.x, p.y - c.y);
  if (mean < kPivotEpsilon) throw Error(ErrorCode::DegenerateQuad, "corners coincide");
  const double s = std::sqrt(2.0) / mean;
  return Homography({s, 0, -s * c.x, 0, s, -s * c.y, 0, 0, 1});
}

inline bool has_collinear_triple(const std::array<Point2d, 4>& p) {
  for (int skip = 0; skip < 4; ++skip) {
    std::array<Point2d, 3> t{};
    for (int i = 0, j = 0; i < 4; ++i) {
      if (i != skip) t[j++] = p[i];
    }
    const Point2d a = t[1] - t[0];
    const Point2d b = t[2] - t[0];
    if (std::abs(a.x * b.y - a.y * b.x) < kDeterminantEpsilon) return true;
  }
  return false;
}

// Gaussian elimination with partial pivoting on an 8x8 system.
inline std::array<double, 8> solve8(std::array<std::array<double, 9>, 8> a) {
  for (int col = 0; col < 8; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 8; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (std::abs(a[pivot][col]) < kPivotEpsilon) throw Error(ErrorCode::DegenerateQuad, "singular 8x8 system");
    std::swap(a[col], a[pivot]);
    for (int r = col + 1; r < 8; ++r) {
      const double f = a[r][col] / a[col][col];
      for (int k = col; k < 9; ++k) a[r][k] -= f * a[col][k];
    }
  }
  std::array<double, 8> x{};
  for (int r = 7; r >= 0; --r) {
    double s = a[r][8];
    for (int k = r + 1; k < 8; ++k) s -= a[r][k] * x[k];
    x[r] = s / a[r][r];
  }
  return x;
}

}  // namespace detail

/// Direct linear solution of the 8-unknown map taking src[i] to dst[i].
/// Both point sets are normalized first for conditioning.
inline Homography homography_from_points(const std::array<Point2d, 4>& src, const std::array<Point2d, 4>& dst) {
  const Homography ts = detail::normalizing_transform(src);
  const Homography td = detail::normalizing_transform(dst);
  std::array<Point2d, 4> s{}, d{};
  for (int i = 0; i < 4; ++i) {
    s[i] = ts.apply(src[i]);
    d[i] = td.apply(dst[i]);
  }
  if (detail::has_collinear_triple(s) || detail::has_collinear_triple(d)) {
    throw Error(ErrorCode::DegenerateQuad, "three corners are collinear");
  }

  std::array<std::array<double, 9>, 8> a{};
  for (int i = 0; i < 4; ++i) {
    const double x = s[i].x, y = s[i].y, u = d[i].x, v = d[i].y;
    a[2 * i] = {x, y, 1, 0, 0, 0, -u * x, -u * y, u};
    a[2 * i + 1] = {0, 0, 0, x, y, 1, -v * x, -v * y, v};
  }
  const auto h = detail::solve8(a);
  const Homography normalized({h[0], h[1], h[2], h[3], h[4], h[5], h[6], h[7], 1.0});
  if (std::abs(normalized.determinant()) < kDeterminantEpsilon) {
    throw Error(ErrorCode::DegenerateQuad, "rank-deficient homography");
  }
  return td.inverse() * normalized * ts;
}

inline constexpr std::array<Point2d, 4> kUnitSquare = {Point2d{0, 0}, {1, 0}, {1, 1}, {0, 1}};

/// Maps the unit square (0,0),(1,0),(1,1),(0,1) onto the quad corners in order.
inline Homography homography_from_quad(const std::array<Point2d, 4>& dst) {
  return homography_from_points(kUnitSquare, dst);
}

}  // namespace tangiviz::vision

#endif  // TANGIVIZ_VISION_HOMOGRAPHY_HPP_
