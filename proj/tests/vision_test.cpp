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

#include "tangiviz/vision.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "tangiviz/marker_codec.hpp"
#include "tangiviz/synth.hpp"

namespace tangiviz::vision {
namespace {

Image blank(int w, int h, std::uint8_t v) { return Image(w, h, 1, v); }

double angle_diff(double a, double b) {
  double d = std::fmod(std::abs(a - b), 360.0);
  return d > 180.0 ? 360.0 - d : d;
}

TEST(Preprocess, RgbWhiteIsGray255) {
  Image rgb(16, 16, 3, std::uint8_t{255});
  const Frame f = preprocess(rgb);
  EXPECT_EQ(f.at(3, 4), 255);
  EXPECT_EQ(luma(255, 0, 0), 76);  // 0.299 * 255 = 76.245
  EXPECT_EQ(luma(0, 255, 0), 150);
  EXPECT_EQ(luma(0, 0, 255), 29);
}

TEST(Preprocess, FlipHMovesPixel) {
  Image img = blank(20, 17, 255);
  img.at(0, 0) = 0;
  const Frame f = preprocess(img, true, false);
  EXPECT_EQ(f.at(19, 0), 0);
  EXPECT_EQ(f.at(0, 0), 255);
  EXPECT_TRUE(f.flip_h());
  const Frame v = preprocess(img, false, true);
  EXPECT_EQ(v.at(0, 16), 0);
}

TEST(Preprocess, FlipIsInvolution) {
  std::mt19937 rng(7);
  for (int t = 0; t < 10; ++t) {
    Image img(16 + t, 16 + 2 * t, 1);
    for (auto& p : img.pixels()) p = static_cast<std::uint8_t>(rng());
    const Frame once = preprocess(img, true, t % 2 == 0);
    const Frame twice = preprocess(once.image(), true, t % 2 == 0);
    EXPECT_EQ(twice.image(), img);
  }
}

TEST(Preprocess, RejectsTinyFrames) {
  EXPECT_THROW(preprocess(blank(15, 40, 0)), Error);
}

TEST(AdaptiveThreshold, UniformFrameIsBackground) {
  const Image img = blank(32, 32, 128);
  for (int c : {0, 7}) {
    const BinaryImage b = adaptive_threshold(img, 7, c);
    for (auto bit : b.bits) ASSERT_EQ(bit, 0);
  }
}

TEST(AdaptiveThreshold, MatchesBruteForceWindowMean) {
  Image img = blank(64, 64, 255);
  for (int y = 0; y < 64; ++y) {
    for (int x = 0; x < 32; ++x) img.at(x, y) = 0;
  }
  const int radius = 7, c = 7;
  const BinaryImage b = adaptive_threshold(img, radius, c);
  for (int y = 0; y < 64; ++y) {
    for (int x = 0; x < 64; ++x) {
      double sum = 0;
      int n = 0;
      for (int yy = y - radius; yy <= y + radius; ++yy) {
        for (int xx = x - radius; xx <= x + radius; ++xx) {
          if (xx < 0 || yy < 0 || xx >= 64 || yy >= 64) continue;
          sum += img.at(xx, yy);
          ++n;
        }
      }
      const bool expected = img.at(x, y) < sum / n - c;
      ASSERT_EQ(b.at(x, y) != 0, expected) << x << "," << y;
    }
  }
  // Black side near the boundary is dark, the deep interior of each half is not foreground.
  EXPECT_EQ(b.at(30, 32), 1);
  EXPECT_EQ(b.at(40, 32), 0);
}

BinaryImage square_image(int w, int h, int x0, int y0, int side) {
  BinaryImage b(w, h);
  for (int y = y0; y < y0 + side; ++y) {
    for (int x = x0; x < x0 + side; ++x) b.at(x, y) = 1;
  }
  return b;
}

TEST(TraceContours, EmptyImage) { EXPECT_TRUE(trace_contours(BinaryImage(40, 40)).empty()); }

TEST(TraceContours, SolidSquareBoundary) {
  const auto contours = trace_contours(square_image(50, 50, 10, 12, 20));
  ASSERT_EQ(contours.size(), 1u);
  EXPECT_EQ(contours[0].size(), 76u);  // 4*20 - 4
  std::set<std::pair<int, int>> unique;
  for (const auto& p : contours[0]) {
    unique.insert({p.x, p.y});
    const bool on_edge = p.x == 10 || p.x == 29 || p.y == 12 || p.y == 31;
    EXPECT_TRUE(on_edge);
  }
  EXPECT_EQ(unique.size(), 76u);
}

TEST(TraceContours, TwoDisjointSquares) {
  BinaryImage b = square_image(80, 40, 5, 5, 20);
  for (int y = 5; y < 25; ++y) {
    for (int x = 50; x < 70; ++x) b.at(x, y) = 1;
  }
  EXPECT_EQ(trace_contours(b).size(), 2u);
}

TEST(TraceContours, HolesDoNotAddContours) {
  BinaryImage b = square_image(60, 60, 5, 5, 40);
  for (int y = 15; y < 35; ++y) {
    for (int x = 15; x < 35; ++x) b.at(x, y) = 0;
  }
  const auto contours = trace_contours(b);
  ASSERT_EQ(contours.size(), 1u);
  EXPECT_EQ(contours[0].size(), 156u);
}

TEST(TraceContours, DropsShortLoops) {
  EXPECT_TRUE(trace_contours(square_image(30, 30, 2, 2, 5)).empty());  // 16 boundary pixels
}

TEST(ApproxQuads, AxisAlignedSquare) {
  const auto quads = approx_quads(trace_contours(square_image(60, 60, 10, 15, 30)));
  ASSERT_EQ(quads.size(), 1u);
  const std::array<Point2d, 4> expected = {Point2d{10, 15}, {39, 15}, {39, 44}, {10, 44}};
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(quads[0].corners[i].x, expected[i].x, 1.0);
    EXPECT_NEAR(quads[0].corners[i].y, expected[i].y, 1.0);
  }
  EXPECT_GT(quads[0].signed_area(), 0.0);
}

TEST(ApproxQuads, RasterizedCircleIsNotAQuad) {
  // Oracle rasterizer: pixel centers inside the disc.
  BinaryImage b(100, 100);
  for (int y = 0; y < 100; ++y) {
    for (int x = 0; x < 100; ++x) b.at(x, y) = (x - 50) * (x - 50) + (y - 50) * (y - 50) <= 30 * 30;
  }
  const auto contours = trace_contours(b);
  ASSERT_EQ(contours.size(), 1u);
  const auto poly = simplify_closed(contours[0], kDefaultEpsilonRatio * contours[0].size());
  EXPECT_GT(poly.size(), 4u);
  EXPECT_TRUE(approx_quads(contours).empty());
}

TEST(ApproxQuads, TriangleIsNotAQuad) {
  BinaryImage b(80, 80);
  for (int y = 10; y < 70; ++y) {
    for (int x = 10; x <= 10 + (y - 10); ++x) b.at(x, y) = 1;
  }
  EXPECT_TRUE(approx_quads(trace_contours(b)).empty());
}

TEST(ApproxQuads, SmallSquareBelowMinPerimeter) {
  EXPECT_TRUE(approx_quads(trace_contours(square_image(40, 40, 5, 5, 15))).empty());
}

TEST(Homography, UnitSquareIsIdentity) {
  const Homography h = homography_from_quad(kUnitSquare);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) EXPECT_NEAR(h(r, c), r == c ? 1.0 : 0.0, 1e-12);
  }
}

TEST(Homography, TranslatedSquareIsTranslation) {
  const Homography h = homography_from_quad({Point2d{5, 3}, {6, 3}, {6, 4}, {5, 4}});
  const std::array<double, 9> expected = {1, 0, 5, 0, 1, 3, 0, 0, 1};
  for (int i = 0; i < 9; ++i) EXPECT_NEAR(h.matrix()[i], expected[i], 1e-12);
}

TEST(Homography, RandomConvexQuadsResidualAndDiagonalIntersection) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> jitter(-0.3, 0.3);
  std::uniform_real_distribution<double> scale(20.0, 600.0);
  std::uniform_real_distribution<double> offset(0.0, 1000.0);
  int tested = 0;
  while (tested < 200) {
    const double s = scale(rng);
    const Point2d o{offset(rng), offset(rng)};
    Quad q;
    for (int i = 0; i < 4; ++i) {
      q.corners[i] = {o.x + s * (kUnitSquare[i].x + jitter(rng)), o.y + s * (kUnitSquare[i].y + jitter(rng))};
    }
    if (!q.is_convex()) continue;
    ++tested;
    const Homography h = homography_from_quad(q.corners);
    for (int i = 0; i < 4; ++i) {
      const Point2d m = h.apply(kUnitSquare[i]);
      ASSERT_LT(std::hypot(m.x - q.corners[i].x, m.y - q.corners[i].y), 1e-6);
    }
    // Projective maps preserve incidence: the square's center goes to the diagonal intersection.
    const Point2d a = q.corners[0], b = q.corners[2], c = q.corners[1], d = q.corners[3];
    const double den = (a.x - b.x) * (c.y - d.y) - (a.y - b.y) * (c.x - d.x);
    const double t = ((a.x - c.x) * (c.y - d.y) - (a.y - c.y) * (c.x - d.x)) / den;
    const Point2d cross{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
    const Point2d mid = h.apply({0.5, 0.5});
    EXPECT_LT(std::hypot(mid.x - cross.x, mid.y - cross.y), 1e-6);
    const Point2d back = h.inverse().apply(cross);
    EXPECT_NEAR(back.x, 0.5, 1e-9);
    EXPECT_NEAR(back.y, 0.5, 1e-9);
  }
}

TEST(Homography, CollinearCornersAreDegenerate) {
  try {
    homography_from_quad({Point2d{0, 0}, {1, 1}, {2, 2}, {3, 3}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateQuad);
  }
  EXPECT_THROW(homography_from_quad({Point2d{0, 0}, {10, 0}, {20, 0}, {5, 8}}), Error);
}

Frame frame_with_marker(int id, int cell_px, int x0, int y0, int w = 160, int h = 140) {
  Image img = blank(w, h, 255);
  const Image m = render_marker(MarkerId(id), cell_px);
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) img.at(x0 + x, y0 + y) = m.at(x, y);
  }
  return Frame(img);
}

TEST(SampleBits, AxisAlignedMarkerReadsBack) {
  for (int id : {0, 5, 413, 1000}) {
    const Frame f = frame_with_marker(id, 10, 30, 25);
    // Boundary pixel centers of the rendered marker.
    const Quad q{{Point2d{30, 25}, {99, 25}, {99, 94}, {30, 94}}};
    EXPECT_EQ(sample_bits(f, q), encode_id(MarkerId(id)));
  }
}

TEST(SampleBits, WhitePatchIsAllZero) {
  const Frame f(blank(64, 64, 255));
  const BitGrid g = sample_bits(f, Quad{{Point2d{5, 5}, {50, 5}, {50, 50}, {5, 50}}});
  EXPECT_EQ(g, BitGrid{});
}

TEST(SampleBits, RotatedMarkerIsSomeRotation) {
  synth::SceneSpec spec;
  spec.placements.push_back({321, {320, 240}, 84, 37});
  const auto scene = synth::render_scene(spec, 1);
  const auto quads = candidate_quads(scene.frame, {});
  bool matched = false;
  for (const auto& q : quads) {
    const BitGrid g = sample_bits(scene.frame, q);
    for (int r = 0; r < 4; ++r) matched |= g == encode_id(MarkerId(321)).rotated(r);
  }
  EXPECT_TRUE(matched);
}

TEST(DetectMarkers, BlankFrame) { EXPECT_TRUE(detect_markers(Frame(blank(640, 480, 255))).empty()); }

synth::SceneSpec three_marker_scene() {
  synth::SceneSpec spec;
  spec.placements = {{3, {120, 200}, 60, 0}, {7, {320, 260}, 72, 25}, {11, {520, 180}, 50, 300}};
  return spec;
}

TEST(DetectMarkers, FindsKnownMarkers) {
  const auto scene = synth::render_scene(three_marker_scene(), 3);
  const auto obs = detect_markers(scene.frame);
  ASSERT_EQ(obs.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& truth = scene.truth[i];
    EXPECT_EQ(obs[i].id, truth.id);
    EXPECT_LT(std::hypot(obs[i].center.x - truth.center.x, obs[i].center.y - truth.center.y), 2.0);
    EXPECT_LT(angle_diff(obs[i].orientation_deg, truth.orientation_deg), 3.0);
    EXPECT_EQ(obs[i].bit_errors, 0);
    // center is the corner centroid
    EXPECT_NEAR(obs[i].center.x, obs[i].corners.centroid().x, 1e-12);
    EXPECT_GE(obs[i].orientation_deg, 0.0);
    EXPECT_LT(obs[i].orientation_deg, 360.0);
    // corner 0 is the canonical top-left
    EXPECT_LT(std::hypot(obs[i].corners.corners[0].x - truth.corners.corners[0].x,
                         obs[i].corners.corners[0].y - truth.corners.corners[0].y),
              3.0);
  }
}

TEST(DetectMarkers, MirroredSceneMatchesAfterParityCorrection) {
  const auto scene = synth::render_scene(three_marker_scene(), 3);
  const auto direct = detect_markers(scene.frame);
  const Image mirrored = flipped(scene.frame.image(), true, false);
  const auto corrected = detect_markers(preprocess(mirrored, true, false));
  ASSERT_EQ(direct.size(), corrected.size());
  for (std::size_t i = 0; i < direct.size(); ++i) {
    EXPECT_EQ(direct[i].id, corrected[i].id);
    EXPECT_LT(std::hypot(direct[i].center.x - corrected[i].center.x, direct[i].center.y - corrected[i].center.y), 2.0);
    EXPECT_LT(angle_diff(direct[i].orientation_deg, corrected[i].orientation_deg), 3.0);
  }
}

TEST(DetectMarkers, Deterministic) {
  auto spec = three_marker_scene();
  spec.noise_sigma = 6;
  const auto scene = synth::render_scene(spec, 11);
  const auto a = detect_markers(scene.frame);
  const auto b = detect_markers(scene.frame);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].id, b[i].id);
    EXPECT_EQ(a[i].corners.corners, b[i].corners.corners);
    EXPECT_EQ(a[i].orientation_deg, b[i].orientation_deg);
  }
}

TEST(DetectMarkers, TranslationEquivariance) {
  auto spec = three_marker_scene();
  const auto base = detect_markers(synth::render_scene(spec, 0).frame);
  for (auto [dx, dy] : {std::pair{7, -3}, {-20, 11}, {1, 1}}) {
    auto moved = spec;
    for (auto& p : moved.placements) p.center = p.center + Point2d{double(dx), double(dy)};
    const auto shifted = detect_markers(synth::render_scene(moved, 0).frame);
    ASSERT_EQ(shifted.size(), base.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
      EXPECT_NEAR(shifted[i].center.x - base[i].center.x, dx, 0.5);
      EXPECT_NEAR(shifted[i].center.y - base[i].center.y, dy, 0.5);
    }
  }
}

TEST(DetectMarkers, OrientationFollowsRotation) {
  for (double base : {0.0, 10.0, 130.0}) {
    for (double delta : {15.0, 90.0, 200.0, 333.0}) {
      synth::SceneSpec a, b;
      a.placements = {{42, {320, 240}, 80, base}};
      b.placements = {{42, {320, 240}, 80, base + delta}};
      const auto oa = detect_markers(synth::render_scene(a, 0).frame);
      const auto ob = detect_markers(synth::render_scene(b, 0).frame);
      ASSERT_EQ(oa.size(), 1u);
      ASSERT_EQ(ob.size(), 1u);
      EXPECT_LT(angle_diff(ob[0].orientation_deg - oa[0].orientation_deg, delta), 3.0);
    }
  }
}

TEST(DetectMarkers, AcceptedQuadsHaveExactHomographies) {
  const auto scene = synth::render_scene(three_marker_scene(), 3);
  for (const auto& o : detect_markers(scene.frame)) {
    const Homography h = homography_from_quad(o.corners.corners);
    for (int i = 0; i < 4; ++i) {
      const Point2d m = h.apply(kUnitSquare[i]);
      EXPECT_LT(std::hypot(m.x - o.corners.corners[i].x, m.y - o.corners.corners[i].y), 1e-6);
    }
  }
}

}  // namespace
}  // namespace tangiviz::vision
