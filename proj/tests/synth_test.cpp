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

#include "tangiviz/synth.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace tangiviz::synth {
namespace {

TEST(Synth, EmptySceneIsUniform) {
  SceneSpec spec;
  spec.background = 200;
  const auto scene = render_scene(spec, 1);
  for (auto v : scene.frame.image().pixels()) ASSERT_EQ(v, 200);
  EXPECT_TRUE(scene.truth.empty());
}

// Oracle: invert the placement transform by hand and look up the marker cell.
int expected_pixel(const Placement& p, const BitGrid& grid, int x, int y) {
  const double t = p.rotation_deg * std::numbers::pi / 180.0;
  const double dx = x - p.center.x, dy = y - p.center.y;
  // Image offset = R * local where R = [[c, s], [-s, c]]; R^-1 = R^T.
  const double lx = std::cos(t) * dx - std::sin(t) * dy;
  const double ly = std::sin(t) * dx + std::cos(t) * dy;
  const double u = lx / p.scale + 0.5, v = ly / p.scale + 0.5;
  if (u < 0 || u >= 1 || v < 0 || v >= 1) return -1;
  const int col = static_cast<int>(u * 7), row = static_cast<int>(v * 7);
  return grid.at(row, col) ? 0 : 255;
}

TEST(Synth, PixelsFollowThePlacementTransform) {
  SceneSpec spec;
  spec.placements = {{37, {160, 200}, 120, 23}, {900, {450, 240}, 90, 200}};
  const auto scene = render_scene(spec, 0);
  for (const auto& p : spec.placements) {
    const BitGrid grid = encode_id(MarkerId(p.marker_id));
    int total = 0, agree = 0;
    for (int y = 0; y < spec.height; ++y) {
      for (int x = 0; x < spec.width; ++x) {
        const int e = expected_pixel(p, grid, x, y);
        if (e < 0) continue;
        ++total;
        agree += scene.frame.at(x, y) == e;
      }
    }
    ASSERT_GT(total, 0);
    EXPECT_GE(static_cast<double>(agree) / total, 0.99) << p.marker_id;
  }
}

TEST(Synth, GroundTruthMatchesPlacement) {
  const Placement p{5, {300, 200}, 100, 90};
  const auto g = ground_truth(p);
  EXPECT_EQ(g.id.value(), 5);
  EXPECT_DOUBLE_EQ(g.center.x, 300);
  EXPECT_NEAR(g.orientation_deg, 90, 1e-9);
  // Rotating by 90 degrees counterclockwise puts the top-left corner bottom-left.
  EXPECT_NEAR(g.corners.corners[0].x, 250, 1e-9);
  EXPECT_NEAR(g.corners.corners[0].y, 250, 1e-9);
}

TEST(Synth, SameSeedSameFrame) {
  SceneSpec spec;
  spec.placements = {{12, {320, 240}, 100, 10}};
  spec.noise_sigma = 8;
  spec.blur_radius = 1;
  const auto a = render_scene(spec, 42);
  const auto b = render_scene(spec, 42);
  const auto c = render_scene(spec, 43);
  EXPECT_EQ(a.frame.image(), b.frame.image());
  EXPECT_FALSE(a.frame.image() == c.frame.image());
}

TEST(Synth, NoiseHasRequestedSpread) {
  Image img(256, 256, 1, 128);
  add_noise(img, 8.0, 7);
  double sum = 0, sq = 0;
  for (auto v : img.pixels()) {
    sum += v;
    sq += static_cast<double>(v) * v;
  }
  const double n = static_cast<double>(img.pixels().size());
  const double mean = sum / n;
  EXPECT_NEAR(mean, 128.0, 0.2);
  EXPECT_NEAR(std::sqrt(sq / n - mean * mean), 8.0, 0.3);
}

TEST(Synth, BoxBlurMatchesWindowMean) {
  Image img(23, 17, 1);
  std::mt19937 rng(3);
  for (auto& v : img.pixels()) v = static_cast<std::uint8_t>(rng() & 0xff);
  const Image out = box_blur(img, 2);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      int sum = 0, count = 0;
      for (int yy = std::max(0, y - 2); yy <= std::min(img.height() - 1, y + 2); ++yy) {
        for (int xx = std::max(0, x - 2); xx <= std::min(img.width() - 1, x + 2); ++xx) {
          sum += img.at(xx, yy);
          ++count;
        }
      }
      ASSERT_EQ(out.at(x, y), static_cast<int>(std::lround(static_cast<double>(sum) / count)))
          << x << "," << y;
    }
  }
}

TEST(Synth, OverlapAndBoundsAreRejected) {
  SceneSpec spec;
  spec.placements = {{1, {100, 100}, 80, 0}, {2, {150, 100}, 80, 0}};
  try {
    render_scene(spec, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OverlapError);
  }
  spec.placements = {{1, {20, 100}, 80, 0}};
  try {
    render_scene(spec, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OutOfBounds);
  }
  spec.placements = {{1024, {320, 240}, 80, 0}};
  EXPECT_THROW(render_scene(spec, 0), Error);
}

TEST(Synth, SliderHeightsMapToValues) {
  std::vector<SliderChannelGeometry> channels;
  for (int i = 0; i < 5; ++i) channels.push_back({i, 64.0 + 128 * i, 420, 100});
  const std::vector<double> heights = {0.2, 0.4, 0.6, 0.8, 1.0};
  const auto s = render_slider_scene(channels, heights, 10);
  const std::vector<double> want = {2, 4, 6, 8, 10};
  for (int i = 0; i < 5; ++i) {
    EXPECT_NEAR(s.expected_values[i], want[i], 1e-12);
    EXPECT_DOUBLE_EQ(s.scene.truth[i].center.y, 420 - heights[i] * 320);
  }
  const std::vector<double> bad = {0.2, 0.4, 0.6, 0.8, 1.1};
  EXPECT_THROW(render_slider_scene(channels, bad, 10), Error);
}

TEST(Synth, ZeroHeightsGiveZeroValues) {
  std::vector<SliderChannelGeometry> channels;
  for (int i = 0; i < 5; ++i) channels.push_back({i, 64.0 + 128 * i, 420, 100});
  const auto s = render_slider_scene(channels, std::vector<double>(5, 0.0), 7.5);
  for (double v : s.expected_values) EXPECT_EQ(v, 0.0);
  for (const auto& t : s.scene.truth) EXPECT_DOUBLE_EQ(t.center.y, 420);
}

TEST(Synth, TemplatePageIsMirroredWhenFaceDown) {
  const auto layout = scan::default_layout(scan::TemplateKind::BarLine);
  const std::vector<std::uint8_t> fills = {0, 255, 255, 255, 255, 255, 255};
  TemplatePageOptions opt;
  opt.jitter = 0;
  const auto down = render_template_page(layout, fills, opt, 0);
  opt.face_down = false;
  const auto up = render_template_page(layout, fills, opt, 0);
  // The title spans .05-.95 horizontally so both are symmetric; check the y_scale side instead.
  const std::vector<std::uint8_t> ys = {255, 0, 255, 255, 255, 255, 255};
  opt.face_down = true;
  const auto ys_down = render_template_page(layout, ys, opt, 0);
  opt.face_down = false;
  const auto ys_up = render_template_page(layout, ys, opt, 0);
  EXPECT_LT(ys_up.frame.at(100, 300), 128);
  EXPECT_GT(ys_down.frame.at(100, 300), 128);
  EXPECT_LT(ys_down.frame.at(699, 300), 128);
  EXPECT_EQ(down.canvas, up.canvas);
}

}  // namespace
}  // namespace tangiviz::synth
