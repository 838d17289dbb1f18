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

#ifndef TANGIVIZ_SYNTH_HPP_
#define TANGIVIZ_SYNTH_HPP_

// Ground-truth frame renderer used as the oracle for detection, slider
// mapping and template scanning. Rendering is nearest-cell (no
// anti-aliasing); optics are modelled separately by noise and box blur.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tangiviz/error.hpp"
#include "tangiviz/image.hpp"
#include "tangiviz/marker_codec.hpp"
#include "tangiviz/template_scanner.hpp"
#include "tangiviz/vision.hpp"

namespace tangiviz::synth {

struct Placement {
  int marker_id = 0;
  Point2d center;
  /// Side length of the 7x7 marker in pixels.
  double scale = 60.0;
  /// Counterclockwise as displayed.
  double rotation_deg = 0.0;

  double bounding_radius() const { return scale * std::numbers::sqrt2 / 2.0; }
};

struct SceneSpec {
  int width = 640;
  int height = 480;
  std::uint8_t background = 255;
  std::vector<Placement> placements;
  double noise_sigma = 0.0;
  int blur_radius = 0;
};

struct RenderedScene {
  vision::Frame frame;
  std::vector<vision::MarkerObservation> truth;
};

inline void validate(const SceneSpec& spec) {
  if (spec.width < vision::kMinFrameSide || spec.height < vision::kMinFrameSide) {
    throw Error(ErrorCode::InvalidArgument, "scene must be at least 16x16");
  }
  if (spec.noise_sigma < 0 || spec.blur_radius < 0) {
    throw Error(ErrorCode::InvalidArgument, "noise and blur must be non-negative");
  }
  for (std::size_t i = 0; i < spec.placements.size(); ++i) {
    const auto& p = spec.placements[i];
    MarkerId{p.marker_id};
    if (p.scale <= 0) throw Error(ErrorCode::InvalidArgument, "marker scale must be positive");
    const double r = p.bounding_radius();
    if (p.center.x - r < 0 || p.center.y - r < 0 || p.center.x + r > spec.width - 1 ||
        p.center.y + r > spec.height - 1) {
      throw Error(ErrorCode::OutOfBounds, "marker " + std::to_string(p.marker_id) + " leaves the frame");
    }
    for (std::size_t j = 0; j < i; ++j) {
      const auto& q = spec.placements[j];
      if (std::hypot(p.center.x - q.center.x, p.center.y - q.center.y) < r + q.bounding_radius()) {
        throw Error(ErrorCode::OverlapError, "markers " + std::to_string(q.marker_id) + " and " +
                                                 std::to_string(p.marker_id) + " overlap");
      }
    }
  }
}

/// Maps marker-local offsets (x right, y down, unrotated) into the image.
inline Point2d local_to_image(const Placement& p, Point2d local) {
  const double t = p.rotation_deg * std::numbers::pi / 180.0;
  const double c = std::cos(t), s = std::sin(t);
  return {p.center.x + local.x * c + local.y * s, p.center.y - local.x * s + local.y * c};
}

inline vision::MarkerObservation ground_truth(const Placement& p) {
  vision::MarkerObservation obs;
  obs.id = MarkerId(p.marker_id);
  const double h = p.scale / 2.0;
  obs.corners.corners = {local_to_image(p, {-h, -h}), local_to_image(p, {h, -h}), local_to_image(p, {h, h}),
                         local_to_image(p, {-h, h})};
  obs.center = p.center;
  obs.orientation_deg = vision::normalize_degrees(p.rotation_deg);
  obs.bit_errors = 0;
  return obs;
}

inline void draw_marker(Image& img, const Placement& p) {
  const BitGrid grid = encode_id(MarkerId(p.marker_id));
  const double t = p.rotation_deg * std::numbers::pi / 180.0;
  const double c = std::cos(t), s = std::sin(t);
  const double r = p.bounding_radius();
  const int x0 = std::max(0, static_cast<int>(std::floor(p.center.x - r)));
  const int x1 = std::min(img.width() - 1, static_cast<int>(std::ceil(p.center.x + r)));
  const int y0 = std::max(0, static_cast<int>(std::floor(p.center.y - r)));
  const int y1 = std::min(img.height() - 1, static_cast<int>(std::ceil(p.center.y + r)));
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double dx = x - p.center.x;
      const double dy = y - p.center.y;
      // inverse of local_to_image
      const double lx = dx * c - dy * s;
      const double ly = dx * s + dy * c;
      const int col = static_cast<int>(std::floor((lx / p.scale + 0.5) * kMarkerCells));
      const int row = static_cast<int>(std::floor((ly / p.scale + 0.5) * kMarkerCells));
      if (col < 0 || row < 0 || col >= kMarkerCells || row >= kMarkerCells) continue;
      img.at(x, y) = grid.at(row, col) ? 0 : 255;
    }
  }
}

/// Integer-discretized Gaussian noise: Irwin-Hall sum of 12 uniform 16-bit
/// draws, scaled in fixed point so results are identical on every platform.
inline void add_noise(Image& img, double sigma, std::uint64_t seed) {
  if (sigma <= 0) return;
  std::mt19937_64 rng(seed);
  const std::int64_t sigma_q8 = std::llround(sigma * 256.0);
  constexpr std::int64_t kDenominator = 65536LL * 256LL;
  for (auto& px : img.pixels()) {
    // 12 uniform 16-bit draws from three 64-bit outputs.
    std::int64_t sum = 0;
    for (int k = 0; k < 3; ++k) {
      const std::uint64_t r = rng();
      sum += static_cast<std::int64_t>(r & 0xFFFF) + static_cast<std::int64_t>((r >> 16) & 0xFFFF) +
             static_cast<std::int64_t>((r >> 32) & 0xFFFF) + static_cast<std::int64_t>(r >> 48);
    }
    const std::int64_t num = sigma_q8 * (sum - 6 * 65536);
    // Round half away from zero.
    const std::int64_t noise = num >= 0 ? (num + kDenominator / 2) / kDenominator : -((-num + kDenominator / 2) / kDenominator);
    px = static_cast<std::uint8_t>(std::clamp<std::int64_t>(px + noise, 0, 255));
  }
}

/// Mean over the clipped (2r+1)^2 window, rounded to nearest.
inline Image box_blur(const Image& src, int radius) {
  if (radius <= 0) return src;
  const int w = src.width(), h = src.height(), nc = src.channels();
  Image out(w, h, nc);
  std::vector<std::int64_t> integral(static_cast<std::size_t>(w + 1) * (h + 1));
  auto I = [&](int x, int y) -> std::int64_t& { return integral[static_cast<std::size_t>(y) * (w + 1) + x]; };
  for (int ch = 0; ch < nc; ++ch) {
    for (int y = 0; y < h; ++y) {
      std::int64_t row = 0;
      for (int x = 0; x < w; ++x) {
        row += src.at(x, y, ch);
        I(x + 1, y + 1) = I(x + 1, y) + row;
      }
    }
    for (int y = 0; y < h; ++y) {
      const int y0 = std::max(0, y - radius), y1 = std::min(h, y + radius + 1);
      for (int x = 0; x < w; ++x) {
        const int x0 = std::max(0, x - radius), x1 = std::min(w, x + radius + 1);
        const std::int64_t sum = I(x1, y1) - I(x0, y1) - I(x1, y0) + I(x0, y0);
        const std::int64_t count = static_cast<std::int64_t>(x1 - x0) * (y1 - y0);
        out.at(x, y, ch) = static_cast<std::uint8_t>((sum + count / 2) / count);
      }
    }
  }
  return out;
}

inline RenderedScene render_scene(const SceneSpec& spec, std::uint64_t seed) {
  validate(spec);
  Image img(spec.width, spec.height, 1, spec.background);
  std::vector<vision::MarkerObservation> truth;
  for (const auto& p : spec.placements) {
    draw_marker(img, p);
    truth.push_back(ground_truth(p));
  }
  add_noise(img, spec.noise_sigma, seed);
  img = box_blur(img, spec.blur_radius);
  return {vision::Frame(std::move(img)), std::move(truth)};
}

inline void to_json(nlohmann::json& j, const Placement& p) {
  j = {{"marker_id", p.marker_id}, {"center", {p.center.x, p.center.y}}, {"scale", p.scale}, {"rotation_deg", p.rotation_deg}};
}

inline void from_json(const nlohmann::json& j, Placement& p) {
  j.at("marker_id").get_to(p.marker_id);
  p.center = {j.at("center").at(0).get<double>(), j.at("center").at(1).get<double>()};
  j.at("scale").get_to(p.scale);
  p.rotation_deg = j.value("rotation_deg", 0.0);
}

inline void to_json(nlohmann::json& j, const SceneSpec& s) {
  j = {{"width", s.width},         {"height", s.height},           {"background", s.background},
       {"placements", s.placements}, {"noise_sigma", s.noise_sigma}, {"blur_radius", s.blur_radius}};
}

inline void from_json(const nlohmann::json& j, SceneSpec& s) {
  const SceneSpec d;
  s.width = j.value("width", d.width);
  s.height = j.value("height", d.height);
  const int bg = j.value("background", static_cast<int>(d.background));
  if (bg < 0 || bg > 255) throw Error(ErrorCode::InvalidArgument, "background must be in [0, 255]");
  s.background = static_cast<std::uint8_t>(bg);
  s.placements = j.value("placements", std::vector<Placement>{});
  s.noise_sigma = j.value("noise_sigma", d.noise_sigma);
  s.blur_radius = j.value("blur_radius", d.blur_radius);
}

/// Slider channel geometry as seen by the camera.
struct SliderChannelGeometry {
  int marker_id = 0;
  double x_center = 0;
  double y_bottom = 0;
  double y_top = 0;
};

struct SliderSceneOptions {
  int width = 640;
  int height = 480;
  double marker_scale = 48.0;
  std::uint8_t background = 255;
  double noise_sigma = 0.0;
  int blur_radius = 0;
  double rotation_deg = 0.0;
};

struct SliderScene {
  RenderedScene scene;
  std::vector<double> expected_values;
};

/// Heights in [0,1] per channel; each marker sits at y_bottom - h (y_bottom - y_top).
inline SliderScene render_slider_scene(std::span<const SliderChannelGeometry> channels, std::span<const double> heights,
                                       double y_max, const SliderSceneOptions& options = {}, std::uint64_t seed = 0) {
  if (heights.size() != channels.size()) {
    throw Error(ErrorCode::InvalidArgument, "need one height per slider channel");
  }
  SceneSpec spec;
  spec.width = options.width;
  spec.height = options.height;
  spec.background = options.background;
  spec.noise_sigma = options.noise_sigma;
  spec.blur_radius = options.blur_radius;
  std::vector<double> expected;
  for (std::size_t i = 0; i < channels.size(); ++i) {
    const double h = heights[i];
    if (h < 0 || h > 1) throw Error(ErrorCode::InvalidArgument, "slider heights must be in [0, 1]");
    const auto& ch = channels[i];
    spec.placements.push_back({ch.marker_id, {ch.x_center, ch.y_bottom - h * (ch.y_bottom - ch.y_top)},
                               options.marker_scale, options.rotation_deg});
    expected.push_back(h * y_max);
  }
  return {render_scene(spec, seed), std::move(expected)};
}

struct TemplatePageOptions {
  int width = 800;
  int height = 600;
  /// Page width as a fraction of the frame width (height follows the layout aspect).
  double page_fraction = 0.8;
  /// Corner jitter bound as a fraction of page size, at most 0.05.
  double jitter = 0.05;
  std::uint8_t background = 40;
  std::uint8_t paper = 255;
  /// Mirror the page content as the camera sees a face-down template.
  bool face_down = true;
  /// Dark dots of this radius (canvas px) inset at the four canvas corners; 0 disables.
  int corner_dot_radius = 0;
  int corner_dot_inset = 30;
};

struct TemplatePage {
  vision::Frame frame;
  /// Region rectangles in canvas pixels: title, y_scale (bar_line), then point regions.
  std::vector<scan::PixelRect> regions;
  /// Where canvas corners (0,0), (W-1,0), (W-1,H-1), (0,H-1) of the upright page land in the frame.
  std::array<Point2d, 4> page_corners{};
  Image canvas;
};

/// Canvas with each layout region filled by the given intensity, in the
/// order title, y_scale (when present), point regions.
inline Image render_template_canvas(const scan::TemplateLayout& layout, std::span<const std::uint8_t> region_fills,
                                    std::uint8_t paper, std::vector<scan::PixelRect>* rects = nullptr) {
  std::vector<scan::NormRect> regions{layout.title};
  if (layout.y_scale) regions.push_back(*layout.y_scale);
  for (const auto& r : layout.point_regions()) regions.push_back(r);
  if (region_fills.size() != regions.size()) {
    throw Error(ErrorCode::InvalidArgument,
                "need " + std::to_string(regions.size()) + " region fills, got " + std::to_string(region_fills.size()));
  }
  Image canvas(layout.width, layout.height, 1, paper);
  for (std::size_t i = 0; i < regions.size(); ++i) {
    const auto px = layout.to_pixels(regions[i]);
    for (int y = px.y0; y < px.y1; ++y) {
      for (int x = px.x0; x < px.x1; ++x) canvas.at(x, y) = region_fills[i];
    }
    if (rects) rects->push_back(px);
  }
  return canvas;
}

inline TemplatePage render_template_page(const scan::TemplateLayout& layout, std::span<const std::uint8_t> region_fills,
                                         const TemplatePageOptions& options = {}, std::uint64_t seed = 0) {
  if (options.jitter < 0 || options.jitter > 0.05) throw Error(ErrorCode::InvalidArgument, "jitter must be in [0, 0.05]");
  TemplatePage page{vision::Frame(Image(options.width, options.height, 1, options.background)), {}, {}, {}};
  Image canvas = render_template_canvas(layout, region_fills, options.paper, &page.regions);
  if (options.corner_dot_radius > 0) {
    const int r = options.corner_dot_radius;
    const int in = options.corner_dot_inset;
    const std::array<Point2d, 4> dots = {Point2d{double(in), double(in)}, {double(layout.width - 1 - in), double(in)},
                                         {double(layout.width - 1 - in), double(layout.height - 1 - in)},
                                         {double(in), double(layout.height - 1 - in)}};
    for (const auto& d : dots) {
      for (int y = static_cast<int>(d.y) - r; y <= static_cast<int>(d.y) + r; ++y) {
        for (int x = static_cast<int>(d.x) - r; x <= static_cast<int>(d.x) + r; ++x) {
          if ((x - d.x) * (x - d.x) + (y - d.y) * (y - d.y) <= r * r && canvas.contains(x, y)) canvas.at(x, y) = 0;
        }
      }
    }
  }
  page.canvas = canvas;

  const double page_w = options.page_fraction * options.width;
  const double page_h = page_w * layout.height / layout.width;
  if (page_h > options.height * 0.95) throw Error(ErrorCode::OutOfBounds, "page does not fit the frame");
  const double cx = options.width / 2.0, cy = options.height / 2.0;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::array<Point2d, 4> corners = {Point2d{cx - page_w / 2, cy - page_h / 2}, {cx + page_w / 2, cy - page_h / 2},
                                    {cx + page_w / 2, cy + page_h / 2}, {cx - page_w / 2, cy + page_h / 2}};
  for (auto& c : corners) {
    c.x += unit(rng) * options.jitter * page_w;
    c.y += unit(rng) * options.jitter * page_h;
  }

  // The camera-side view of a face-down page is mirrored left to right.
  const Image seen = options.face_down ? vision::flipped(canvas, true, false) : canvas;
  const vision::Homography unit_to_frame = vision::homography_from_quad(corners);
  const vision::Homography frame_to_canvas =
      vision::Homography({static_cast<double>(layout.width), 0, 0, 0, static_cast<double>(layout.height), 0, 0, 0, 1}) *
      unit_to_frame.inverse();

  // Each frame pixel averages a 4x4 grid of point samples, so page and region
  // edges come out as partial-coverage blends like a camera sensor records.
  constexpr int kSub = 4;
  Image img(options.width, options.height, 1, options.background);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      int sum = 0;
      for (int sy = 0; sy < kSub; ++sy) {
        for (int sx = 0; sx < kSub; ++sx) {
          const Point2d q = frame_to_canvas.apply({x - 0.5 + (sx + 0.5) / kSub, y - 0.5 + (sy + 0.5) / kSub});
          const int u = static_cast<int>(std::floor(q.x));
          const int v = static_cast<int>(std::floor(q.y));
          sum += seen.contains(u, v) ? seen.at(u, v) : options.background;
        }
      }
      img.at(x, y) = static_cast<std::uint8_t>((sum + kSub * kSub / 2) / (kSub * kSub));
    }
  }
  page.frame = vision::Frame(std::move(img));

  // Upright canvas corner (0,0) appears at the seen-image top-right when mirrored.
  if (options.face_down) {
    page.page_corners = {corners[1], corners[0], corners[3], corners[2]};
  } else {
    page.page_corners = corners;
  }
  return page;
}

}  // namespace tangiviz::synth

#endif  // TANGIVIZ_SYNTH_HPP_
