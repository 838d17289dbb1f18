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

#ifndef TANGIVIZ_TEMPLATE_SCANNER_HPP_
#define TANGIVIZ_TEMPLATE_SCANNER_HPP_

// Paper template geometry and scanning: find the face-down page in a frame,
// rectify it to the canonical canvas, and cut out the handwritten regions.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tangiviz/error.hpp"
#include "tangiviz/image.hpp"
#include "tangiviz/vision.hpp"

namespace tangiviz::scan {

enum class TemplateKind { BarLine, Pie };

inline std::string to_string(TemplateKind kind) { return kind == TemplateKind::Pie ? "pie" : "bar_line"; }

inline TemplateKind template_kind_from_string(const std::string& s) {
  if (s == "bar_line") return TemplateKind::BarLine;
  if (s == "pie") return TemplateKind::Pie;
  throw Error(ErrorCode::InvalidArgument, "unknown template kind '" + s + "'");
}

/// Normalized rectangle in [0,1]^2.
struct NormRect {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
};

/// Half-open pixel rectangle [x0,x1) x [y0,y1).
struct PixelRect {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;

  int area() const { return std::max(0, x1 - x0) * std::max(0, y1 - y0); }
  bool overlaps(const PixelRect& o) const { return x0 < o.x1 && o.x0 < x1 && y0 < o.y1 && o.y0 < y1; }
  friend bool operator==(const PixelRect&, const PixelRect&) = default;
};

inline constexpr int kMaxRegions = 5;

struct TemplateLayout {
  TemplateKind kind = TemplateKind::BarLine;
  int width = 1000;
  int height = 600;
  NormRect title;
  std::optional<NormRect> y_scale;  // bar_line only
  std::vector<NormRect> labels;     // bar_line: x-axis label blocks
  std::vector<NormRect> legend;     // pie: legend rows

  PixelRect to_pixels(const NormRect& r) const {
    return {static_cast<int>(std::lround(r.x0 * width)), static_cast<int>(std::lround(r.y0 * height)),
            static_cast<int>(std::lround(r.x1 * width)), static_cast<int>(std::lround(r.y1 * height))};
  }

  /// Per-data-point regions (labels or legend rows).
  const std::vector<NormRect>& point_regions() const { return kind == TemplateKind::Pie ? legend : labels; }

  void validate() const {
    auto inside = [](const NormRect& r) {
      return r.x0 >= 0 && r.y0 >= 0 && r.x1 <= 1 && r.y1 <= 1 && r.x0 < r.x1 && r.y0 < r.y1;
    };
    if (width <= 0 || height <= 0) throw Error(ErrorCode::InvalidArgument, "layout size must be positive");
    std::vector<NormRect> all{title};
    if (y_scale) all.push_back(*y_scale);
    all.insert(all.end(), labels.begin(), labels.end());
    all.insert(all.end(), legend.begin(), legend.end());
    for (const auto& r : all) {
      if (!inside(r)) throw Error(ErrorCode::InvalidArgument, "layout region outside the unit square");
    }
    const auto& points = point_regions();
    if (points.size() != kMaxRegions) throw Error(ErrorCode::InvalidArgument, "layout needs 5 point regions");
    for (std::size_t i = 0; i < all.size(); ++i) {
      for (std::size_t j = i + 1; j < all.size(); ++j) {
        if (to_pixels(all[i]).overlaps(to_pixels(all[j]))) {
          throw Error(ErrorCode::InvalidArgument, "layout regions overlap");
        }
      }
    }
  }
};

inline TemplateLayout default_layout(TemplateKind kind) {
  TemplateLayout layout;
  layout.kind = kind;
  if (kind == TemplateKind::BarLine) {
    layout.width = 1000;
    layout.height = 600;
    layout.title = {0.05, 0.02, 0.95, 0.14};
    layout.y_scale = NormRect{0.01, 0.16, 0.11, 0.90};
    for (int i = 0; i < kMaxRegions; ++i) {
      const double x0 = 0.12 + 0.176 * i;
      layout.labels.push_back({x0, 0.88, x0 + 0.16, 0.98});
    }
  } else {
    layout.width = 800;
    layout.height = 800;
    layout.title = {0.05, 0.02, 0.95, 0.12};
    for (int i = 0; i < kMaxRegions; ++i) {
      const double y0 = 0.16 + 0.14 * i;
      layout.legend.push_back({0.04, y0, 0.30, y0 + 0.10});
    }
  }
  return layout;
}

inline void to_json(nlohmann::json& j, const NormRect& r) { j = nlohmann::json::array({r.x0, r.y0, r.x1, r.y1}); }
inline void from_json(const nlohmann::json& j, NormRect& r) {
  if (!j.is_array() || j.size() != 4) throw Error(ErrorCode::InvalidArgument, "rect must be [x0,y0,x1,y1]");
  r = {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

inline void to_json(nlohmann::json& j, const TemplateLayout& l) {
  j = {{"kind", to_string(l.kind)}, {"width", l.width}, {"height", l.height}, {"title", l.title}};
  if (l.y_scale) j["y_scale"] = *l.y_scale;
  if (l.kind == TemplateKind::Pie) {
    j["legend"] = l.legend;
  } else {
    j["labels"] = l.labels;
  }
}

inline void from_json(const nlohmann::json& j, TemplateLayout& l) {
  try {
    l.kind = template_kind_from_string(j.at("kind").get<std::string>());
    l.width = j.at("width").get<int>();
    l.height = j.at("height").get<int>();
    l.title = j.at("title").get<NormRect>();
    l.y_scale.reset();
    if (j.contains("y_scale")) l.y_scale = j["y_scale"].get<NormRect>();
    l.labels = j.value("labels", std::vector<NormRect>{});
    l.legend = j.value("legend", std::vector<NormRect>{});
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("bad layout document: ") + e.what());
  }
  l.validate();
}

/// Reads a layout file holding either one layout or an array of them.
inline TemplateLayout parse_layout(const nlohmann::json& doc, TemplateKind kind) {
  if (doc.is_array()) {
    for (const auto& entry : doc) {
      if (entry.value("kind", "") == to_string(kind)) return entry.get<TemplateLayout>();
    }
    throw Error(ErrorCode::InvalidArgument, "layout file has no '" + to_string(kind) + "' entry");
  }
  auto layout = doc.get<TemplateLayout>();
  if (layout.kind != kind) throw Error(ErrorCode::InvalidArgument, "layout kind mismatch");
  return layout;
}

struct TemplateScan {
  TemplateKind kind = TemplateKind::BarLine;
  Image rectified;
  Image title_image;
  std::optional<Image> y_scale_image;
  std::vector<Image> label_images;   // bar_line
  std::vector<Image> legend_images;  // pie
  std::chrono::system_clock::time_point scanned_at{};

  std::size_t point_count() const { return kind == TemplateKind::Pie ? legend_images.size() : label_images.size(); }
  const std::vector<Image>& point_images() const { return kind == TemplateKind::Pie ? legend_images : label_images; }
};

struct ScanOptions {
  /// Face-down pages appear mirrored; undo it after rectification.
  bool flip_horizontal = true;
  double min_area_fraction = 0.30;
};

namespace detail {

struct EdgeLine {
  Point2d point;
  Point2d direction;
};

// Total least squares fit to the boundary pixels along the middle of one edge.
inline std::optional<EdgeLine> fit_edge(std::span<const vision::Contour> contours, Point2d a, Point2d b) {
  const double len = std::hypot(b.x - a.x, b.y - a.y);
  if (len < 1.0) return std::nullopt;
  const Point2d u{(b.x - a.x) / len, (b.y - a.y) / len};
  std::vector<Point2d> pts;
  for (const auto& contour : contours) {
    for (const auto& px : contour) {
      const double dx = px.x - a.x, dy = px.y - a.y;
      const double t = dx * u.x + dy * u.y;
      if (t < 0.1 * len || t > 0.9 * len || std::abs(dx * u.y - dy * u.x) > 3.0) continue;
      pts.push_back({static_cast<double>(px.x), static_cast<double>(px.y)});
    }
  }
  if (pts.size() < 10) return std::nullopt;
  Point2d c{0, 0};
  for (const auto& p : pts) c = c + (1.0 / static_cast<double>(pts.size())) * p;
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& p : pts) {
    sxx += (p.x - c.x) * (p.x - c.x);
    sxy += (p.x - c.x) * (p.y - c.y);
    syy += (p.y - c.y) * (p.y - c.y);
  }
  const double theta = 0.5 * std::atan2(2 * sxy, sxx - syy);
  return EdgeLine{c, {std::cos(theta), std::sin(theta)}};
}

inline std::optional<Point2d> intersect(const EdgeLine& l, const EdgeLine& m) {
  const double det = l.direction.x * m.direction.y - l.direction.y * m.direction.x;
  if (std::abs(det) < 1e-6) return std::nullopt;
  const double dx = m.point.x - l.point.x, dy = m.point.y - l.point.y;
  const double t = (dx * m.direction.y - dy * m.direction.x) / det;
  return Point2d{l.point.x + t * l.direction.x, l.point.y + t * l.direction.y};
}

// Pixel-contour corners sit on the lattice; intersecting fitted edge lines
// recovers them to sub-pixel accuracy.
inline vision::Quad refine_corners(const vision::Quad& q, std::span<const vision::Contour> contours) {
  std::array<std::optional<EdgeLine>, 4> edges;
  const Point2d center = q.centroid();
  for (int i = 0; i < 4; ++i) {
    edges[i] = fit_edge(contours, q.corners[i], q.corners[(i + 1) % 4]);
    if (!edges[i]) continue;
    // Boundary pixel centers sit half a pixel inside the true edge on average.
    Point2d n{-edges[i]->direction.y, edges[i]->direction.x};
    if ((edges[i]->point.x - center.x) * n.x + (edges[i]->point.y - center.y) * n.y < 0) n = -1.0 * n;
    edges[i]->point = edges[i]->point + 0.5 * n;
  }
  vision::Quad out = q;
  for (int i = 0; i < 4; ++i) {
    const auto& prev = edges[(i + 3) % 4];
    const auto& next = edges[i];
    if (!prev || !next) continue;
    const auto p = intersect(*prev, *next);
    if (p && std::hypot(p->x - q.corners[i].x, p->y - q.corners[i].y) <= 4.0) out.corners[i] = *p;
  }
  return out.is_convex() ? out : q;
}

}  // namespace detail

/// Convex page quad with corner 0 nearest the frame's top-left, clockwise.
inline std::optional<vision::Quad> find_page(const vision::Frame& frame, double min_area_fraction) {
  // Paper is light on the dark box interior: binarize with inverted polarity.
  const int t = vision::otsu_threshold(frame.image().pixels());
  if (t < 0) return std::nullopt;
  vision::BinaryImage bright(frame.width(), frame.height());
  for (int y = 0; y < frame.height(); ++y) {
    for (int x = 0; x < frame.width(); ++x) bright.at(x, y) = frame.at(x, y) > t ? 1 : 0;
  }
  const auto contours = vision::trace_contours(bright);
  const auto quads = vision::approx_quads(contours, vision::kDefaultMinPerimeterPx);

  std::optional<vision::Quad> best;
  double best_area = min_area_fraction * frame.width() * frame.height();
  for (const auto& q : quads) {
    const double area = std::abs(q.signed_area());
    if (area >= best_area) {
      best_area = area;
      best = q;
    }
  }
  if (!best) return std::nullopt;
  best = detail::refine_corners(*best, contours);
  int start = 0;
  for (int i = 1; i < 4; ++i) {
    const auto& c = best->corners[i];
    const auto& s = best->corners[start];
    if (c.x + c.y < s.x + s.y) start = i;
  }
  return best->rotated_start(start);
}

inline Image rectify_template(const vision::Frame& frame, const TemplateLayout& layout, const ScanOptions& options = {}) {
  const auto page = find_page(frame, options.min_area_fraction);
  if (!page) throw Error(ErrorCode::NoPageFound, "no page quad covers 30% of the frame");
  const vision::Homography unit_to_frame = vision::homography_from_quad(page->corners);
  // The quad traces the page's outer edge, so canvas pixel centers sit half a cell inside it.
  const double sx = 1.0 / layout.width, sy = 1.0 / layout.height;
  const vision::Homography canvas_to_unit({sx, 0, 0.5 * sx, 0, sy, 0.5 * sy, 0, 0, 1});
  Image rectified = vision::warp_perspective(frame.image(), unit_to_frame * canvas_to_unit, layout.width, layout.height);
  return options.flip_horizontal ? vision::flipped(rectified, true, false) : rectified;
}

inline TemplateScan crop_regions(const Image& rectified, const TemplateLayout& layout, int n_points) {
  if (n_points < 1 || n_points > kMaxRegions) {
    throw Error(ErrorCode::BadNPoints, "n_points must be in [1, 5], got " + std::to_string(n_points));
  }
  if (rectified.width() != layout.width || rectified.height() != layout.height) {
    throw Error(ErrorCode::InvalidArgument, "rectified image does not match the layout canvas");
  }
  auto cut = [&](const NormRect& r) {
    const PixelRect p = layout.to_pixels(r);
    return crop(rectified, p.x0, p.y0, p.x1, p.y1);
  };

  TemplateScan scan;
  scan.kind = layout.kind;
  scan.rectified = rectified;
  scan.title_image = cut(layout.title);
  if (layout.y_scale) scan.y_scale_image = cut(*layout.y_scale);
  auto& points = layout.kind == TemplateKind::Pie ? scan.legend_images : scan.label_images;
  for (int i = 0; i < n_points; ++i) points.push_back(cut(layout.point_regions().at(i)));
  scan.scanned_at = std::chrono::system_clock::now();
  return scan;
}

inline TemplateScan scan_template(const vision::Frame& frame, const TemplateLayout& layout, int n_points,
                                  const ScanOptions& options = {}) {
  return crop_regions(rectify_template(frame, layout, options), layout, n_points);
}

}  // namespace tangiviz::scan

#endif  // TANGIVIZ_TEMPLATE_SCANNER_HPP_
