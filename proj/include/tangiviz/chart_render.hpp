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

#ifndef TANGIVIZ_CHART_RENDER_HPP_
#define TANGIVIZ_CHART_RENDER_HPP_

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tangiviz/chart_model.hpp"
#include "tangiviz/image.hpp"

namespace tangiviz::chart {

inline constexpr int kRenderWidth = 800;
inline constexpr int kRenderHeight = 600;

namespace render_detail {

struct Box {
  int x0, y0, x1, y1;
};

// Plot area for bar/line charts; the baseline is the bottom edge.
inline constexpr Box kPlot{80, 60, 760, 470};
inline constexpr Box kTitle{80, 4, 760, 52};
inline constexpr int kLabelTop = 484;
inline constexpr int kLabelBottom = 592;
inline constexpr Rgb kInk{40, 40, 40};

inline void fill_rect(Image& img, int x0, int y0, int x1, int y1, Rgb c) {
  x0 = std::max(x0, 0);
  y0 = std::max(y0, 0);
  x1 = std::min(x1, img.width());
  y1 = std::min(y1, img.height());
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) {
      img.at(x, y, 0) = c.r;
      img.at(x, y, 1) = c.g;
      img.at(x, y, 2) = c.b;
    }
  }
}

inline void fill_disc(Image& img, int cx, int cy, int r, Rgb c) {
  for (int y = cy - r; y <= cy + r; ++y) {
    for (int x = cx - r; x <= cx + r; ++x) {
      if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r && img.contains(x, y)) fill_rect(img, x, y, x + 1, y + 1, c);
    }
  }
}

// Integer Bresenham with a square brush.
inline void draw_line(Image& img, int x0, int y0, int x1, int y1, int half_width, Rgb c) {
  const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
  const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  while (true) {
    fill_rect(img, x0 - half_width, y0 - half_width, x0 + half_width + 1, y0 + half_width + 1, c);
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

// Nearest-neighbour paste that preserves aspect ratio, centered in the box.
inline void paste_fit(Image& dst, const Image& src, Box box) {
  if (src.width() == 0 || src.height() == 0) return;
  const int bw = box.x1 - box.x0, bh = box.y1 - box.y0;
  const std::int64_t sw = src.width(), sh = src.height();
  int w = bw, h = static_cast<int>(sh * bw / sw);
  if (h > bh) {
    h = bh;
    w = static_cast<int>(sw * bh / sh);
  }
  w = std::max(w, 1);
  h = std::max(h, 1);
  const int ox = box.x0 + (bw - w) / 2, oy = box.y0 + (bh - h) / 2;
  for (int y = 0; y < h; ++y) {
    const int sy = static_cast<int>(y * sh / h);
    for (int x = 0; x < w; ++x) {
      const int sx = static_cast<int>(x * sw / w);
      for (int ch = 0; ch < 3; ++ch) {
        dst.at(ox + x, oy + y, ch) = src.at(sx, sy, src.channels() == 3 ? ch : 0);
      }
    }
  }
}

inline int value_to_y(double v, double y_max) {
  const double f = std::clamp(v / y_max, 0.0, 1.0);
  return kPlot.y1 - static_cast<int>(std::lround(f * (kPlot.y1 - kPlot.y0)));
}

inline void draw_axes(Image& img) {
  fill_rect(img, kPlot.x0 - 2, kPlot.y0, kPlot.x0, kPlot.y1 + 2, kInk);
  fill_rect(img, kPlot.x0 - 2, kPlot.y1, kPlot.x1, kPlot.y1 + 2, kInk);
  // Ticks at 0, y_max / 2 and y_max.
  for (int k = 0; k <= 2; ++k) {
    const int y = kPlot.y1 - k * (kPlot.y1 - kPlot.y0) / 2;
    fill_rect(img, kPlot.x0 - 12, y - 1, kPlot.x0 - 2, y + 1, kInk);
  }
}

inline int slot_center(int i, int n) {
  const int slot = (kPlot.x1 - kPlot.x0) / n;
  return kPlot.x0 + slot * i + slot / 2;
}

inline void draw_labels(Image& img, const ChartState& chart) {
  const int slot = (kPlot.x1 - kPlot.x0) / chart.n_points;
  for (int i = 0; i < chart.n_points && i < static_cast<int>(chart.label_images.size()); ++i) {
    if (!chart.label_images[i]) continue;
    const int x0 = kPlot.x0 + slot * i;
    paste_fit(img, *chart.label_images[i], {x0 + 4, kLabelTop, x0 + slot - 4, kLabelBottom});
  }
}

inline void draw_pie(Image& img, const ChartState& chart) {
  constexpr int cx = 330, cy = 320, radius = 230;
  std::vector<double> bounds;
  double acc = 0;
  for (double f : chart.values) bounds.push_back(acc += std::max(f, 0.0));
  for (int y = cy - radius; y <= cy + radius; ++y) {
    for (int x = cx - radius; x <= cx + radius; ++x) {
      const int dx = x - cx, dy = y - cy;
      if (dx * dx + dy * dy > radius * radius) continue;
      // Clockwise from 12 o'clock as displayed.
      double a = std::atan2(static_cast<double>(dx), static_cast<double>(-dy)) / (2 * std::numbers::pi);
      if (a < 0) a += 1.0;
      const double t = a * acc;
      std::size_t k = 0;
      while (k + 1 < bounds.size() && t >= bounds[k]) ++k;
      fill_rect(img, x, y, x + 1, y + 1, color_rgb(chart.colors[k]));
    }
  }
  // Legend: swatch plus the scanned legend crop when present.
  for (int i = 0; i < chart.n_points; ++i) {
    const int y0 = 110 + 90 * i;
    fill_rect(img, 600, y0 + 20, 640, y0 + 60, color_rgb(chart.colors[i]));
    if (i < static_cast<int>(chart.label_images.size()) && chart.label_images[i]) {
      paste_fit(img, *chart.label_images[i], {650, y0, 790, y0 + 80});
    }
  }
}

}  // namespace render_detail

/// Deterministic 800x600 RGB raster of a chart.
inline Image render_chart_image(const ChartState& chart) {
  using namespace render_detail;
  Image img(kRenderWidth, kRenderHeight, 3, 255);
  if (chart.title_image) paste_fit(img, *chart.title_image, kTitle);
  const int n = chart.n_points;
  if (n < 1 || static_cast<int>(chart.values.size()) < n || static_cast<int>(chart.colors.size()) < n) return img;

  switch (chart.kind) {
    case ChartKind::Bar: {
      draw_axes(img);
      const int slot = (kPlot.x1 - kPlot.x0) / n;
      const int bar_w = slot * 3 / 5;
      for (int i = 0; i < n; ++i) {
        const int xc = slot_center(i, n);
        // A zero value still leaves a one pixel stub on the baseline.
        const int top = std::min(value_to_y(chart.values[i], chart.y_max), kPlot.y1 - 1);
        fill_rect(img, xc - bar_w / 2, top, xc - bar_w / 2 + bar_w, kPlot.y1, color_rgb(chart.colors[i]));
      }
      draw_labels(img, chart);
      break;
    }
    case ChartKind::Line: {
      draw_axes(img);
      for (int i = 0; i + 1 < n; ++i) {
        draw_line(img, slot_center(i, n), value_to_y(chart.values[i], chart.y_max), slot_center(i + 1, n),
                  value_to_y(chart.values[i + 1], chart.y_max), 1, kInk);
      }
      for (int i = 0; i < n; ++i) {
        fill_disc(img, slot_center(i, n), value_to_y(chart.values[i], chart.y_max), 9, color_rgb(chart.colors[i]));
      }
      draw_labels(img, chart);
      break;
    }
    case ChartKind::Pie:
      draw_pie(img, chart);
      break;
  }
  return img;
}

}  // namespace tangiviz::chart

#endif  // TANGIVIZ_CHART_RENDER_HPP_
