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

#ifndef TANGIVIZ_CHART_MODEL_HPP_
#define TANGIVIZ_CHART_MODEL_HPP_

// Live chart state driven by marker observations. Bar and line charts read
// vertical slider positions; pie charts read the rotation of stacked
// section discs.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tangiviz/error.hpp"
#include "tangiviz/image.hpp"
#include "tangiviz/vision.hpp"

namespace tangiviz::chart {

enum class ChartKind { Bar, Line, Pie };

inline std::string to_string(ChartKind kind) {
  switch (kind) {
    case ChartKind::Bar: return "bar";
    case ChartKind::Line: return "line";
    case ChartKind::Pie: return "pie";
  }
  return "bar";
}

inline ChartKind chart_kind_from_string(const std::string& s) {
  if (s == "bar") return ChartKind::Bar;
  if (s == "line") return ChartKind::Line;
  if (s == "pie") return ChartKind::Pie;
  throw Error(ErrorCode::InvalidArgument, "unknown chart kind '" + s + "'");
}

inline constexpr int kMaxPoints = 5;
inline constexpr double kSmoothingAlpha = 0.5;
inline constexpr double kPieSumTolerance = 1e-6;

// ---------------------------------------------------------------------------
// Palette

struct Rgb {
  std::uint8_t r, g, b;
};

struct PaletteEntry {
  const char* name;
  Rgb rgb;
};

inline constexpr std::array<PaletteEntry, 7> kPalette = {{{"red", {220, 50, 47}},
                                                          {"orange", {245, 130, 32}},
                                                          {"yellow", {240, 200, 40}},
                                                          {"green", {60, 170, 80}},
                                                          {"blue", {50, 110, 200}},
                                                          {"purple", {140, 80, 170}},
                                                          {"gray", {128, 128, 128}}}};

inline bool is_palette_color(const std::string& name) {
  return std::any_of(kPalette.begin(), kPalette.end(), [&](const auto& e) { return name == e.name; });
}

inline Rgb color_rgb(const std::string& name) {
  for (const auto& e : kPalette) {
    if (name == e.name) return e.rgb;
  }
  throw Error(ErrorCode::UnknownColor, "'" + name + "' is not a palette color");
}

inline std::vector<std::string> default_colors(int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.emplace_back(kPalette[i % kPalette.size()].name);
  return out;
}

// ---------------------------------------------------------------------------
// Calibration

struct SliderChannel {
  int index = 0;
  double x_center = 0;
  double y_bottom = 0;  // image y grows downward, so y_bottom > y_top
  double y_top = 0;
  int marker_id = 0;
};

struct PieSection {
  int marker_id = 0;
  std::string color_name;
  double zero_offset_deg = 0;
};

struct CalibrationConfig {
  std::vector<SliderChannel> channels;
  std::vector<PieSection> pie_markers;
  bool flip_h = false;
  bool flip_v = false;

  void validate() const {
    if (channels.empty() || channels.size() > kMaxPoints) {
      throw Error(ErrorCode::InvalidCalibration, "calibration needs 1 to 5 slider channels");
    }
    if (pie_markers.size() > kMaxPoints) throw Error(ErrorCode::InvalidCalibration, "at most 5 pie sections");
    std::set<int> ids;
    for (const auto& c : channels) {
      MarkerId{c.marker_id};
      if (!(c.y_bottom > c.y_top)) {
        throw Error(ErrorCode::InvalidCalibration, "channel " + std::to_string(c.index) + " has y_bottom <= y_top");
      }
      if (!ids.insert(c.marker_id).second) {
        throw Error(ErrorCode::InvalidCalibration, "duplicate channel marker id " + std::to_string(c.marker_id));
      }
    }
    ids.clear();
    for (const auto& p : pie_markers) {
      MarkerId{p.marker_id};
      if (!is_palette_color(p.color_name)) throw Error(ErrorCode::InvalidCalibration, "unknown pie color " + p.color_name);
      if (!ids.insert(p.marker_id).second) {
        throw Error(ErrorCode::InvalidCalibration, "duplicate pie marker id " + std::to_string(p.marker_id));
      }
    }
  }
};

inline CalibrationConfig default_calibration() {
  CalibrationConfig c;
  for (int i = 0; i < kMaxPoints; ++i) c.channels.push_back({i, 64.0 + 128.0 * i, 420.0, 100.0, i});
  const auto colors = default_colors(kMaxPoints);
  for (int i = 0; i < kMaxPoints; ++i) c.pie_markers.push_back({10 + i, colors[i], 0.0});
  return c;
}

inline void to_json(nlohmann::json& j, const SliderChannel& c) {
  j = {{"index", c.index}, {"x_center", c.x_center}, {"y_bottom", c.y_bottom}, {"y_top", c.y_top},
       {"marker_id", c.marker_id}};
}
inline void from_json(const nlohmann::json& j, SliderChannel& c) {
  c.index = j.at("index").get<int>();
  c.x_center = j.at("x_center").get<double>();
  c.y_bottom = j.at("y_bottom").get<double>();
  c.y_top = j.at("y_top").get<double>();
  c.marker_id = j.at("marker_id").get<int>();
}
inline void to_json(nlohmann::json& j, const PieSection& p) {
  j = {{"marker_id", p.marker_id}, {"color_name", p.color_name}, {"zero_offset_deg", p.zero_offset_deg}};
}
inline void from_json(const nlohmann::json& j, PieSection& p) {
  p.marker_id = j.at("marker_id").get<int>();
  p.color_name = j.at("color_name").get<std::string>();
  p.zero_offset_deg = j.value("zero_offset_deg", 0.0);
}
inline void to_json(nlohmann::json& j, const CalibrationConfig& c) {
  j = {{"channels", c.channels}, {"pie_markers", c.pie_markers}, {"flip_h", c.flip_h}, {"flip_v", c.flip_v}};
}

/// Parses and validates; any defect is InvalidCalibration.
inline CalibrationConfig calibration_from_json(const nlohmann::json& j) {
  CalibrationConfig c;
  try {
    if (!j.is_object()) throw Error(ErrorCode::InvalidCalibration, "calibration must be a JSON object");
    c.channels = j.at("channels").get<std::vector<SliderChannel>>();
    c.pie_markers = j.value("pie_markers", std::vector<PieSection>{});
    c.flip_h = j.value("flip_h", false);
    c.flip_v = j.value("flip_v", false);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidCalibration, e.what());
  }
  try {
    c.validate();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidCalibration) throw;
    throw Error(ErrorCode::InvalidCalibration, e.what());
  }
  return c;
}

// ---------------------------------------------------------------------------
// Chart state

using ImageRef = std::shared_ptr<const Image>;

struct ChartState {
  ChartKind kind = ChartKind::Bar;
  int n_points = kMaxPoints;
  /// bar/line: values in [0, y_max]; pie: fractions summing to 1.
  std::vector<double> values;
  double y_max = 10.0;
  std::vector<std::string> colors;
  /// Text labels (tutorial data set only; authored charts use label images).
  std::vector<std::string> labels;
  ImageRef title_image;
  std::vector<ImageRef> label_images;
  bool paused = false;
  /// Last mapping failure, surfaced to the UI; values stay at the last good state.
  std::optional<std::string> error;
  /// Last observed section angle per pie section, for occlusion hold.
  std::vector<std::optional<double>> pie_angles;
};

inline ChartState make_chart(ChartKind kind, int n_points, double y_max) {
  if (n_points < 1 || n_points > kMaxPoints) throw Error(ErrorCode::InvalidArgument, "n_points must be in [1, 5]");
  if (kind != ChartKind::Pie && !(y_max > 0)) throw Error(ErrorCode::InvalidArgument, "y_max must be positive");
  ChartState s;
  s.kind = kind;
  s.n_points = n_points;
  s.y_max = y_max;
  s.colors = default_colors(n_points);
  if (kind == ChartKind::Pie) {
    s.values.assign(n_points, 1.0 / n_points);
    s.pie_angles.assign(n_points, std::nullopt);
  } else {
    s.values.assign(n_points, 0.0);
  }
  return s;
}

/// Tutorial data: five fruit categories on a 0-10 axis.
struct FruitDataset {
  static constexpr std::array<const char*, 5> kCategories = {"apple", "banana", "orange", "grape", "pear"};
  static constexpr double kYMax = 10.0;

  static ChartState chart(ChartKind kind) {
    ChartState s = make_chart(kind, kMaxPoints, kYMax);
    s.labels.assign(kCategories.begin(), kCategories.end());
    return s;
  }
};

// ---------------------------------------------------------------------------
// Mapping

namespace detail {

inline const vision::MarkerObservation* find_marker(std::span<const vision::MarkerObservation> obs, int marker_id) {
  for (const auto& o : obs) {
    if (o.id.value() == marker_id) return &o;
  }
  return nullptr;
}

}  // namespace detail

/// Slider height mapped to [0, y_max]. Channels without a matching marker
/// keep `previous[i]` (0 when no previous value exists).
inline std::vector<double> bar_values(std::span<const vision::MarkerObservation> obs, const CalibrationConfig& calib,
                                      double y_max, int n_points, std::span<const double> previous = {}) {
  if (calib.channels.empty()) throw Error(ErrorCode::NoCalibration, "no slider channels calibrated");
  if (n_points < 1 || n_points > static_cast<int>(calib.channels.size())) {
    throw Error(ErrorCode::InvalidArgument, "n_points exceeds the calibrated channel count");
  }
  if (!(y_max > 0)) throw Error(ErrorCode::InvalidArgument, "y_max must be positive");

  std::vector<SliderChannel> channels = calib.channels;
  std::stable_sort(channels.begin(), channels.end(), [](const auto& a, const auto& b) { return a.index < b.index; });

  std::vector<double> values(n_points, 0.0);
  for (int i = 0; i < n_points; ++i) {
    const auto& ch = channels[i];
    if (const auto* o = detail::find_marker(obs, ch.marker_id)) {
      const double t = (ch.y_bottom - o->center.y) / (ch.y_bottom - ch.y_top);
      values[i] = y_max * std::clamp(t, 0.0, 1.0);
    } else if (i < static_cast<int>(previous.size())) {
      values[i] = previous[i];
    }
  }
  return values;
}

/// Same mapping as bar_values; the series is ordered by channel index.
inline std::vector<double> line_values(std::span<const vision::MarkerObservation> obs, const CalibrationConfig& calib,
                                       double y_max, int n_points, std::span<const double> previous = {}) {
  return bar_values(obs, calib, y_max, n_points, previous);
}

/// Per-section angle (orientation minus zero offset, mod 360) in calibration
/// order, falling back to `stale` for occluded sections.
inline std::vector<double> pie_section_angles(std::span<const vision::MarkerObservation> obs,
                                              const CalibrationConfig& calib, int n_points,
                                              std::span<const std::optional<double>> stale = {}) {
  if (n_points < 1 || n_points > static_cast<int>(calib.pie_markers.size())) {
    throw Error(ErrorCode::InvalidArgument, "n_points exceeds the calibrated pie sections");
  }
  std::vector<double> angles(n_points);
  for (int i = 0; i < n_points; ++i) {
    const auto& section = calib.pie_markers[i];
    if (const auto* o = detail::find_marker(obs, section.marker_id)) {
      angles[i] = vision::normalize_degrees(o->orientation_deg - section.zero_offset_deg);
    } else if (i < static_cast<int>(stale.size()) && stale[i]) {
      angles[i] = *stale[i];
    } else {
      throw Error(ErrorCode::MissingSection, "pie marker " + std::to_string(section.marker_id) + " not seen yet");
    }
  }
  return angles;
}

/// Gap from each section to the next one in stacking order (marker_id
/// ascending, cyclic), as a fraction of the full turn. The gaps of a
/// physically valid stack add up to exactly one turn.
inline std::vector<double> pie_fractions_from_angles(std::span<const double> angles, std::span<const int> marker_ids) {
  const std::size_t n = angles.size();
  if (n == 0 || marker_ids.size() != n) throw Error(ErrorCode::InvalidArgument, "need one marker id per angle");
  if (n == 1) return {1.0};

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return marker_ids[a] < marker_ids[b]; });

  std::vector<double> gaps(n);
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t cur = order[k];
    const std::size_t next = order[(k + 1) % n];
    gaps[cur] = vision::normalize_degrees(angles[next] - angles[cur]);
    total += gaps[cur];
  }
  if (std::abs(total - 360.0) > kPieSumTolerance) {
    throw Error(ErrorCode::SectionsOverlap, "section gaps add up to " + std::to_string(total) + " degrees");
  }
  std::vector<double> fractions(n);
  for (std::size_t i = 0; i < n; ++i) fractions[i] = gaps[i] / total;
  return fractions;
}

inline std::vector<double> pie_fractions(std::span<const vision::MarkerObservation> obs, const CalibrationConfig& calib,
                                         int n_points, std::span<const std::optional<double>> stale = {}) {
  const auto angles = pie_section_angles(obs, calib, n_points, stale);
  std::vector<int> ids;
  for (int i = 0; i < n_points; ++i) ids.push_back(calib.pie_markers[i].marker_id);
  return pie_fractions_from_angles(angles, ids);
}

inline ChartState set_color(ChartState state, int index, const std::string& color) {
  if (index < 0 || index >= state.n_points) {
    throw Error(ErrorCode::IndexOutOfRange, "color index " + std::to_string(index) + " out of range");
  }
  if (!is_palette_color(color)) throw Error(ErrorCode::UnknownColor, "'" + color + "' is not a palette color");
  state.colors[index] = color;
  return state;
}

/// Next frame of the live chart. Paused charts are returned untouched; a
/// mapping failure keeps the last good values and records the error.
inline ChartState apply_observations(const ChartState& state, std::span<const vision::MarkerObservation> obs,
                                     const CalibrationConfig& calib) {
  if (state.paused) return state;
  ChartState next = state;
  next.error.reset();
  try {
    if (state.kind == ChartKind::Pie) {
      std::vector<std::optional<double>> cache = state.pie_angles;
      cache.resize(state.n_points);
      for (int i = 0; i < state.n_points && i < static_cast<int>(calib.pie_markers.size()); ++i) {
        const auto& section = calib.pie_markers[i];
        if (const auto* o = detail::find_marker(obs, section.marker_id)) {
          cache[i] = vision::normalize_degrees(o->orientation_deg - section.zero_offset_deg);
        }
      }
      next.pie_angles = cache;
      next.values = pie_fractions(obs, calib, state.n_points, cache);
    } else {
      const auto fresh = bar_values(obs, calib, state.y_max, state.n_points, state.values);
      for (int i = 0; i < state.n_points; ++i) {
        next.values[i] = std::clamp(kSmoothingAlpha * fresh[i] + (1.0 - kSmoothingAlpha) * state.values[i], 0.0,
                                    state.y_max);
      }
    }
  } catch (const Error& e) {
    next.values = state.values;
    next.error = e.what();
  }
  return next;
}

// ---------------------------------------------------------------------------
// Two-pose calibration

/// Slider extremes from a frame with every slider at the bottom and one with
/// every slider at the top.
inline CalibrationConfig calibrate_two_pose(const vision::Frame& frame_bottom, const vision::Frame& frame_top,
                                            std::span<const int> marker_ids, const vision::DetectConfig& detect = {},
                                            const CalibrationConfig& base = default_calibration()) {
  if (marker_ids.empty() || marker_ids.size() > kMaxPoints) {
    throw Error(ErrorCode::InvalidArgument, "need 1 to 5 marker ids");
  }
  const auto bottom = vision::detect_markers(frame_bottom, detect);
  const auto top = vision::detect_markers(frame_top, detect);

  std::string missing;
  for (int id : marker_ids) {
    if (!detail::find_marker(bottom, id)) missing += " " + std::to_string(id) + "(bottom)";
    if (!detail::find_marker(top, id)) missing += " " + std::to_string(id) + "(top)";
  }
  if (!missing.empty()) throw Error(ErrorCode::MissingMarker, "markers not found:" + missing);

  std::vector<SliderChannel> channels;
  for (int id : marker_ids) {
    const auto* b = detail::find_marker(bottom, id);
    const auto* t = detail::find_marker(top, id);
    if (!(b->center.y > t->center.y)) {
      throw Error(ErrorCode::InvertedChannel, "marker " + std::to_string(id) + " is not higher in the top frame");
    }
    channels.push_back({0, 0.5 * (b->center.x + t->center.x), b->center.y, t->center.y, id});
  }
  std::stable_sort(channels.begin(), channels.end(), [](const auto& a, const auto& b) { return a.x_center < b.x_center; });
  for (std::size_t i = 0; i < channels.size(); ++i) channels[i].index = static_cast<int>(i);

  CalibrationConfig out = base;
  out.channels = std::move(channels);
  out.flip_h = frame_bottom.flip_h();
  out.flip_v = frame_bottom.flip_v();
  out.validate();
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

/// Chart as exposed over the API. Image payloads are referenced, not inlined.
inline nlohmann::json chart_to_json(const ChartState& s) {
  nlohmann::json j = {{"kind", to_string(s.kind)},
                      {"n_points", s.n_points},
                      {"values", s.values},
                      {"colors", s.colors},
                      {"labels", s.labels},
                      {"paused", s.paused},
                      {"has_title_image", static_cast<bool>(s.title_image)},
                      {"label_image_count", s.label_images.size()}};
  if (s.kind != ChartKind::Pie) j["y_max"] = s.y_max;
  j["error"] = s.error ? nlohmann::json(*s.error) : nlohmann::json(nullptr);
  return j;
}

}  // namespace tangiviz::chart

#endif  // TANGIVIZ_CHART_MODEL_HPP_
