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

#ifndef TANGIVIZ_SNAPSHOT_STORE_HPP_
#define TANGIVIZ_SNAPSHOT_STORE_HPP_

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tangiviz/chart_model.hpp"
#include "tangiviz/chart_render.hpp"
#include "tangiviz/error.hpp"
#include "tangiviz/png_io.hpp"

namespace tangiviz::session {

/// Microseconds since the Unix epoch as "YYYY-MM-DDTHH:MM:SS.uuuuuuZ".
inline std::string format_rfc3339(std::int64_t micros) {
  const std::time_t secs = static_cast<std::time_t>(micros / 1000000);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[96];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%06dZ", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(micros % 1000000));
  return buf;
}

inline std::optional<std::int64_t> parse_rfc3339(const std::string& s) {
  std::tm tm{};
  int micros = 0;
  char z = 0;
  if (std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d.%6d%c", &tm.tm_year, &tm.tm_mon, &tm.tm_mday, &tm.tm_hour,
                  &tm.tm_min, &tm.tm_sec, &micros, &z) != 8 ||
      z != 'Z') {
    return std::nullopt;
  }
  tm.tm_year -= 1900;
  tm.tm_mon -= 1;
  return static_cast<std::int64_t>(timegm(&tm)) * 1000000 + micros;
}

struct Snapshot {
  std::string snapshot_id;
  std::string saved_at;
  chart::ChartKind kind = chart::ChartKind::Bar;
  int n_points = 0;
  std::vector<double> values;
  std::vector<std::string> colors;
  std::optional<double> y_max;
  /// File names relative to the store directory.
  std::optional<std::string> title_image;
  std::vector<std::string> label_images;
  std::string rendered_image;
};

inline void to_json(nlohmann::json& j, const Snapshot& s) {
  j = {{"snapshot_id", s.snapshot_id}, {"saved_at", s.saved_at},   {"kind", chart::to_string(s.kind)},
       {"n_points", s.n_points},       {"values", s.values},       {"colors", s.colors},
       {"label_images", s.label_images}, {"rendered_image", s.rendered_image}};
  if (s.y_max) j["y_max"] = *s.y_max;
  if (s.title_image) j["title_image"] = *s.title_image;
}

inline void from_json(const nlohmann::json& j, Snapshot& s) {
  j.at("snapshot_id").get_to(s.snapshot_id);
  j.at("saved_at").get_to(s.saved_at);
  s.kind = chart::chart_kind_from_string(j.at("kind").get<std::string>());
  j.at("n_points").get_to(s.n_points);
  j.at("values").get_to(s.values);
  j.at("colors").get_to(s.colors);
  s.y_max = j.contains("y_max") ? std::optional(j.at("y_max").get<double>()) : std::nullopt;
  s.title_image = j.contains("title_image") ? std::optional(j.at("title_image").get<std::string>()) : std::nullopt;
  j.at("label_images").get_to(s.label_images);
  j.at("rendered_image").get_to(s.rendered_image);
  if (!parse_rfc3339(s.saved_at)) throw Error(ErrorCode::InvalidArgument, "bad saved_at '" + s.saved_at + "'");
  if (s.n_points < 1 || s.n_points > chart::kMaxPoints || s.values.size() != static_cast<std::size_t>(s.n_points)) {
    throw Error(ErrorCode::InvalidArgument, "inconsistent n_points");
  }
}

struct SnapshotList {
  std::vector<Snapshot> snapshots;
  /// One message per skipped corrupt entry.
  std::vector<std::string> warnings;
};

/// One directory: index.json, snap_<id>.png and the crop PNGs of each snapshot.
class SnapshotStore {
 public:
  explicit SnapshotStore(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw Error(ErrorCode::StorageFailure, "cannot create " + dir_.string() + ": " + ec.message());
  }

  const std::filesystem::path& dir() const { return dir_; }

  /// Persists the chart and its render. Throws StorageFailure; the index is only
  /// rewritten after every image has landed.
  Snapshot save(const chart::ChartState& chart) {
    std::lock_guard lock(mu_);
    nlohmann::json index;
    try {
      index = read_index();
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InvalidArgument) throw;
      throw Error(ErrorCode::StorageFailure, "refusing to overwrite an unreadable index.json");
    }
    std::int64_t next_id = 1;
    std::int64_t last_micros = 0;
    for (const auto& e : index) {
      try {
        next_id = std::max<std::int64_t>(next_id, std::stoll(e.at("snapshot_id").get<std::string>()) + 1);
        last_micros = std::max(last_micros, parse_rfc3339(e.at("saved_at").get<std::string>()).value_or(0));
      } catch (const std::exception&) {
        // Corrupt entries neither block saving nor reuse ids.
      }
    }
    last_micros = std::max(last_micros, last_micros_);
    const std::int64_t now = std::chrono::duration_cast<std::chrono::microseconds>(
                                 std::chrono::system_clock::now().time_since_epoch())
                                 .count();

    char id_buf[16];
    std::snprintf(id_buf, sizeof id_buf, "%06lld", static_cast<long long>(next_id));
    Snapshot s;
    s.snapshot_id = id_buf;
    s.saved_at = format_rfc3339(std::max(now, last_micros + 1));
    s.kind = chart.kind;
    s.n_points = chart.n_points;
    s.values = chart.values;
    s.colors = chart.colors;
    if (chart.kind != chart::ChartKind::Pie) s.y_max = chart.y_max;

    const std::string stem = "snap_" + s.snapshot_id;
    s.rendered_image = stem + ".png";
    write_png(dir_ / s.rendered_image, chart::render_chart_image(chart));
    if (chart.title_image) {
      s.title_image = stem + "_title.png";
      write_png(dir_ / *s.title_image, *chart.title_image);
    }
    for (std::size_t i = 0; i < chart.label_images.size(); ++i) {
      if (!chart.label_images[i]) continue;
      s.label_images.push_back(stem + "_label_" + std::to_string(i) + ".png");
      write_png(dir_ / s.label_images.back(), *chart.label_images[i]);
    }
    index.push_back(s);
    write_file_atomic(dir_ / "index.json", index.dump(2));
    last_micros_ = *parse_rfc3339(s.saved_at);
    return s;
  }

  /// All readable snapshots ordered by saved_at; unreadable entries become warnings.
  SnapshotList list() const {
    std::lock_guard lock(mu_);
    SnapshotList out;
    nlohmann::json index;
    try {
      index = read_index();
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InvalidArgument) throw;
      out.warnings.push_back(e.what());
      return out;
    }
    for (std::size_t i = 0; i < index.size(); ++i) {
      try {
        Snapshot s = index[i].get<Snapshot>();
        if (!std::filesystem::exists(dir_ / s.rendered_image)) {
          throw Error(ErrorCode::StorageFailure, "missing " + s.rendered_image);
        }
        out.snapshots.push_back(std::move(s));
      } catch (const std::exception& e) {
        out.warnings.push_back("skipping index entry " + std::to_string(i) + ": " + e.what());
      }
    }
    std::stable_sort(out.snapshots.begin(), out.snapshots.end(),
                     [](const Snapshot& a, const Snapshot& b) { return a.saved_at < b.saved_at; });
    return out;
  }

  std::size_t size() const { return list().snapshots.size(); }

  std::optional<Snapshot> find(const std::string& snapshot_id) const {
    for (auto& s : list().snapshots) {
      if (s.snapshot_id == snapshot_id) return s;
    }
    return std::nullopt;
  }

  std::vector<std::uint8_t> read_file(const std::string& name) const { return read_file_bytes(dir_ / name); }

 private:
  // Missing directory is a StorageFailure; a missing index is an empty store;
  // unparseable JSON is reported as InvalidArgument.
  nlohmann::json read_index() const {
    if (!std::filesystem::is_directory(dir_)) {
      throw Error(ErrorCode::StorageFailure, "store directory " + dir_.string() + " is gone");
    }
    const auto path = dir_ / "index.json";
    if (!std::filesystem::exists(path)) return nlohmann::json::array();
    const auto bytes = read_file_bytes(path);
    nlohmann::json j = nlohmann::json::parse(bytes.begin(), bytes.end(), nullptr, false);
    if (j.is_discarded() || !j.is_array()) throw Error(ErrorCode::InvalidArgument, "index.json is not a JSON array");
    return j;
  }

  std::filesystem::path dir_;
  mutable std::mutex mu_;
  std::int64_t last_micros_ = 0;
};

}  // namespace tangiviz::session

#endif  // TANGIVIZ_SNAPSHOT_STORE_HPP_
