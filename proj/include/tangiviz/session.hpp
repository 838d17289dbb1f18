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

#ifndef TANGIVIZ_SESSION_HPP_
#define TANGIVIZ_SESSION_HPP_

#include <memory>
#include <optional>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "tangiviz/chart_model.hpp"
#include "tangiviz/error.hpp"
#include "tangiviz/snapshot_store.hpp"
#include "tangiviz/template_scanner.hpp"
#include "tangiviz/vision.hpp"

namespace tangiviz::session {

using chart::ChartKind;
using chart::ChartState;

enum class FlowId { Home, Flow1, Flow2, Flow3 };
enum class Phase { Scanning, AxisConfig, Authoring };

inline std::string to_string(FlowId f) {
  switch (f) {
    case FlowId::Home: return "home";
    case FlowId::Flow1: return "flow1";
    case FlowId::Flow2: return "flow2";
    case FlowId::Flow3: return "flow3";
  }
  return "?";
}

inline FlowId flow_from_string(const std::string& s) {
  if (s == "home") return FlowId::Home;
  if (s == "flow1" || s == "tutorial") return FlowId::Flow1;
  if (s == "flow2" || s == "author") return FlowId::Flow2;
  if (s == "flow3" || s == "gallery") return FlowId::Flow3;
  throw Error(ErrorCode::InvalidArgument, "unknown flow '" + s + "'");
}

inline std::string to_string(Phase p) {
  switch (p) {
    case Phase::Scanning: return "scanning";
    case Phase::AxisConfig: return "axis_config";
    case Phase::Authoring: return "authoring";
  }
  return "?";
}

using ScanRef = std::shared_ptr<const scan::TemplateScan>;

struct Home {};
struct Flow1 {
  ChartKind kind = ChartKind::Bar;
  ChartState chart;
};
struct Flow2 {
  Phase phase = Phase::Scanning;
  ChartKind kind = ChartKind::Bar;
  ScanRef scan;
  std::optional<ChartState> chart;
};
struct Flow3 {
  std::vector<Snapshot> snapshots;
};

using Current = std::variant<Home, Flow1, Flow2, Flow3>;

struct SessionState {
  Current current;
  std::string session_id;
  chart::CalibrationConfig calib;
  /// Set by a successful save and cleared by the next event.
  std::optional<Snapshot> last_saved;

  bool saved_flag() const { return last_saved.has_value(); }
  FlowId flow() const { return static_cast<FlowId>(current.index()); }
  const ChartState* chart() const {
    if (auto* f1 = std::get_if<Flow1>(&current)) return &f1->chart;
    if (auto* f2 = std::get_if<Flow2>(&current)) return f2->chart ? &*f2->chart : nullptr;
    return nullptr;
  }
};

// ---------------------------------------------------------------------------
// Events

struct SelectFlow {
  FlowId flow = FlowId::Flow1;
  std::optional<ChartKind> kind;
};
struct ScanCaptured {
  ScanRef scan;
};
struct AxesConfigured {
  int n_points = chart::kMaxPoints;
  double y_max = 10.0;
};
struct FrameReceived {
  std::vector<vision::MarkerObservation> observations;
};
struct TogglePause {};
struct Save {};
struct TapColor {
  int index = 0;
  std::string color;
};
struct Back {};

using Event = std::variant<SelectFlow, ScanCaptured, AxesConfigured, FrameReceived, TogglePause, Save, TapColor, Back>;

inline std::string event_name(const Event& e) {
  static constexpr const char* kNames[] = {"select_flow",     "scan_captured", "axes_configured", "frame_received",
                                           "toggle_pause",    "save",          "tap_color",       "back"};
  return kNames[e.index()];
}

inline std::string state_name(const SessionState& s) {
  std::string name = to_string(s.flow());
  if (auto* f2 = std::get_if<Flow2>(&s.current)) name += "." + to_string(f2->phase);
  return name;
}

/// Empty when the state is consistent, otherwise a description of the violation.
inline std::optional<std::string> check_invariants(const SessionState& s) {
  auto chart_ok = [](const ChartState& c) -> std::optional<std::string> {
    if (c.n_points < 1 || c.n_points > chart::kMaxPoints) return "n_points out of range";
    if (c.values.size() != static_cast<std::size_t>(c.n_points) || c.colors.size() != c.values.size()) {
      return "values/colors do not match n_points";
    }
    if (c.kind != ChartKind::Pie) {
      if (!(c.y_max > 0)) return "y_max not positive";
      for (double v : c.values) {
        if (v < 0 || v > c.y_max) return "value outside [0, y_max]";
      }
    } else {
      double sum = 0;
      for (double v : c.values) sum += v;
      if (std::abs(sum - 1.0) > 1e-9) return "pie fractions do not sum to 1";
    }
    return std::nullopt;
  };
  if (auto* f1 = std::get_if<Flow1>(&s.current)) {
    if (f1->chart.kind != f1->kind) return "flow1 chart kind mismatch";
    if (f1->chart.y_max != chart::FruitDataset::kYMax) return "flow1 y_max changed";
    const auto& cats = chart::FruitDataset::kCategories;
    if (!std::equal(f1->chart.labels.begin(), f1->chart.labels.end(), cats.begin(), cats.end())) {
      return "flow1 labels changed";
    }
    return chart_ok(f1->chart);
  }
  if (auto* f2 = std::get_if<Flow2>(&s.current)) {
    switch (f2->phase) {
      case Phase::Scanning:
        if (f2->scan || f2->chart) return "scanning phase already holds a scan or chart";
        break;
      case Phase::AxisConfig:
        if (!f2->scan) return "axis config without scan";
        if (f2->kind == ChartKind::Pie) return "pie chart in axis config";
        if (f2->chart) return "chart before axes are configured";
        break;
      case Phase::Authoring:
        if (!f2->scan) return "authoring without scan";
        if (!f2->chart) return "authoring without chart";
        if (f2->chart->kind != f2->kind) return "flow2 chart kind mismatch";
        return chart_ok(*f2->chart);
    }
  }
  if (s.last_saved && !(std::holds_alternative<Flow2>(s.current))) return "saved flag outside flow2";
  return std::nullopt;
}

namespace detail {

[[noreturn]] inline void illegal(const SessionState& s, const Event& e) {
  throw Error(ErrorCode::IllegalTransition, "event " + event_name(e) + " is not allowed in state " + state_name(s));
}

inline scan::TemplateKind template_for(ChartKind k) {
  return k == ChartKind::Pie ? scan::TemplateKind::Pie : scan::TemplateKind::BarLine;
}

inline ChartState authored_chart(ChartKind kind, const scan::TemplateScan& scan, int n_points, double y_max) {
  ChartState c = chart::make_chart(kind, n_points, y_max);
  c.title_image = std::make_shared<const Image>(scan.title_image);
  const auto& crops = kind == ChartKind::Pie ? scan.legend_images : scan.label_images;
  for (int i = 0; i < n_points && i < static_cast<int>(crops.size()); ++i) {
    c.label_images.push_back(std::make_shared<const Image>(crops[i]));
  }
  return c;
}

}  // namespace detail

/// Applies one event. Failures leave the input untouched; illegal moves raise
/// IllegalTransition, malformed arguments raise the matching domain error.
/// `store` backs Save and the gallery; without it both behave as an empty store
/// that refuses writes.
inline SessionState dispatch(const SessionState& state, const Event& event, SnapshotStore* store = nullptr) {
  SessionState next = state;
  next.last_saved.reset();

  std::visit(
      [&](auto& cur) {
        using S = std::decay_t<decltype(cur)>;
        std::visit(
            [&](const auto& ev) {
              using E = std::decay_t<decltype(ev)>;
              if constexpr (std::is_same_v<E, Back>) {
                if constexpr (std::is_same_v<S, Home>) detail::illegal(state, event);
                next.current = Home{};
              } else if constexpr (std::is_same_v<E, SelectFlow>) {
                if constexpr (!std::is_same_v<S, Home>) {
                  detail::illegal(state, event);
                } else {
                  const ChartKind kind = ev.kind.value_or(ChartKind::Bar);
                  switch (ev.flow) {
                    case FlowId::Home:
                      detail::illegal(state, event);
                    case FlowId::Flow1:
                      next.current = Flow1{kind, chart::FruitDataset::chart(kind)};
                      break;
                    case FlowId::Flow2:
                      next.current = Flow2{Phase::Scanning, kind, nullptr, std::nullopt};
                      break;
                    case FlowId::Flow3:
                      next.current = Flow3{store ? store->list().snapshots : std::vector<Snapshot>{}};
                      break;
                  }
                }
              } else if constexpr (std::is_same_v<E, ScanCaptured>) {
                if constexpr (!std::is_same_v<S, Flow2>) {
                  detail::illegal(state, event);
                } else {
                  if (cur.phase != Phase::Scanning) detail::illegal(state, event);
                  if (!ev.scan) throw Error(ErrorCode::InvalidArgument, "scan_captured without a scan");
                  if (ev.scan->kind != detail::template_for(cur.kind)) {
                    throw Error(ErrorCode::InvalidArgument, "a " + scan::to_string(ev.scan->kind) +
                                                                " template cannot author a " + chart::to_string(cur.kind) +
                                                                " chart");
                  }
                  cur.scan = ev.scan;
                  if (cur.kind == ChartKind::Pie) {
                    const int n = static_cast<int>(ev.scan->legend_images.size());
                    if (n < 1 || n > chart::kMaxPoints) throw Error(ErrorCode::BadNPoints, "pie scan has no legend crops");
                    cur.chart = detail::authored_chart(ChartKind::Pie, *ev.scan, n, 1.0);
                    cur.phase = Phase::Authoring;
                  } else {
                    cur.phase = Phase::AxisConfig;
                  }
                }
              } else if constexpr (std::is_same_v<E, AxesConfigured>) {
                if constexpr (!std::is_same_v<S, Flow2>) {
                  detail::illegal(state, event);
                } else {
                  if (cur.phase != Phase::AxisConfig) detail::illegal(state, event);
                  if (ev.n_points < 1 || ev.n_points > chart::kMaxPoints) {
                    throw Error(ErrorCode::BadNPoints, "n_points must be in [1, 5], got " + std::to_string(ev.n_points));
                  }
                  if (!(ev.y_max > 0) || !std::isfinite(ev.y_max)) {
                    throw Error(ErrorCode::InvalidArgument, "y_max must be a positive number");
                  }
                  cur.chart = detail::authored_chart(cur.kind, *cur.scan, ev.n_points, ev.y_max);
                  cur.phase = Phase::Authoring;
                }
              } else if constexpr (std::is_same_v<E, Save>) {
                if constexpr (!std::is_same_v<S, Flow2>) {
                  detail::illegal(state, event);
                } else {
                  if (cur.phase != Phase::Authoring) detail::illegal(state, event);
                  if (!store) throw Error(ErrorCode::StorageFailure, "session has no snapshot store");
                  next.last_saved = store->save(*cur.chart);
                }
              } else {
                // FrameReceived, TogglePause and TapColor act on a live chart.
                ChartState* target = nullptr;
                if constexpr (std::is_same_v<S, Flow1>) {
                  target = &cur.chart;
                } else if constexpr (std::is_same_v<S, Flow2>) {
                  if (cur.phase == Phase::Authoring) target = &*cur.chart;
                }
                if (!target) detail::illegal(state, event);
                if constexpr (std::is_same_v<E, FrameReceived>) {
                  *target = chart::apply_observations(*target, ev.observations, state.calib);
                } else if constexpr (std::is_same_v<E, TogglePause>) {
                  target->paused = !target->paused;
                } else if constexpr (std::is_same_v<E, TapColor>) {
                  *target = chart::set_color(*target, ev.index, ev.color);
                }
              }
            },
            event);
      },
      next.current);
  return next;
}

/// Save as a standalone operation: returns the new state and the snapshot.
inline std::pair<SessionState, Snapshot> save_snapshot(const SessionState& state, SnapshotStore& store) {
  SessionState next = dispatch(state, Save{}, &store);
  Snapshot s = *next.last_saved;
  return {std::move(next), std::move(s)};
}

inline SessionState make_session(std::string session_id, chart::CalibrationConfig calib) {
  calib.validate();
  return SessionState{Home{}, std::move(session_id), std::move(calib), std::nullopt};
}

/// State summary for the API: flow, phase, chart and the transient saved flag.
inline nlohmann::json summary_json(const SessionState& s) {
  nlohmann::json j = {{"session_id", s.session_id}, {"flow", to_string(s.flow())}, {"phase", nullptr},
                      {"kind", nullptr},           {"chart", nullptr},           {"saved_flag", s.saved_flag()}};
  if (auto* f1 = std::get_if<Flow1>(&s.current)) j["kind"] = chart::to_string(f1->kind);
  if (auto* f2 = std::get_if<Flow2>(&s.current)) {
    j["phase"] = to_string(f2->phase);
    j["kind"] = chart::to_string(f2->kind);
    j["has_scan"] = static_cast<bool>(f2->scan);
  }
  if (auto* f3 = std::get_if<Flow3>(&s.current)) j["snapshots"] = f3->snapshots;
  if (const ChartState* c = s.chart()) j["chart"] = chart::chart_to_json(*c);
  if (s.last_saved) j["snapshot_id"] = s.last_saved->snapshot_id;
  return j;
}

}  // namespace tangiviz::session

#endif  // TANGIVIZ_SESSION_HPP_
