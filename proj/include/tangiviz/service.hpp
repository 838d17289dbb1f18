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

#ifndef TANGIVIZ_SERVICE_HPP_
#define TANGIVIZ_SERVICE_HPP_

#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <regex>
#include <shared_mutex>
#include <string>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "tangiviz/chart_model.hpp"
#include "tangiviz/png_io.hpp"
#include "tangiviz/session.hpp"
#include "tangiviz/template_scanner.hpp"
#include "tangiviz/vision.hpp"
#include "tangiviz/vision/json.hpp"

namespace tangiviz::service {

/// FIFO mutex: waiters are admitted in the order they called lock().
class TicketLock {
 public:
  void lock() {
    std::unique_lock l(mu_);
    const std::uint64_t ticket = next_++;
    cv_.wait(l, [&] { return serving_ == ticket; });
  }
  void unlock() {
    {
      std::lock_guard l(mu_);
      ++serving_;
    }
    cv_.notify_all();
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::uint64_t next_ = 0;
  std::uint64_t serving_ = 0;
};

struct ApiError {
  int status = 400;
  std::string code = "bad_request";
  std::string message;
};

inline ApiError to_api_error(const Error& e) {
  switch (e.code()) {
    case ErrorCode::IllegalTransition: return {409, "illegal_transition", e.what()};
    case ErrorCode::StorageFailure: return {500, "storage_failure", e.what()};
    default: return {400, "bad_request", e.what()};
  }
}

struct ServiceConfig {
  std::filesystem::path store_root = "tangiviz-store";
  chart::CalibrationConfig default_calibration = chart::default_calibration();
  vision::DetectConfig detect;
  scan::TemplateLayout bar_line_layout = scan::default_layout(scan::TemplateKind::BarLine);
  scan::TemplateLayout pie_layout = scan::default_layout(scan::TemplateKind::Pie);
  scan::ScanOptions scan_options;
};

class Service {
 public:
  explicit Service(ServiceConfig config) : config_(std::move(config)), rng_(std::random_device{}()) {
    config_.default_calibration.validate();
    std::error_code ec;
    std::filesystem::create_directories(config_.store_root, ec);
    if (ec) throw Error(ErrorCode::StorageFailure, "cannot create store " + config_.store_root.string());
  }

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  void mount(httplib::Server& server) {
    // httplib defaults to SO_REUSEPORT, which lets a second server share a busy port.
    server.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
    });
    // Responses go out as header and body writes; Nagle would hold the body for a delayed ACK.
    server.set_tcp_nodelay(true);
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
    server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
      res.status = 204;
    });
    server.Get("/health", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(R"({"status":"ok"})", "application/json");
    });
    server.Post("/sessions", wrap([this](const httplib::Request& req, httplib::Response& res) { create(req, res); }));
    server.Post("/sessions/:id/frames",
                wrap([this](const httplib::Request& req, httplib::Response& res) { frames(req, res); }));
    server.Post("/sessions/:id/events",
                wrap([this](const httplib::Request& req, httplib::Response& res) { events(req, res); }));
    server.Get("/sessions/:id/state", wrap([this](const httplib::Request& req, httplib::Response& res) {
                 auto slot = find(req.path_params.at("id"));
                 std::lock_guard l(slot->lock);
                 send_json(res, 200, session::summary_json(slot->state));
               }));
    server.Get("/sessions/:id/snapshots", wrap([this](const httplib::Request& req, httplib::Response& res) {
                 auto slot = find(req.path_params.at("id"));
                 const auto list = slot->store->list();
                 for (const auto& w : list.warnings) std::cerr << "tangiviz: " << w << '\n';
                 send_json(res, 200, list.snapshots);
               }));
    server.Get("/sessions/:id/snapshots/:sid/image",
               wrap([this](const httplib::Request& req, httplib::Response& res) {
                 auto slot = find(req.path_params.at("id"));
                 const auto snap = find_snapshot(*slot, req.path_params.at("sid"));
                 send_png(res, slot->store->read_file(snap.rendered_image));
               }));
    server.Get("/sessions/:id/snapshots/:sid/title", wrap([this](const httplib::Request& req, httplib::Response& res) {
                 auto slot = find(req.path_params.at("id"));
                 const auto snap = find_snapshot(*slot, req.path_params.at("sid"));
                 if (!snap.title_image) throw not_found("snapshot has no title image");
                 send_png(res, slot->store->read_file(*snap.title_image));
               }));
    server.Get("/sessions/:id/snapshots/:sid/labels/:i",
               wrap([this](const httplib::Request& req, httplib::Response& res) {
                 auto slot = find(req.path_params.at("id"));
                 const auto snap = find_snapshot(*slot, req.path_params.at("sid"));
                 const std::size_t i = parse_index(req.path_params.at("i"));
                 if (i >= snap.label_images.size()) throw not_found("no label image " + req.path_params.at("i"));
                 send_png(res, slot->store->read_file(snap.label_images[i]));
               }));
    server.Get("/sessions/:id/chart/title", wrap([this](const httplib::Request& req, httplib::Response& res) {
                 auto slot = find(req.path_params.at("id"));
                 std::lock_guard l(slot->lock);
                 const chart::ChartState* c = slot->state.chart();
                 if (!c || !c->title_image) throw not_found("current chart has no title image");
                 send_png(res, encode_png(*c->title_image));
               }));
    server.Get("/sessions/:id/chart/labels/:i", wrap([this](const httplib::Request& req, httplib::Response& res) {
                 auto slot = find(req.path_params.at("id"));
                 std::lock_guard l(slot->lock);
                 const chart::ChartState* c = slot->state.chart();
                 const std::size_t i = parse_index(req.path_params.at("i"));
                 if (!c || i >= c->label_images.size() || !c->label_images[i]) throw not_found("no such label image");
                 send_png(res, encode_png(*c->label_images[i]));
               }));
    server.Get("/sessions/:id/chart/image", wrap([this](const httplib::Request& req, httplib::Response& res) {
                 auto slot = find(req.path_params.at("id"));
                 std::lock_guard l(slot->lock);
                 const chart::ChartState* c = slot->state.chart();
                 if (!c) throw not_found("no live chart in state " + session::state_name(slot->state));
                 send_png(res, encode_png(chart::render_chart_image(*c)));
               }));
  }

  std::size_t session_count() const {
    std::shared_lock l(sessions_mu_);
    return sessions_.size();
  }

 private:
  struct Slot {
    TicketLock lock;
    session::SessionState state;
    std::unique_ptr<session::SnapshotStore> store;
  };

  struct HttpError {
    ApiError error;
  };

  static HttpError not_found(std::string message) { return {{404, "not_found", std::move(message)}}; }
  static HttpError bad_request(std::string message) { return {{400, "bad_request", std::move(message)}}; }

  static void send_json(httplib::Response& res, int status, const nlohmann::json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  static void send_png(httplib::Response& res, const std::vector<std::uint8_t>& bytes) {
    res.status = 200;
    res.set_content(reinterpret_cast<const char*>(bytes.data()), bytes.size(), "image/png");
  }

  static void send_error(httplib::Response& res, const ApiError& e) {
    send_json(res, e.status, {{"code", e.code}, {"message", e.message}});
  }

  static std::size_t parse_index(const std::string& s) {
    if (s.empty() || s.size() > 3 || s.find_first_not_of("0123456789") != std::string::npos) {
      throw bad_request("bad index '" + s + "'");
    }
    return std::stoul(s);
  }

  template <typename F>
  static httplib::Server::Handler wrap(F f) {
    return [f](const httplib::Request& req, httplib::Response& res) {
      try {
        f(req, res);
      } catch (const HttpError& e) {
        send_error(res, e.error);
      } catch (const Error& e) {
        send_error(res, to_api_error(e));
      } catch (const nlohmann::json::exception& e) {
        send_error(res, {400, "bad_request", std::string("malformed JSON: ") + e.what()});
      } catch (const std::exception& e) {
        send_error(res, {500, "storage_failure", e.what()});
      }
    };
  }

  std::shared_ptr<Slot> find(const std::string& id) const {
    std::shared_lock l(sessions_mu_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw not_found("unknown session '" + id + "'");
    return it->second;
  }

  static session::Snapshot find_snapshot(const Slot& slot, const std::string& sid) {
    auto snap = slot.store->find(sid);
    if (!snap) throw not_found("unknown snapshot '" + sid + "'");
    return *snap;
  }

  std::string fresh_id() {
    static constexpr char kHex[] = "0123456789abcdef";
    std::lock_guard l(rng_mu_);
    std::string id(16, '0');
    for (auto& c : id) c = kHex[rng_() % 16];
    return id;
  }

  // Body: empty, a calibration document, or {"calibration"?, "session_id"?}.
  // A session_id reattaches to that id's snapshot directory, for example after a restart.
  void create(const httplib::Request& req, httplib::Response& res) {
    chart::CalibrationConfig calib = config_.default_calibration;
    std::string id;
    if (!req.body.empty()) {
      const auto doc = nlohmann::json::parse(req.body, nullptr, false);
      if (doc.is_discarded() || !doc.is_object()) throw bad_request("body must be a JSON object");
      if (doc.contains("channels")) {
        calib = chart::calibration_from_json(doc);
      } else {
        if (doc.contains("calibration")) calib = chart::calibration_from_json(doc.at("calibration"));
        if (doc.contains("session_id")) {
          id = doc.at("session_id").get<std::string>();
          static const std::regex kIdPattern("[a-z0-9_-]{1,64}");
          if (!std::regex_match(id, kIdPattern)) throw bad_request("session_id must match [a-z0-9_-]{1,64}");
        }
      }
    }
    std::unique_lock l(sessions_mu_);
    if (id.empty()) {
      do {
        id = fresh_id();
      } while (sessions_.count(id));
    } else if (sessions_.count(id)) {
      throw bad_request("session '" + id + "' is already active");
    }
    auto slot = std::make_shared<Slot>();
    slot->state = session::make_session(id, calib);
    slot->store = std::make_unique<session::SnapshotStore>(config_.store_root / id);
    sessions_.emplace(id, slot);
    l.unlock();
    send_json(res, 201, {{"session_id", id}, {"calibration", calib}});
  }

  void frames(const httplib::Request& req, httplib::Response& res) {
    auto slot = find(req.path_params.at("id"));
    std::lock_guard l(slot->lock);
    const std::span<const std::uint8_t> body(reinterpret_cast<const std::uint8_t*>(req.body.data()), req.body.size());
    const Image raw = decode_png(body);
    const auto& calib = slot->state.calib;
    const vision::Frame frame = vision::preprocess(raw, calib.flip_h, calib.flip_v);
    auto observations = vision::detect_markers(frame, config_.detect);
    slot->state = session::dispatch(slot->state, session::FrameReceived{observations}, slot->store.get());
    send_json(res, 200, {{"chart", chart::chart_to_json(*slot->state.chart())}, {"observations", observations}});
  }

  void events(const httplib::Request& req, httplib::Response& res) {
    auto slot = find(req.path_params.at("id"));
    std::lock_guard l(slot->lock);
    nlohmann::json doc;
    const Image* upload = nullptr;
    Image scan_image;
    if (req.is_multipart_form_data()) {
      if (req.has_file("event")) {
        doc = nlohmann::json::parse(req.get_file_value("event").content);
      } else {
        doc = nlohmann::json::object();
        for (const auto& [name, file] : req.files) {
          if (name != "image") doc[name] = file.content;
        }
      }
      if (req.has_file("image")) {
        const auto& content = req.get_file_value("image").content;
        scan_image = decode_png({reinterpret_cast<const std::uint8_t*>(content.data()), content.size()});
        upload = &scan_image;
      }
    } else {
      doc = nlohmann::json::parse(req.body, nullptr, false);
      if (doc.is_discarded()) throw bad_request("body is not JSON");
    }
    if (!doc.is_object() || !doc.contains("type") || !doc.at("type").is_string()) {
      throw bad_request("event needs a string 'type'");
    }
    const session::Event event = parse_event(doc, slot->state, upload);
    slot->state = session::dispatch(slot->state, event, slot->store.get());
    send_json(res, 200, session::summary_json(slot->state));
  }

  static int int_field(const nlohmann::json& doc, const char* key, int fallback) {
    if (!doc.contains(key)) return fallback;
    const auto& v = doc.at(key);
    if (v.is_number_integer()) return v.get<int>();
    if (v.is_string()) {
      const std::string s = v.get<std::string>();
      if (!s.empty() && s.size() < 10 && s.find_first_not_of("-0123456789") == std::string::npos) return std::stoi(s);
    }
    throw bad_request(std::string("'") + key + "' must be an integer");
  }

  static double number_field(const nlohmann::json& doc, const char* key) {
    if (!doc.contains(key)) throw bad_request(std::string("missing '") + key + "'");
    const auto& v = doc.at(key);
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
      try {
        std::size_t used = 0;
        const double d = std::stod(v.get<std::string>(), &used);
        if (used == v.get<std::string>().size()) return d;
      } catch (const std::exception&) {
      }
    }
    throw bad_request(std::string("'") + key + "' must be a number");
  }

  session::Event parse_event(const nlohmann::json& doc, const session::SessionState& state, const Image* upload) {
    const std::string type = doc.at("type").get<std::string>();
    if (type == "select_flow") {
      session::SelectFlow e;
      e.flow = session::flow_from_string(doc.at("flow").get<std::string>());
      if (doc.contains("kind") && !doc.at("kind").is_null()) {
        e.kind = chart::chart_kind_from_string(doc.at("kind").get<std::string>());
      }
      return e;
    }
    if (type == "axes_configured") {
      const int n = int_field(doc, "n_points", -1);
      if (n < 1 || n > chart::kMaxPoints) throw bad_request("n_points must be in [1, 5]");
      return session::AxesConfigured{n, number_field(doc, "y_max")};
    }
    if (type == "toggle_pause") return session::TogglePause{};
    if (type == "save") return session::Save{};
    if (type == "back") return session::Back{};
    if (type == "tap_color") {
      return session::TapColor{int_field(doc, "index", -1), doc.at("color").get<std::string>()};
    }
    if (type == "scan_captured") {
      if (!upload) throw bad_request("scan_captured needs a multipart 'image' PNG part");
      const auto* f2 = std::get_if<session::Flow2>(&state.current);
      if (!f2 || f2->phase != session::Phase::Scanning) {
        throw Error(ErrorCode::IllegalTransition,
                    "event scan_captured is not allowed in state " + session::state_name(state));
      }
      const bool pie = f2->kind == chart::ChartKind::Pie;
      // Bar and line templates keep every label crop; the axis step picks how many are used.
      const int n = pie ? int_field(doc, "n_points", chart::kMaxPoints) : chart::kMaxPoints;
      const vision::Frame frame = vision::preprocess(*upload);
      const auto& layout = pie ? config_.pie_layout : config_.bar_line_layout;
      auto scan = scan::scan_template(frame, layout, n, config_.scan_options);
      return session::ScanCaptured{std::make_shared<const scan::TemplateScan>(std::move(scan))};
    }
    if (type == "frame_received") throw bad_request("post frames to /sessions/{id}/frames");
    throw bad_request("unknown event type '" + type + "'");
  }

  ServiceConfig config_;
  mutable std::shared_mutex sessions_mu_;
  std::map<std::string, std::shared_ptr<Slot>> sessions_;
  std::mutex rng_mu_;
  std::mt19937_64 rng_;
};

}  // namespace tangiviz::service

#endif  // TANGIVIZ_SERVICE_HPP_
