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

// Command-line front end: serve, detect, gen-marker, scan-template, synth, calibrate.
// Exit status: 0 success, 1 operational error, 2 usage error.

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tangiviz/chart_model.hpp"
#include "tangiviz/marker_codec.hpp"
#include "tangiviz/png_io.hpp"
#include "tangiviz/service.hpp"
#include "tangiviz/synth.hpp"
#include "tangiviz/template_scanner.hpp"
#include "tangiviz/vision.hpp"
#include "tangiviz/vision/json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tangiviz;

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

json read_json_file(const fs::path& path) {
  const auto bytes = read_file_bytes(path);
  json j = json::parse(bytes.begin(), bytes.end(), nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::InvalidArgument, path.string() + " is not valid JSON");
  return j;
}

std::vector<int> parse_ids(const std::string& csv) {
  std::vector<int> ids;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw CLI::ValidationError("--ids", "'" + item + "' is not an integer");
    ids.push_back(v);
  }
  return ids;
}

httplib::Server* g_server = nullptr;

void handle_signal(int) {
  if (g_server) g_server->stop();
}

struct ServeArgs {
  int port = 8080;
  std::string host = "127.0.0.1";
  std::string store = "tangiviz-store";
  std::string calib;
  std::string layout;
};

int run_serve(const ServeArgs& a) {
  service::ServiceConfig cfg;
  const char* env_store = std::getenv("TANGIVIZ_STORE");
  cfg.store_root = env_store && *env_store ? env_store : a.store;
  if (!a.calib.empty()) cfg.default_calibration = chart::calibration_from_json(read_json_file(a.calib));
  if (!a.layout.empty()) {
    const json doc = read_json_file(a.layout);
    cfg.bar_line_layout = scan::parse_layout(doc, scan::TemplateKind::BarLine);
    cfg.pie_layout = scan::parse_layout(doc, scan::TemplateKind::Pie);
  }
  service::Service svc(cfg);
  httplib::Server server;
  svc.mount(server);
  if (!server.bind_to_port(a.host, a.port)) {
    std::cerr << "tangiviz serve: cannot bind " << a.host << ":" << a.port << " (port in use?)\n";
    return kFailure;
  }
  g_server = &server;
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);
  std::cerr << "tangiviz serving on http://" << a.host << ":" << a.port << " store=" << cfg.store_root << "\n";
  server.listen_after_bind();
  g_server = nullptr;
  return kOk;
}

struct DetectArgs {
  std::string input;
  bool flip_h = false;
  bool flip_v = false;
  bool as_json = false;
  int tolerance = 0;
};

int run_detect(const DetectArgs& a) {
  const vision::Frame frame = vision::preprocess(read_png(a.input), a.flip_h, a.flip_v);
  vision::DetectConfig cfg;
  cfg.tolerance = a.tolerance;
  const auto obs = vision::detect_markers(frame, cfg);
  if (a.as_json) {
    // A JSON array with one observation per line.
    if (obs.empty()) {
      std::cout << "[]\n";
      return kOk;
    }
    std::cout << "[\n";
    for (std::size_t i = 0; i < obs.size(); ++i) {
      std::cout << json(obs[i]).dump() << (i + 1 < obs.size() ? ",\n" : "\n");
    }
    std::cout << "]\n";
  } else {
    for (const auto& o : obs) {
      std::cout << "id=" << o.id.value() << " center=(" << o.center.x << ", " << o.center.y
                << ") orientation=" << o.orientation_deg << " bit_errors=" << o.bit_errors << "\n";
    }
  }
  return kOk;
}

struct GenMarkerArgs {
  int id = 0;
  int cell_px = 10;
  std::string out;
};

int run_gen_marker(const GenMarkerArgs& a) {
  const Image img = render_marker(MarkerId(a.id), a.cell_px);
  write_png(a.out.empty() ? "marker_" + std::to_string(a.id) + ".png" : a.out, img);
  return kOk;
}

struct ScanArgs {
  std::string input;
  std::string kind = "bar_line";
  int n = 5;
  std::string out_dir = "scans";
  std::string layout;
  bool no_flip = false;
};

int run_scan(const ScanArgs& a) {
  const auto kind = scan::template_kind_from_string(a.kind);
  const auto layout = a.layout.empty() ? scan::default_layout(kind) : scan::parse_layout(read_json_file(a.layout), kind);
  scan::ScanOptions opt;
  opt.flip_horizontal = !a.no_flip;
  const auto result = scan::scan_template(vision::preprocess(read_png(a.input)), layout, a.n, opt);
  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  json manifest = {{"kind", scan::to_string(kind)}, {"rectified", "rectified.png"}, {"title", "title.png"}};
  write_png(dir / "rectified.png", result.rectified);
  write_png(dir / "title.png", result.title_image);
  if (result.y_scale_image) {
    write_png(dir / "y_scale.png", *result.y_scale_image);
    manifest["y_scale"] = "y_scale.png";
  }
  const bool pie = kind == scan::TemplateKind::Pie;
  const auto& crops = pie ? result.legend_images : result.label_images;
  json names = json::array();
  for (std::size_t i = 0; i < crops.size(); ++i) {
    const std::string name = (pie ? "legend_" : "label_") + std::to_string(i) + ".png";
    write_png(dir / name, crops[i]);
    names.push_back(name);
  }
  manifest[pie ? "legends" : "labels"] = names;
  write_file_atomic(dir / "scan.json", manifest.dump(2) + "\n");
  std::cout << manifest.dump() << "\n";
  return kOk;
}

struct SynthArgs {
  std::string spec;
  std::uint64_t seed = 0;
  std::string out;
  std::string truth;
};

int run_synth(const SynthArgs& a) {
  const auto spec = read_json_file(a.spec).get<synth::SceneSpec>();
  const auto scene = synth::render_scene(spec, a.seed);
  write_png(a.out, scene.frame.image());
  if (!a.truth.empty()) write_file_atomic(a.truth, json(scene.truth).dump(2) + "\n");
  return kOk;
}

struct CalibrateArgs {
  std::string bottom;
  std::string top;
  std::string ids;
  std::string out;
  bool flip_h = false;
  bool flip_v = false;
};

int run_calibrate(const CalibrateArgs& a) {
  const auto ids = parse_ids(a.ids);
  const auto bottom = vision::preprocess(read_png(a.bottom), a.flip_h, a.flip_v);
  const auto top = vision::preprocess(read_png(a.top), a.flip_h, a.flip_v);
  auto base = chart::default_calibration();
  base.flip_h = a.flip_h;
  base.flip_v = a.flip_v;
  const auto calib = chart::calibrate_two_pose(bottom, top, ids, {}, base);
  const std::string text = json(calib).dump(2) + "\n";
  if (a.out.empty()) {
    std::cout << text;
  } else {
    write_file_atomic(a.out, text);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tangiviz: fiducial-marker chart authoring toolkit"};
  app.require_subcommand(1);

  ServeArgs serve;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
  serve_cmd->add_option("--port", serve.port, "TCP port")->check(CLI::Range(0, 65535));
  serve_cmd->add_option("--host", serve.host, "Bind address");
  serve_cmd->add_option("--store", serve.store, "Snapshot store root (TANGIVIZ_STORE overrides)");
  serve_cmd->add_option("--calib", serve.calib, "Default calibration JSON")->check(CLI::ExistingFile);
  serve_cmd->add_option("--layout", serve.layout, "Template layout JSON")->check(CLI::ExistingFile);

  DetectArgs detect;
  auto* detect_cmd = app.add_subcommand("detect", "Detect markers in a PNG frame");
  detect_cmd->add_option("--input", detect.input, "Frame PNG")->required()->check(CLI::ExistingFile);
  detect_cmd->add_flag("--flip-h", detect.flip_h, "Mirror horizontally first");
  detect_cmd->add_flag("--flip-v", detect.flip_v, "Mirror vertically first");
  detect_cmd->add_flag("--json", detect.as_json, "Print a JSON array, one observation per line");
  detect_cmd->add_option("--tolerance", detect.tolerance, "Bit errors to correct")->check(CLI::Range(0, kMaxTolerance));

  GenMarkerArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-marker", "Write a marker PNG");
  gen_cmd->add_option("--id", gen.id, "Marker id in [0, 1023]")->required()->check(CLI::Range(0, 1023));
  gen_cmd->add_option("--cell-px", gen.cell_px, "Pixels per grid cell")->check(CLI::Range(1, 1000));
  gen_cmd->add_option("--out", gen.out, "Output PNG (default marker_<id>.png)");

  ScanArgs scan_args;
  auto* scan_cmd = app.add_subcommand("scan-template", "Rectify a template photo and crop its regions");
  scan_cmd->add_option("--input", scan_args.input, "Page PNG")->required()->check(CLI::ExistingFile);
  scan_cmd->add_option("--kind", scan_args.kind, "bar_line or pie")->check(CLI::IsMember({"bar_line", "pie"}));
  scan_cmd->add_option("--n", scan_args.n, "Number of points");
  scan_cmd->add_option("--out-dir", scan_args.out_dir, "Output directory");
  scan_cmd->add_option("--layout", scan_args.layout, "Layout JSON")->check(CLI::ExistingFile);
  scan_cmd->add_flag("--no-flip", scan_args.no_flip, "Page faces the camera (no mirror)");

  SynthArgs synth_args;
  auto* synth_cmd = app.add_subcommand("synth", "Render a synthetic scene");
  synth_cmd->add_option("--spec", synth_args.spec, "Scene JSON")->required()->check(CLI::ExistingFile);
  synth_cmd->add_option("--seed", synth_args.seed, "Noise seed");
  synth_cmd->add_option("--out", synth_args.out, "Frame PNG")->required();
  synth_cmd->add_option("--truth", synth_args.truth, "Ground truth JSON");

  CalibrateArgs cal;
  auto* cal_cmd = app.add_subcommand("calibrate", "Two-pose slider calibration");
  cal_cmd->add_option("--bottom", cal.bottom, "Frame with sliders at the bottom")->required()->check(CLI::ExistingFile);
  cal_cmd->add_option("--top", cal.top, "Frame with sliders at the top")->required()->check(CLI::ExistingFile);
  cal_cmd->add_option("--ids", cal.ids, "Comma-separated marker ids in channel order")->required();
  cal_cmd->add_option("--out", cal.out, "Write calibration JSON here instead of stdout");
  cal_cmd->add_flag("--flip-h", cal.flip_h, "Mirror horizontally first");
  cal_cmd->add_flag("--flip-v", cal.flip_v, "Mirror vertically first");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*serve_cmd) return run_serve(serve);
    if (*detect_cmd) return run_detect(detect);
    if (*gen_cmd) return run_gen_marker(gen);
    if (*scan_cmd) return run_scan(scan_args);
    if (*synth_cmd) return run_synth(synth_args);
    if (*cal_cmd) return run_calibrate(cal);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "tangiviz: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "tangiviz: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}
