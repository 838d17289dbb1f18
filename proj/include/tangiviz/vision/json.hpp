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

#ifndef TANGIVIZ_VISION_JSON_HPP_
#define TANGIVIZ_VISION_JSON_HPP_

#include <nlohmann/json.hpp>

#include "tangiviz/vision/detector.hpp"

namespace tangiviz::vision {

inline void to_json(nlohmann::json& j, const MarkerObservation& o) {
  nlohmann::json corners = nlohmann::json::array();
  for (const auto& c : o.corners.corners) corners.push_back({c.x, c.y});
  j = {{"id", o.id.value()},
       {"center", {o.center.x, o.center.y}},
       {"corners", corners},
       {"orientation_deg", o.orientation_deg},
       {"bit_errors", o.bit_errors}};
}

inline void from_json(const nlohmann::json& j, MarkerObservation& o) {
  o.id = MarkerId(j.at("id").get<int>());
  o.center = {j.at("center").at(0).get<double>(), j.at("center").at(1).get<double>()};
  const auto& corners = j.at("corners");
  for (std::size_t i = 0; i < 4; ++i) {
    o.corners.corners[i] = {corners.at(i).at(0).get<double>(), corners.at(i).at(1).get<double>()};
  }
  o.orientation_deg = j.at("orientation_deg").get<double>();
  o.bit_errors = j.value("bit_errors", 0);
}

}  // namespace tangiviz::vision

#endif  // TANGIVIZ_VISION_JSON_HPP_
