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

#ifndef TANGIVIZ_VISION_HPP_
#define TANGIVIZ_VISION_HPP_

#include "tangiviz/vision/contours.hpp"
#include "tangiviz/vision/detector.hpp"
#include "tangiviz/vision/frame.hpp"
#include "tangiviz/vision/homography.hpp"
#include "tangiviz/vision/quads.hpp"
#include "tangiviz/vision/threshold.hpp"
#include "tangiviz/vision/warp.hpp"

#endif  // TANGIVIZ_VISION_HPP_
