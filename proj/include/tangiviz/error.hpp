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

#ifndef TANGIVIZ_ERROR_HPP_
#define TANGIVIZ_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace tangiviz {

enum class ErrorCode {
  // marker_codec
  IdOutOfRange,
  BadBorder,
  NoValidCode,
  // vision
  UnsupportedImage,
  DegenerateQuad,
  // chart_model
  NoCalibration,
  SectionsOverlap,
  MissingSection,
  IndexOutOfRange,
  UnknownColor,
  MissingMarker,
  InvertedChannel,
  InvalidCalibration,
  // template_scanner
  NoPageFound,
  BadNPoints,
  // synth
  OverlapError,
  OutOfBounds,
  // session
  IllegalTransition,
  InvalidArgument,
  StorageFailure,
  // io
  BadPng,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::IdOutOfRange: return "IdOutOfRange";
    case ErrorCode::BadBorder: return "BadBorder";
    case ErrorCode::NoValidCode: return "NoValidCode";
    case ErrorCode::UnsupportedImage: return "UnsupportedImage";
    case ErrorCode::DegenerateQuad: return "DegenerateQuad";
    case ErrorCode::NoCalibration: return "NoCalibration";
    case ErrorCode::SectionsOverlap: return "SectionsOverlap";
    case ErrorCode::MissingSection: return "MissingSection";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::UnknownColor: return "UnknownColor";
    case ErrorCode::MissingMarker: return "MissingMarker";
    case ErrorCode::InvertedChannel: return "InvertedChannel";
    case ErrorCode::InvalidCalibration: return "InvalidCalibration";
    case ErrorCode::NoPageFound: return "NoPageFound";
    case ErrorCode::BadNPoints: return "BadNPoints";
    case ErrorCode::OverlapError: return "OverlapError";
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::IllegalTransition: return "IllegalTransition";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::StorageFailure: return "StorageFailure";
    case ErrorCode::BadPng: return "BadPng";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tangiviz

#endif  // TANGIVIZ_ERROR_HPP_
