/*
Copyright 2026 The pvg Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS-IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#ifndef PVG_ERROR_HPP_
#define PVG_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace pvg {

enum class Errc {
  kInvalidArgument,
  kNonPositiveDisparity,
  kBehindCamera,
  kDegenerateRotation,
  kInvalidPose,
  kInsufficientKeypoints,
  kRankDeficient,
  kNonPositiveScale,
  kEmptyMask,
  kAllMasked,
  kExternalFailure,
  kContractViolation,
  kTrajectoryTooShort,
  kDegenerateLook,
  kFullyBlack,
  kNoValidStride,
  kDimensionMismatch,
  kTooFewSamples,
  kNotPSD,
  kWindowOutOfBounds,
  kIoError,
  kParseError,
};

inline constexpr std::string_view ErrcName(Errc code) {
  switch (code) {
    case Errc::kInvalidArgument: return "InvalidArgument";
    case Errc::kNonPositiveDisparity: return "NonPositiveDisparity";
    case Errc::kBehindCamera: return "BehindCamera";
    case Errc::kDegenerateRotation: return "DegenerateRotation";
    case Errc::kInvalidPose: return "InvalidPose";
    case Errc::kInsufficientKeypoints: return "InsufficientKeypoints";
    case Errc::kRankDeficient: return "RankDeficient";
    case Errc::kNonPositiveScale: return "NonPositiveScale";
    case Errc::kEmptyMask: return "EmptyMask";
    case Errc::kAllMasked: return "AllMasked";
    case Errc::kExternalFailure: return "ExternalFailure";
    case Errc::kContractViolation: return "ContractViolation";
    case Errc::kTrajectoryTooShort: return "TrajectoryTooShort";
    case Errc::kDegenerateLook: return "DegenerateLook";
    case Errc::kFullyBlack: return "FullyBlack";
    case Errc::kNoValidStride: return "NoValidStride";
    case Errc::kDimensionMismatch: return "DimensionMismatch";
    case Errc::kTooFewSamples: return "TooFewSamples";
    case Errc::kNotPSD: return "NotPSD";
    case Errc::kWindowOutOfBounds: return "WindowOutOfBounds";
    case Errc::kIoError: return "IoError";
    case Errc::kParseError: return "ParseError";
  }
  return "Unknown";
}

// All library failures are reported as pvg::Error. The code is stable and is
// what the command-line tool prints; the message carries context.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(ErrcName(code)) + ": " + message),
        code_(code) {}

  Errc code() const noexcept { return code_; }
  std::string_view name() const noexcept { return ErrcName(code_); }

 private:
  Errc code_;
};

}  // namespace pvg

#endif  // PVG_ERROR_HPP_
