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

#ifndef PVG_ALIGNMENT_HPP_
#define PVG_ALIGNMENT_HPP_

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "pvg/error.hpp"
#include "pvg/geometry.hpp"
#include "pvg/image.hpp"

namespace pvg {

// Sparse structure-from-motion points in one frame's camera coordinates.
using KeypointSet = std::vector<Vec3>;

struct ScaleShift {
  double a = 1.0;
  double b = 0.0;
};

struct GroundingResult {
  double gamma = 1.0;
  DisparityMap grounded;
};

// Floor applied after an affine disparity correction.
inline constexpr double kMinDisparity = 1e-6;

// Bilinear sample at continuous pixel coordinates. Requires
// 0 <= u <= width-1 and 0 <= v <= height-1.
inline double SampleBilinear(const DisparityMap& map, double u, double v) {
  const int x0 = std::min(static_cast<int>(std::floor(u)), map.width() - 2);
  const int y0 = std::min(static_cast<int>(std::floor(v)), map.height() - 2);
  const double fx = u - x0;
  const double fy = v - y0;
  const double top = map(x0, y0) + fx * (map(x0 + 1, y0) - map(x0, y0));
  const double bottom = map(x0, y0 + 1) + fx * (map(x0 + 1, y0 + 1) - map(x0, y0 + 1));
  return top + fy * (bottom - top);
}

// One (sampled disparity, inverse depth) pair per keypoint that projects
// inside the bilinear-sampleable region. Out-of-bounds points are dropped.
struct KeypointSamples {
  std::vector<double> disparity;
  std::vector<double> inverse_depth;
};

inline KeypointSamples SampleKeypoints(const DisparityMap& raw, const KeypointSet& keypoints,
                                       const Intrinsics& k) {
  if (raw.width() < 2 || raw.height() < 2) {
    throw Error(Errc::kInvalidArgument, "disparity map too small to sample");
  }
  KeypointSamples out;
  for (const Vec3& p : keypoints) {
    if (!(p.z() > 0.0)) {
      throw Error(Errc::kInvalidArgument, "keypoint with non-positive depth");
    }
    const Projection q = Project(k, p);
    if (!(q.u >= 0.0 && q.v >= 0.0 && q.u <= raw.width() - 1 && q.v <= raw.height() - 1)) {
      continue;
    }
    out.disparity.push_back(SampleBilinear(raw, q.u, q.v));
    out.inverse_depth.push_back(1.0 / p.z());
  }
  return out;
}

// Sum of squared residuals (a*d + b - 1/z)^2.
inline double ScaleShiftResidual(const KeypointSamples& s, const ScaleShift& ab) {
  double r = 0.0;
  for (std::size_t i = 0; i < s.disparity.size(); ++i) {
    const double e = ab.a * s.disparity[i] + ab.b - s.inverse_depth[i];
    r += e * e;
  }
  return r;
}

// Closed-form least squares for (a, b) on already-sampled pairs.
inline ScaleShift FitScaleShift(const KeypointSamples& s) {
  const std::size_t n = s.disparity.size();
  if (n < 2) {
    throw Error(Errc::kInsufficientKeypoints,
                std::to_string(n) + " in-bounds keypoints, need at least 2");
  }
  double mean_d = 0.0;
  double mean_t = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_d += s.disparity[i];
    mean_t += s.inverse_depth[i];
  }
  mean_d /= static_cast<double>(n);
  mean_t /= static_cast<double>(n);
  double sdd = 0.0;
  double sdt = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dd = s.disparity[i] - mean_d;
    sdd += dd * dd;
    sdt += dd * (s.inverse_depth[i] - mean_t);
  }
  const auto [lo, hi] = std::minmax_element(s.disparity.begin(), s.disparity.end());
  if (*lo == *hi || sdd == 0.0) {
    throw Error(Errc::kRankDeficient, "all sampled disparities are equal");
  }
  const double a = sdt / sdd;
  if (!(a > 0.0)) {
    throw Error(Errc::kNonPositiveScale, "fitted scale " + std::to_string(a) + " <= 0");
  }
  return {a, mean_t - a * mean_d};
}

// Fits raw (scale/shift-ambiguous) disparity to sparse keypoint depths.
inline ScaleShift FitScaleShift(const DisparityMap& raw, const KeypointSet& keypoints,
                                const Intrinsics& k) {
  return FitScaleShift(SampleKeypoints(raw, keypoints, k));
}

inline DisparityMap ApplyScaleShift(const DisparityMap& raw, const ScaleShift& s) {
  if (!(s.a > 0.0)) throw Error(Errc::kNonPositiveScale, "scale must be positive");
  DisparityMap out = raw;
  for (double& d : out.values()) d = std::max(s.a * d + s.b, kMinDisparity);
  return out;
}

// Log-space grounding: gamma minimizes the squared log residual between
// gamma * refined and the rendered disparity over mask=1 pixels, which gives
// gamma = exp(mean(log rendered - log refined)). The correction is applied to
// the whole refined map.
inline GroundingResult GroundDisparity(const DisparityMap& refined,
                                       const DisparityMap& rendered, const Mask& mask) {
  RequireSameShape(refined, rendered, "grounding refined/rendered");
  RequireSameShape(refined, mask, "grounding refined/mask");
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    if (!(refined[i] > 0.0) || !(rendered[i] > 0.0)) {
      throw Error(Errc::kNonPositiveDisparity, "non-positive disparity under the mask");
    }
    sum += std::log(rendered[i]) - std::log(refined[i]);
    ++n;
  }
  if (n == 0) throw Error(Errc::kEmptyMask, "no valid pixels to ground against");
  GroundingResult out;
  out.gamma = std::exp(sum / static_cast<double>(n));
  out.grounded = refined;
  for (double& d : out.grounded.values()) d *= out.gamma;
  return out;
}

}  // namespace pvg

#endif  // PVG_ALIGNMENT_HPP_
