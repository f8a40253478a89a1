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

#ifndef PVG_SEQUENCE_HPP_
#define PVG_SEQUENCE_HPP_

#include <algorithm>
#include <cmath>
#include <vector>

#include "pvg/error.hpp"
#include "pvg/frame.hpp"
#include "pvg/geometry.hpp"
#include "pvg/image.hpp"

namespace pvg {

// Half-open pixel rectangle [x0, x1) x [y0, y1).
struct CropRect {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  int width() const { return x1 - x0; }
  int height() const { return y1 - y0; }

  friend bool operator==(const CropRect&, const CropRect&) = default;
};

struct LetterboxResult {
  CropRect rect;
  Intrinsics intrinsics;
};

struct LetterboxConfig {
  double luma_threshold = 16.0 / 255.0;
  // Dark bands thinner than this are treated as image content.
  int min_band_rows = 4;
};

// Shifts the principal point into the cropped image; focal lengths keep
// their pixel values.
inline Intrinsics CropIntrinsics(const Intrinsics& k, const CropRect& r) {
  return {k.fx, k.fy, k.cx - r.x0, k.cy - r.y0, r.width(), r.height()};
}

template <typename T>
Grid<T> Crop(const Grid<T>& g, const CropRect& r) {
  if (r.x0 < 0 || r.y0 < 0 || r.x1 > g.width() || r.y1 > g.height() || r.x0 >= r.x1 ||
      r.y0 >= r.y1) {
    throw Error(Errc::kInvalidArgument, "crop rectangle outside the image");
  }
  Grid<T> out(r.width(), r.height());
  for (int y = r.y0; y < r.y1; ++y) {
    for (int x = r.x0; x < r.x1; ++x) out(x - r.x0, y - r.y0) = g(x, y);
  }
  return out;
}

// Finds black letterbox (top/bottom) and pillarbox (left/right) bands: runs
// of rows or columns whose maximum luma is below the threshold.
inline LetterboxResult DetectLetterbox(const Image& rgb, const Intrinsics& k,
                                       const LetterboxConfig& cfg = {}) {
  if (rgb.empty()) throw Error(Errc::kInvalidArgument, "empty image");
  const int w = rgb.width();
  const int h = rgb.height();
  std::vector<double> row_max(h, 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) row_max[y] = std::max(row_max[y], Luma(rgb(x, y)));
  }
  auto dark = [&](double v) { return v < cfg.luma_threshold; };
  if (std::all_of(row_max.begin(), row_max.end(), dark)) {
    throw Error(Errc::kFullyBlack, "no content above the luma threshold");
  }
  auto band = [&](int count) { return count >= cfg.min_band_rows ? count : 0; };

  int top = 0;
  while (top < h && dark(row_max[top])) ++top;
  int bottom = 0;
  while (bottom < h && dark(row_max[h - 1 - bottom])) ++bottom;
  CropRect r{0, band(top), w, h - band(bottom)};

  std::vector<double> col_max(w, 0.0);
  for (int y = r.y0; y < r.y1; ++y) {
    for (int x = 0; x < w; ++x) col_max[x] = std::max(col_max[x], Luma(rgb(x, y)));
  }
  int left = 0;
  while (left < w && dark(col_max[left])) ++left;
  int right = 0;
  while (right < w && dark(col_max[w - 1 - right])) ++right;
  r.x0 = band(left);
  r.x1 = w - band(right);
  if (r.x0 >= r.x1 || r.y0 >= r.y1) {
    throw Error(Errc::kFullyBlack, "crop would be empty");
  }
  return {r, CropIntrinsics(k, r)};
}

// Intrinsics of the same camera sampled at a new resolution; pixel centers
// stay aligned with the image corners.
inline Intrinsics ResizeIntrinsics(const Intrinsics& k, int width, int height) {
  const double sx = static_cast<double>(width) / k.width;
  const double sy = static_cast<double>(height) / k.height;
  return {k.fx * sx, k.fy * sy, (k.cx + 0.5) * sx - 0.5, (k.cy + 0.5) * sy - 0.5, width,
          height};
}

// Bilinear resampling with corner-aligned pixel centers.
template <typename T>
Grid<T> Resize(const Grid<T>& g, int width, int height) {
  if (g.empty() || width < 1 || height < 1) {
    throw Error(Errc::kInvalidArgument, "cannot resize an empty image");
  }
  const double sx = static_cast<double>(g.width()) / width;
  const double sy = static_cast<double>(g.height()) / height;
  Grid<T> out(width, height, g[0]);
  for (int y = 0; y < height; ++y) {
    const double v = std::clamp((y + 0.5) * sy - 0.5, 0.0, g.height() - 1.0);
    const int y0 = std::min(static_cast<int>(v), g.height() - 1);
    const int y1 = std::min(y0 + 1, g.height() - 1);
    const double fy = v - y0;
    for (int x = 0; x < width; ++x) {
      const double u = std::clamp((x + 0.5) * sx - 0.5, 0.0, g.width() - 1.0);
      const int x0 = std::min(static_cast<int>(u), g.width() - 1);
      const int x1 = std::min(x0 + 1, g.width() - 1);
      const double fx = u - x0;
      out(x, y) = (1 - fy) * ((1 - fx) * g(x0, y0) + fx * g(x1, y0)) +
                  fy * ((1 - fx) * g(x0, y1) + fx * g(x1, y1));
    }
  }
  return out;
}

inline Mask ResizeNearest(const Mask& m, int width, int height) {
  if (m.empty() || width < 1 || height < 1) {
    throw Error(Errc::kInvalidArgument, "cannot resize an empty mask");
  }
  Mask out(width, height, 0);
  for (int y = 0; y < height; ++y) {
    const int sy = std::min(static_cast<int>((y + 0.5) * m.height() / height), m.height() - 1);
    for (int x = 0; x < width; ++x) {
      const int sx = std::min(static_cast<int>((x + 0.5) * m.width() / width), m.width() - 1);
      out(x, y) = m(sx, sy);
    }
  }
  return out;
}

// Per-step camera-center distances.
inline std::vector<double> SpeedProfile(const Trajectory& traj) {
  std::vector<double> out;
  for (std::size_t i = 1; i < traj.size(); ++i) {
    out.push_back((traj[i].pose.Center() - traj[i - 1].pose.Center()).norm());
  }
  return out;
}

// Every stride-th entry starting at 0.
inline Trajectory Subsample(const Trajectory& traj, int stride) {
  if (stride < 1) throw Error(Errc::kInvalidArgument, "stride must be >= 1");
  std::vector<TrajectoryEntry> out;
  for (std::size_t i = 0; i < traj.size(); i += static_cast<std::size_t>(stride)) {
    out.push_back(traj[i]);
  }
  return Trajectory(std::move(out));
}

// Depth at the given percentile over positive-disparity pixels.
inline double DepthPercentile(const DisparityMap& disparity, double percentile) {
  std::vector<double> depths;
  for (double d : disparity.values()) {
    if (d > 0.0 && std::isfinite(d)) depths.push_back(1.0 / d);
  }
  if (depths.empty()) throw Error(Errc::kNonPositiveDisparity, "no positive disparity");
  const auto idx = static_cast<std::size_t>(
      std::floor(std::clamp(percentile, 0.0, 1.0) * (depths.size() - 1)));
  std::nth_element(depths.begin(), depths.begin() + idx, depths.end());
  return depths[idx];
}

// Divides all translations by the 80th-percentile depth of the first frame,
// putting sequences with different scene scales on a common footing.
inline Trajectory ScaleNormalize(const Trajectory& traj, const DisparityMap& first_disparity) {
  const double scale = DepthPercentile(first_disparity, 0.8);
  std::vector<TrajectoryEntry> out(traj.begin(), traj.end());
  for (TrajectoryEntry& e : out) e.pose.translation /= scale;
  return Trajectory(std::move(out));
}

// Mean camera-center distance between consecutive poses at the given stride.
inline double MeanStrideSpeed(const Trajectory& traj, int stride) {
  double sum = 0.0;
  int n = 0;
  for (std::size_t i = static_cast<std::size_t>(stride); i < traj.size();
       i += static_cast<std::size_t>(stride)) {
    sum += (traj[i].pose.Center() - traj[i - stride].pose.Center()).norm();
    ++n;
  }
  return n > 0 ? sum / n : 0.0;
}

// All strides whose subsampled mean speed lies in [lo, hi].
inline std::vector<int> NormalizeSpeed(const Trajectory& traj, double lo, double hi) {
  if (traj.size() < 2) throw Error(Errc::kInvalidArgument, "need at least 2 poses");
  if (!(lo <= hi)) throw Error(Errc::kInvalidArgument, "speed range has lo > hi");
  std::vector<int> strides;
  for (int k = 1; k < static_cast<int>(traj.size()); ++k) {
    const double v = MeanStrideSpeed(traj, k);
    if (v >= lo && v <= hi) strides.push_back(k);
  }
  if (strides.empty()) {
    throw Error(Errc::kNoValidStride, "no stride reaches the target speed range");
  }
  return strides;
}

// Fraction of the frame's valid pixels that land inside the image of a
// camera at `future` (occlusion ignored).
inline double VisibilityFraction(const Frame& frame, const Pose& future, const Intrinsics& k) {
  const Pose rel = RelativeTransform(frame.pose, future);
  std::size_t total = 0;
  std::size_t visible = 0;
  for (int y = 0; y < frame.height(); ++y) {
    for (int x = 0; x < frame.width(); ++x) {
      const double d = frame.disparity(x, y);
      if (!frame.mask(x, y) || !(d > 0.0)) continue;
      ++total;
      const Vec3 p = rel.Apply(Unproject(frame.intrinsics, x, y, d));
      if (!(p.z() > 0.0)) continue;
      const Projection q = Project(k, p);
      if (k.Contains(q.u, q.v)) ++visible;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(visible) / static_cast<double>(total);
}

}  // namespace pvg

#endif  // PVG_SEQUENCE_HPP_
