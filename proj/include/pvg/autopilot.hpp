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

#ifndef PVG_AUTOPILOT_HPP_
#define PVG_AUTOPILOT_HPP_

#include <cmath>
#include <numbers>
#include <utility>

#include "pvg/error.hpp"
#include "pvg/frame.hpp"
#include "pvg/geometry.hpp"
#include "pvg/image.hpp"

namespace pvg {

struct AutopilotConfig {
  // Disparity below this is sky, above near_threshold is near.
  double sky_threshold = 0.05;
  double near_threshold = 0.5;
  double target_sky_fraction = 0.30;
  double near_fraction_limit = 0.20;
  // Fraction of the angular distance to the target covered per frame.
  double smoothing = 0.05;
  double step_distance = 0.1;
  // Horizontal sinusoidal look offset; amplitude 0 disables it.
  double meander_amplitude = 0.0;
  double meander_period = 200.0;
  double meander_phase = 0.0;
  // Proportional gains (radians per unit fraction error).
  double pitch_gain = 0.5;
  double yaw_gain = 0.5;
  // Elevation of the move target when climbing or descending.
  double climb_angle = 0.5;
  // Look elevation is kept within +/- this many radians of the horizon.
  double max_elevation = 1.2;
  Vec3 world_up = Vec3::UnitY();

  // Default meander: 0.3 rad amplitude, 200-frame period.
  static AutopilotConfig WithMeander(double phase = 0.0) {
    AutopilotConfig c;
    c.meander_amplitude = 0.3;
    c.meander_period = 200.0;
    c.meander_phase = phase;
    return c;
  }

  void Validate() const {
    auto fraction = [](double f) { return f > 0.0 && f < 1.0; };
    if (!(sky_threshold > 0.0 && sky_threshold < near_threshold)) {
      throw Error(Errc::kInvalidArgument, "need 0 < sky_threshold < near_threshold");
    }
    if (!fraction(target_sky_fraction) || !fraction(near_fraction_limit)) {
      throw Error(Errc::kInvalidArgument, "fractions must lie in (0, 1)");
    }
    if (!(smoothing > 0.0 && smoothing <= 1.0)) {
      throw Error(Errc::kInvalidArgument, "smoothing must lie in (0, 1]");
    }
    if (!(step_distance > 0.0)) {
      throw Error(Errc::kInvalidArgument, "step_distance must be positive");
    }
    if (!(meander_period > 0.0)) {
      throw Error(Errc::kInvalidArgument, "meander_period must be positive");
    }
    if (!(world_up.norm() > 0.0)) throw Error(Errc::kInvalidArgument, "zero world up");
  }
};

struct AutopilotState {
  Vec3 look = Vec3::UnitZ();
  Vec3 move = Vec3::UnitZ();
  long long frame = 0;

  // Starts by looking and moving along the camera's forward axis.
  static AutopilotState FromPose(const Pose& pose) {
    const Vec3 f = pose.Forward().normalized();
    return {f, f, 0};
  }
};

struct SkyClassification {
  double sky_fraction = 0.0;
  double near_fraction = 0.0;
  // Sky fractions of the left and right image halves.
  double sky_left = 0.0;
  double sky_right = 0.0;
  Mask sky_mask;
  Mask near_mask;
};

inline SkyClassification Classify(const DisparityMap& disparity,
                                  const AutopilotConfig& cfg = {}) {
  if (disparity.empty()) throw Error(Errc::kInvalidArgument, "empty disparity");
  SkyClassification c;
  c.sky_mask = Mask(disparity.width(), disparity.height(), 0);
  c.near_mask = Mask(disparity.width(), disparity.height(), 0);
  const int half = disparity.width() / 2;
  std::size_t sky = 0;
  std::size_t near = 0;
  std::size_t left = 0;
  std::size_t right = 0;
  for (int y = 0; y < disparity.height(); ++y) {
    for (int x = 0; x < disparity.width(); ++x) {
      const double d = disparity(x, y);
      if (!std::isfinite(d)) throw Error(Errc::kInvalidArgument, "non-finite disparity");
      if (d < cfg.sky_threshold) {
        c.sky_mask(x, y) = 1;
        ++sky;
        if (x < half) ++left;
        // The middle column of an odd-width image belongs to neither half.
        if (x >= disparity.width() - half) ++right;
      }
      if (d > cfg.near_threshold) {
        c.near_mask(x, y) = 1;
        ++near;
      }
    }
  }
  const double n = static_cast<double>(disparity.size());
  c.sky_fraction = static_cast<double>(sky) / n;
  c.near_fraction = static_cast<double>(near) / n;
  if (half > 0) {
    const double half_n = static_cast<double>(half) * disparity.height();
    c.sky_left = static_cast<double>(left) / half_n;
    c.sky_right = static_cast<double>(right) / half_n;
  }
  return c;
}

// Moves `current` the given fraction of the angle toward `target`.
inline Vec3 SmoothDirection(const Vec3& current, const Vec3& target, double fraction) {
  return Slerp(current, target, fraction);
}

namespace detail {

inline Vec3 Horizontal(const Vec3& v, const Vec3& up) {
  const Vec3 h = v - v.dot(up) * up;
  if (h.norm() < 1e-12) throw Error(Errc::kDegenerateLook, "look direction is vertical");
  return h.normalized();
}

inline Vec3 WithElevation(const Vec3& horizontal, const Vec3& up, double elevation) {
  return std::cos(elevation) * horizontal + std::sin(elevation) * up;
}

inline Vec3 ClampElevation(const Vec3& v, const Vec3& up, double max_elevation) {
  const double e = std::asin(std::clamp(v.normalized().dot(up), -1.0, 1.0));
  if (std::abs(e) <= max_elevation) return v.normalized();
  return WithElevation(Horizontal(v, up), up, std::copysign(max_elevation, e));
}

}  // namespace detail

// Targets computed for one frame, exposed for inspection.
struct AutopilotTargets {
  Vec3 look;
  Vec3 move;
  SkyClassification classification;
};

// Camera-relative look and move targets for the current frame:
//  - pitch down (up) in proportion to too much (too little) sky,
//  - yaw toward the image half with more sky,
//  - climb when too much is near, descend when little is near (below half the
//    limit), and otherwise head for the image point centered horizontally,
//    30% down from the top.
inline AutopilotTargets ComputeTargets(const AutopilotState& state, const Frame& frame,
                                       const AutopilotConfig& cfg) {
  cfg.Validate();
  const Vec3 up = cfg.world_up.normalized();
  AutopilotTargets t;
  t.classification = Classify(frame.disparity, cfg);
  const SkyClassification& c = t.classification;

  const double pitch = cfg.pitch_gain * (c.sky_fraction - cfg.target_sky_fraction);
  double yaw = cfg.yaw_gain * (c.sky_right - c.sky_left);
  if (cfg.meander_amplitude != 0.0) {
    yaw += cfg.meander_amplitude *
           std::sin(2.0 * std::numbers::pi * static_cast<double>(state.frame) /
                        cfg.meander_period +
                    cfg.meander_phase);
  }
  const Mat3& r = frame.pose.rotation;
  const Vec3 look_cam(std::sin(yaw) * std::cos(pitch), std::sin(pitch),
                      std::cos(yaw) * std::cos(pitch));
  t.look = detail::ClampElevation(r.transpose() * look_cam, up, cfg.max_elevation);

  if (c.near_fraction > cfg.near_fraction_limit) {
    t.move = detail::WithElevation(detail::Horizontal(state.look, up), up, cfg.climb_angle);
  } else if (c.near_fraction < 0.5 * cfg.near_fraction_limit) {
    t.move =
        detail::WithElevation(detail::Horizontal(state.look, up), up, -cfg.climb_angle);
  } else {
    const Intrinsics& k = frame.intrinsics;
    const double u = -0.5 + 0.5 * k.width;
    const double v = -0.5 + 0.3 * k.height;
    const Vec3 ray((u - k.cx) / k.fx, (v - k.cy) / k.fy, 1.0);
    t.move = (r.transpose() * ray).normalized();
  }
  return t;
}

// Advances the controller by one frame and returns the next camera pose:
// look and move directions move `smoothing` of the way to their targets, the
// camera steps `step_distance` along the move direction, and the rotation is
// rebuilt level with world up.
inline std::pair<AutopilotState, Pose> NextPose(const AutopilotState& state,
                                                const Frame& frame,
                                                const AutopilotConfig& cfg) {
  const AutopilotTargets t = ComputeTargets(state, frame, cfg);
  const Vec3 up = cfg.world_up.normalized();
  AutopilotState next;
  next.look = SmoothDirection(state.look, t.look, cfg.smoothing);
  next.move = SmoothDirection(state.move, t.move, cfg.smoothing);
  next.frame = state.frame + 1;
  if (!next.look.allFinite() || next.look.norm() < 1e-12) {
    throw Error(Errc::kDegenerateLook, "look direction collapsed");
  }
  const Vec3 center = frame.pose.Center() + cfg.step_distance * next.move;
  Mat3 rotation;
  try {
    rotation = LookRotation(next.look, up);
  } catch (const Error&) {
    throw Error(Errc::kDegenerateLook, "look direction parallel to world up");
  }
  return {next, Pose::FromCenter(rotation, center)};
}

// Level camera at `center` looking along `look`.
inline Pose LevelPose(const Vec3& center, const Vec3& look, const Vec3& up = Vec3::UnitY()) {
  return Pose::FromCenter(LookRotation(look, up), center);
}

}  // namespace pvg

#endif  // PVG_AUTOPILOT_HPP_
